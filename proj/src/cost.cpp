#include "fogsim/cost.hpp"

#include <algorithm>
#include <sstream>

#include "fogsim/errors.hpp"

namespace fogsim {

std::string to_string(TimingSemantics semantics) {
    return semantics == TimingSemantics::sequential ? "sequential" : "critical-path";
}

std::optional<TimingSemantics> timing_semantics_from_string(const std::string& s) {
    if (s == "sequential") return TimingSemantics::sequential;
    if (s == "critical-path") return TimingSemantics::critical_path;
    return std::nullopt;
}

double transfer_time(double size_mb, const Link& link) {
    return size_mb * 8.0 / link.bandwidth_mbps + link.latency_s;
}

double stage_time(const Microservice& ms, const Node& node, double input_mb) {
    return (ms.work.fixed_seconds + ms.work.seconds_per_mb * input_mb) / node.speed_factor;
}

namespace {

bool counts_as_dt(StageKind kind) {
    return kind == StageKind::transform || kind == StageKind::source || kind == StageKind::join;
}

// Per-path accumulator for the critical-path recurrence. total() uses the
// same (dt + ml) + dc grouping as the sequential breakdown so that a chain
// evaluates to bit-identical totals under both semantics.
struct PathCost {
    double dt = 0.0;
    double ml = 0.0;
    double dc = 0.0;

    double total() const { return dt + ml + dc; }
};

}  // namespace

std::map<std::string, SizeFlow> propagate_sizes(const ServiceGraph& graph) {
    auto order = topological_order(graph);
    if (!order) throw InvalidGraphError("graph '" + graph.id + "' is not a DAG");

    std::map<std::string, SizeFlow> flows;
    for (std::size_t i : *order) {
        const Microservice& ms = graph.microservices[i];
        double input = 0.0;
        if (ms.stage == StageKind::source) {
            input = graph.source_size_mb;
        } else {
            for (const auto& e : graph.edges)
                if (e.to == ms.id) input += flows.at(e.from).output_mb;
        }
        flows[ms.id] = {input, ms.data_out.output_for(input)};
    }
    return flows;
}

CostBreakdown evaluate(const ServiceGraph& graph,
                       const Placement& placement,
                       const Topology& topology,
                       TimingSemantics semantics,
                       ResidencyRule residency) {
    auto order = topological_order(graph);
    if (!order) throw InvalidGraphError("graph '" + graph.id + "' is not a DAG");

    const FeasibilityReport feasibility = check_feasible(placement, graph, topology, residency);
    if (!feasibility.feasible) {
        std::ostringstream msg;
        msg << "placement of graph '" << graph.id << "' is infeasible:";
        for (const auto& v : feasibility.violations)
            msg << " [" << v.node_id << " " << v.dimension << ": " << v.detail << "]";
        throw InfeasiblePlacementError(msg.str());
    }

    const auto flows = propagate_sizes(graph);

    std::map<std::string, std::size_t> pos_of;
    for (std::size_t p = 0; p < order->size(); ++p)
        pos_of.emplace(graph.microservices[(*order)[p]].id, p);

    // canonical edge order: by topological position of the endpoints; every
    // summation below walks edges in this order so that subsets of terms
    // (a single path) fold consistently with the full sums
    std::vector<std::size_t> edge_order(graph.edges.size());
    for (std::size_t i = 0; i < edge_order.size(); ++i) edge_order[i] = i;
    std::sort(edge_order.begin(), edge_order.end(), [&](std::size_t a, std::size_t b) {
        const auto ka = std::pair(pos_of.at(graph.edges[a].from), pos_of.at(graph.edges[a].to));
        const auto kb = std::pair(pos_of.at(graph.edges[b].from), pos_of.at(graph.edges[b].to));
        return ka < kb;
    });

    auto node_of = [&](const std::string& ms_id) -> const Node& {
        return *topology.find_node(placement.assignment.at(ms_id));
    };
    auto edge_seconds = [&](const GraphEdge& e) -> double {
        const std::string& from_node = placement.assignment.at(e.from);
        const std::string& to_node = placement.assignment.at(e.to);
        if (from_node == to_node) return 0.0;
        const Link* link = topology.find_link(from_node, to_node);
        if (!link)
            throw MissingLinkError("no link " + from_node + "->" + to_node + " for edge " +
                                   e.from + "->" + e.to);
        return transfer_time(flows.at(e.from).output_mb, *link);
    };

    CostBreakdown cost;
    std::vector<double> stage_seconds(graph.microservices.size(), 0.0);
    for (std::size_t i : *order) {
        const Microservice& ms = graph.microservices[i];
        if (ms.stage == StageKind::sink) continue;
        const double seconds = stage_time(ms, node_of(ms.id), flows.at(ms.id).input_mb);
        stage_seconds[i] = seconds;
        if (counts_as_dt(ms.stage))
            cost.dt_seconds += seconds;
        else if (ms.stage == StageKind::learn)
            cost.ml_seconds += seconds;
    }

    std::vector<double> edge_transfer(graph.edges.size(), 0.0);
    for (std::size_t ei : edge_order) {
        const GraphEdge& e = graph.edges[ei];
        const bool cut = placement.assignment.at(e.from) != placement.assignment.at(e.to);
        edge_transfer[ei] = edge_seconds(e);
        if (cut) {
            cost.dc_seconds += edge_transfer[ei];
            cost.dc_bytes += flows.at(e.from).output_mb * 1e6;
        }
    }

    if (semantics == TimingSemantics::sequential) {
        cost.total_seconds = cost.dt_seconds + cost.ml_seconds + cost.dc_seconds;
        return cost;
    }

    // longest path, carrying the grouped (dt, ml, dc) components so the
    // path total is comparable with (and never exceeds) the sequential sum
    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < graph.microservices.size(); ++i)
        index_of.emplace(graph.microservices[i].id, i);

    std::vector<PathCost> best(graph.microservices.size());
    PathCost critical{};
    for (std::size_t p = 0; p < order->size(); ++p) {
        const std::size_t i = (*order)[p];
        const Microservice& ms = graph.microservices[i];

        PathCost incoming{};
        bool first = true;
        for (std::size_t ei : edge_order) {
            const GraphEdge& e = graph.edges[ei];
            if (e.to != ms.id) continue;
            PathCost candidate = best[index_of.at(e.from)];
            candidate.dc += edge_transfer[ei];
            if (first || candidate.total() > incoming.total()) {
                incoming = candidate;
                first = false;
            }
        }

        if (ms.stage != StageKind::sink) {
            if (counts_as_dt(ms.stage))
                incoming.dt += stage_seconds[i];
            else if (ms.stage == StageKind::learn)
                incoming.ml += stage_seconds[i];
        }
        best[i] = incoming;
        if (incoming.total() > critical.total()) critical = incoming;
    }
    cost.total_seconds = critical.total();
    return cost;
}

}  // namespace fogsim
