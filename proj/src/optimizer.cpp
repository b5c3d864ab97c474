#include "fogsim/optimizer.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <future>
#include <limits>

#include "fogsim/errors.hpp"

namespace fogsim {

std::string to_string(Objective objective) {
    switch (objective) {
        case Objective::total_time_sequential: return "total-time";
        case Objective::total_time_critical_path: return "critical-path";
        case Objective::dc_bytes: return "dc-bytes";
    }
    return "total-time";
}

std::optional<Objective> objective_from_string(const std::string& s) {
    if (s == "total-time") return Objective::total_time_sequential;
    if (s == "critical-path") return Objective::total_time_critical_path;
    if (s == "dc-bytes") return Objective::dc_bytes;
    return std::nullopt;
}

std::string to_string(OptimizeMethod method) {
    return method == OptimizeMethod::exhaustive ? "exhaustive" : "greedy";
}

std::optional<OptimizeMethod> optimize_method_from_string(const std::string& s) {
    if (s == "exhaustive") return OptimizeMethod::exhaustive;
    if (s == "greedy") return OptimizeMethod::greedy;
    return std::nullopt;
}

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

// Precomputed per-instance tables. All folds over these tables walk the
// same canonical orders as evaluate(), so a fully assigned partial value
// is bit-identical to the cost engine's result.
struct SearchTables {
    const ServiceGraph* graph = nullptr;
    const Topology* topology = nullptr;
    Objective objective = Objective::total_time_sequential;
    ResidencyRule residency = ResidencyRule::sum_demands;

    std::size_t n_ms = 0;
    std::size_t n_nodes = 0;
    std::vector<std::size_t> topo;        // canonical stage order (ms indices)
    std::vector<std::size_t> edge_order;  // canonical edge order (edge indices)
    std::vector<std::size_t> edge_from;   // ms index per edge
    std::vector<std::size_t> edge_to;
    std::vector<char> is_dt;  // per ms: counts toward dt_seconds
    std::vector<char> is_ml;
    std::vector<double> stage_secs;   // [ms * n_nodes + node]
    std::vector<double> edge_bytes;   // per edge, output_mb * 1e6
    std::vector<double> edge_secs;    // [edge * n_nodes^2 + from * n_nodes + to]
    std::vector<char> link_ok;        // [from * n_nodes + to]
    std::vector<char> cap_ok;         // [ms * n_nodes + node]
    std::vector<std::size_t> assign_order;  // ms indices sorted by id
    std::vector<std::size_t> node_order;    // node indices sorted by id

    double stage_seconds(std::size_t ms, std::size_t node) const {
        return stage_secs[ms * n_nodes + node];
    }
    double edge_seconds(std::size_t edge, std::size_t from, std::size_t to) const {
        return edge_secs[edge * n_nodes * n_nodes + from * n_nodes + to];
    }
};

SearchTables build_tables(const ServiceGraph& graph,
                          const Topology& topology,
                          Objective objective,
                          ResidencyRule residency) {
    SearchTables t;
    t.graph = &graph;
    t.topology = &topology;
    t.objective = objective;
    t.residency = residency;
    t.n_ms = graph.microservices.size();
    t.n_nodes = topology.nodes.size();

    auto order = topological_order(graph);
    if (!order) throw InvalidGraphError("graph '" + graph.id + "' is not a DAG");
    t.topo = *order;

    std::map<std::string, std::size_t> ms_index, node_index, topo_pos;
    for (std::size_t i = 0; i < t.n_ms; ++i) ms_index.emplace(graph.microservices[i].id, i);
    for (std::size_t i = 0; i < t.n_nodes; ++i) node_index.emplace(topology.nodes[i].id, i);
    for (std::size_t p = 0; p < t.topo.size(); ++p)
        topo_pos.emplace(graph.microservices[t.topo[p]].id, p);

    const auto flows = propagate_sizes(graph);

    t.is_dt.resize(t.n_ms, 0);
    t.is_ml.resize(t.n_ms, 0);
    t.stage_secs.assign(t.n_ms * t.n_nodes, 0.0);
    t.cap_ok.assign(t.n_ms * t.n_nodes, 0);
    for (std::size_t i = 0; i < t.n_ms; ++i) {
        const Microservice& ms = graph.microservices[i];
        t.is_dt[i] = ms.stage == StageKind::transform || ms.stage == StageKind::source ||
                     ms.stage == StageKind::join;
        t.is_ml[i] = ms.stage == StageKind::learn;
        for (std::size_t v = 0; v < t.n_nodes; ++v) {
            const Node& node = topology.nodes[v];
            if (ms.stage != StageKind::sink)
                t.stage_secs[i * t.n_nodes + v] = stage_time(ms, node, flows.at(ms.id).input_mb);
            bool ok = true;
            for (const auto& cap : ms.required_capabilities)
                ok = ok && node.capabilities.count(cap) > 0;
            t.cap_ok[i * t.n_nodes + v] = ok;
        }
    }

    t.link_ok.assign(t.n_nodes * t.n_nodes, 0);
    for (std::size_t f = 0; f < t.n_nodes; ++f) {
        for (std::size_t v = 0; v < t.n_nodes; ++v) {
            t.link_ok[f * t.n_nodes + v] =
                f == v || topology.find_link(topology.nodes[f].id, topology.nodes[v].id);
        }
    }

    const std::size_t n_edges = graph.edges.size();
    t.edge_from.resize(n_edges);
    t.edge_to.resize(n_edges);
    t.edge_bytes.resize(n_edges);
    t.edge_secs.assign(n_edges * t.n_nodes * t.n_nodes, 0.0);
    for (std::size_t e = 0; e < n_edges; ++e) {
        t.edge_from[e] = ms_index.at(graph.edges[e].from);
        t.edge_to[e] = ms_index.at(graph.edges[e].to);
        const double out_mb = flows.at(graph.edges[e].from).output_mb;
        t.edge_bytes[e] = out_mb * 1e6;
        for (std::size_t f = 0; f < t.n_nodes; ++f) {
            for (std::size_t v = 0; v < t.n_nodes; ++v) {
                if (f == v) continue;
                const Link* link = topology.find_link(topology.nodes[f].id, topology.nodes[v].id);
                t.edge_secs[e * t.n_nodes * t.n_nodes + f * t.n_nodes + v] =
                    link ? transfer_time(out_mb, *link) : std::numeric_limits<double>::infinity();
            }
        }
    }

    t.edge_order.resize(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e) t.edge_order[e] = e;
    std::sort(t.edge_order.begin(), t.edge_order.end(), [&](std::size_t a, std::size_t b) {
        const auto ka =
            std::pair(topo_pos.at(graph.edges[a].from), topo_pos.at(graph.edges[a].to));
        const auto kb =
            std::pair(topo_pos.at(graph.edges[b].from), topo_pos.at(graph.edges[b].to));
        return ka < kb;
    });

    t.assign_order.resize(t.n_ms);
    for (std::size_t i = 0; i < t.n_ms; ++i) t.assign_order[i] = i;
    std::sort(t.assign_order.begin(), t.assign_order.end(), [&](std::size_t a, std::size_t b) {
        return graph.microservices[a].id < graph.microservices[b].id;
    });

    t.node_order.resize(t.n_nodes);
    for (std::size_t i = 0; i < t.n_nodes; ++i) t.node_order[i] = i;
    std::sort(t.node_order.begin(), t.node_order.end(), [&](std::size_t a, std::size_t b) {
        return topology.nodes[a].id < topology.nodes[b].id;
    });

    return t;
}

// Objective value of the assigned subset, folded in canonical order. A
// lower bound of every completion: unassigned stages and edges only add
// nonnegative terms. At a total assignment this equals evaluate() exactly.
double partial_objective(const SearchTables& t, const std::vector<std::size_t>& assign) {
    if (t.objective == Objective::dc_bytes) {
        double bytes = 0.0;
        for (std::size_t e : t.edge_order) {
            const std::size_t f = assign[t.edge_from[e]];
            const std::size_t v = assign[t.edge_to[e]];
            if (f == kUnassigned || v == kUnassigned || f == v) continue;
            bytes += t.edge_bytes[e];
        }
        return bytes;
    }

    if (t.objective == Objective::total_time_sequential) {
        double dt = 0.0, ml = 0.0;
        for (std::size_t i : t.topo) {
            if (assign[i] == kUnassigned) continue;
            const double s = t.stage_seconds(i, assign[i]);
            if (t.is_dt[i])
                dt += s;
            else if (t.is_ml[i])
                ml += s;
        }
        double dc = 0.0;
        for (std::size_t e : t.edge_order) {
            const std::size_t f = assign[t.edge_from[e]];
            const std::size_t v = assign[t.edge_to[e]];
            if (f == kUnassigned || v == kUnassigned || f == v) continue;
            dc += t.edge_seconds(e, f, v);
        }
        return dt + ml + dc;
    }

    // critical path over the induced assigned subgraph, mirroring the
    // grouped-path recurrence in evaluate()
    struct PathCost {
        double dt = 0.0, ml = 0.0, dc = 0.0;
        double total() const { return dt + ml + dc; }
    };
    std::vector<PathCost> best(t.n_ms);
    PathCost critical{};
    for (std::size_t i : t.topo) {
        if (assign[i] == kUnassigned) continue;
        PathCost incoming{};
        bool first = true;
        for (std::size_t e : t.edge_order) {
            if (t.edge_to[e] != i) continue;
            const std::size_t from = t.edge_from[e];
            if (assign[from] == kUnassigned) continue;
            PathCost candidate = best[from];
            if (assign[from] != assign[i])
                candidate.dc += t.edge_seconds(e, assign[from], assign[i]);
            if (first || candidate.total() > incoming.total()) {
                incoming = candidate;
                first = false;
            }
        }
        const double s = t.stage_seconds(i, assign[i]);
        if (t.is_dt[i])
            incoming.dt += s;
        else if (t.is_ml[i])
            incoming.ml += s;
        best[i] = incoming;
        if (incoming.total() > critical.total()) critical = incoming;
    }
    return critical.total();
}

// Capacity check for one node, folding demands in graph order exactly like
// check_feasible so the search never disagrees with the final verdict.
bool node_load_fits(const SearchTables& t,
                    const std::vector<std::size_t>& assign,
                    std::size_t node) {
    const Node& n = t.topology->nodes[node];
    ResourceVector load{};
    bool any = false;
    for (std::size_t i = 0; i < t.n_ms; ++i) {
        if (assign[i] != node) continue;
        const ResourceVector& d = t.graph->microservices[i].demand;
        if (!any) {
            load = d;
            any = true;
        } else {
            load = t.residency == ResidencyRule::sum_demands ? load + d : component_max(load, d);
        }
    }
    return !any || resource_fits(load, n.capacity);
}

bool commit_feasible(const SearchTables& t,
                     const std::vector<std::size_t>& assign,
                     std::size_t ms,
                     std::size_t node) {
    if (!t.cap_ok[ms * t.n_nodes + node]) return false;
    for (std::size_t e = 0; e < t.edge_from.size(); ++e) {
        if (t.edge_from[e] == ms && assign[t.edge_to[e]] != kUnassigned &&
            !t.link_ok[node * t.n_nodes + assign[t.edge_to[e]]])
            return false;
        if (t.edge_to[e] == ms && assign[t.edge_from[e]] != kUnassigned &&
            !t.link_ok[assign[t.edge_from[e]] * t.n_nodes + node])
            return false;
    }
    return node_load_fits(t, assign, node);
}

struct BranchResult {
    bool found = false;
    double value = 0.0;
    std::vector<std::size_t> assign;
    std::uint64_t explored = 0;
};

// Depth-first search below a fixed first-stage assignment. The incumbent
// is local to the branch, which keeps serial and parallel runs identical.
void search_from(const SearchTables& t,
                 std::vector<std::size_t>& assign,
                 std::size_t depth,
                 BranchResult& result) {
    const std::size_t ms = t.assign_order[depth];
    const bool last = depth + 1 == t.n_ms;
    for (std::size_t node : t.node_order) {
        ++result.explored;
        assign[ms] = node;
        if (!commit_feasible(t, assign, ms, node)) {
            assign[ms] = kUnassigned;
            continue;
        }
        const double bound = partial_objective(t, assign);
        if (result.found && bound >= result.value) {
            assign[ms] = kUnassigned;
            continue;
        }
        if (last) {
            result.found = true;
            result.value = bound;
            result.assign = assign;
        } else {
            search_from(t, assign, depth + 1, result);
        }
        assign[ms] = kUnassigned;
    }
}

Placement to_placement(const SearchTables& t, const std::vector<std::size_t>& assign) {
    Placement placement;
    for (std::size_t i = 0; i < t.n_ms; ++i)
        placement.assignment.emplace(t.graph->microservices[i].id,
                                     t.topology->nodes[assign[i]].id);
    return placement;
}

TimingSemantics semantics_for(Objective objective) {
    return objective == Objective::total_time_critical_path ? TimingSemantics::critical_path
                                                            : TimingSemantics::sequential;
}

double objective_of(Objective objective, const CostBreakdown& cost) {
    return objective == Objective::dc_bytes ? cost.dc_bytes : cost.total_seconds;
}

OptimizeResult finish(const SearchTables& t,
                      const std::vector<std::size_t>& assign,
                      double search_value,
                      OptimizeMethod method,
                      std::uint64_t explored) {
    OptimizeResult result;
    result.placement = to_placement(t, assign);
    result.cost = evaluate(*t.graph, result.placement, *t.topology, semantics_for(t.objective),
                           t.residency);
    result.objective_value = objective_of(t.objective, result.cost);
    result.method = method;
    result.nodes_explored = explored;
    // the incremental folds must reproduce the cost engine bit for bit
    assert(result.objective_value == search_value);
    (void)search_value;
    return result;
}

OptimizeResult empty_graph_result(OptimizeMethod method) {
    OptimizeResult result;
    result.method = method;
    return result;
}

}  // namespace

OptimizeResult optimize_exhaustive(const ServiceGraph& graph,
                                   const Topology& topology,
                                   Objective objective,
                                   ResidencyRule residency,
                                   bool parallel) {
    if (graph.microservices.empty())
        return empty_graph_result(OptimizeMethod::exhaustive);
    if (topology.nodes.empty())
        throw NoFeasiblePlacementError("topology has no nodes");
    if (topology.nodes.size() > 1) {
        const double cost_bits =
            static_cast<double>(graph.microservices.size()) *
            std::log2(static_cast<double>(topology.nodes.size()));
        if (cost_bits > 40.0)
            throw SearchSpaceTooLargeError(
                "search space exceeds the 2^40 guard; use the greedy method");
    }

    const SearchTables t = build_tables(graph, topology, objective, residency);

    const std::size_t first = t.assign_order[0];
    auto run_branch = [&t, first](std::size_t node) {
        BranchResult branch;
        std::vector<std::size_t> assign(t.n_ms, kUnassigned);
        ++branch.explored;
        assign[first] = node;
        if (commit_feasible(t, assign, first, node)) {
            if (t.n_ms == 1) {
                branch.found = true;
                branch.value = partial_objective(t, assign);
                branch.assign = assign;
            } else {
                search_from(t, assign, 1, branch);
            }
        }
        return branch;
    };

    std::vector<BranchResult> branches;
    branches.reserve(t.n_nodes);
    if (parallel) {
        std::vector<std::future<BranchResult>> futures;
        futures.reserve(t.n_nodes);
        for (std::size_t node : t.node_order)
            futures.push_back(std::async(std::launch::async, run_branch, node));
        for (auto& f : futures) branches.push_back(f.get());
    } else {
        for (std::size_t node : t.node_order) branches.push_back(run_branch(node));
    }

    // deterministic reduction: branches are in first-stage node-id order,
    // so keeping the earliest strict minimum preserves the global tie-break
    const BranchResult* best = nullptr;
    std::uint64_t explored = 0;
    for (const auto& branch : branches) {
        explored += branch.explored;
        if (branch.found && (!best || branch.value < best->value)) best = &branch;
    }
    if (!best)
        throw NoFeasiblePlacementError("no feasible placement exists for graph '" + graph.id +
                                       "'");
    return finish(t, best->assign, best->value, OptimizeMethod::exhaustive, explored);
}

OptimizeResult optimize_greedy(const ServiceGraph& graph,
                               const Topology& topology,
                               Objective objective,
                               ResidencyRule residency) {
    if (graph.microservices.empty())
        return empty_graph_result(OptimizeMethod::greedy);
    if (topology.nodes.empty())
        throw GreedyDeadEndError("topology has no nodes");

    const SearchTables t = build_tables(graph, topology, objective, residency);

    std::vector<std::size_t> assign(t.n_ms, kUnassigned);
    std::uint64_t explored = 0;
    double value = 0.0;
    for (std::size_t i : t.topo) {
        bool found = false;
        std::size_t best_node = 0;
        double best_value = 0.0;
        for (std::size_t node : t.node_order) {
            ++explored;
            assign[i] = node;
            if (commit_feasible(t, assign, i, node)) {
                const double candidate = partial_objective(t, assign);
                if (!found || candidate < best_value) {
                    found = true;
                    best_node = node;
                    best_value = candidate;
                }
            }
            assign[i] = kUnassigned;
        }
        if (!found)
            throw GreedyDeadEndError("greedy search dead-ends at microservice '" +
                                     graph.microservices[i].id + "'");
        assign[i] = best_node;
        value = best_value;
    }
    return finish(t, assign, value, OptimizeMethod::greedy, explored);
}

}  // namespace fogsim
