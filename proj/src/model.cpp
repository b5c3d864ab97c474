#include "fogsim/model.hpp"

#include <algorithm>

namespace fogsim {

ResourceVector operator+(const ResourceVector& a, const ResourceVector& b) {
    return ResourceVector{a.cpu + b.cpu,
                          a.ram_mb + b.ram_mb,
                          a.storage_mb + b.storage_mb,
                          a.energy_units + b.energy_units,
                          a.bandwidth_mbps + b.bandwidth_mbps};
}

ResourceVector component_max(const ResourceVector& a, const ResourceVector& b) {
    return ResourceVector{std::max(a.cpu, b.cpu),
                          std::max(a.ram_mb, b.ram_mb),
                          std::max(a.storage_mb, b.storage_mb),
                          std::max(a.energy_units, b.energy_units),
                          std::max(a.bandwidth_mbps, b.bandwidth_mbps)};
}

bool is_nonnegative(const ResourceVector& v) {
    return v.cpu >= 0 && v.ram_mb >= 0 && v.storage_mb >= 0 && v.energy_units >= 0 &&
           v.bandwidth_mbps >= 0;
}

bool resource_fits(const ResourceVector& demand, const ResourceVector& capacity) {
    return demand.cpu <= capacity.cpu && demand.ram_mb <= capacity.ram_mb &&
           demand.storage_mb <= capacity.storage_mb &&
           demand.energy_units <= capacity.energy_units &&
           demand.bandwidth_mbps <= capacity.bandwidth_mbps;
}

std::string to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::mobile: return "mobile";
        case NodeKind::drone: return "drone";
        case NodeKind::streetlight: return "streetlight";
        case NodeKind::raspberry_pi: return "raspberry_pi";
        case NodeKind::cloud: return "cloud";
        case NodeKind::generic: return "generic";
    }
    return "generic";
}

std::optional<NodeKind> node_kind_from_string(const std::string& s) {
    if (s == "mobile") return NodeKind::mobile;
    if (s == "drone") return NodeKind::drone;
    if (s == "streetlight") return NodeKind::streetlight;
    if (s == "raspberry_pi") return NodeKind::raspberry_pi;
    if (s == "cloud") return NodeKind::cloud;
    if (s == "generic") return NodeKind::generic;
    return std::nullopt;
}

const Node* Topology::find_node(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const Link* Topology::find_link(const std::string& from, const std::string& to) const {
    for (const auto& l : links)
        if (l.from == from && l.to == to) return &l;
    return nullptr;
}

std::string to_string(StageKind kind) {
    switch (kind) {
        case StageKind::source: return "source";
        case StageKind::transform: return "transform";
        case StageKind::learn: return "learn";
        case StageKind::join: return "join";
        case StageKind::sink: return "sink";
    }
    return "transform";
}

std::optional<StageKind> stage_kind_from_string(const std::string& s) {
    if (s == "source") return StageKind::source;
    if (s == "transform") return StageKind::transform;
    if (s == "learn") return StageKind::learn;
    if (s == "join") return StageKind::join;
    if (s == "sink") return StageKind::sink;
    return std::nullopt;
}

std::string to_string(DataMode mode) {
    switch (mode) {
        case DataMode::ratio: return "ratio";
        case DataMode::absolute: return "absolute";
        case DataMode::passthrough: return "passthrough";
    }
    return "passthrough";
}

std::optional<DataMode> data_mode_from_string(const std::string& s) {
    if (s == "ratio") return DataMode::ratio;
    if (s == "absolute") return DataMode::absolute;
    if (s == "passthrough") return DataMode::passthrough;
    return std::nullopt;
}

double DataProfile::output_for(double input_mb) const {
    switch (mode) {
        case DataMode::ratio: return value * input_mb;
        case DataMode::absolute: return value;
        case DataMode::passthrough: return input_mb;
    }
    return input_mb;
}

const Microservice* ServiceGraph::find(const std::string& ms_id) const {
    for (const auto& ms : microservices)
        if (ms.id == ms_id) return &ms;
    return nullptr;
}

namespace {

std::map<std::string, std::size_t> index_by_id(const ServiceGraph& graph) {
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < graph.microservices.size(); ++i)
        idx.emplace(graph.microservices[i].id, i);
    return idx;
}

}  // namespace

std::optional<std::vector<std::size_t>> topological_order(const ServiceGraph& graph) {
    const auto idx = index_by_id(graph);
    if (idx.size() != graph.microservices.size()) return std::nullopt;  // duplicate ids

    const std::size_t n = graph.microservices.size();
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> succ(n);
    for (const auto& e : graph.edges) {
        auto f = idx.find(e.from);
        auto t = idx.find(e.to);
        if (f == idx.end() || t == idx.end()) return std::nullopt;
        succ[f->second].push_back(t->second);
        ++indegree[t->second];
    }

    // smallest id first keeps the order deterministic
    std::set<std::pair<std::string, std::size_t>> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.emplace(graph.microservices[i].id, i);

    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        auto [id, i] = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (std::size_t s : succ[i])
            if (--indegree[s] == 0) ready.emplace(graph.microservices[s].id, s);
    }
    if (order.size() != n) return std::nullopt;
    return order;
}

ValidationReport validate_graph(const ServiceGraph& graph) {
    ValidationReport report;
    auto add = [&report](std::string code, std::string detail, std::vector<std::string> ids = {}) {
        report.violations.push_back({std::move(code), std::move(detail), std::move(ids)});
    };

    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < graph.microservices.size(); ++i) {
        const auto& ms = graph.microservices[i];
        if (!idx.emplace(ms.id, i).second)
            add("duplicate_id", "microservice id appears more than once", {ms.id});
        if (!is_nonnegative(ms.demand))
            add("negative_demand", "demand has a negative component", {ms.id});
    }

    bool edges_ok = true;
    std::set<std::pair<std::string, std::string>> seen_edges;
    for (const auto& e : graph.edges) {
        if (!idx.count(e.from) || !idx.count(e.to)) {
            add("dangling_edge", "edge endpoint does not exist", {e.from, e.to});
            edges_ok = false;
            continue;
        }
        if (!seen_edges.emplace(e.from, e.to).second)
            add("duplicate_edge", "more than one edge between the same stages", {e.from, e.to});
    }

    if (graph.microservices.empty()) {
        add("no_sink", "graph has no stages");
        return report;
    }
    if (!edges_ok || idx.size() != graph.microservices.size())
        return report;  // degree analysis would be misleading

    const std::size_t n = graph.microservices.size();
    std::vector<std::size_t> indegree(n, 0), outdegree(n, 0);
    for (const auto& e : graph.edges) {
        ++outdegree[idx[e.from]];
        ++indegree[idx[e.to]];
    }

    auto order = topological_order(graph);
    if (!order) {
        // everything still blocked after peeling the acyclic part is on or
        // behind a cycle
        std::vector<std::size_t> deg = indegree;
        std::set<std::size_t> removed;
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (removed.count(i) || deg[i] != 0) continue;
                removed.insert(i);
                changed = true;
                for (const auto& e : graph.edges)
                    if (idx[e.from] == i) --deg[idx[e.to]];
            }
        }
        std::vector<std::string> cyclic;
        for (std::size_t i = 0; i < n; ++i)
            if (!removed.count(i)) cyclic.push_back(graph.microservices[i].id);
        std::sort(cyclic.begin(), cyclic.end());
        add("cycle", "graph contains a cycle", cyclic);
    }

    std::vector<std::string> terminals;
    for (std::size_t i = 0; i < n; ++i)
        if (outdegree[i] == 0) terminals.push_back(graph.microservices[i].id);
    if (terminals.size() > 1)
        add("multiple_sinks", "graph must have exactly one terminal stage", terminals);
    else if (terminals.empty())
        add("no_sink", "graph has no terminal stage");

    for (std::size_t i = 0; i < n; ++i) {
        const auto& ms = graph.microservices[i];
        switch (ms.stage) {
            case StageKind::source:
                if (indegree[i] != 0)
                    add("source_has_inputs", "source stages accept no inputs", {ms.id});
                break;
            case StageKind::sink:
                if (outdegree[i] != 0)
                    add("sink_has_outputs", "sink stages produce no outputs", {ms.id});
                break;
            case StageKind::join:
                if (indegree[i] < 2)
                    add("join_indegree", "join stages need at least two inputs", {ms.id});
                break;
            default: break;
        }
    }

    if (order) {
        // reachability from the source set
        std::vector<bool> reached(n, false);
        for (std::size_t i = 0; i < n; ++i)
            if (graph.microservices[i].stage == StageKind::source) reached[i] = true;
        for (std::size_t i : *order) {
            if (!reached[i]) continue;
            for (const auto& e : graph.edges)
                if (idx[e.from] == i) reached[idx[e.to]] = true;
        }
        std::vector<std::string> unreachable;
        for (std::size_t i = 0; i < n; ++i)
            if (!reached[i] && graph.microservices[i].stage != StageKind::source)
                unreachable.push_back(graph.microservices[i].id);
        std::sort(unreachable.begin(), unreachable.end());
        if (!unreachable.empty())
            add("unreachable", "stages not reachable from any source", unreachable);
    }

    return report;
}

}  // namespace fogsim
