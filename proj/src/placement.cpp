#include "fogsim/placement.hpp"

#include <array>
#include <tuple>
#include <map>

#include "fogsim/decomposition.hpp"
#include "fogsim/errors.hpp"

namespace fogsim {

std::string to_string(const Strategy& strategy) {
    switch (strategy.kind) {
        case StrategyKind::cloud: return "cloud";
        case StrategyKind::fog: return "fog";
        case StrategyKind::hybrid: return "hybrid";
        case StrategyKind::fog_plus_cloud: return "fog+cloud";
    }
    return "cloud";
}

std::optional<StrategyKind> strategy_kind_from_string(const std::string& s) {
    if (s == "cloud") return StrategyKind::cloud;
    if (s == "fog") return StrategyKind::fog;
    if (s == "hybrid") return StrategyKind::hybrid;
    if (s == "fog+cloud") return StrategyKind::fog_plus_cloud;
    return std::nullopt;
}

std::string to_string(ResidencyRule rule) {
    return rule == ResidencyRule::sum_demands ? "sum" : "peak_stage";
}

std::optional<ResidencyRule> residency_rule_from_string(const std::string& s) {
    if (s == "sum") return ResidencyRule::sum_demands;
    if (s == "peak_stage") return ResidencyRule::peak_stage;
    return std::nullopt;
}

namespace {

bool has_branch_suffix(const std::string& id, char branch) {
    return id.size() >= 2 && id[id.size() - 2] == '.' && id.back() == branch;
}

}  // namespace

std::pair<ServiceGraph, Placement> place(const Strategy& strategy,
                                         const ServiceGraph& graph,
                                         const RoleMap& roles,
                                         const Topology& topology,
                                         bool store_to_cloud) {
    for (const auto& [role, id] : {std::pair<const char*, const std::string&>{"fog_node", roles.fog_node},
                                   {"cloud_node", roles.cloud_node},
                                   {"source_node", roles.source_node}}) {
        if (!topology.find_node(id))
            throw RoleError(std::string(role) + " '" + id + "' is not a topology node");
    }
    if (roles.fog_node == roles.cloud_node)
        throw RoleError("fog_node and cloud_node must differ");

    ServiceGraph placed_graph =
        strategy.kind == StrategyKind::fog_plus_cloud ? split_transform(graph, strategy.theta) : graph;

    Placement placement;
    for (const auto& ms : placed_graph.microservices) {
        std::string node;
        switch (strategy.kind) {
            case StrategyKind::cloud:
                node = ms.stage == StageKind::source ? roles.source_node : roles.cloud_node;
                break;
            case StrategyKind::fog:
                node = (ms.stage == StageKind::sink && store_to_cloud) ? roles.cloud_node
                                                                       : roles.fog_node;
                break;
            case StrategyKind::hybrid:
                node = (ms.stage == StageKind::learn || ms.stage == StageKind::sink)
                           ? roles.cloud_node
                           : roles.fog_node;
                break;
            case StrategyKind::fog_plus_cloud:
                // sources stay with the fog prefix, branch ".2" work runs in
                // the cloud together with the join, learn and sink stages
                if (ms.stage == StageKind::source || has_branch_suffix(ms.id, '1'))
                    node = roles.fog_node;
                else
                    node = roles.cloud_node;
                break;
        }
        placement.assignment.emplace(ms.id, std::move(node));
    }
    return {std::move(placed_graph), std::move(placement)};
}

FeasibilityReport check_feasible(const Placement& placement,
                                 const ServiceGraph& graph,
                                 const Topology& topology,
                                 ResidencyRule residency) {
    FeasibilityReport report;
    auto add = [&report](std::string node, std::string dimension, std::string detail) {
        report.violations.push_back({std::move(node), std::move(dimension), std::move(detail)});
    };

    std::map<std::string, ResourceVector> load;
    for (const auto& ms : graph.microservices) {
        auto it = placement.assignment.find(ms.id);
        if (it == placement.assignment.end()) {
            add("", "unassigned_microservice", "microservice '" + ms.id + "' has no assignment");
            continue;
        }
        const Node* node = topology.find_node(it->second);
        if (!node) {
            add(it->second, "unknown_node",
                "microservice '" + ms.id + "' assigned to nonexistent node");
            continue;
        }

        auto [slot, inserted] = load.try_emplace(node->id, ms.demand);
        if (!inserted) {
            slot->second = residency == ResidencyRule::sum_demands
                               ? slot->second + ms.demand
                               : component_max(slot->second, ms.demand);
        }

        for (const auto& cap : ms.required_capabilities) {
            if (!node->capabilities.count(cap))
                add(node->id, "missing_capability",
                    "microservice '" + ms.id + "' requires capability '" + cap + "'");
        }
    }

    // compare accumulated load against capacity, per node in topology order
    for (const auto& node : topology.nodes) {
        auto it = load.find(node.id);
        if (it == load.end()) continue;
        const ResourceVector& used = it->second;
        const ResourceVector& cap = node.capacity;
        const std::array<std::tuple<const char*, double, double>, 5> dims = {{
            {"cpu", used.cpu, cap.cpu},
            {"ram_mb", used.ram_mb, cap.ram_mb},
            {"storage_mb", used.storage_mb, cap.storage_mb},
            {"energy_units", used.energy_units, cap.energy_units},
            {"bandwidth_mbps", used.bandwidth_mbps, cap.bandwidth_mbps},
        }};
        for (const auto& [name, demand, capacity] : dims) {
            if (demand > capacity)
                add(node.id, name,
                    "demand " + std::to_string(demand) + " exceeds capacity " +
                        std::to_string(capacity));
        }
    }

    for (const auto& e : graph.edges) {
        auto f = placement.assignment.find(e.from);
        auto t = placement.assignment.find(e.to);
        if (f == placement.assignment.end() || t == placement.assignment.end()) continue;
        if (f->second == t->second) continue;
        if (!topology.find_link(f->second, t->second))
            add(f->second, "missing_link",
                "edge " + e.from + "->" + e.to + " needs a link " + f->second + "->" +
                    t->second);
    }

    report.feasible = report.violations.empty();
    return report;
}

}  // namespace fogsim
