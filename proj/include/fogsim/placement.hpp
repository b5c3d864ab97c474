#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fogsim/model.hpp"

namespace fogsim {

enum class StrategyKind { cloud, fog, hybrid, fog_plus_cloud };

/// One of the four canonical placement architectures. theta only applies
/// to fog_plus_cloud and is the raw-data fraction transformed on the fog
/// side (default 0.7).
struct Strategy {
    StrategyKind kind = StrategyKind::cloud;
    double theta = 0.7;

    bool operator==(const Strategy&) const = default;
};

std::string to_string(const Strategy& strategy);
std::optional<StrategyKind> strategy_kind_from_string(const std::string& s);

/// Binds the abstract fog/cloud/source roles to concrete topology nodes.
struct RoleMap {
    std::string fog_node;
    std::string cloud_node;
    std::string source_node;

    bool operator==(const RoleMap&) const = default;
};

/// How co-resident stage demands are charged against a node's capacity:
/// sum_demands adds up every assigned stage (conservative), peak_stage
/// charges only the single largest demand.
enum class ResidencyRule { sum_demands, peak_stage };

std::string to_string(ResidencyRule rule);
std::optional<ResidencyRule> residency_rule_from_string(const std::string& s);

struct FeasibilityViolation {
    std::string node_id;
    std::string dimension;  // resource dimension, "missing_capability" or "missing_link"
    std::string detail;

    bool operator==(const FeasibilityViolation&) const = default;
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<FeasibilityViolation> violations;
};

/// Maps a graph onto nodes according to a canonical strategy:
///   cloud:     source stage -> source_node, everything else -> cloud_node
///   fog:       everything -> fog_node; the sink moves to cloud_node when
///              store_to_cloud is set (final transformed-data upload)
///   hybrid:    source/transform/join -> fog_node, learn/sink -> cloud_node
///   fog+cloud: splits the chain internally; sources and branch ".1"
///              transforms -> fog_node, branch ".2" transforms, join,
///              learn and sink -> cloud_node
/// Returns the (possibly split) graph the placement covers. Throws
/// RoleError for unknown role ids or fog_node == cloud_node, and
/// propagates InvalidGraphError when fog+cloud is applied to a non-chain.
std::pair<ServiceGraph, Placement> place(const Strategy& strategy,
                                         const ServiceGraph& graph,
                                         const RoleMap& roles,
                                         const Topology& topology,
                                         bool store_to_cloud = false);

/// Verifies capacity (per the residency rule), capability coverage and
/// link availability for every inter-node edge. The verdict is data; an
/// infeasible placement is not an error.
FeasibilityReport check_feasible(const Placement& placement,
                                 const ServiceGraph& graph,
                                 const Topology& topology,
                                 ResidencyRule residency = ResidencyRule::sum_demands);

}  // namespace fogsim
