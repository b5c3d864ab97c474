#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fogsim/cost.hpp"
#include "fogsim/model.hpp"
#include "fogsim/placement.hpp"

namespace fogsim {

enum class Objective { total_time_sequential, total_time_critical_path, dc_bytes };

std::string to_string(Objective objective);
std::optional<Objective> objective_from_string(const std::string& s);

enum class OptimizeMethod { exhaustive, greedy };

std::string to_string(OptimizeMethod method);
std::optional<OptimizeMethod> optimize_method_from_string(const std::string& s);

struct OptimizeResult {
    Placement placement;
    CostBreakdown cost;          // evaluated under the objective's timing semantics
    double objective_value = 0.0;
    OptimizeMethod method = OptimizeMethod::exhaustive;
    std::uint64_t nodes_explored = 0;
};

/// Branch-and-bound search over every total assignment, pruning partial
/// assignments whose lower bound cannot beat the incumbent. Returns the
/// feasible placement minimizing the objective; ties resolve to the
/// lexicographically smallest (microservice id, node id) assignment
/// vector. The search space is guarded by |microservices| * log2(|nodes|)
/// <= 40.
///
/// With parallel set, the candidate assignments of the first stage are
/// searched concurrently; each branch keeps its own incumbent, so the
/// result and nodes_explored are identical to the serial run.
///
/// Throws NoFeasiblePlacementError and SearchSpaceTooLargeError.
OptimizeResult optimize_exhaustive(const ServiceGraph& graph,
                                   const Topology& topology,
                                   Objective objective,
                                   ResidencyRule residency = ResidencyRule::sum_demands,
                                   bool parallel = false);

/// Assigns stages in topological order, each to the feasible node with the
/// smallest marginal objective increase given the already-fixed
/// predecessors (ties to the smallest node id). A stage with no feasible
/// node is a GreedyDeadEndError even when a feasible global placement
/// exists.
OptimizeResult optimize_greedy(const ServiceGraph& graph,
                               const Topology& topology,
                               Objective objective,
                               ResidencyRule residency = ResidencyRule::sum_demands);

}  // namespace fogsim
