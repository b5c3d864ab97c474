#pragma once

#include <map>
#include <optional>
#include <string>

#include "fogsim/model.hpp"
#include "fogsim/placement.hpp"

namespace fogsim {

/// sequential sums every stage and transfer; critical_path reports the
/// longest stage-plus-transfer path while the dt/ml/dc fields still carry
/// the sums.
enum class TimingSemantics { sequential, critical_path };

std::string to_string(TimingSemantics semantics);
std::optional<TimingSemantics> timing_semantics_from_string(const std::string& s);

/// size_mb * 8 / bandwidth_mbps + latency_s (MB = 10^6 bytes, Mbps = 10^6 bits/s).
double transfer_time(double size_mb, const Link& link);

/// (fixed_seconds + seconds_per_mb * input_mb) / speed_factor.
double stage_time(const Microservice& ms, const Node& node, double input_mb);

struct SizeFlow {
    double input_mb = 0.0;
    double output_mb = 0.0;

    bool operator==(const SizeFlow&) const = default;
};

/// Data volumes through every stage: sources are fed source_size_mb, each
/// stage's input is the sum of its incoming outputs, outputs follow the
/// stage's DataProfile. Deterministic topological evaluation; throws
/// InvalidGraphError on a cyclic graph.
std::map<std::string, SizeFlow> propagate_sizes(const ServiceGraph& graph);

/// Evaluates a placed graph into the three-component cost breakdown.
/// dt sums transform/source/join stages, ml sums learn stages, dc sums
/// transfers over edges whose endpoints sit on different nodes; sinks are
/// storage endpoints and contribute no compute time. Recomputes
/// feasibility and throws InfeasiblePlacementError when it fails.
CostBreakdown evaluate(const ServiceGraph& graph,
                       const Placement& placement,
                       const Topology& topology,
                       TimingSemantics semantics,
                       ResidencyRule residency = ResidencyRule::sum_demands);

}  // namespace fogsim
