#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fogsim {

/// Five-dimensional resource quantity used both for node capacities and
/// microservice demands. All components are nonnegative; comparison is
/// componentwise.
struct ResourceVector {
    double cpu = 0.0;             // abstract compute units
    double ram_mb = 0.0;          // megabytes (1 MB = 10^6 bytes)
    double storage_mb = 0.0;      // megabytes
    double energy_units = 0.0;    // abstract energy budget
    double bandwidth_mbps = 0.0;  // megabits/second, feasibility dimension only

    bool operator==(const ResourceVector&) const = default;
};

ResourceVector operator+(const ResourceVector& a, const ResourceVector& b);

/// Componentwise max, used for peak-stage residency accounting.
ResourceVector component_max(const ResourceVector& a, const ResourceVector& b);

bool is_nonnegative(const ResourceVector& v);

/// True iff demand <= capacity in all five dimensions (inclusive boundary).
bool resource_fits(const ResourceVector& demand, const ResourceVector& capacity);

enum class NodeKind { mobile, drone, streetlight, raspberry_pi, cloud, generic };

std::string to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(const std::string& s);

/// A compute device. speed_factor is relative compute speed with the
/// reference node at 1.0; capability tags carry installed library support.
struct Node {
    std::string id;
    NodeKind kind = NodeKind::generic;
    ResourceVector capacity;
    double speed_factor = 1.0;
    std::set<std::string> capabilities;

    bool operator==(const Node&) const = default;
};

/// Directed link between two distinct nodes. Transfer timing always uses
/// the link's bandwidth; intra-node transfer is implicit and free.
struct Link {
    std::string from;
    std::string to;
    double bandwidth_mbps = 0.0;
    double latency_s = 0.0;  // fixed per-transfer overhead
    std::string medium;      // free-form tag, e.g. "bluetooth", "3g"

    bool operator==(const Link&) const = default;
};

struct Topology {
    std::vector<Node> nodes;
    std::vector<Link> links;

    const Node* find_node(const std::string& id) const;
    const Link* find_link(const std::string& from, const std::string& to) const;

    bool operator==(const Topology&) const = default;
};

enum class StageKind { source, transform, learn, join, sink };

std::string to_string(StageKind kind);
std::optional<StageKind> stage_kind_from_string(const std::string& s);

enum class DataMode { ratio, absolute, passthrough };

std::string to_string(DataMode mode);
std::optional<DataMode> data_mode_from_string(const std::string& s);

/// Maps a stage's input data volume to its output volume.
///   ratio:       output_mb = value * input_mb
///   absolute:    output_mb = value, regardless of input
///   passthrough: output_mb = input_mb
struct DataProfile {
    DataMode mode = DataMode::passthrough;
    double value = 0.0;

    double output_for(double input_mb) const;

    bool operator==(const DataProfile&) const = default;
};

/// Processing cost model: seconds = fixed_seconds + seconds_per_mb * input,
/// measured on a speed_factor = 1.0 node.
struct WorkProfile {
    double seconds_per_mb = 0.0;
    double fixed_seconds = 0.0;

    bool operator==(const WorkProfile&) const = default;
};

struct Microservice {
    std::string id;
    StageKind stage = StageKind::transform;
    ResourceVector demand;
    std::set<std::string> required_capabilities;
    DataProfile data_out;
    WorkProfile work;

    bool operator==(const Microservice&) const = default;
};

struct GraphEdge {
    std::string from;
    std::string to;

    bool operator==(const GraphEdge&) const = default;
};

/// A DAG of microservices connected by data edges. source_size_mb is the
/// data volume injected at each source stage.
struct ServiceGraph {
    std::string id;
    std::vector<Microservice> microservices;
    std::vector<GraphEdge> edges;
    double source_size_mb = 0.0;

    const Microservice* find(const std::string& ms_id) const;

    bool operator==(const ServiceGraph&) const = default;
};

/// Total assignment of microservice ids to node ids.
struct Placement {
    std::map<std::string, std::string> assignment;

    bool operator==(const Placement&) const = default;
};

/// The three-component cost accounting: data transformation, machine
/// learning and data communication. Under sequential semantics
/// total_seconds = dt_seconds + ml_seconds + dc_seconds exactly.
struct CostBreakdown {
    double dt_seconds = 0.0;
    double ml_seconds = 0.0;
    double dc_seconds = 0.0;
    double total_seconds = 0.0;
    double dc_bytes = 0.0;

    bool operator==(const CostBreakdown&) const = default;
};

struct Violation {
    std::string code;              // e.g. "cycle", "multiple_sinks"
    std::string detail;
    std::vector<std::string> ids;  // offending microservice ids

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

/// Structural validation of a service graph. Violations are data, not
/// failures; an empty report means every invariant holds:
/// unique ids, existing edge endpoints, no duplicate edges, acyclic,
/// exactly one terminal stage, every non-source reachable from a source,
/// and stage kinds consistent with their degrees (sources have no inputs,
/// sinks no outputs, joins at least two inputs).
ValidationReport validate_graph(const ServiceGraph& graph);

/// Deterministic topological order (Kahn, smallest id first) as indices
/// into graph.microservices; nullopt if the graph has a cycle.
std::optional<std::vector<std::size_t>> topological_order(const ServiceGraph& graph);

}  // namespace fogsim
