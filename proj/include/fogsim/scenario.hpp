#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fogsim/decomposition.hpp"
#include "fogsim/model.hpp"
#include "fogsim/placement.hpp"

namespace fogsim {

struct ScenarioOptions {
    bool store_to_cloud = false;
    ResidencyRule residency = ResidencyRule::sum_demands;
    double theta = 0.7;

    bool operator==(const ScenarioOptions&) const = default;
};

/// A complete experiment description: the network, the service templates,
/// the role bindings and the evaluation options. Calibration overrides are
/// applied to the matching template stages at parse time and kept for
/// round-tripping. roles is optional so that single-node scenarios remain
/// expressible; commands that need roles fail at run time instead.
struct Scenario {
    Topology topology;
    std::vector<ServiceTemplate> templates;
    std::optional<RoleMap> roles;
    std::map<std::string, WorkProfile> calibration;
    ScenarioOptions options;
    std::string comment;

    const ServiceTemplate* find_template(const std::string& id) const;

    bool operator==(const Scenario&) const = default;
};

/// Parses and validates a scenario document (strict: unknown keys are
/// rejected). Throws SyntaxError (malformed JSON, with line/column),
/// SchemaError (missing or mistyped field, with JSON-pointer path),
/// ReferenceError (dangling id) or InvariantError (value out of range).
Scenario parse_scenario(std::string_view text);

/// Canonical serialization: keys sorted, every field explicit, stable
/// number formatting. parse_scenario(serialize_scenario(s)) == s, and
/// structurally equal scenarios serialize byte-identically.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace fogsim
