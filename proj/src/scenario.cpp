#include "fogsim/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

#include "fogsim/errors.hpp"

namespace fogsim {

using nlohmann::json;

const ServiceTemplate* Scenario::find_template(const std::string& id) const {
    for (const auto& t : templates)
        if (t.id == id) return &t;
    return nullptr;
}

namespace {

std::string type_name(const json& value) {
    switch (value.type()) {
        case json::value_t::null: return "null";
        case json::value_t::object: return "object";
        case json::value_t::array: return "array";
        case json::value_t::string: return "string";
        case json::value_t::boolean: return "boolean";
        case json::value_t::number_integer:
        case json::value_t::number_unsigned:
        case json::value_t::number_float: return "number";
        default: return "unknown";
    }
}

[[noreturn]] void schema_fail(const std::string& path, const std::string& message) {
    throw SchemaError("schema error at " + (path.empty() ? "/" : path) + ": " + message, path);
}

[[noreturn]] void invariant_fail(const std::string& path, const std::string& message) {
    throw InvariantError("invariant violated at " + path + ": " + message, path);
}

[[noreturn]] void reference_fail(const std::string& path, const std::string& message) {
    throw ReferenceError("dangling reference at " + path + ": " + message, path);
}

const json& require_object(const json& value, const std::string& path) {
    if (!value.is_object()) schema_fail(path, "expected object, got " + type_name(value));
    return value;
}

const json& require_array(const json& value, const std::string& path) {
    if (!value.is_array()) schema_fail(path, "expected array, got " + type_name(value));
    return value;
}

const json& require_key(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_fail(path + "/" + key, "required field is missing");
    return *it;
}

void reject_unknown_keys(const json& obj,
                         std::initializer_list<const char*> allowed,
                         const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool known =
            std::any_of(allowed.begin(), allowed.end(),
                        [&](const char* key) { return it.key() == key; });
        if (!known) schema_fail(path + "/" + it.key(), "unknown field");
    }
}

double parse_number(const json& value, const std::string& path) {
    if (!value.is_number()) schema_fail(path, "expected number, got " + type_name(value));
    return value.get<double>();
}

double parse_nonnegative(const json& value, const std::string& path) {
    const double v = parse_number(value, path);
    if (!(v >= 0)) invariant_fail(path, "must be >= 0");
    return v;
}

std::string parse_string(const json& value, const std::string& path) {
    if (!value.is_string()) schema_fail(path, "expected string, got " + type_name(value));
    return value.get<std::string>();
}

bool parse_bool(const json& value, const std::string& path) {
    if (!value.is_boolean()) schema_fail(path, "expected boolean, got " + type_name(value));
    return value.get<bool>();
}

ResourceVector parse_resources(const json& value, const std::string& path) {
    require_object(value, path);
    reject_unknown_keys(value, {"cpu", "ram_mb", "storage_mb", "energy_units", "bandwidth_mbps"},
                        path);
    ResourceVector r;
    if (auto it = value.find("cpu"); it != value.end())
        r.cpu = parse_nonnegative(*it, path + "/cpu");
    if (auto it = value.find("ram_mb"); it != value.end())
        r.ram_mb = parse_nonnegative(*it, path + "/ram_mb");
    if (auto it = value.find("storage_mb"); it != value.end())
        r.storage_mb = parse_nonnegative(*it, path + "/storage_mb");
    if (auto it = value.find("energy_units"); it != value.end())
        r.energy_units = parse_nonnegative(*it, path + "/energy_units");
    if (auto it = value.find("bandwidth_mbps"); it != value.end())
        r.bandwidth_mbps = parse_nonnegative(*it, path + "/bandwidth_mbps");
    return r;
}

std::set<std::string> parse_capabilities(const json& value, const std::string& path) {
    require_array(value, path);
    std::set<std::string> caps;
    for (std::size_t i = 0; i < value.size(); ++i)
        caps.insert(parse_string(value[i], path + "/" + std::to_string(i)));
    return caps;
}

WorkProfile parse_work(const json& value, const std::string& path) {
    require_object(value, path);
    reject_unknown_keys(value, {"seconds_per_mb", "fixed_seconds"}, path);
    WorkProfile w;
    if (auto it = value.find("seconds_per_mb"); it != value.end())
        w.seconds_per_mb = parse_nonnegative(*it, path + "/seconds_per_mb");
    if (auto it = value.find("fixed_seconds"); it != value.end())
        w.fixed_seconds = parse_nonnegative(*it, path + "/fixed_seconds");
    return w;
}

DataProfile parse_data_profile(const json& value, const std::string& path) {
    require_object(value, path);
    reject_unknown_keys(value, {"mode", "value"}, path);
    const std::string mode_str = parse_string(require_key(value, "mode", path), path + "/mode");
    const auto mode = data_mode_from_string(mode_str);
    if (!mode) schema_fail(path + "/mode", "unknown data mode '" + mode_str + "'");

    DataProfile profile;
    profile.mode = *mode;
    if (*mode == DataMode::passthrough) {
        if (value.contains("value"))
            schema_fail(path + "/value", "passthrough profiles take no value");
    } else {
        profile.value =
            parse_nonnegative(require_key(value, "value", path), path + "/value");
    }
    return profile;
}

Microservice parse_stage(const json& value, const std::string& path) {
    require_object(value, path);
    reject_unknown_keys(value, {"id", "demand", "required_capabilities", "data_out", "work"},
                        path);
    Microservice ms;
    ms.id = parse_string(require_key(value, "id", path), path + "/id");
    if (ms.id.empty()) invariant_fail(path + "/id", "stage id must not be empty");
    if (is_reserved_stage_id(ms.id))
        invariant_fail(path + "/id", "stage id '" + ms.id + "' is reserved");
    if (auto it = value.find("demand"); it != value.end())
        ms.demand = parse_resources(*it, path + "/demand");
    if (auto it = value.find("required_capabilities"); it != value.end())
        ms.required_capabilities = parse_capabilities(*it, path + "/required_capabilities");
    ms.data_out = parse_data_profile(require_key(value, "data_out", path), path + "/data_out");
    if (auto it = value.find("work"); it != value.end())
        ms.work = parse_work(*it, path + "/work");
    return ms;
}

Node parse_node(const json& value, const std::string& path) {
    require_object(value, path);
    reject_unknown_keys(value, {"id", "kind", "capacity", "speed_factor", "capabilities"}, path);
    Node node;
    node.id = parse_string(require_key(value, "id", path), path + "/id");
    if (node.id.empty()) invariant_fail(path + "/id", "node id must not be empty");
    const std::string kind = parse_string(require_key(value, "kind", path), path + "/kind");
    const auto parsed_kind = node_kind_from_string(kind);
    if (!parsed_kind) schema_fail(path + "/kind", "unknown node kind '" + kind + "'");
    node.kind = *parsed_kind;
    node.capacity = parse_resources(require_key(value, "capacity", path), path + "/capacity");
    node.speed_factor =
        parse_number(require_key(value, "speed_factor", path), path + "/speed_factor");
    if (!(node.speed_factor > 0)) invariant_fail(path + "/speed_factor", "must be > 0");
    if (auto it = value.find("capabilities"); it != value.end())
        node.capabilities = parse_capabilities(*it, path + "/capabilities");
    return node;
}

Link parse_link(const json& value, const std::string& path) {
    require_object(value, path);
    reject_unknown_keys(value, {"from", "to", "bandwidth_mbps", "latency_s", "medium"}, path);
    Link link;
    link.from = parse_string(require_key(value, "from", path), path + "/from");
    link.to = parse_string(require_key(value, "to", path), path + "/to");
    link.bandwidth_mbps =
        parse_number(require_key(value, "bandwidth_mbps", path), path + "/bandwidth_mbps");
    if (!(link.bandwidth_mbps > 0)) invariant_fail(path + "/bandwidth_mbps", "must be > 0");
    if (auto it = value.find("latency_s"); it != value.end())
        link.latency_s = parse_nonnegative(*it, path + "/latency_s");
    if (auto it = value.find("medium"); it != value.end())
        link.medium = parse_string(*it, path + "/medium");
    if (link.from == link.to)
        invariant_fail(path, "link endpoints must differ (intra-node transfer is free)");
    return link;
}

Topology parse_topology(const json& value, const std::string& path) {
    require_object(value, path);
    reject_unknown_keys(value, {"nodes", "links"}, path);
    Topology topology;

    const json& nodes = require_array(require_key(value, "nodes", path), path + "/nodes");
    std::set<std::string> node_ids;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string node_path = path + "/nodes/" + std::to_string(i);
        Node node = parse_node(nodes[i], node_path);
        if (!node_ids.insert(node.id).second)
            invariant_fail(node_path + "/id", "duplicate node id '" + node.id + "'");
        topology.nodes.push_back(std::move(node));
    }
    if (topology.nodes.empty()) schema_fail(path + "/nodes", "at least one node is required");

    if (auto it = value.find("links"); it != value.end()) {
        const json& links = require_array(*it, path + "/links");
        std::set<std::pair<std::string, std::string>> pairs;
        for (std::size_t i = 0; i < links.size(); ++i) {
            const std::string link_path = path + "/links/" + std::to_string(i);
            Link link = parse_link(links[i], link_path);
            if (!node_ids.count(link.from))
                reference_fail(link_path + "/from", "unknown node '" + link.from + "'");
            if (!node_ids.count(link.to))
                reference_fail(link_path + "/to", "unknown node '" + link.to + "'");
            if (!pairs.emplace(link.from, link.to).second)
                invariant_fail(link_path, "duplicate link " + link.from + "->" + link.to);
            topology.links.push_back(std::move(link));
        }
    }
    return topology;
}

ServiceTemplate parse_template(const json& value, const std::string& path) {
    require_object(value, path);
    reject_unknown_keys(
        value, {"id", "kind", "source_size_mb", "transform_stages", "learn_stage", "source"},
        path);
    ServiceTemplate tmpl;
    tmpl.id = parse_string(require_key(value, "id", path), path + "/id");
    if (tmpl.id.empty()) invariant_fail(path + "/id", "template id must not be empty");
    const std::string kind = parse_string(require_key(value, "kind", path), path + "/kind");
    const auto parsed_kind = template_kind_from_string(kind);
    if (!parsed_kind) schema_fail(path + "/kind", "unknown template kind '" + kind + "'");
    tmpl.kind = *parsed_kind;
    tmpl.source_size_mb = parse_nonnegative(require_key(value, "source_size_mb", path),
                                            path + "/source_size_mb");

    const json& stages = require_array(require_key(value, "transform_stages", path),
                                       path + "/transform_stages");
    if (stages.empty())
        invariant_fail(path + "/transform_stages", "at least one transform stage is required");
    std::set<std::string> stage_ids;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const std::string stage_path = path + "/transform_stages/" + std::to_string(i);
        Microservice stage = parse_stage(stages[i], stage_path);
        stage.stage = StageKind::transform;
        if (!stage_ids.insert(stage.id).second)
            invariant_fail(stage_path + "/id", "duplicate stage id '" + stage.id + "'");
        tmpl.transform_stages.push_back(std::move(stage));
    }

    tmpl.learn_stage =
        parse_stage(require_key(value, "learn_stage", path), path + "/learn_stage");
    tmpl.learn_stage.stage = StageKind::learn;
    if (!stage_ids.insert(tmpl.learn_stage.id).second)
        invariant_fail(path + "/learn_stage/id",
                       "duplicate stage id '" + tmpl.learn_stage.id + "'");

    if (auto it = value.find("source"); it != value.end()) {
        const std::string source_path = path + "/source";
        require_object(*it, source_path);
        reject_unknown_keys(*it, {"demand", "required_capabilities"}, source_path);
        if (auto d = it->find("demand"); d != it->end())
            tmpl.source.demand = parse_resources(*d, source_path + "/demand");
        if (auto c = it->find("required_capabilities"); c != it->end())
            tmpl.source.required_capabilities =
                parse_capabilities(*c, source_path + "/required_capabilities");
    }
    return tmpl;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // recover line/column from the byte offset
        int line = 1, column = 1;
        const std::size_t limit = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
        for (std::size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw SyntaxError("syntax error at line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ": " + e.what(),
                          line, column);
    }

    require_object(doc, "");
    reject_unknown_keys(
        doc, {"schema_version", "comment", "topology", "templates", "roles", "calibration",
              "options"},
        "");

    const json& version = require_key(doc, "schema_version", "");
    if (!version.is_number_integer() || version.get<int>() != 1)
        schema_fail("/schema_version", "unsupported schema version (expected 1)");

    Scenario scenario;
    if (auto it = doc.find("comment"); it != doc.end())
        scenario.comment = parse_string(*it, "/comment");

    scenario.topology = parse_topology(require_key(doc, "topology", ""), "/topology");

    const json& templates = require_array(require_key(doc, "templates", ""), "/templates");
    if (templates.empty()) schema_fail("/templates", "at least one template is required");
    std::set<std::string> template_ids;
    std::set<std::string> known_stage_ids;
    for (std::size_t i = 0; i < templates.size(); ++i) {
        const std::string tmpl_path = "/templates/" + std::to_string(i);
        ServiceTemplate tmpl = parse_template(templates[i], tmpl_path);
        if (!template_ids.insert(tmpl.id).second)
            invariant_fail(tmpl_path + "/id", "duplicate template id '" + tmpl.id + "'");
        for (const auto& stage : tmpl.transform_stages) known_stage_ids.insert(stage.id);
        known_stage_ids.insert(tmpl.learn_stage.id);
        scenario.templates.push_back(std::move(tmpl));
    }

    if (auto it = doc.find("roles"); it != doc.end() && !it->is_null()) {
        const std::string roles_path = "/roles";
        require_object(*it, roles_path);
        reject_unknown_keys(*it, {"fog_node", "cloud_node", "source_node"}, roles_path);
        RoleMap roles;
        roles.fog_node = parse_string(require_key(*it, "fog_node", roles_path),
                                      roles_path + "/fog_node");
        roles.cloud_node = parse_string(require_key(*it, "cloud_node", roles_path),
                                        roles_path + "/cloud_node");
        roles.source_node = parse_string(require_key(*it, "source_node", roles_path),
                                         roles_path + "/source_node");
        for (const auto& [key, id] :
             {std::pair<const char*, const std::string&>{"fog_node", roles.fog_node},
              {"cloud_node", roles.cloud_node},
              {"source_node", roles.source_node}}) {
            if (!scenario.topology.find_node(id))
                reference_fail(roles_path + "/" + key, "unknown node '" + id + "'");
        }
        if (roles.fog_node == roles.cloud_node)
            invariant_fail(roles_path, "fog_node and cloud_node must differ");
        scenario.roles = std::move(roles);
    }

    if (auto it = doc.find("calibration"); it != doc.end()) {
        require_object(*it, "/calibration");
        for (auto entry = it->begin(); entry != it->end(); ++entry) {
            const std::string entry_path = "/calibration/" + entry.key();
            if (!known_stage_ids.count(entry.key()))
                reference_fail(entry_path, "unknown stage id '" + entry.key() + "'");
            scenario.calibration[entry.key()] = parse_work(entry.value(), entry_path);
        }
    }

    if (auto it = doc.find("options"); it != doc.end()) {
        const std::string options_path = "/options";
        require_object(*it, options_path);
        reject_unknown_keys(*it, {"store_to_cloud", "residency", "theta"}, options_path);
        if (auto o = it->find("store_to_cloud"); o != it->end())
            scenario.options.store_to_cloud = parse_bool(*o, options_path + "/store_to_cloud");
        if (auto o = it->find("residency"); o != it->end()) {
            const std::string rule = parse_string(*o, options_path + "/residency");
            const auto parsed = residency_rule_from_string(rule);
            if (!parsed)
                schema_fail(options_path + "/residency", "unknown residency rule '" + rule + "'");
            scenario.options.residency = *parsed;
        }
        if (auto o = it->find("theta"); o != it->end()) {
            scenario.options.theta = parse_number(*o, options_path + "/theta");
            if (!(scenario.options.theta > 0 && scenario.options.theta < 1))
                invariant_fail(options_path + "/theta", "must lie strictly inside (0,1)");
        }
    }

    // apply calibration overrides to the matching template stages
    for (auto& tmpl : scenario.templates) {
        for (auto& stage : tmpl.transform_stages) {
            if (auto it = scenario.calibration.find(stage.id); it != scenario.calibration.end())
                stage.work = it->second;
        }
        if (auto it = scenario.calibration.find(tmpl.learn_stage.id);
            it != scenario.calibration.end())
            tmpl.learn_stage.work = it->second;
    }

    return scenario;
}

namespace {

json resources_to_json(const ResourceVector& r) {
    return json{{"cpu", r.cpu},
                {"ram_mb", r.ram_mb},
                {"storage_mb", r.storage_mb},
                {"energy_units", r.energy_units},
                {"bandwidth_mbps", r.bandwidth_mbps}};
}

json work_to_json(const WorkProfile& w) {
    return json{{"seconds_per_mb", w.seconds_per_mb}, {"fixed_seconds", w.fixed_seconds}};
}

json stage_to_json(const Microservice& ms) {
    json j{{"id", ms.id},
           {"demand", resources_to_json(ms.demand)},
           {"required_capabilities", json(ms.required_capabilities)},
           {"work", work_to_json(ms.work)}};
    json profile{{"mode", to_string(ms.data_out.mode)}};
    if (ms.data_out.mode != DataMode::passthrough) profile["value"] = ms.data_out.value;
    j["data_out"] = std::move(profile);
    return j;
}

}  // namespace

std::string serialize_scenario(const Scenario& scenario) {
    json doc;
    doc["schema_version"] = 1;
    doc["comment"] = scenario.comment;

    json nodes = json::array();
    for (const auto& node : scenario.topology.nodes) {
        nodes.push_back(json{{"id", node.id},
                             {"kind", to_string(node.kind)},
                             {"capacity", resources_to_json(node.capacity)},
                             {"speed_factor", node.speed_factor},
                             {"capabilities", json(node.capabilities)}});
    }
    json links = json::array();
    for (const auto& link : scenario.topology.links) {
        links.push_back(json{{"from", link.from},
                             {"to", link.to},
                             {"bandwidth_mbps", link.bandwidth_mbps},
                             {"latency_s", link.latency_s},
                             {"medium", link.medium}});
    }
    doc["topology"] = json{{"nodes", std::move(nodes)}, {"links", std::move(links)}};

    json templates = json::array();
    for (const auto& tmpl : scenario.templates) {
        json stages = json::array();
        for (const auto& stage : tmpl.transform_stages) stages.push_back(stage_to_json(stage));
        templates.push_back(
            json{{"id", tmpl.id},
                 {"kind", to_string(tmpl.kind)},
                 {"source_size_mb", tmpl.source_size_mb},
                 {"transform_stages", std::move(stages)},
                 {"learn_stage", stage_to_json(tmpl.learn_stage)},
                 {"source",
                  json{{"demand", resources_to_json(tmpl.source.demand)},
                       {"required_capabilities", json(tmpl.source.required_capabilities)}}}});
    }
    doc["templates"] = std::move(templates);

    if (scenario.roles) {
        doc["roles"] = json{{"fog_node", scenario.roles->fog_node},
                            {"cloud_node", scenario.roles->cloud_node},
                            {"source_node", scenario.roles->source_node}};
    }

    json calibration = json::object();
    for (const auto& [stage_id, work] : scenario.calibration)
        calibration[stage_id] = work_to_json(work);
    doc["calibration"] = std::move(calibration);

    doc["options"] = json{{"store_to_cloud", scenario.options.store_to_cloud},
                          {"residency", to_string(scenario.options.residency)},
                          {"theta", scenario.options.theta}};

    return doc.dump(2) + "\n";
}

}  // namespace fogsim
