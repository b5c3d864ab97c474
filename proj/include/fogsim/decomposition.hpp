#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fogsim/model.hpp"

namespace fogsim {

enum class TemplateKind { activity_numerical, text, image, custom };

std::string to_string(TemplateKind kind);
std::optional<TemplateKind> template_kind_from_string(const std::string& s);

/// Demand and capability requirements of the synthesized source stage.
/// Capability tags are the natural way to pin the data origin to the
/// devices that actually hold the sensors.
struct SourceSpec {
    ResourceVector demand;
    std::set<std::string> required_capabilities;

    bool operator==(const SourceSpec&) const = default;
};

/// A service described as an ordered list of transform stages followed by
/// one learning stage, plus the raw data volume its source emits.
struct ServiceTemplate {
    std::string id;
    TemplateKind kind = TemplateKind::custom;
    std::vector<Microservice> transform_stages;  // stage kinds are forced to transform
    Microservice learn_stage;                    // stage kind forced to learn
    double source_size_mb = 0.0;
    SourceSpec source;

    bool operator==(const ServiceTemplate&) const = default;
};

/// Ids reserved for stages synthesized by decompose/split_transform.
bool is_reserved_stage_id(const std::string& id);

/// Decomposes a template into the linear linked-microservice chain
/// source -> S1 -> ... -> Sn -> ML -> sink. Throws InvalidTemplateError on
/// an empty transform list, duplicate or reserved stage ids.
ServiceGraph decompose(const ServiceTemplate& tmpl);

/// Splits the transform prefix of a decomposed chain into two parallel
/// branches: branch ".1" receives theta * source_size_mb, branch ".2" the
/// remainder, and a free join merges them before the learn stage. The two
/// branch inputs sum to source_size_mb exactly (the second branch size is
/// derived by subtraction).
///
/// Throws InvalidSplitError unless 0 < theta < 1, InvalidGraphError unless
/// the input is a source -> transforms -> learn -> sink chain.
ServiceGraph split_transform(const ServiceGraph& graph, double theta);

}  // namespace fogsim
