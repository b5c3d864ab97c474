#include "fogsim/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fogsim/errors.hpp"

namespace fogsim {

std::string to_string(TemplateKind kind) {
    switch (kind) {
        case TemplateKind::activity_numerical: return "activity_numerical";
        case TemplateKind::text: return "text";
        case TemplateKind::image: return "image";
        case TemplateKind::custom: return "custom";
    }
    return "custom";
}

std::optional<TemplateKind> template_kind_from_string(const std::string& s) {
    if (s == "activity_numerical") return TemplateKind::activity_numerical;
    if (s == "text") return TemplateKind::text;
    if (s == "image") return TemplateKind::image;
    if (s == "custom") return TemplateKind::custom;
    return std::nullopt;
}

bool is_reserved_stage_id(const std::string& id) {
    return id == "source" || id == "sink" || id == "join";
}

ServiceGraph decompose(const ServiceTemplate& tmpl) {
    if (tmpl.transform_stages.empty())
        throw InvalidTemplateError("template '" + tmpl.id + "' has no transform stages");
    if (tmpl.learn_stage.id.empty())
        throw InvalidTemplateError("template '" + tmpl.id + "' has no learn stage id");
    if (tmpl.source_size_mb < 0)
        throw InvalidTemplateError("template '" + tmpl.id + "' has negative source size");

    std::set<std::string> ids;
    auto claim = [&](const std::string& id) {
        if (is_reserved_stage_id(id))
            throw InvalidTemplateError("stage id '" + id + "' is reserved");
        if (!ids.insert(id).second)
            throw InvalidTemplateError("duplicate stage id '" + id + "'");
    };
    for (const auto& stage : tmpl.transform_stages) claim(stage.id);
    claim(tmpl.learn_stage.id);

    ServiceGraph graph;
    graph.id = tmpl.id;
    graph.source_size_mb = tmpl.source_size_mb;

    Microservice source;
    source.id = "source";
    source.stage = StageKind::source;
    source.demand = tmpl.source.demand;
    source.required_capabilities = tmpl.source.required_capabilities;
    source.data_out = {DataMode::passthrough, 0.0};
    graph.microservices.push_back(std::move(source));

    std::string prev = "source";
    for (const auto& stage : tmpl.transform_stages) {
        Microservice ms = stage;
        ms.stage = StageKind::transform;
        graph.edges.push_back({prev, ms.id});
        prev = ms.id;
        graph.microservices.push_back(std::move(ms));
    }

    Microservice learn = tmpl.learn_stage;
    learn.stage = StageKind::learn;
    graph.edges.push_back({prev, learn.id});
    prev = learn.id;
    graph.microservices.push_back(std::move(learn));

    Microservice sink;
    sink.id = "sink";
    sink.stage = StageKind::sink;
    sink.data_out = {DataMode::passthrough, 0.0};
    graph.edges.push_back({prev, sink.id});
    graph.microservices.push_back(std::move(sink));

    return graph;
}

namespace {

// The chain as stage indices ordered source, transforms..., learn, sink;
// nullopt when the graph has any other shape.
std::optional<std::vector<std::size_t>> chain_indices(const ServiceGraph& graph) {
    const std::size_t n = graph.microservices.size();
    if (n < 4 || graph.edges.size() != n - 1) return std::nullopt;

    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) idx.emplace(graph.microservices[i].id, i);
    if (idx.size() != n) return std::nullopt;

    std::map<std::size_t, std::size_t> next;
    std::vector<std::size_t> indegree(n, 0);
    for (const auto& e : graph.edges) {
        auto f = idx.find(e.from);
        auto t = idx.find(e.to);
        if (f == idx.end() || t == idx.end()) return std::nullopt;
        if (!next.emplace(f->second, t->second).second) return std::nullopt;
        ++indegree[t->second];
    }

    std::size_t head = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] > 1) return std::nullopt;
        if (indegree[i] == 0) {
            if (head != n) return std::nullopt;
            head = i;
        }
    }
    if (head == n) return std::nullopt;

    std::vector<std::size_t> chain;
    chain.push_back(head);
    for (auto it = next.find(head); it != next.end(); it = next.find(chain.back()))
        chain.push_back(it->second);
    if (chain.size() != n) return std::nullopt;

    if (graph.microservices[chain.front()].stage != StageKind::source) return std::nullopt;
    if (graph.microservices[chain.back()].stage != StageKind::sink) return std::nullopt;
    if (graph.microservices[chain[n - 2]].stage != StageKind::learn) return std::nullopt;
    for (std::size_t k = 1; k + 2 < n; ++k)
        if (graph.microservices[chain[k]].stage != StageKind::transform) return std::nullopt;
    return chain;
}

}  // namespace

ServiceGraph split_transform(const ServiceGraph& graph, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw InvalidSplitError("theta must lie strictly inside (0,1)");
    auto chain = chain_indices(graph);
    if (!chain)
        throw InvalidGraphError("split_transform needs a source->transforms->learn->sink chain");

    // Snap the first share onto the ulp grid of the total so that both
    // shares and their sum are exactly representable: the branch inputs
    // then add back to source_size_mb without rounding, for every theta.
    const double total_mb = graph.source_size_mb;
    double branch_a_mb = theta * total_mb;
    if (total_mb > 0.0) {
        const double grid = std::ldexp(1.0, std::ilogb(total_mb) - 52);
        branch_a_mb = std::round(branch_a_mb / grid) * grid;
        branch_a_mb = std::clamp(branch_a_mb, 0.0, total_mb);
    }
    const double branch_b_mb = total_mb - branch_a_mb;

    ServiceGraph split;
    split.id = graph.id;
    split.source_size_mb = graph.source_size_mb;

    const std::size_t n = chain->size();
    auto duplicate = [&](std::size_t chain_pos, const char* suffix) {
        Microservice ms = graph.microservices[(*chain)[chain_pos]];
        ms.id += suffix;
        return ms;
    };

    for (const char* suffix : {".1", ".2"}) {
        Microservice src = duplicate(0, suffix);
        // each split source emits its fixed share of the raw data
        src.data_out = {DataMode::absolute, suffix[1] == '1' ? branch_a_mb : branch_b_mb};
        split.microservices.push_back(src);
        std::string prev = src.id;
        for (std::size_t k = 1; k + 2 < n; ++k) {
            Microservice ms = duplicate(k, suffix);
            split.edges.push_back({prev, ms.id});
            prev = ms.id;
            split.microservices.push_back(std::move(ms));
        }
        split.edges.push_back({prev, "join"});
    }

    Microservice join;
    join.id = "join";
    join.stage = StageKind::join;
    join.data_out = {DataMode::passthrough, 0.0};  // output = sum of branch outputs
    split.microservices.push_back(std::move(join));

    Microservice learn = graph.microservices[(*chain)[n - 2]];
    split.edges.push_back({"join", learn.id});
    Microservice sink = graph.microservices[(*chain)[n - 1]];
    split.edges.push_back({learn.id, sink.id});
    split.microservices.push_back(std::move(learn));
    split.microservices.push_back(std::move(sink));

    return split;
}

}  // namespace fogsim
