#include <doctest.h>

#include "fogsim/cost.hpp"
#include "fogsim/decomposition.hpp"
#include "fogsim/errors.hpp"
#include "support/generators.hpp"

using namespace fogsim;

namespace {

ServiceTemplate chain_template(int transforms, double source_mb) {
    ServiceTemplate tmpl;
    tmpl.id = "t";
    for (int i = 0; i < transforms; ++i) {
        Microservice stage;
        stage.id = "S" + std::to_string(i + 1);
        stage.data_out = {DataMode::passthrough, 0.0};
        tmpl.transform_stages.push_back(std::move(stage));
    }
    tmpl.learn_stage.id = "ML";
    tmpl.learn_stage.data_out = {DataMode::passthrough, 0.0};
    tmpl.source_size_mb = source_mb;
    return tmpl;
}

}  // namespace

TEST_CASE("decompose builds the expected chains") {
    SUBCASE("six transform stages give a nine-node chain") {
        const ServiceGraph graph = decompose(chain_template(6, 50.0));
        CHECK(graph.microservices.size() == 9);
        CHECK(graph.edges.size() == 8);
        CHECK(graph.source_size_mb == 50.0);
        CHECK(graph.microservices.front().id == "source");
        CHECK(graph.microservices.back().id == "sink");
        CHECK(validate_graph(graph).ok());
    }
    SUBCASE("minimal template gives a four-node chain") {
        const ServiceGraph graph = decompose(chain_template(1, 1.0));
        CHECK(graph.microservices.size() == 4);
        CHECK(validate_graph(graph).ok());
    }
    SUBCASE("edge count is node count minus one for every size") {
        for (int transforms = 1; transforms <= 6; ++transforms) {
            const ServiceGraph graph = decompose(chain_template(transforms, 10.0));
            CHECK(graph.edges.size() == graph.microservices.size() - 1);
        }
    }
}

TEST_CASE("decompose rejects bad templates") {
    ServiceTemplate empty;
    empty.id = "empty";
    empty.learn_stage.id = "ML";
    CHECK_THROWS_AS(decompose(empty), InvalidTemplateError);

    ServiceTemplate reserved = chain_template(1, 1.0);
    reserved.transform_stages[0].id = "join";
    CHECK_THROWS_AS(decompose(reserved), InvalidTemplateError);

    ServiceTemplate duplicate = chain_template(2, 1.0);
    duplicate.transform_stages[1].id = duplicate.transform_stages[0].id;
    CHECK_THROWS_AS(decompose(duplicate), InvalidTemplateError);
}

TEST_CASE("decompose output always validates cleanly") {
    testsupport::Rng rng(31);
    for (int iter = 0; iter < 150; ++iter) {
        const ServiceGraph graph = decompose(testsupport::random_template(rng));
        CAPTURE(iter);
        CHECK(validate_graph(graph).ok());
    }
}

TEST_CASE("split_transform reproduces the 35/15 MB division") {
    ServiceTemplate tmpl = chain_template(6, 50.0);
    tmpl.transform_stages[0].data_out = {DataMode::ratio, 0.024};
    const ServiceGraph split = split_transform(decompose(tmpl), 0.7);

    const auto flows = propagate_sizes(split);
    CHECK(flows.at("S1.1").input_mb == 35.0);
    CHECK(flows.at("S1.2").input_mb == 15.0);
    CHECK(validate_graph(split).ok());

    // every transform is duplicated with the branch suffixes
    int branch1 = 0, branch2 = 0;
    for (const auto& ms : split.microservices) {
        if (ms.stage != StageKind::transform) continue;
        if (ms.id.ends_with(".1")) ++branch1;
        if (ms.id.ends_with(".2")) ++branch2;
    }
    CHECK(branch1 == 6);
    CHECK(branch2 == 6);
}

TEST_CASE("split_transform rejects boundary and bad shapes") {
    const ServiceGraph chain = decompose(chain_template(2, 10.0));
    CHECK_THROWS_AS(split_transform(chain, 0.0), InvalidSplitError);
    CHECK_THROWS_AS(split_transform(chain, 1.0), InvalidSplitError);
    CHECK_THROWS_AS(split_transform(chain, -0.2), InvalidSplitError);
    CHECK_THROWS_AS(split_transform(chain, 1.5), InvalidSplitError);

    ServiceGraph not_chain = chain;
    not_chain.edges.push_back({"source", "ML"});
    CHECK_THROWS_AS(split_transform(not_chain, 0.5), InvalidGraphError);

    const ServiceGraph already_split = split_transform(chain, 0.5);
    CHECK_THROWS_AS(split_transform(already_split, 0.5), InvalidGraphError);
}

TEST_CASE("split conserves the source volume exactly") {
    testsupport::Rng rng(47);
    for (int iter = 0; iter < 300; ++iter) {
        ServiceTemplate tmpl = testsupport::random_template(rng, 5);
        const double theta = testsupport::uniform(rng, 0.05, 0.95);
        const ServiceGraph graph = decompose(tmpl);
        const ServiceGraph split = split_transform(graph, theta);

        const auto flows = propagate_sizes(split);
        const double branch_a = flows.at("source.1").output_mb;
        const double branch_b = flows.at("source.2").output_mb;
        CAPTURE(iter);
        CAPTURE(theta);
        CHECK(branch_a + branch_b == graph.source_size_mb);

        // 2x transform stages, suffixed per branch
        std::size_t transforms = 0, split_transforms = 0;
        for (const auto& ms : graph.microservices)
            if (ms.stage == StageKind::transform) ++transforms;
        for (const auto& ms : split.microservices)
            if (ms.stage == StageKind::transform) ++split_transforms;
        CHECK(split_transforms == 2 * transforms);
    }
}

TEST_CASE("ratio-profile split joins back to the unsplit volume") {
    testsupport::Rng rng(53);
    for (int iter = 0; iter < 200; ++iter) {
        ServiceTemplate tmpl = testsupport::random_template(rng, 4);
        for (auto& stage : tmpl.transform_stages)
            stage.data_out = {DataMode::ratio, testsupport::uniform(rng, 0.01, 1.5)};
        const ServiceGraph graph = decompose(tmpl);
        const double theta = testsupport::uniform(rng, 0.05, 0.95);
        const ServiceGraph split = split_transform(graph, theta);

        const auto unsplit_flows = propagate_sizes(graph);
        const auto split_flows = propagate_sizes(split);
        const double unsplit_out = unsplit_flows.at(tmpl.learn_stage.id).input_mb;
        const double join_out = split_flows.at("join").output_mb;
        CAPTURE(iter);
        CHECK(join_out == doctest::Approx(unsplit_out).epsilon(1e-9));
    }
}

TEST_CASE("theta 0.5 split evaluates identically through the cost engine") {
    ServiceTemplate tmpl = chain_template(3, 64.0);
    for (auto& stage : tmpl.transform_stages) {
        stage.data_out = {DataMode::ratio, 0.5};
        stage.work = {1.0, 0.0};
    }
    tmpl.learn_stage.work = {2.0, 0.0};
    const ServiceGraph graph = decompose(tmpl);
    const ServiceGraph split = split_transform(graph, 0.5);

    // single node: no communication, identical speed; the data-parallel
    // halves add up to the unsplit work
    Topology topology;
    Node node;
    node.id = "n1";
    node.capacity = ResourceVector{1e6, 1e6, 1e6, 1e6, 1e6};
    node.speed_factor = 1.0;
    topology.nodes.push_back(node);

    Placement all_unsplit, all_split;
    for (const auto& ms : graph.microservices) all_unsplit.assignment.emplace(ms.id, "n1");
    for (const auto& ms : split.microservices) all_split.assignment.emplace(ms.id, "n1");

    const CostBreakdown a = evaluate(graph, all_unsplit, topology, TimingSemantics::sequential);
    const CostBreakdown b = evaluate(split, all_split, topology, TimingSemantics::sequential);
    CHECK(b.dt_seconds == doctest::Approx(a.dt_seconds).epsilon(1e-9));
    CHECK(b.ml_seconds == doctest::Approx(a.ml_seconds).epsilon(1e-9));
    CHECK(b.dc_seconds == 0.0);
    CHECK(a.dc_seconds == 0.0);
}
