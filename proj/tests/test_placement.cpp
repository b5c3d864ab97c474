#include <doctest.h>

#include "fogsim/decomposition.hpp"
#include "fogsim/errors.hpp"
#include "fogsim/placement.hpp"
#include "support/generators.hpp"

using namespace fogsim;

namespace {

Topology fog_cloud_topology(double fog_ram = 4096.0, double cloud_ram = 8192.0) {
    Topology topology;
    Node fog;
    fog.id = "fog";
    fog.kind = NodeKind::raspberry_pi;
    fog.capacity = {8.0, fog_ram, 1e6, 1e6, 10.0};
    fog.speed_factor = 1.0;
    fog.capabilities = {"sensor"};
    Node cloud;
    cloud.id = "cloud";
    cloud.kind = NodeKind::cloud;
    cloud.capacity = {64.0, cloud_ram, 1e6, 1e6, 1000.0};
    cloud.speed_factor = 20.0;
    topology.nodes = {fog, cloud};
    topology.links = {{"fog", "cloud", 1.0, 0.0, "internet"}};
    return topology;
}

ServiceTemplate wisdm_like_template() {
    ServiceTemplate tmpl;
    tmpl.id = "wisdm";
    tmpl.kind = TemplateKind::activity_numerical;
    tmpl.source_size_mb = 50.0;
    for (int i = 1; i <= 6; ++i) {
        Microservice stage;
        stage.id = "S" + std::to_string(i);
        stage.data_out = i == 1 ? DataProfile{DataMode::ratio, 0.024}
                                : DataProfile{DataMode::passthrough, 0.0};
        tmpl.transform_stages.push_back(std::move(stage));
    }
    tmpl.learn_stage.id = "ML";
    tmpl.learn_stage.data_out = {DataMode::passthrough, 0.0};
    return tmpl;
}

const RoleMap kRoles{"fog", "cloud", "fog"};

}  // namespace

TEST_CASE("hybrid places measurements on fog and learning on cloud") {
    const auto [graph, placement] = place(Strategy{StrategyKind::hybrid},
                                          decompose(wisdm_like_template()), kRoles,
                                          fog_cloud_topology());
    for (int i = 1; i <= 6; ++i) CHECK(placement.assignment.at("S" + std::to_string(i)) == "fog");
    CHECK(placement.assignment.at("ML") == "cloud");
    CHECK(placement.assignment.at("sink") == "cloud");
    CHECK(placement.assignment.at("source") == "fog");
    CHECK(graph.microservices.size() == 9);
}

TEST_CASE("cloud maps every non-source stage to the cloud node") {
    const auto [graph, placement] = place(Strategy{StrategyKind::cloud},
                                          decompose(wisdm_like_template()), kRoles,
                                          fog_cloud_topology());
    for (const auto& ms : graph.microservices) {
        if (ms.stage == StageKind::source)
            CHECK(placement.assignment.at(ms.id) == "fog");
        else
            CHECK(placement.assignment.at(ms.id) == "cloud");
    }
}

TEST_CASE("fog keeps everything local unless store_to_cloud is set") {
    const ServiceGraph graph = decompose(wisdm_like_template());
    const auto [g1, local] =
        place(Strategy{StrategyKind::fog}, graph, kRoles, fog_cloud_topology());
    for (const auto& [ms, node] : local.assignment) CHECK(node == "fog");

    const auto [g2, uploaded] =
        place(Strategy{StrategyKind::fog}, graph, kRoles, fog_cloud_topology(), true);
    CHECK(uploaded.assignment.at("sink") == "cloud");
    CHECK(uploaded.assignment.at("ML") == "fog");
}

TEST_CASE("fog+cloud splits the transform prefix across the two roles") {
    const auto [graph, placement] =
        place(Strategy{StrategyKind::fog_plus_cloud, 0.7}, decompose(wisdm_like_template()),
              kRoles, fog_cloud_topology());

    int fog_transforms = 0, cloud_transforms = 0;
    for (const auto& ms : graph.microservices) {
        if (ms.stage != StageKind::transform) continue;
        if (placement.assignment.at(ms.id) == "fog") {
            CHECK(ms.id.ends_with(".1"));
            ++fog_transforms;
        } else {
            CHECK(ms.id.ends_with(".2"));
            ++cloud_transforms;
        }
    }
    CHECK(fog_transforms == 6);
    CHECK(cloud_transforms == 6);
    CHECK(placement.assignment.at("join") == "cloud");
    CHECK(placement.assignment.at("ML") == "cloud");
    CHECK(placement.assignment.at("sink") == "cloud");
}

TEST_CASE("place validates the role map") {
    const ServiceGraph graph = decompose(wisdm_like_template());
    const Topology topology = fog_cloud_topology();
    CHECK_THROWS_AS(place(Strategy{StrategyKind::fog}, graph, {"ghost", "cloud", "fog"}, topology),
                    RoleError);
    CHECK_THROWS_AS(place(Strategy{StrategyKind::fog}, graph, {"fog", "fog", "fog"}, topology),
                    RoleError);
}

TEST_CASE("place is deterministic and strategy-pure") {
    const ServiceGraph graph = decompose(wisdm_like_template());
    const Topology topology = fog_cloud_topology();
    for (const StrategyKind kind : {StrategyKind::cloud, StrategyKind::fog, StrategyKind::hybrid,
                                    StrategyKind::fog_plus_cloud}) {
        const auto a = place(Strategy{kind, 0.7}, graph, kRoles, topology);
        const auto b = place(Strategy{kind, 0.7}, graph, kRoles, topology);
        CHECK(a.second == b.second);
        CHECK(a.first == b.first);

        // cloud puts no compute on fog; fog puts no compute on cloud
        int fog_compute = 0, cloud_compute = 0;
        for (const auto& ms : a.first.microservices) {
            if (ms.stage == StageKind::source || ms.stage == StageKind::sink) continue;
            (a.second.assignment.at(ms.id) == "fog" ? fog_compute : cloud_compute) += 1;
        }
        if (kind == StrategyKind::cloud) CHECK(fog_compute == 0);
        if (kind == StrategyKind::fog) CHECK(cloud_compute == 0);
    }
}

TEST_CASE("check_feasible flags the oversized stage with its dimension") {
    Topology topology = fog_cloud_topology(256.0);
    ServiceGraph graph;
    Microservice big;
    big.id = "image_recognition";
    big.stage = StageKind::transform;
    big.demand.ram_mb = 500.0;
    graph.microservices = {big};
    Placement placement;
    placement.assignment = {{"image_recognition", "fog"}};

    const FeasibilityReport report = check_feasible(placement, graph, topology);
    REQUIRE_FALSE(report.feasible);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].node_id == "fog");
    CHECK(report.violations[0].dimension == "ram_mb");
}

TEST_CASE("check_feasible accepts an empty graph") {
    CHECK(check_feasible(Placement{}, ServiceGraph{}, fog_cloud_topology()).feasible);
}

TEST_CASE("check_feasible reports partial or dangling assignments as data") {
    ServiceGraph graph;
    Microservice ms;
    ms.id = "a";
    ms.stage = StageKind::transform;
    graph.microservices = {ms};

    const FeasibilityReport unassigned =
        check_feasible(Placement{}, graph, fog_cloud_topology());
    REQUIRE_FALSE(unassigned.feasible);
    CHECK(unassigned.violations[0].dimension == "unassigned_microservice");

    Placement dangling;
    dangling.assignment = {{"a", "ghost"}};
    const FeasibilityReport unknown = check_feasible(dangling, graph, fog_cloud_topology());
    REQUIRE_FALSE(unknown.feasible);
    CHECK(unknown.violations[0].dimension == "unknown_node");
}

TEST_CASE("co-resident demands are summed conservatively") {
    Topology topology = fog_cloud_topology(650.0);
    ServiceGraph graph;
    for (const char* id : {"a", "b"}) {
        Microservice ms;
        ms.id = id;
        ms.stage = StageKind::transform;
        ms.demand.ram_mb = 400.0;
        graph.microservices.push_back(std::move(ms));
    }
    graph.edges = {{"a", "b"}};
    Placement placement;
    placement.assignment = {{"a", "fog"}, {"b", "fog"}};

    // each stage fits alone, their sum does not
    const FeasibilityReport sum = check_feasible(placement, graph, topology);
    CHECK_FALSE(sum.feasible);
    const FeasibilityReport peak =
        check_feasible(placement, graph, topology, ResidencyRule::peak_stage);
    CHECK(peak.feasible);
}

TEST_CASE("check_feasible flags capability and link gaps") {
    Topology topology = fog_cloud_topology();
    ServiceGraph graph;
    Microservice a, b;
    a.id = "a";
    a.stage = StageKind::transform;
    a.required_capabilities = {"opencv"};
    b.id = "b";
    b.stage = StageKind::sink;
    graph.microservices = {a, b};
    graph.edges = {{"a", "b"}};

    SUBCASE("missing capability") {
        Placement placement;
        placement.assignment = {{"a", "cloud"}, {"b", "cloud"}};
        const FeasibilityReport report = check_feasible(placement, graph, topology);
        REQUIRE_FALSE(report.feasible);
        CHECK(report.violations[0].dimension == "missing_capability");
    }
    SUBCASE("missing link") {
        Placement placement;  // cloud->fog has no link in this topology
        placement.assignment = {{"a", "cloud"}, {"b", "fog"}};
        const FeasibilityReport report = check_feasible(placement, graph, topology);
        REQUIRE_FALSE(report.feasible);
        bool found = false;
        for (const auto& v : report.violations) found |= v.dimension == "missing_link";
        CHECK(found);
    }
}

TEST_CASE("feasibility rejects the 500 MB stage on every smaller node") {
    testsupport::Rng rng(97);
    for (int iter = 0; iter < 150; ++iter) {
        Node node;
        node.id = "n";
        node.capacity = testsupport::random_resources(rng, 0.0, 1e5);
        node.capacity.ram_mb = testsupport::uniform(rng, 0.0, 499.999);
        Topology topology;
        topology.nodes = {node};

        ServiceGraph graph;
        Microservice ms;
        ms.id = "needs500";
        ms.stage = StageKind::transform;
        ms.demand.ram_mb = 500.0;
        graph.microservices = {ms};
        Placement placement;
        placement.assignment = {{"needs500", "n"}};

        const FeasibilityReport report = check_feasible(placement, graph, topology);
        CAPTURE(iter);
        REQUIRE_FALSE(report.feasible);
        bool flagged = false;
        for (const auto& v : report.violations)
            flagged |= v.node_id == "n" && v.dimension == "ram_mb";
        CHECK(flagged);
    }
}
