// fogsim command line: validate scenario files, plan a single strategy,
// compare the canonical strategies, or search for an optimized placement.
#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fogsim/cost.hpp"
#include "fogsim/decomposition.hpp"
#include "fogsim/errors.hpp"
#include "fogsim/model.hpp"
#include "fogsim/optimizer.hpp"
#include "fogsim/placement.hpp"
#include "fogsim/report.hpp"
#include "fogsim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;  // infeasible placement / no solution / validation failure
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;  // unreadable or unparseable input

struct InputError {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError{kExitInput, "cannot read file '" + path + "'"};
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fogsim::Scenario load_scenario(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return fogsim::parse_scenario(text);
    } catch (const fogsim::ScenarioError& e) {
        throw InputError{kExitInput, std::string(e.what())};
    }
}

const fogsim::ServiceTemplate& pick_template(const fogsim::Scenario& scenario,
                                             const std::string& requested) {
    if (requested.empty()) return scenario.templates.front();
    const fogsim::ServiceTemplate* tmpl = scenario.find_template(requested);
    if (!tmpl) throw InputError{kExitUsage, "scenario has no template '" + requested + "'"};
    return *tmpl;
}

std::string placement_listing(const fogsim::ServiceGraph& graph,
                              const fogsim::Placement& placement,
                              bool csv) {
    const auto order = fogsim::topological_order(graph);
    std::vector<std::pair<std::string, std::string>> rows;
    std::size_t width = std::string("microservice").size();
    for (std::size_t i : *order) {
        const std::string& id = graph.microservices[i].id;
        rows.emplace_back(id, placement.assignment.at(id));
        width = std::max(width, id.size());
    }
    std::ostringstream out;
    if (csv) {
        out << "microservice,node\n";
        for (const auto& [id, node] : rows) out << id << "," << node << "\n";
    } else {
        out << "microservice" << std::string(width - 12 + 2, ' ') << "node\n";
        for (const auto& [id, node] : rows)
            out << id << std::string(width - id.size() + 2, ' ') << node << "\n";
    }
    return out.str();
}

nlohmann::json cost_to_json(const fogsim::CostBreakdown& cost) {
    return nlohmann::json{{"dt_seconds", cost.dt_seconds},
                          {"ml_seconds", cost.ml_seconds},
                          {"dc_seconds", cost.dc_seconds},
                          {"total_seconds", cost.total_seconds},
                          {"dc_bytes", cost.dc_bytes}};
}

nlohmann::json placement_to_json(const fogsim::Placement& placement) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [ms, node] : placement.assignment) j[ms] = node;
    return j;
}

struct CommonArgs {
    std::string scenario_path;
    std::string template_id;
    std::string format = "table";
    std::string timing = "sequential";
};

fogsim::ReportFormat parse_format(const std::string& s) {
    const auto format = fogsim::report_format_from_string(s);
    if (!format) throw InputError{kExitUsage, "unknown format '" + s + "'"};
    return *format;
}

fogsim::TimingSemantics parse_timing(const std::string& s) {
    const auto timing = fogsim::timing_semantics_from_string(s);
    if (!timing) throw InputError{kExitUsage, "unknown timing semantics '" + s + "'"};
    return *timing;
}

fogsim::Strategy parse_strategy(const std::string& name, double theta) {
    const auto kind = fogsim::strategy_kind_from_string(name);
    if (!kind) throw InputError{kExitUsage, "unknown strategy '" + name + "'"};
    return fogsim::Strategy{*kind, theta};
}

int run_validate(const std::string& path) {
    const std::string text = read_file(path);
    fogsim::Scenario scenario;
    try {
        scenario = fogsim::parse_scenario(text);
    } catch (const fogsim::ScenarioError& e) {
        std::cerr << path << ": " << e.what() << "\n";
        return kExitInfeasible;
    }

    bool ok = true;
    for (const auto& tmpl : scenario.templates) {
        try {
            const fogsim::ServiceGraph graph = fogsim::decompose(tmpl);
            const fogsim::ValidationReport report = fogsim::validate_graph(graph);
            for (const auto& v : report.violations) {
                ok = false;
                std::cerr << path << ": template '" << tmpl.id << "': " << v.code << ": "
                          << v.detail;
                for (const auto& id : v.ids) std::cerr << " " << id;
                std::cerr << "\n";
            }
        } catch (const fogsim::Error& e) {
            ok = false;
            std::cerr << path << ": template '" << tmpl.id << "': " << e.what() << "\n";
        }
    }
    if (ok) std::cerr << path << ": ok\n";
    return ok ? kExitOk : kExitInfeasible;
}

int run_plan(const CommonArgs& args,
             const std::string& strategy_name,
             std::optional<double> theta_flag) {
    const fogsim::Scenario scenario = load_scenario(args.scenario_path);
    const fogsim::ServiceTemplate& tmpl = pick_template(scenario, args.template_id);
    const fogsim::ReportFormat format = parse_format(args.format);
    const fogsim::TimingSemantics timing = parse_timing(args.timing);
    const double theta = theta_flag.value_or(scenario.options.theta);
    if (!(theta > 0 && theta < 1))
        throw InputError{kExitUsage, "theta must lie strictly inside (0,1)"};
    const fogsim::Strategy strategy = parse_strategy(strategy_name, theta);

    if (!scenario.roles) {
        std::cerr << "scenario defines no roles; cannot place strategy '" << strategy_name
                  << "'\n";
        return kExitInfeasible;
    }

    auto [graph, placement] = fogsim::place(strategy, fogsim::decompose(tmpl), *scenario.roles,
                                            scenario.topology, scenario.options.store_to_cloud);
    const fogsim::FeasibilityReport feasibility =
        fogsim::check_feasible(placement, graph, scenario.topology, scenario.options.residency);
    if (!feasibility.feasible) {
        std::cerr << "placement infeasible:\n";
        for (const auto& v : feasibility.violations)
            std::cerr << "  " << v.node_id << " " << v.dimension << ": " << v.detail << "\n";
        return kExitInfeasible;
    }
    const fogsim::CostBreakdown cost =
        fogsim::evaluate(graph, placement, scenario.topology, timing, scenario.options.residency);

    if (format == fogsim::ReportFormat::json) {
        nlohmann::json out{{"strategy", fogsim::to_string(strategy)},
                           {"timing", fogsim::to_string(timing)},
                           {"placement", placement_to_json(placement)},
                           {"cost", cost_to_json(cost)}};
        std::cout << out.dump(2) << "\n";
    } else {
        const bool csv = format == fogsim::ReportFormat::csv;
        std::cout << placement_listing(graph, placement, csv) << "\n"
                  << fogsim::render_report({{fogsim::to_string(strategy), cost}},
                                           csv ? fogsim::ReportFormat::csv
                                               : fogsim::ReportFormat::table);
    }
    return kExitOk;
}

struct CompareRow {
    std::string strategy;
    std::optional<fogsim::CostBreakdown> cost;
    std::string note;  // set when the strategy cannot be placed or is infeasible
};

int run_compare(const CommonArgs& args,
                const std::string& strategies_arg,
                std::optional<double> theta_flag,
                const std::string& out_path,
                bool parallel) {
    const fogsim::Scenario scenario = load_scenario(args.scenario_path);
    const fogsim::ServiceTemplate& tmpl = pick_template(scenario, args.template_id);
    const fogsim::ReportFormat format = parse_format(args.format);
    const fogsim::TimingSemantics timing = parse_timing(args.timing);
    const double theta = theta_flag.value_or(scenario.options.theta);
    if (!(theta > 0 && theta < 1))
        throw InputError{kExitUsage, "theta must lie strictly inside (0,1)"};

    std::vector<fogsim::Strategy> strategies;
    std::stringstream names(strategies_arg);
    std::string name;
    while (std::getline(names, name, ','))
        if (!name.empty()) strategies.push_back(parse_strategy(name, theta));
    if (strategies.empty()) throw InputError{kExitUsage, "no strategies requested"};

    const fogsim::ServiceGraph base_graph = fogsim::decompose(tmpl);
    auto evaluate_one = [&](const fogsim::Strategy& strategy) -> CompareRow {
        CompareRow row{fogsim::to_string(strategy), std::nullopt, ""};
        if (!scenario.roles) {
            row.note = "scenario defines no roles";
            return row;
        }
        try {
            auto [graph, placement] =
                fogsim::place(strategy, base_graph, *scenario.roles, scenario.topology,
                              scenario.options.store_to_cloud);
            const fogsim::FeasibilityReport feasibility = fogsim::check_feasible(
                placement, graph, scenario.topology, scenario.options.residency);
            if (!feasibility.feasible) {
                std::ostringstream note;
                note << "infeasible:";
                for (const auto& v : feasibility.violations)
                    note << " [" << v.node_id << " " << v.dimension << "]";
                row.note = note.str();
                return row;
            }
            row.cost = fogsim::evaluate(graph, placement, scenario.topology, timing,
                                        scenario.options.residency);
        } catch (const fogsim::Error& e) {
            row.note = e.what();
        }
        return row;
    };

    std::vector<CompareRow> rows;
    rows.reserve(strategies.size());
    if (parallel) {
        std::vector<std::future<CompareRow>> futures;
        futures.reserve(strategies.size());
        for (const auto& strategy : strategies)
            futures.push_back(std::async(std::launch::async, evaluate_one, strategy));
        for (auto& f : futures) rows.push_back(f.get());
    } else {
        for (const auto& strategy : strategies) rows.push_back(evaluate_one(strategy));
    }

    std::vector<fogsim::StrategyResult> feasible;
    for (const auto& row : rows) {
        if (row.cost)
            feasible.push_back({row.strategy, *row.cost});
        else
            std::cerr << row.strategy << ": " << row.note << "\n";
    }

    std::string report = fogsim::render_report(feasible, format);
    if (format == fogsim::ReportFormat::table) {
        for (const auto& row : rows)
            if (!row.cost) report += "note: " + row.strategy + " " + row.note + "\n";
    }

    if (out_path.empty() || out_path == "stdout") {
        std::cout << report;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw InputError{kExitInput, "cannot write file '" + out_path + "'"};
        out << report;
    }
    return feasible.empty() ? kExitInfeasible : kExitOk;
}

int run_optimize(const CommonArgs& args,
                 const std::string& method_name,
                 const std::string& objective_name,
                 bool parallel) {
    const fogsim::Scenario scenario = load_scenario(args.scenario_path);
    const fogsim::ServiceTemplate& tmpl = pick_template(scenario, args.template_id);
    const fogsim::ReportFormat format = parse_format(args.format);
    const auto method = fogsim::optimize_method_from_string(method_name);
    if (!method) throw InputError{kExitUsage, "unknown method '" + method_name + "'"};
    const auto objective = fogsim::objective_from_string(objective_name);
    if (!objective) throw InputError{kExitUsage, "unknown objective '" + objective_name + "'"};

    const fogsim::ServiceGraph graph = fogsim::decompose(tmpl);
    fogsim::OptimizeResult result;
    try {
        result = *method == fogsim::OptimizeMethod::exhaustive
                     ? fogsim::optimize_exhaustive(graph, scenario.topology, *objective,
                                                   scenario.options.residency, parallel)
                     : fogsim::optimize_greedy(graph, scenario.topology, *objective,
                                               scenario.options.residency);
    } catch (const fogsim::SearchSpaceTooLargeError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const fogsim::NoFeasiblePlacementError& e) {
        std::cerr << e.what() << "\n";
        return kExitInfeasible;
    }

    if (format == fogsim::ReportFormat::json) {
        nlohmann::json out{{"method", fogsim::to_string(result.method)},
                           {"objective", fogsim::to_string(*objective)},
                           {"objective_value", result.objective_value},
                           {"nodes_explored", result.nodes_explored},
                           {"placement", placement_to_json(result.placement)},
                           {"cost", cost_to_json(result.cost)}};
        std::cout << out.dump(2) << "\n";
    } else {
        const bool csv = format == fogsim::ReportFormat::csv;
        std::cout << placement_listing(graph, result.placement, csv) << "\n"
                  << fogsim::render_report({{fogsim::to_string(result.method), result.cost}},
                                           csv ? fogsim::ReportFormat::csv
                                               : fogsim::ReportFormat::table)
                  << "\n";
        if (csv) {
            std::cout << "objective,objective_value,nodes_explored\n"
                      << fogsim::to_string(*objective) << ","
                      << fogsim::format_number(result.objective_value) << ","
                      << result.nodes_explored << "\n";
        } else {
            std::cout << "objective        " << fogsim::to_string(*objective) << "\n"
                      << "objective_value  " << fogsim::format_number(result.objective_value)
                      << "\n"
                      << "nodes_explored   " << result.nodes_explored << "\n";
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenario-driven fog/cloud service placement simulator"};
    app.require_subcommand(1);

    CommonArgs validate_args, plan_args, compare_args, optimize_args;
    std::string plan_strategy;
    std::string compare_strategies = "cloud,fog,hybrid,fog+cloud";
    std::string compare_out;
    std::string optimize_method = "exhaustive";
    std::string optimize_objective = "total-time";
    double plan_theta = 0.0, compare_theta = 0.0;
    bool compare_parallel = false, optimize_parallel = false;

    CLI::App* validate = app.add_subcommand("validate", "parse and validate a scenario file");
    validate->add_option("scenario", validate_args.scenario_path, "scenario JSON file")
        ->required();

    CLI::App* plan = app.add_subcommand("plan", "place one strategy and print the result");
    plan->add_option("scenario", plan_args.scenario_path, "scenario JSON file")->required();
    plan->add_option("--strategy", plan_strategy, "cloud|fog|hybrid|fog+cloud")->required();
    plan->add_option("--timing", plan_args.timing, "sequential|critical-path");
    plan->add_option("--format", plan_args.format, "table|csv|json");
    plan->add_option("--template", plan_args.template_id, "template id (default: first)");
    plan->add_option("--theta", plan_theta, "fog+cloud split fraction in (0,1)");

    CLI::App* compare = app.add_subcommand("compare", "evaluate several strategies side by side");
    compare->add_option("scenario", compare_args.scenario_path, "scenario JSON file")->required();
    compare->add_option("--strategies", compare_strategies, "comma-separated strategy list");
    compare->add_option("--timing", compare_args.timing, "sequential|critical-path");
    compare->add_option("--format", compare_args.format, "table|csv|json");
    compare->add_option("--out", compare_out, "output path or 'stdout'");
    compare->add_option("--template", compare_args.template_id, "template id (default: first)");
    compare->add_option("--theta", compare_theta, "fog+cloud split fraction in (0,1)");
    compare->add_flag("--parallel", compare_parallel, "evaluate strategies concurrently");

    CLI::App* optimize = app.add_subcommand("optimize", "search for a minimizing placement");
    optimize->add_option("scenario", optimize_args.scenario_path, "scenario JSON file")
        ->required();
    optimize->add_option("--method", optimize_method, "exhaustive|greedy");
    optimize->add_option("--objective", optimize_objective, "total-time|critical-path|dc-bytes");
    optimize->add_option("--format", optimize_args.format, "table|csv|json");
    optimize->add_option("--template", optimize_args.template_id, "template id (default: first)");
    optimize->add_flag("--parallel", optimize_parallel,
                       "search first-stage candidates concurrently");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(validate)) return run_validate(validate_args.scenario_path);
        if (app.got_subcommand(plan))
            return run_plan(plan_args, plan_strategy,
                            plan->count("--theta") ? std::optional(plan_theta) : std::nullopt);
        if (app.got_subcommand(compare))
            return run_compare(compare_args, compare_strategies,
                               compare->count("--theta") ? std::optional(compare_theta)
                                                         : std::nullopt,
                               compare_out, compare_parallel);
        if (app.got_subcommand(optimize))
            return run_optimize(optimize_args, optimize_method, optimize_objective,
                                optimize_parallel);
    } catch (const InputError& e) {
        std::cerr << e.message << "\n";
        return e.code;
    } catch (const fogsim::InfeasiblePlacementError& e) {
        std::cerr << e.what() << "\n";
        return kExitInfeasible;
    } catch (const fogsim::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}
