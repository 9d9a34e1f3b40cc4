// Command-line front end: synthesis, simulation, verification, sub-team
// optimization, and benchmarking over scenario files.
//
//   ltlpsi synth    --scenario S --out plan.json [--dot DIR] [--seed N]
//                   [--state-cap N]
//   ltlpsi simulate --scenario S --plan plan.json --out trace.json [--log F]
//                   [--seed N]
//   ltlpsi verify   --scenario S --plan plan.json [--trace trace.json]
//   ltlpsi optimize --scenario S [--plan plan.json --out plan2.json]
//                   [--objective O] [--redundancy K]
//   ltlpsi bench    [--sweep agents|bindings] [--seed N] [--runs R]
//                   [--out bench.csv] [--state-cap N]
//
// Exit status 0 on success, 1 on any error or failed verification.

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ltlpsi/agent.hpp"
#include "ltlpsi/bench.hpp"
#include "ltlpsi/buchi.hpp"
#include "ltlpsi/errors.hpp"
#include "ltlpsi/executor.hpp"
#include "ltlpsi/feasibility.hpp"
#include "ltlpsi/formula.hpp"
#include "ltlpsi/optimize.hpp"
#include "ltlpsi/product.hpp"
#include "ltlpsi/scenario.hpp"
#include "ltlpsi/semantics.hpp"
#include "ltlpsi/team.hpp"
#include "ltlpsi/vocab.hpp"

namespace {

using namespace ltlpsi;

// Everything derived from a synthesis scenario that downstream commands
// need: the rewritten task, the planning automaton, and per-agent planning
// artifacts (stable addresses, so members can point into the vectors).
struct Pipeline {
    Scenario scenario;
    Formula task;
    BuchiAutomaton plan;
    std::vector<AgentModel> agents;
    std::vector<ProductAutomaton> products;
    std::vector<BuchiAutomaton> pruned;
    std::vector<TeamMember> members;
};

Pipeline build_pipeline(const std::string& scenario_path, std::size_t state_cap) {
    Pipeline p;
    p.scenario = load_scenario(scenario_path);
    if (p.scenario.roster())
        throw Error("'" + scenario_path + "' is a roster scenario; this command needs "
                    "capability agents and a task");
    p.task = outer_to_literal(rewrite_atomic(parse_task(p.scenario.task, p.scenario.vocab)));
    p.plan = translate_plan(p.task, state_cap);
    for (const ScenarioAgent& a : p.scenario.agents) p.agents.push_back(*a.model);
    p.products.reserve(p.agents.size());
    p.pruned.reserve(p.agents.size());
    for (const AgentModel& a : p.agents) {
        p.products.push_back(build_product(a, p.plan, p.scenario.vocab.bindings));
        const ProductAutomaton& g = p.products.back();
        BindingFamily fam = feasible_binding_sets(g, p.scenario.vocab.bindings.full_mask());
        p.pruned.push_back(prune_buchi(p.plan, fam, g));
        p.members.push_back({a.name, &g, &p.pruned.back(), std::move(fam), &a});
    }
    return p;
}

// Ensures a stored plan belongs to this scenario: same vocabulary, same
// automaton (re-derived from the scenario's task), and team indices that
// name the scenario's agents.
void match_plan_to_pipeline(const StoredPlan& sp, const Pipeline& p) {
    if (sp.vocab.actions.names() != p.scenario.vocab.actions.names() ||
        sp.vocab.bindings.external_ids() != p.scenario.vocab.bindings.external_ids())
        throw Error("plan and scenario declare different vocabularies");
    if (sp.task != print_canonical(p.task, p.scenario.vocab))
        throw Error("plan was synthesized from a different task");
    if (sp.automaton.num_states != p.plan.num_states ||
        sp.automaton.initial != p.plan.initial || sp.automaton.edges != p.plan.edges ||
        sp.automaton.accepting != p.plan.accepting)
        throw Error("plan automaton does not match the scenario's task");
    for (std::size_t i = 0; i < sp.plan.team.size(); ++i) {
        const int idx = sp.plan.team[i];
        if (idx < 0 || static_cast<std::size_t>(idx) >= p.scenario.agents.size())
            throw Error("plan references agent index " + std::to_string(idx) +
                        " outside the scenario");
        if (sp.team_names[i] != p.scenario.agents[static_cast<std::size_t>(idx)].name)
            throw Error("plan team member '" + sp.team_names[i] +
                        "' does not match the scenario's agent order");
    }
}

std::string describe_choice(const StoredPlan& sp, const Vocab& v) {
    std::string out;
    for (std::size_t i = 0; i < sp.plan.team.size(); ++i) {
        out += "  " + sp.team_names[i] + ": " +
               binding_set_to_string(sp.plan.assignment[i], v.bindings) + "\n";
    }
    return out;
}

Objective parse_objective(const std::string& name) {
    if (name == "min_agents") return Objective::MinAgents;
    if (name == "min_cost") return Objective::MinCost;
    if (name == "min_bindings") return Objective::MinBindingsPerAgent;
    throw Error("unknown objective '" + name + "'");
}

int cmd_synth(const std::string& scenario_path, const std::string& out_path,
              const std::string& dot_dir, std::size_t state_cap) {
    Pipeline p = build_pipeline(scenario_path, state_cap);

    TeamSearchStats stats;
    auto tp = find_team_trace(p.plan, p.members, formula_binding_support(p.task), &stats);
    if (!tp) {
        std::cerr << "no feasible team plan exists for this scenario\n";
        return 1;
    }

    StoredPlan sp;
    sp.vocab = p.scenario.vocab;
    sp.task = print_canonical(p.task, p.scenario.vocab);
    sp.automaton = p.plan;
    sp.plan = *tp;
    for (int slot : tp->team)
        sp.team_names.push_back(p.scenario.agents[static_cast<std::size_t>(slot)].name);
    write_file(out_path, plan_to_json(sp));

    if (!dot_dir.empty()) {
        write_file(dot_dir + "/plan.dot", to_dot(p.plan, p.scenario.vocab));
        for (std::size_t j = 0; j < p.members.size(); ++j)
            write_file(dot_dir + "/pruned_" + p.members[j].name + ".dot",
                       to_dot(p.pruned[j], p.scenario.vocab));
    }

    std::cout << "plan: " << p.plan.num_states << " states, " << p.plan.edges.size()
              << " edges; search expanded " << stats.expanded << " edges\n"
              << "team (" << sp.plan.team.size() << " agents):\n"
              << describe_choice(sp, p.scenario.vocab) << "wrote " << out_path << "\n";
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& plan_path,
                 const std::string& out_path, const std::string& log_path,
                 std::size_t state_cap) {
    Pipeline p = build_pipeline(scenario_path, state_cap);
    StoredPlan sp = plan_from_json(read_file(plan_path));
    match_plan_to_pipeline(sp, p);

    TeamTrace trace = run_team(p.plan, sp.plan, p.members);
    const std::vector<std::string> problems =
        check_sync_protocol(p.plan, sp.plan, p.members, trace);
    for (const std::string& s : problems) std::cerr << "protocol violation: " << s << "\n";
    if (!problems.empty()) return 1;

    write_file(out_path, trace_to_json(trace, p.scenario.vocab));
    if (!log_path.empty()) write_file(log_path, trace_to_log(trace, p.plan, p.scenario.vocab));

    std::cout << "trace: " << trace.ticks() << " ticks, " << trace.messages.size()
              << " messages; wrote " << out_path << "\n";
    return 0;
}

int cmd_verify(const std::string& scenario_path, const std::string& plan_path,
               const std::string& trace_path, std::size_t state_cap) {
    Pipeline p = build_pipeline(scenario_path, state_cap);
    StoredPlan sp = plan_from_json(read_file(plan_path));
    match_plan_to_pipeline(sp, p);

    // Re-derive each team slot's surviving family along the stored path and
    // compare against the stored data.
    int failures = 0;
    auto report = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "ok: " : "FAIL: ") << what << "\n";
        if (!ok) ++failures;
    };

    BindingSet covered = 0;
    for (std::size_t i = 0; i < sp.plan.team.size(); ++i) {
        const TeamMember& m = p.members[static_cast<std::size_t>(sp.plan.team[i])];
        BindingFamily fam = m.family;
        bool first = true;
        for (int ei : sp.plan.path) {
            fam = update_bindings(fam, *m.product, ei, first);
            first = false;
        }
        report(fam == sp.plan.families[i],
               "stored family of '" + sp.team_names[i] + "' matches the path");
        report(fam.contains(sp.plan.assignment[i]),
               "assignment of '" + sp.team_names[i] + "' survives the path");
        covered |= sp.plan.assignment[i];
    }
    report(binding_set_subset(formula_binding_support(p.task), covered),
           "assignments cover every binding the task mentions");

    if (!trace_path.empty()) {
        TeamTrace stored = trace_from_json(read_file(trace_path), p.scenario.vocab);
        TeamTrace replay = run_team(p.plan, sp.plan, p.members);
        report(stored == replay, "stored trace replays identically");
        report(check_sync_protocol(p.plan, sp.plan, p.members, stored).empty(),
               "stored trace passes the synchronization audit");
        report(satisfies(to_lasso(stored), stored.assignment, p.task,
                         p.scenario.vocab.bindings),
               "stored trace satisfies the task");
    }

    if (failures) {
        std::cout << failures << " check(s) failed\n";
        return 1;
    }
    std::cout << "all checks passed\n";
    return 0;
}

int cmd_optimize(const std::string& scenario_path, const std::string& plan_path,
                 const std::string& out_path, const std::string& objective_name, int redundancy,
                 std::size_t state_cap) {
    const Objective objective = parse_objective(objective_name);
    Scenario sc = load_scenario(scenario_path);

    if (sc.roster()) {
        if (!plan_path.empty())
            throw Error("--plan requires a capability scenario, not a roster");
        std::vector<BindingSet> r;
        std::vector<double> costs;
        for (const ScenarioAgent& a : sc.agents) {
            r.push_back(a.assignment);
            costs.push_back(a.cost);
        }
        SubTeamChoice c = select_subteam(r, costs, objective, redundancy);
        char cost[32];
        std::snprintf(cost, sizeof cost, "%g", c.cost);
        std::cout << "chosen sub-team (cost " << cost << "):\n";
        for (std::size_t i = 0; i < c.agents.size(); ++i)
            std::cout << "  " << sc.agents[static_cast<std::size_t>(c.agents[i])].name << ": "
                      << binding_set_to_string(c.assignment[i], sc.vocab.bindings) << "\n";
        return 0;
    }

    if (plan_path.empty() || out_path.empty())
        throw Error("optimizing a capability scenario needs --plan and --out");
    Pipeline p = build_pipeline(scenario_path, state_cap);
    StoredPlan sp = plan_from_json(read_file(plan_path));
    match_plan_to_pipeline(sp, p);

    std::vector<double> costs;
    for (int slot : sp.plan.team)
        costs.push_back(p.scenario.agents[static_cast<std::size_t>(slot)].cost);
    SubTeamChoice c = select_subteam(sp.plan.assignment, costs, objective, redundancy,
                                     formula_binding_support(p.task));

    StoredPlan trimmed = sp;
    trimmed.plan = restrict_plan(sp.plan, c);
    trimmed.team_names.clear();
    for (int i : c.agents) trimmed.team_names.push_back(sp.team_names[static_cast<std::size_t>(i)]);
    write_file(out_path, plan_to_json(trimmed));

    std::cout << "kept " << c.agents.size() << " of " << sp.plan.team.size() << " agents:\n"
              << describe_choice(trimmed, p.scenario.vocab) << "wrote " << out_path << "\n";
    return 0;
}

int cmd_bench(const std::string& sweep, std::uint64_t seed, int runs, const std::string& out_path,
              std::size_t state_cap) {
    const SweepKind kind = sweep == "bindings" ? SweepKind::Bindings : SweepKind::Agents;
    const int from = 3;
    const int to = kind == SweepKind::Agents ? 20 : 10;
    const std::vector<BenchRow> rows = run_bench_sweep(kind, from, to, runs, seed, state_cap);
    const std::string csv = bench_csv(kind, rows);
    if (out_path.empty())
        std::cout << csv;
    else {
        write_file(out_path, csv);
        std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Binding-aware task-grammar synthesis for heterogeneous agent teams"};
    app.require_subcommand(1);

    std::string scenario_path, plan_path, trace_path, out_path, log_path, dot_dir;
    std::string objective = "min_cost";
    std::string sweep = "agents";
    std::size_t state_cap = 100000;
    std::uint64_t seed = 1;
    int redundancy = 1;
    int runs = 5;

    CLI::App* synth = app.add_subcommand("synth", "Synthesize a team plan from a scenario");
    synth->add_option("--scenario", scenario_path, "Scenario file")->required();
    synth->add_option("--out", out_path, "Plan file to write")->required();
    synth->add_option("--dot", dot_dir, "Directory for DOT exports");
    synth->add_option("--seed", seed, "Random seed (synthesis is deterministic; accepted so "
                      "scripted pipelines can pass one seed everywhere)");
    synth->add_option("--state-cap", state_cap, "Automaton state cap");

    CLI::App* simulate = app.add_subcommand("simulate", "Execute a stored plan");
    simulate->add_option("--scenario", scenario_path, "Scenario file")->required();
    simulate->add_option("--plan", plan_path, "Plan file to execute")->required();
    simulate->add_option("--out", out_path, "Trace file to write")->required();
    simulate->add_option("--log", log_path, "Also write a human-readable tick log");
    simulate->add_option("--seed", seed, "Random seed (execution is deterministic; accepted so "
                      "scripted pipelines can pass one seed everywhere)");
    simulate->add_option("--state-cap", state_cap, "Automaton state cap");

    CLI::App* verify = app.add_subcommand("verify", "Re-check a stored plan (and trace)");
    verify->add_option("--scenario", scenario_path, "Scenario file")->required();
    verify->add_option("--plan", plan_path, "Plan file to verify")->required();
    verify->add_option("--trace", trace_path, "Trace file to replay and check");
    verify->add_option("--state-cap", state_cap, "Automaton state cap");

    CLI::App* optimize = app.add_subcommand("optimize", "Select an optimal sub-team");
    optimize->add_option("--scenario", scenario_path, "Scenario file")->required();
    optimize->add_option("--plan", plan_path, "Stored plan to trim");
    optimize->add_option("--out", out_path, "Trimmed plan file to write");
    optimize->add_option("--objective", objective,
                         "min_agents, min_cost, or min_bindings");
    optimize->add_option("--redundancy", redundancy, "Carriers required per binding");
    optimize->add_option("--state-cap", state_cap, "Automaton state cap");

    CLI::App* bench = app.add_subcommand("bench", "Run seeded scaling sweeps");
    bench->add_option("--sweep", sweep, "agents (3-20) or bindings (3-10)")
        ->check(CLI::IsMember({"agents", "bindings"}));
    bench->add_option("--seed", seed, "Base seed");
    bench->add_option("--runs", runs, "Instances per size");
    bench->add_option("--out", out_path, "CSV file to write (default: stdout)");
    bench->add_option("--state-cap", state_cap, "Automaton state cap");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(scenario_path, out_path, dot_dir, state_cap);
        if (simulate->parsed())
            return cmd_simulate(scenario_path, plan_path, out_path, log_path, state_cap);
        if (verify->parsed()) return cmd_verify(scenario_path, plan_path, trace_path, state_cap);
        if (optimize->parsed())
            return cmd_optimize(scenario_path, plan_path, out_path, objective, redundancy,
                                state_cap);
        if (bench->parsed()) return cmd_bench(sweep, seed, runs, out_path, state_cap);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
