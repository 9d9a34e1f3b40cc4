#include "ltlpsi/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>

#include "ltlpsi/agent.hpp"
#include "ltlpsi/buchi.hpp"
#include "ltlpsi/feasibility.hpp"
#include "ltlpsi/formula.hpp"
#include "ltlpsi/product.hpp"
#include "ltlpsi/team.hpp"
#include "ltlpsi/vocab.hpp"

namespace ltlpsi {

namespace {

Vocab sweep_vocab(int num_bindings) {
    Vocab v;
    std::vector<int> ids;
    for (int k = 0; k < num_bindings; ++k) {
        v.actions.intern("p" + std::to_string(k + 1));
        ids.push_back(k + 1);
    }
    v.bindings = BindingUniverse(ids);
    return v;
}

// F(p1^{1} & F(p2^{2} & ... F(pm^{m}))).
Formula chain_task(const Vocab& v) {
    const int m = v.bindings.size();
    Formula f;
    for (int k = m; k-- > 0;) {
        Formula leaf = f_bind(f_atom(static_cast<ActionId>(k)), binding_leaf(k));
        f = f ? f_eventually(f_and({leaf, f})) : f_eventually(leaf);
    }
    return f;
}

// Complete-graph agent over one blank state plus one state per owned action:
// agent `index` always owns the actions congruent to it mod 3 (so any three
// consecutive agents jointly cover the whole alphabet and every instance is
// solvable), every other action with probability 1/2. Moving costs 1,
// holding is free.
AgentModel sweep_agent(int index, const Vocab& v, std::mt19937_64& rng) {
    const int m = v.bindings.size();
    std::vector<std::set<ActionId>> labels = {{}};
    for (int k = 0; k < m; ++k)
        if (k % 3 == index % 3 || (rng() & 1u))
            labels.push_back({static_cast<ActionId>(k)});

    Capability cap;
    cap.name = "caps";
    cap.initial = 0;
    for (std::size_t s = 0; s < labels.size(); ++s) {
        cap.state_names.push_back("s" + std::to_string(s));
        cap.labels.push_back(labels[s]);
        for (ActionId a : labels[s]) cap.ap.insert(a);
        for (std::size_t t = 0; t < labels.size(); ++t)
            cap.transitions.push_back(
                {static_cast<int>(s), static_cast<int>(t), s == t ? 0.0 : 1.0});
    }
    return compose_capabilities("agent" + std::to_string(index), {cap});
}

} // namespace

std::vector<BenchRow> run_bench_sweep(SweepKind kind, int from, int to, int runs_per_size,
                                      std::uint64_t seed, std::size_t state_cap) {
    std::vector<BenchRow> rows;
    for (int size = from; size <= to; ++size) {
        const int num_agents = kind == SweepKind::Agents ? size : 3;
        const int num_bindings = kind == SweepKind::Agents ? 3 : size;
        for (int run = 0; run < runs_per_size; ++run) {
            BenchRow row;
            row.size = size;
            row.seed = seed * 1000003ull + static_cast<std::uint64_t>(size) * 10007ull +
                       static_cast<std::uint64_t>(run);
            std::mt19937_64 rng(row.seed);

            const Vocab v = sweep_vocab(num_bindings);
            std::vector<AgentModel> agents;
            for (int j = 0; j < num_agents; ++j) agents.push_back(sweep_agent(j, v, rng));

            const auto start = std::chrono::steady_clock::now();
            const Formula f = outer_to_literal(rewrite_atomic(chain_task(v)));
            const BuchiAutomaton plan = translate_plan(f, state_cap);

            std::vector<ProductAutomaton> products;
            std::vector<BuchiAutomaton> pruned;
            std::vector<TeamMember> members;
            products.reserve(agents.size());
            pruned.reserve(agents.size());
            for (const AgentModel& a : agents) {
                products.push_back(build_product(a, plan, v.bindings));
                const ProductAutomaton& g = products.back();
                std::size_t checks = 0;
                BindingFamily fam = feasible_binding_sets(g, v.bindings.full_mask(), &checks);
                row.binding_checks += checks;
                pruned.push_back(prune_buchi(plan, fam, g));
                members.push_back({a.name, &g, &pruned.back(), std::move(fam), &a});
            }

            TeamSearchStats stats;
            auto tp = find_team_trace(plan, members, formula_binding_support(f), &stats);
            const auto stop = std::chrono::steady_clock::now();

            row.milliseconds = std::chrono::duration<double, std::milli>(stop - start).count();
            row.edges_explored = stats.expanded;
            row.member_updates = stats.updates;
            row.solved = tp.has_value();
            rows.push_back(row);
        }
    }
    return rows;
}

std::string bench_csv(SweepKind kind, const std::vector<BenchRow>& rows) {
    std::string out = kind == SweepKind::Agents ? "n_agents" : "n_bindings";
    out += ",seed,milliseconds,edges_explored,member_updates,binding_checks,solved\n";
    char ms[32];
    for (const BenchRow& r : rows) {
        std::snprintf(ms, sizeof ms, "%.3f", r.milliseconds);
        out += std::to_string(r.size) + "," + std::to_string(r.seed) + "," + ms + "," +
               std::to_string(r.edges_explored) + "," + std::to_string(r.member_updates) + "," +
               std::to_string(r.binding_checks) + "," + (r.solved ? "1" : "0") + "\n";
    }
    return out;
}

std::vector<double> median_by_size(const std::vector<BenchRow>& rows,
                                   std::size_t BenchRow::*counter) {
    std::map<int, std::vector<double>> by_size;
    for (const BenchRow& r : rows) by_size[r.size].push_back(static_cast<double>(r.*counter));
    std::vector<double> medians;
    for (auto& [size, values] : by_size) {
        std::sort(values.begin(), values.end());
        const std::size_t n = values.size();
        medians.push_back(n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0);
    }
    return medians;
}

} // namespace ltlpsi
