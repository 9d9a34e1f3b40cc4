#pragma once

// Synthesis benchmarks: seeded random scenarios swept over team size or
// binding-universe size, timing the full pipeline (translation, products,
// feasible families, pruning, team search) and recording its work counters.
//
// The generated task is a nested chain F(p1^{1} & F(p2^{2} & ... F(pm^{m})))
// over m bindings. Agents move on a complete graph over one unlabeled state
// plus one state per action they own; agent j always owns the actions
// congruent to j mod 3 and each remaining action with probability 1/2, so
// any team of at least three agents covers the whole alphabet and every
// instance stays solvable, while per-agent feasible families remain proper
// subsets of the universe (which is what makes the binding sweep's subset
// enumeration grow with 2^m).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ltlpsi {

enum class SweepKind {
    Agents,    // vary the number of agents, 3 bindings
    Bindings,  // vary the number of bindings, 3 agents
};

struct BenchRow {
    int size = 0;                    // number of agents or bindings
    std::uint64_t seed = 0;          // derived per-run seed
    double milliseconds = 0.0;       // wall time of the pipeline
    std::size_t edges_explored = 0;  // team-search edges expanded
    std::size_t member_updates = 0;  // per-member survival updates
    std::size_t binding_checks = 0;  // feasibility emptiness checks, all agents
    bool solved = false;             // a team plan was found
};

// Runs `runs_per_size` seeded instances for every size in [from, to] and
// returns one row per instance, ordered by (size, run). Deterministic for a
// fixed seed except for the timing column.
std::vector<BenchRow> run_bench_sweep(SweepKind kind, int from, int to, int runs_per_size,
                                      std::uint64_t seed, std::size_t state_cap = 100000);

// CSV rendering; first column is n_agents or n_bindings per `kind`.
std::string bench_csv(SweepKind kind, const std::vector<BenchRow>& rows);

// The median of each size's `edges_explored` (resp. `member_updates`,
// `binding_checks`) column, ordered by size; used for scaling-shape checks.
std::vector<double> median_by_size(const std::vector<BenchRow>& rows,
                                   std::size_t BenchRow::*counter);

} // namespace ltlpsi
