#pragma once

// Team-forming search over the planning automaton.  The search walks the
// automaton depth-first along paths that strictly alternate between a
// state's self-loop (where agents wait for each other) and a progress edge
// (where the task advances).  Along the way it tracks, per agent, the
// binding assignments that remain workable for every edge of the path so
// far, drops agents that cannot follow, and succeeds when the remaining
// team holds the self-loop of an accepting state while its assignments
// jointly cover every binding the task mentions.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltlpsi/buchi.hpp"
#include "ltlpsi/feasibility.hpp"
#include "ltlpsi/product.hpp"
#include "ltlpsi/vocab.hpp"

namespace ltlpsi {

// One candidate agent's inputs to the search: its product with the planning
// automaton, its pruned view of that automaton, and the binding assignments
// it can carry on its own.
struct TeamMember {
    std::string name;
    const ProductAutomaton* product = nullptr;
    const BuchiAutomaton* pruned = nullptr;
    BindingFamily family;
    // Underlying model; unused by the search itself but carried along so the
    // executor can read state labels and move costs for the chosen team.
    const AgentModel* agent = nullptr;
};

// Result of a successful search.  `path` lists every traversed edge in
// order; `beta` is its progress subsequence and `self_at[i]` the self edge
// the team can wait on at the i-th path state (one per progress stage plus
// the final accepting stage; -1 is possible only at stage 0, when the path
// leaves the initial state immediately).  `team` indexes into the member
// list passed to the search; `assignment` and `families` run parallel to it.
struct TeamPlan {
    std::vector<int> path;
    std::vector<int> beta;
    std::vector<int> self_at;
    std::map<int, int> self_edges;  // state -> its self edge on the path
    std::vector<int> team;
    std::vector<BindingSet> assignment;
    std::vector<BindingFamily> families;
};

struct TeamSearchStats {
    std::size_t expanded = 0;  // edges popped and processed
    std::size_t pushed = 0;    // frames pushed (including later-skipped ones)
    std::size_t updates = 0;   // per-member survival updates across expanded edges
};

// Members of `current` whose pruned automaton retains `plan.edges[edge]`.
std::vector<int> update_team(const BuchiAutomaton& plan, int edge,
                             const std::vector<TeamMember>& members,
                             const std::vector<int>& current);

// Assignments of `family` that survive traversing `plan.edges[edge]`: those
// the agent's product can realize on that edge.  When `first_step` is set
// the edge opens the path, so only realizations that hold the agent at its
// initial state count (the move consumes the initial configuration's label).
BindingFamily update_bindings(const BindingFamily& family, const ProductAutomaton& product,
                              int edge, bool first_step);

// Splits an alternating edge path into (progress edges, state -> self edge).
// Throws Error when the path is disconnected, does not start at the initial
// state, or breaks the self/progress alternation.
std::pair<std::vector<int>, std::map<int, int>> parse_path(const BuchiAutomaton& plan,
                                                           const std::vector<int>& path);

// Depth-first team search.  `mentioned` is the set of bindings the task
// mentions; the surviving team's assignments must cover all of them.
// Returns std::nullopt when no alternating path lets any team finish.
// Deterministic: edges are explored in (source, target, label) order and
// each edge is expanded at most once globally, which keeps the search linear
// in the automaton size but can reject paths that would only succeed when an
// already-expanded edge is reached again under a different surviving team.
std::optional<TeamPlan> find_team_trace(const BuchiAutomaton& plan,
                                        const std::vector<TeamMember>& members,
                                        BindingSet mentioned,
                                        TeamSearchStats* stats = nullptr);

} // namespace ltlpsi
