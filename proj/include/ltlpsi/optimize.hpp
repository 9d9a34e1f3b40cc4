#pragma once

// Sub-team selection over a synthesized team. The search that formed the
// team keeps every agent that can contribute, so the result often has
// redundancy: agents can be dropped — and assignments shrunk — as long as
// the remaining assignments still cover every required binding (with the
// requested multiplicity). Because an agent's obligations only loosen when
// its binding set shrinks, any such reduction preserves satisfaction of the
// task; synchronization groups are recomputed from the surviving
// assignments when the reduced plan is executed.
//
// All searches are exact (branch-and-bound over subsets, exhaustive at the
// tens-of-agents scale this targets) and deterministic: ties prefer
// earlier-indexed agents.

#include <vector>

#include "ltlpsi/team.hpp"
#include "ltlpsi/vocab.hpp"

namespace ltlpsi {

enum class Objective {
    MinAgents,            // fewest agents; ties by lower total cost
    MinCost,              // lowest total cost; ties by fewer agents
    MinBindingsPerAgent,  // smallest maximum of |r_j| over chosen agents,
                          // shrinking assignments as needed; ties by fewer
                          // agents, then lower total cost
};

struct SubTeamChoice {
    std::vector<int> agents;             // ascending indices into the input
    std::vector<BindingSet> assignment;  // parallel; subset of the input r_j
    double cost = 0.0;                   // sum of the chosen agents' costs

    friend bool operator==(const SubTeamChoice&, const SubTeamChoice&) = default;
};

// Chooses a sub-team whose assignments cover every binding of `required`
// with at least `redundancy` distinct agents, optimal for `objective`.
// Under MinAgents and MinCost the chosen agents keep their full input
// assignment; under MinBindingsPerAgent each chosen agent receives the
// bindings picked for it (a nonempty subset of its input assignment).
// `required` defaults (0) to the union of all assignments. Costs must be
// nonnegative and parallel to `assignments`. Throws Error when the inputs
// cannot satisfy the redundancy.
SubTeamChoice select_subteam(const std::vector<BindingSet>& assignments,
                             const std::vector<double>& costs, Objective objective,
                             int redundancy = 1, BindingSet required = 0);

// Applies a choice made over a plan's team slots: keeps only the chosen
// slots and replaces their assignments with the chosen ones. The plan's
// path is unchanged — shrinking assignments never invalidates it. Throws
// Error when the choice is empty, out of range, or assigns bindings outside
// what the slot's surviving family supports.
TeamPlan restrict_plan(const TeamPlan& tp, const SubTeamChoice& choice);

} // namespace ltlpsi
