#pragma once

// Turning a team plan into executable behavior. Each agent independently
// synthesizes, per progress edge (z, sigma, z') of the plan, a minimum-cost
// path through its product: repositioning moves that realize the self-loop
// at z, a pre-crossing state it can hold (z_wait), and the final move that
// crosses to z'. A lockstep simulator then runs the team tick by tick:
// agents still repositioning advance along their paths, agents already at
// their pre-crossing state hold it, and once every agent is in place the
// whole team takes the crossing move in the same global tick. Agents whose
// assignment shares a binding with sigma form the synchronization group for
// that edge; when the group has at least two members they broadcast status
// messages each tick (ready once parked) and the crossing waits until the
// ready assignments cover every binding sigma mentions. Messages sent at
// the end of a tick become visible the next tick.
//
// After the last crossing every agent holds its state forever, so the trace
// closes into a lasso whose cycle is the final configuration repeated.

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "ltlpsi/buchi.hpp"
#include "ltlpsi/semantics.hpp"
#include "ltlpsi/team.hpp"
#include "ltlpsi/vocab.hpp"

namespace ltlpsi {

// Status broadcast p = (agent, z', ready): sent at the end of `tick`,
// visible to every other agent from tick + 1. `agent` indexes the team slot
// (position within TeamPlan::team), `target` is the Büchi state the group
// is about to cross into, and `ready` is 1 once the sender holds its
// pre-crossing state.
struct SyncMessage {
    int tick = 0;
    int agent = 0;
    int target = 0;
    int ready = 0;

    friend bool operator==(const SyncMessage&, const SyncMessage&) = default;
};

// One agent's plan for a single progress edge: product states from its
// current position through repositioning to the pre-crossing state
// states[states.size() - 2] (where it can wait indefinitely) and finally the
// crossing target states.back(). labels[i] is the agent label at states[i];
// cost sums the traversal weights of the moves (holding adds nothing).
struct AgentBehavior {
    std::vector<int> states;
    std::vector<std::set<ActionId>> labels;
    double cost = 0.0;

    // Index of the pre-crossing hold state within `states`.
    int wait_index() const { return static_cast<int>(states.size()) - 2; }
};

// Synchronous execution record. Row i describes team slot i (the agent
// members[plan.team[i]]); column t is the configuration after t global
// ticks, so column 0 is the initial configuration. run[t] is the plan edge
// whose label the configuration at tick t satisfies; after the last tick
// the final configuration repeats forever under the accepting self-loop.
struct TeamTrace {
    std::vector<std::string> agent_names;            // per team slot
    std::vector<BindingSet> assignment;              // per team slot
    std::vector<std::vector<int>> agent_states;      // [slot][tick]
    std::vector<std::vector<std::set<ActionId>>> labels;  // [slot][tick]
    std::vector<int> run;                            // [tick] -> plan edge
    std::vector<int> crossing_tick;                  // per progress edge
    std::vector<SyncMessage> messages;               // ordered by (tick, slot)

    std::size_t ticks() const { return run.size(); }

    friend bool operator==(const TeamTrace&, const TeamTrace&) = default;
};

// Minimum-cost behavior for one progress edge, restricted to moves the
// binding set `r` is feasible for. From `start`, repositioning edges must
// realize self_edge (the plan's self-loop at the source state), the
// pre-crossing state must allow holding under self_edge, and the final move
// must realize progress_edge. When hold_edge >= 0 the crossing target must
// additionally allow holding under it (used for the plan's final edge,
// after which the agent waits forever). self_edge == -1 marks a plan that
// leaves its initial state immediately: the initial configuration itself is
// consumed by the progress edge, so the agent must cross while standing
// still (a move that keeps its agent state) and no repositioning is
// possible.
//
// Single-source shortest path on nonnegative weights; ties are broken by
// product state id, so equal inputs yield identical behaviors. Throws Error
// when no admissible path exists — for a valid TeamPlan this signals the
// per-edge feasibility the plan was built from cannot be stitched into one
// connected path (plan inconsistency).
AgentBehavior find_behavior(const ProductAutomaton& g, const AgentModel& agent, BindingSet r,
                            int start, int self_edge, int progress_edge, int hold_edge = -1);

// Runs the plan to completion. Every member referenced by plan.team must
// carry its product and agent model. Returns the full trace; throws Error
// on inconsistent plans (no admissible behavior for some segment, or a
// synchronization group whose ready assignments cannot cover the edge's
// bindings — unreachable for plans produced by the team search).
TeamTrace run_team(const BuchiAutomaton& plan, const TeamPlan& tp,
                   const std::vector<TeamMember>& members);

// Views the trace as a lasso word source for the satisfaction oracle:
// prefix = everything before the last tick, cycle = the final configuration
// (which the team repeats forever).
LassoTrace to_lasso(const TeamTrace& trace);

// Independent audit of a trace against its plan. Verifies the run follows
// the plan's path (self-loops between crossings, each progress edge crossed
// exactly once, at its recorded tick, by the whole team simultaneously),
// that every agent move is an admissible product move for the consumed edge
// under the agent's assignment, that each tick's pooled labels satisfy the
// consumed edge label (and the final configuration the accepting
// self-loop), and that synchronization groups of two or more agents each
// broadcast ready before crossing, with no messages outside their group.
// Returns human-readable violations; empty means the trace checks out.
std::vector<std::string> check_sync_protocol(const BuchiAutomaton& plan, const TeamPlan& tp,
                                             const std::vector<TeamMember>& members,
                                             const TeamTrace& trace);

// Line-oriented rendering: one line per agent per tick (state, label set,
// consumed edge) plus message events, for logs and debugging.
std::string trace_to_log(const TeamTrace& trace, const BuchiAutomaton& plan, const Vocab& vocab);

} // namespace ltlpsi
