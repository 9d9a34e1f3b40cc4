#pragma once

#include <set>
#include <string>
#include <vector>

#include "ltlpsi/vocab.hpp"

namespace ltlpsi {

// A transition with a nonnegative traversal cost.
struct WeightedEdge {
    int from = 0;
    int to = 0;
    double weight = 0.0;

    friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

// One agent faculty (sensor head, arm, motion, ...) modelled as a weighted
// transition system over named states.  `ap` is the set of propositions this
// faculty can make true; each state's label must stay within it.
struct Capability {
    std::string name;
    std::vector<std::string> state_names;    // index = state id
    int initial = 0;
    std::set<ActionId> ap;
    std::vector<std::set<ActionId>> labels;  // one entry per state
    std::vector<WeightedEdge> transitions;
};

// Synchronous product of an agent's capabilities.  Composite states carry the
// union of the component labels and composite moves cost the sum of the
// component costs.  Downstream synthesis assumes every state can wait, i.e.
// has a self-transition; validate_agent reports states where that fails.
struct AgentModel {
    std::string name;
    std::vector<std::string> state_names;
    int initial = 0;
    std::set<ActionId> ap;
    std::vector<std::set<ActionId>> labels;
    std::vector<WeightedEdge> transitions;  // sorted by (from, to), unique
    std::vector<std::vector<int>> out;      // state -> indices into transitions

    int num_states() const { return static_cast<int>(state_names.size()); }

    // Index into `transitions` for (from, to), or -1 when absent.
    int transition_index(int from, int to) const;

    // Sorts transitions by (from, to), collapses duplicates keeping the
    // cheapest, and rebuilds the adjacency index.
    void finalize();
};

// Builds the reachable synchronous product of `caps`: a composite move exists
// exactly when every component moves, and parallel duplicates keep the
// cheapest cost.  Throws Error when `caps` is empty or a capability is
// malformed (bad indices, negative weights, labels outside its alphabet, or a
// state with no outgoing transition).
AgentModel compose_capabilities(const std::string& agent_name,
                                const std::vector<Capability>& caps);

// Human-readable structural problems: states without self-transitions,
// unreachable states, and state labels outside the declared alphabet.
// Empty result means the model is clean.
std::vector<std::string> validate_agent(const AgentModel& a, const ActionTable& actions);

} // namespace ltlpsi
