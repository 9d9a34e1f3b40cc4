#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ltlpsi/agent.hpp"
#include "ltlpsi/buchi.hpp"

namespace ltlpsi {

// Feasibility record for one Büchi edge rolled into a product edge: the set
// of bindings whose action requirements this move satisfies.  Any nonempty
// subset of `feasible` is an admissible assignment for the move.
struct ProductEdgeRecord {
    int buchi_edge = 0;       // index into BuchiAutomaton::edges
    BindingSet feasible = 0;  // nonzero by construction

    friend bool operator==(const ProductEdgeRecord&, const ProductEdgeRecord&) = default;
    friend auto operator<=>(const ProductEdgeRecord&, const ProductEdgeRecord&) = default;
};

struct ProductEdge {
    int from = 0;
    int to = 0;
    double weight = 0.0;                     // cost of the agent transition
    std::vector<ProductEdgeRecord> records;  // nonempty, sorted by buchi_edge

    // Feasible set for a given Büchi edge, or 0 when it contributes nothing.
    BindingSet feasible_for(int buchi_edge) const;
};

// Reachable product of an agent model with a Büchi automaton.  States pair an
// agent state with a Büchi state; acceptance is inherited from the Büchi
// component; each edge remembers which Büchi edges it can serve and with
// which bindings.
struct ProductAutomaton {
    int initial = 0;
    std::vector<int> agent_state;  // product state -> agent state
    std::vector<int> buchi_state;  // product state -> Büchi state
    std::map<std::pair<int, int>, int> index;  // (agent, Büchi) -> product state
    std::vector<ProductEdge> edges;            // sorted by (from, to)
    std::vector<std::vector<int>> out;         // state -> indices into edges
    std::vector<char> accepting;

    int num_states() const { return static_cast<int>(agent_state.size()); }

    // Product state for (agent state, Büchi state), or -1 when unreachable.
    int state_index(int s, int z) const;
};

// True when an agent whose next state is labeled `next_state_label` can take
// a move serving `label` while carrying binding `rho` (internal index): every
// action the label demands of rho must be in the next label, and every action
// it forbids must be absent.  Forbidden actions outside `agent_ap` are
// vacuously respected — the agent can never perform them.
bool binding_feasible(int rho, const EdgeLabel& label,
                      const std::set<ActionId>& next_state_label,
                      const std::set<ActionId>& agent_ap);

// All bindings of the universe feasible for this move, as a bit set.
BindingSet feasible_bindings(const EdgeLabel& label,
                             const std::set<ActionId>& next_state_label,
                             const std::set<ActionId>& agent_ap,
                             const BindingUniverse& universe);

// Builds the reachable product per the construction above.  An edge
// (s,z) -> (s',z') exists iff the agent can move s -> s' and at least one
// Büchi edge z -> z' admits a nonempty feasible binding set at s'.
// Throws ResourceLimitError when more than `state_cap` states are reached.
ProductAutomaton build_product(const AgentModel& a, const BuchiAutomaton& b,
                               const BindingUniverse& universe,
                               std::size_t state_cap = 1'000'000);

// GraphViz rendering; when `buchi_filter` is non-null only product states
// whose Büchi component is in the filter are drawn (fragment views).
std::string product_to_dot(const ProductAutomaton& p, const AgentModel& a,
                           const BuchiAutomaton& b, const Vocab& vocab,
                           const std::set<int>* buchi_filter = nullptr);

} // namespace ltlpsi
