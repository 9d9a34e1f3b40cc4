#pragma once

#include <cstddef>
#include <vector>

#include "ltlpsi/buchi.hpp"
#include "ltlpsi/product.hpp"
#include "ltlpsi/vocab.hpp"

namespace ltlpsi {

// The binding assignments an agent can take on, stored as the maximal
// elements of a downward-closed family: whenever an agent can carry an
// assignment it can also carry any nonempty subset of it.
struct BindingFamily {
    std::vector<BindingSet> maximal;  // ascending, unique, mutually incomparable

    // True when r is nonempty and lies under some maximal element.
    bool contains(BindingSet r) const;

    // Union of all maximal elements: every binding the agent can carry at all.
    BindingSet union_mask() const;

    // Every member, ascending; exponential in the maximal sizes (small here).
    std::vector<BindingSet> members() const;

    friend bool operator==(const BindingFamily&, const BindingFamily&) = default;
};

// True when the agent has a run that the guard automaton accepts while the
// agent carries exactly the bindings in `r` on every step: a lasso from the
// initial product state to an accepting cycle using only edges where some
// contributing guard edge admits every binding of r.  The first step must
// hold the agent state fixed (a wait move) so the run consumes the label of
// the initial configuration before the agent moves.  Throws Error when r is
// empty.
bool accepting_trace_exists(const ProductAutomaton& g, BindingSet r);

// Exact family {r != 0 : accepting_trace_exists(g, r)} over the bindings in
// `universe`, computed top-down: the full set first, then each smaller
// candidate unless a confirmed assignment already covers it.  When `checks`
// is non-null it accumulates the number of emptiness checks performed.
BindingFamily feasible_binding_sets(const ProductAutomaton& g, BindingSet universe,
                                    std::size_t* checks = nullptr);

// The agent's view of the guard automaton: keeps an edge exactly when the
// agent can traverse some product realization of it under some assignment in
// the family.  States and numbering are preserved so pruned copies stay
// aligned across agents; only edges are dropped.
BuchiAutomaton prune_buchi(const BuchiAutomaton& b, const BindingFamily& fam,
                           const ProductAutomaton& g);

} // namespace ltlpsi
