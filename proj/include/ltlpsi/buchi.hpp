#pragma once

// Tableau-based translation of binding-atomic formulas into nondeterministic
// Buchi automata whose edges carry conjunctive requirement labels:
// sigma_t lists annotated propositions that must hold, sigma_f those that
// must not; everything else is unconstrained. Translation goes through a
// generalized automaton (one acceptance set per until-subformula), counter
// degeneralization, dead-state trimming, and a deterministic breadth-first
// renumbering so equal inputs yield byte-identical automata.

#include <cstddef>
#include <string>
#include <vector>

#include "ltlpsi/formula.hpp"
#include "ltlpsi/semantics.hpp"
#include "ltlpsi/vocab.hpp"

namespace ltlpsi {

struct EdgeLabel {
    std::vector<PropPair> sigma_t;  // sorted, unique
    std::vector<PropPair> sigma_f;  // sorted, unique; disjoint from sigma_t

    friend bool operator==(const EdgeLabel&, const EdgeLabel&) = default;
    friend auto operator<=>(const EdgeLabel&, const EdgeLabel&) = default;
};

// letter satisfies the label iff sigma_t is contained in it and sigma_f is
// disjoint from it (letter sorted).
bool label_compatible(const EdgeLabel& label, const std::vector<PropPair>& letter);

// "{pickup^{1}} / !{region_A^{2}}"-style rendering.
std::string label_to_string(const EdgeLabel& label, const Vocab& vocab);

struct BuchiEdge {
    int from = 0;
    int to = 0;
    EdgeLabel label;

    friend bool operator==(const BuchiEdge&, const BuchiEdge&) = default;
    friend auto operator<=>(const BuchiEdge&, const BuchiEdge&) = default;
};

struct BuchiAutomaton {
    int num_states = 0;
    int initial = 0;
    std::vector<BuchiEdge> edges;   // sorted by (from, to, label), unique
    std::vector<char> accepting;    // indexed by state

    // Edge indices grouped by source state (built by finalize()).
    std::vector<std::vector<int>> out_edges;

    void finalize();  // sorts/dedupes edges and rebuilds out_edges

    bool is_accepting(int s) const { return accepting[static_cast<std::size_t>(s)] != 0; }
};

// ---------------------------------------------------------------------------
// Translation.
// ---------------------------------------------------------------------------

// Translates a binding-atomic formula (annotated literals only; task-level
// negation must have been converted to negated literals) into an automaton
// accepting exactly the satisfying infinite words. Throws ResourceLimitError
// if the tableau exceeds `state_cap` nodes.
BuchiAutomaton translate(const Formula& atomic_f, std::size_t state_cap = 100000);

// Planning variant of translate: acceptance is restricted to states with no
// pending obligations (every until discharged), so a run may finish by
// holding one accepting state forever -- the shape team plans take, where
// agents complete the task and then wait indefinitely. No degeneralization
// counter is layered in, and the graph is reduced by forward bisimulation,
// which folds transient read-off states into the waiting state they lead to
// and thereby keeps a self-loop on every state a plan can pause at. Every
// word this automaton accepts is accepted by translate()'s automaton; runs
// that only satisfy the formula by alternating forever between states are
// deliberately outside its scope.
BuchiAutomaton translate_plan(const Formula& atomic_f, std::size_t state_cap = 100000);

// ---------------------------------------------------------------------------
// Normalization of formula-labeled automata.
// ---------------------------------------------------------------------------

// An automaton whose guards are arbitrary Boolean formulas over annotated
// literals (And/Or/Not/True/False over single-binding Bind atoms).
struct GuardEdge {
    int from = 0;
    int to = 0;
    Formula guard;
};

struct GuardAutomaton {
    int num_states = 0;
    int initial = 0;
    std::vector<GuardEdge> edges;
    std::vector<char> accepting;
};

// Splits every guard into disjunctive normal form, one parallel edge per
// clause; contradictory clauses (p and !p) drop their edge.
BuchiAutomaton normalize_edges(const GuardAutomaton& a);

// ---------------------------------------------------------------------------
// Label read-offs.
// ---------------------------------------------------------------------------

// Mask of binding indices appearing anywhere in the label.
BindingSet binding_fn(const EdgeLabel& label);

// Action requirements the label imposes on one binding: actions that must be
// performed / avoided by whoever carries `rho`.
struct CapabilityReq {
    std::vector<ActionId> c_t;  // sorted, unique
    std::vector<ActionId> c_f;  // sorted, unique

    friend bool operator==(const CapabilityReq&, const CapabilityReq&) = default;
};

CapabilityReq capability_fn(const EdgeLabel& label, int rho);

// ---------------------------------------------------------------------------
// Analysis and export.
// ---------------------------------------------------------------------------

// True iff the automaton accepts prefix . cycle^omega.
bool accepts_lasso(const BuchiAutomaton& a, const LassoWord& w);

// Graphviz rendering with sigma_t / sigma_f on edges; deterministic.
std::string to_dot(const BuchiAutomaton& a, const Vocab& vocab);

} // namespace ltlpsi
