#pragma once

// Ground-truth satisfaction checking over finite lasso representations of
// infinite behaviors. Two levels share one fixpoint engine:
//
//   * satisfies_word evaluates a binding-atomic formula over a lasso word
//     whose letters are sets of annotated propositions pi^rho;
//   * satisfies evaluates a full task formula over a team trace (one label
//     sequence per agent) and a binding assignment R, implementing the
//     covering-set quantifier for annotated blocks directly.
//
// Temporal operators use least/greatest fixpoint iteration around the cycle,
// so results are exact for the infinite unrolling. Always is reflexive
// (holds from the current position on).

#include <cstddef>
#include <set>
#include <vector>

#include "ltlpsi/formula.hpp"
#include "ltlpsi/vocab.hpp"

namespace ltlpsi {

// ---------------------------------------------------------------------------
// Lasso word: infinite word prefix . cycle^omega over 2^{AP_phi^psi}.
// Letters hold sorted, duplicate-free annotated propositions.
// ---------------------------------------------------------------------------

struct LassoWord {
    std::size_t prefix_len = 0;
    std::vector<std::vector<PropPair>> letters;  // size = prefix_len + cycle_len

    std::size_t cycle_len() const { return letters.size() - prefix_len; }
    std::size_t length() const { return letters.size(); }
};

// Evaluates a binding-atomic formula (annotated literals, task-level negation
// on annotated literals, Boolean/temporal structure) at position 0 of the
// infinite unrolling. Task-level negation of a literal coincides with the
// classical complement at word level.
bool satisfies_word(const LassoWord& w, const Formula& atomic_f);

// ---------------------------------------------------------------------------
// Team trace: per-agent label sequences with shared prefix/cycle alignment.
// ---------------------------------------------------------------------------

struct LassoTrace {
    std::size_t prefix_len = 0;
    std::size_t cycle_len = 1;
    // labels[agent][position], position < prefix_len + cycle_len.
    std::vector<std::vector<std::set<ActionId>>> labels;

    std::size_t num_agents() const { return labels.size(); }
    std::size_t length() const { return prefix_len + cycle_len; }
};

// Evaluates a task formula at position 0 of the team trace under the binding
// assignment R (one binding set per agent, constant over the trace):
//
//   phi^psi   : exists K in zeta(psi) with K covered by the union of R and
//               every agent intersecting K satisfying phi at the position;
//   !(phi^psi): exists such a covered K and an agent intersecting K that
//               violates phi at the position.
//
// Throws if the formula mentions a binding outside the universe.
bool satisfies(const LassoTrace& trace, const std::vector<BindingSet>& R, const Formula& f,
               const BindingUniverse& universe);

// ---------------------------------------------------------------------------
// Exhaustive word enumeration for cross-checks on small alphabets.
// ---------------------------------------------------------------------------

// Every lasso word with prefix_len + cycle_len <= max_total (cycle nonempty),
// letters drawn from `alphabet`. Size grows as |alphabet|^max_total; callers
// keep alphabets tiny.
std::vector<LassoWord> enumerate_lasso_words(const std::vector<std::vector<PropPair>>& alphabet,
                                             std::size_t max_total);

// The subset of enumerate_lasso_words satisfying `atomic_f`.
std::vector<LassoWord> enumerate_satisfying_lassos(
    const Formula& atomic_f, const std::vector<std::vector<PropPair>>& alphabet,
    std::size_t max_total);

} // namespace ltlpsi
