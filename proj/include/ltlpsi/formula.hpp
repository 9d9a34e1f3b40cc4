#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ltlpsi/errors.hpp"
#include "ltlpsi/vocab.hpp"

namespace ltlpsi {

// ===========================================================================
// Binding expressions (the "psi" side): negation-free positive Boolean
// formulas over binding propositions. Leaves store binding *indices*.
// ===========================================================================

struct BindingExprNode;
using BindingExpr = std::shared_ptr<const BindingExprNode>;

enum class BindingOp : std::uint8_t { Leaf, And, Or };

struct BindingExprNode {
    BindingOp op = BindingOp::Leaf;
    int binding = 0;                    // Leaf only (index into the universe)
    std::vector<BindingExpr> children;  // And / Or (n-ary, flattened, size >= 2)
};

BindingExpr binding_leaf(int index);
BindingExpr binding_and(std::vector<BindingExpr> children);
BindingExpr binding_or(std::vector<BindingExpr> children);

bool binding_expr_equal(const BindingExpr& a, const BindingExpr& b);

// Evaluates the expression against a set of bindings (characteristic mask).
bool binding_expr_eval(const BindingExpr& e, BindingSet assignment);

// Mask of all binding indices mentioned in the expression.
BindingSet binding_expr_support(const BindingExpr& e);

std::string binding_expr_to_string(const BindingExpr& e, const BindingUniverse& u);

// Every subset of the binding universe whose characteristic assignment
// satisfies `psi`, in ascending mask order. The satisfying family is
// upward-closed because binding expressions are negation-free.
std::vector<BindingSet> zeta(const BindingExpr& psi, const BindingUniverse& u);

// ===========================================================================
// Task formulas.
//
// One uniform node type covers both layers of the grammar:
//   * inside a Bind node only plain LTL structure may occur
//     (True/Atom/Not/And/Or/Next/Until/Always/Eventually);
//   * outside Bind nodes ("task level") the allowed structure is
//     And/Or/Next/Until/Always/Eventually over Bind / OuterNot(Bind) leaves.
// `validate_formula` enforces the split; `parse_task` always returns a
// validated tree.
//
// OuterNot is the negation *of* an annotated formula (at least one involved
// agent violates it) and is distinct from a Not that lives inside the
// annotation (every involved agent satisfies the negation). Release never
// appears in parsed input; the rewriter may introduce it when pushing an
// OuterNot through temporal structure.
// ===========================================================================

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

enum class FOp : std::uint8_t {
    True,
    False,     // arises from negating `true` (no surface keyword is required,
               // but the parser accepts `false` for symmetry)
    Atom,      // action proposition (leaf; must sit under a Bind)
    Bind,      // children[0] ^ psi
    Not,       // plain negation inside a Bind
    OuterNot,  // negation applied to a Bind node
    And,       // n-ary, flattened
    Or,        // n-ary, flattened
    Next,
    Until,     // children[0] U children[1]
    Release,   // children[0] R children[1] (internal; produced by rewriting only)
    Always,
    Eventually,
};

struct FormulaNode {
    FOp op = FOp::True;
    ActionId atom = 0;             // Atom only
    BindingExpr psi;               // Bind only
    std::vector<Formula> children;
};

Formula f_true();
Formula f_false();
Formula f_atom(ActionId a);
Formula f_bind(Formula phi, BindingExpr psi);
Formula f_not(Formula f);
Formula f_outer_not(Formula bind);
Formula f_and(std::vector<Formula> children);  // flattens nested Ands
Formula f_or(std::vector<Formula> children);   // flattens nested Ors
Formula f_next(Formula f);
Formula f_until(Formula lhs, Formula rhs);
Formula f_release(Formula lhs, Formula rhs);
Formula f_always(Formula f);
Formula f_eventually(Formula f);

bool formula_equal(const Formula& a, const Formula& b);

// True if any Bind node occurs in the subtree.
bool contains_binding(const Formula& f);

// ---------------------------------------------------------------------------
// Parsing.
//
// Surface syntax (ASCII): atoms are identifiers; `true` is reserved.
// Operators by falling precedence:
//     ^{...}  binding annotation (postfix; binds tighter than everything)
//     ! F G X unary
//     U       until (right-associative)
//     &
//     |
//     ->      implication (right-associative; desugared at parse time)
// A `!` applied to an annotated operand follows the notational convention
// that the negation moves inside the annotation (`!p^{1}` == `(!p)^{1}`);
// writing the annotated operand in parentheses keeps the negation outside
// (`!(p^{1})`). Binding annotations accept either a braced expression
// (`^{1 & 2}`, `^{(1 | 2) & 3}`) or a bare id (`^1`).
// ---------------------------------------------------------------------------

Formula parse_task(const std::string& text, const Vocab& vocab);

// Parses just a binding expression body, e.g. "(1 | 2) & 3".
BindingExpr parse_binding_expr(const std::string& text, const BindingUniverse& u);

// ---------------------------------------------------------------------------
// Printing.
//
// `print_canonical` is the round-trippable form: minimal parentheses, except
// that Until is parenthesized whenever it appears under another operator and
// compound annotated blocks are parenthesized as `(...)^{...}`.
// ---------------------------------------------------------------------------

std::string print_canonical(const Formula& f, const Vocab& vocab);
std::string to_sexpr(const Formula& f, const Vocab& vocab);

// ---------------------------------------------------------------------------
// Rewriting to binding-atomic form.
//
// After rewriting, every Bind node wraps a single atom (or negated atom) and
// a single binding proposition; compound annotations have been distributed
// and OuterNot has been pushed down to annotated atoms. The result is a
// plain LTL formula whose alphabet is the annotated propositions pi^rho.
// ---------------------------------------------------------------------------

Formula rewrite_atomic(const Formula& f);

// True if the formula is in binding-atomic form.
bool is_atomic(const Formula& f);

// Word-level literal form of an atomic formula: task-level negation of an
// annotated literal becomes the annotated negated literal
// (!(p^{r}) -> (!p)^{r}, !((!p)^{r}) -> p^{r}). Under the per-agent reading
// of edge requirements this is a sound strengthening once every mentioned
// binding is carried by someone, and it is what the automaton translation
// consumes.
Formula outer_to_literal(const Formula& atomic_f);

// All annotated propositions occurring in an atomic formula, sorted.
std::vector<PropPair> atomic_props(const Formula& f);

// Mask of binding indices mentioned anywhere in the formula.
BindingSet formula_binding_support(const Formula& f);

} // namespace ltlpsi
