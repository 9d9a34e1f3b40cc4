#include "ltlpsi/semantics.hpp"

#include <algorithm>
#include <map>

namespace ltlpsi {

namespace {

using Vec = std::vector<char>;

// Truth vectors over positions 0..n-1 where position n-1 loops back to
// `loop`. Fixpoints iterate backward sweeps until stable; the lattice height
// bounds the sweep count by n+1.

struct Frame {
    std::size_t n = 0;
    std::size_t loop = 0;

    std::size_t succ(std::size_t i) const { return i + 1 < n ? i + 1 : loop; }

    Vec constant(bool v) const { return Vec(n, v ? 1 : 0); }

    Vec v_not(Vec a) const {
        for (auto& x : a) x = !x;
        return a;
    }

    Vec v_and(const std::vector<Vec>& cs) const {
        Vec r = constant(true);
        for (const auto& c : cs)
            for (std::size_t i = 0; i < n; ++i) r[i] = r[i] && c[i];
        return r;
    }

    Vec v_or(const std::vector<Vec>& cs) const {
        Vec r = constant(false);
        for (const auto& c : cs)
            for (std::size_t i = 0; i < n; ++i) r[i] = r[i] || c[i];
        return r;
    }

    Vec v_next(const Vec& a) const {
        Vec r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = a[succ(i)];
        return r;
    }

    // Least fixpoint of v[i] = b[i] | (a[i] & v[succ(i)]).
    Vec v_until(const Vec& a, const Vec& b) const {
        Vec v = constant(false);
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t k = n; k-- > 0;) {
                char nv = b[k] || (a[k] && v[succ(k)]);
                if (nv != v[k]) {
                    v[k] = nv;
                    changed = true;
                }
            }
        }
        return v;
    }

    // Greatest fixpoint of v[i] = b[i] & (a[i] | v[succ(i)]).
    Vec v_release(const Vec& a, const Vec& b) const {
        Vec v = constant(true);
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t k = n; k-- > 0;) {
                char nv = b[k] && (a[k] || v[succ(k)]);
                if (nv != v[k]) {
                    v[k] = nv;
                    changed = true;
                }
            }
        }
        return v;
    }

    Vec v_always(const Vec& a) const { return v_release(constant(false), a); }
    Vec v_eventually(const Vec& a) const { return v_until(constant(true), a); }
};

// Evaluates plain LTL (no annotations) against one agent's label sequence.
class PhiEval {
public:
    PhiEval(const Frame& fr, const std::vector<std::set<ActionId>>& labels)
        : fr_(fr), labels_(labels) {}

    const Vec& eval(const Formula& f) {
        auto it = cache_.find(f.get());
        if (it != cache_.end()) return it->second;
        Vec v;
        switch (f->op) {
            case FOp::True: v = fr_.constant(true); break;
            case FOp::False: v = fr_.constant(false); break;
            case FOp::Atom: {
                v.resize(fr_.n);
                for (std::size_t i = 0; i < fr_.n; ++i)
                    v[i] = labels_[i].count(f->atom) > 0;
                break;
            }
            case FOp::Not: v = fr_.v_not(eval(f->children[0])); break;
            case FOp::And: {
                std::vector<Vec> cs;
                for (const auto& c : f->children) cs.push_back(eval(c));
                v = fr_.v_and(cs);
                break;
            }
            case FOp::Or: {
                std::vector<Vec> cs;
                for (const auto& c : f->children) cs.push_back(eval(c));
                v = fr_.v_or(cs);
                break;
            }
            case FOp::Next: v = fr_.v_next(eval(f->children[0])); break;
            case FOp::Until: v = fr_.v_until(eval(f->children[0]), eval(f->children[1])); break;
            case FOp::Release:
                v = fr_.v_release(eval(f->children[0]), eval(f->children[1]));
                break;
            case FOp::Always: v = fr_.v_always(eval(f->children[0])); break;
            case FOp::Eventually: v = fr_.v_eventually(eval(f->children[0])); break;
            default: throw Error("internal: annotation inside a plain subformula");
        }
        return cache_.emplace(f.get(), std::move(v)).first->second;
    }

private:
    const Frame& fr_;
    const std::vector<std::set<ActionId>>& labels_;
    std::map<const FormulaNode*, Vec> cache_;
};

// Evaluates the task level against a team trace. Annotated blocks resolve
// through the covering-set quantifier over zeta(psi).
class TeamEval {
public:
    TeamEval(const Frame& fr, const LassoTrace& trace, const std::vector<BindingSet>& R,
             const BindingUniverse& universe)
        : fr_(fr), trace_(trace), R_(R), universe_(universe) {
        for (BindingSet r : R_) union_ |= r;
        for (std::size_t j = 0; j < trace_.labels.size(); ++j)
            agents_.emplace_back(fr_, trace_.labels[j]);
    }

    const Vec& eval(const Formula& f) {
        auto it = cache_.find(f.get());
        if (it != cache_.end()) return it->second;
        Vec v;
        switch (f->op) {
            case FOp::True: v = fr_.constant(true); break;
            case FOp::False: v = fr_.constant(false); break;
            case FOp::Bind: v = eval_bind(f->children[0], f->psi, /*violator=*/false); break;
            case FOp::OuterNot: {
                const Formula& b = f->children[0];
                if (b->op != FOp::Bind)
                    throw Error("task-level negation applies only to an annotated block");
                v = eval_bind(b->children[0], b->psi, /*violator=*/true);
                break;
            }
            case FOp::And: {
                std::vector<Vec> cs;
                for (const auto& c : f->children) cs.push_back(eval(c));
                v = fr_.v_and(cs);
                break;
            }
            case FOp::Or: {
                std::vector<Vec> cs;
                for (const auto& c : f->children) cs.push_back(eval(c));
                v = fr_.v_or(cs);
                break;
            }
            case FOp::Next: v = fr_.v_next(eval(f->children[0])); break;
            case FOp::Until: v = fr_.v_until(eval(f->children[0]), eval(f->children[1])); break;
            case FOp::Release:
                v = fr_.v_release(eval(f->children[0]), eval(f->children[1]));
                break;
            case FOp::Always: v = fr_.v_always(eval(f->children[0])); break;
            case FOp::Eventually: v = fr_.v_eventually(eval(f->children[0])); break;
            default: throw Error("internal: unannotated atom at task level");
        }
        return cache_.emplace(f.get(), std::move(v)).first->second;
    }

private:
    // phi^psi (violator=false): exists covered K in zeta(psi) such that every
    // agent intersecting K satisfies phi.
    // !(phi^psi) (violator=true): exists covered K and an agent intersecting
    // K that violates phi.
    Vec eval_bind(const Formula& phi, const BindingExpr& psi, bool violator) {
        if (!binding_set_subset(binding_expr_support(psi), universe_.full_mask()))
            throw Error("formula mentions a binding outside the declared universe");
        std::vector<BindingSet> covered;
        for (BindingSet k : zeta(psi, universe_))
            if (binding_set_subset(k, union_)) covered.push_back(k);

        std::vector<const Vec*> phi_of;
        phi_of.reserve(agents_.size());
        for (auto& a : agents_) phi_of.push_back(&a.eval(phi));

        Vec v = fr_.constant(false);
        for (BindingSet k : covered) {
            for (std::size_t i = 0; i < fr_.n; ++i) {
                if (v[i]) continue;
                bool ok = !violator;
                for (std::size_t j = 0; j < agents_.size(); ++j) {
                    if ((R_[j] & k) == 0) continue;
                    bool sat = (*phi_of[j])[i];
                    if (!violator && !sat) {
                        ok = false;
                        break;
                    }
                    if (violator && !sat) {
                        ok = true;
                        break;
                    }
                }
                if (ok) v[i] = 1;
            }
        }
        return v;
    }

    const Frame& fr_;
    const LassoTrace& trace_;
    const std::vector<BindingSet>& R_;
    const BindingUniverse& universe_;
    BindingSet union_ = 0;
    std::vector<PhiEval> agents_;
    std::map<const FormulaNode*, Vec> cache_;
};

// Evaluates a binding-atomic formula against a lasso word; annotated literals
// are classical letter membership.
class WordEval {
public:
    WordEval(const Frame& fr, const LassoWord& w) : fr_(fr), w_(w) {}

    const Vec& eval(const Formula& f) {
        auto it = cache_.find(f.get());
        if (it != cache_.end()) return it->second;
        Vec v;
        switch (f->op) {
            case FOp::True: v = fr_.constant(true); break;
            case FOp::False: v = fr_.constant(false); break;
            case FOp::Bind: v = literal(f); break;
            case FOp::OuterNot: v = fr_.v_not(literal(f->children[0])); break;
            case FOp::Not: v = fr_.v_not(eval(f->children[0])); break;
            case FOp::And: {
                std::vector<Vec> cs;
                for (const auto& c : f->children) cs.push_back(eval(c));
                v = fr_.v_and(cs);
                break;
            }
            case FOp::Or: {
                std::vector<Vec> cs;
                for (const auto& c : f->children) cs.push_back(eval(c));
                v = fr_.v_or(cs);
                break;
            }
            case FOp::Next: v = fr_.v_next(eval(f->children[0])); break;
            case FOp::Until: v = fr_.v_until(eval(f->children[0]), eval(f->children[1])); break;
            case FOp::Release:
                v = fr_.v_release(eval(f->children[0]), eval(f->children[1]));
                break;
            case FOp::Always: v = fr_.v_always(eval(f->children[0])); break;
            case FOp::Eventually: v = fr_.v_eventually(eval(f->children[0])); break;
            default: throw Error("word evaluation requires a binding-atomic formula");
        }
        return cache_.emplace(f.get(), std::move(v)).first->second;
    }

private:
    Vec literal(const Formula& bind) {
        if (bind->op != FOp::Bind || bind->psi->op != BindingOp::Leaf)
            throw Error("word evaluation requires a binding-atomic formula");
        const Formula& phi = bind->children[0];
        bool negated = phi->op == FOp::Not;
        const Formula& atom = negated ? phi->children[0] : phi;
        if (atom->op != FOp::Atom)
            throw Error("word evaluation requires a binding-atomic formula");
        PropPair p{atom->atom, bind->psi->binding};
        Vec v(fr_.n);
        for (std::size_t i = 0; i < fr_.n; ++i) {
            bool present = std::binary_search(w_.letters[i].begin(), w_.letters[i].end(), p);
            v[i] = negated ? !present : present;
        }
        return v;
    }

    const Frame& fr_;
    const LassoWord& w_;
    std::map<const FormulaNode*, Vec> cache_;
};

} // namespace

bool satisfies_word(const LassoWord& w, const Formula& atomic_f) {
    if (w.letters.empty() || w.prefix_len >= w.letters.size())
        throw Error("lasso word must have a nonempty cycle");
    Frame fr{w.letters.size(), w.prefix_len};
    WordEval ev(fr, w);
    return ev.eval(atomic_f)[0];
}

bool satisfies(const LassoTrace& trace, const std::vector<BindingSet>& R, const Formula& f,
               const BindingUniverse& universe) {
    if (trace.cycle_len == 0) throw Error("lasso trace must have a nonempty cycle");
    if (trace.labels.size() != R.size())
        throw Error("binding assignment size does not match the number of agents");
    std::size_t n = trace.length();
    for (const auto& seq : trace.labels)
        if (seq.size() != n) throw Error("agent label sequences must share the trace length");
    Frame fr{n, trace.prefix_len};
    TeamEval ev(fr, trace, R, universe);
    return ev.eval(f)[0];
}

std::vector<LassoWord> enumerate_lasso_words(const std::vector<std::vector<PropPair>>& alphabet,
                                             std::size_t max_total) {
    std::vector<LassoWord> out;
    std::vector<std::size_t> idx;
    for (std::size_t total = 1; total <= max_total; ++total) {
        idx.assign(total, 0);
        for (;;) {
            for (std::size_t prefix = 0; prefix < total; ++prefix) {
                LassoWord w;
                w.prefix_len = prefix;
                for (std::size_t i = 0; i < total; ++i) w.letters.push_back(alphabet[idx[i]]);
                out.push_back(std::move(w));
            }
            bool advanced = false;
            for (std::size_t k = total; k-- > 0;) {
                if (++idx[k] < alphabet.size()) {
                    advanced = true;
                    break;
                }
                idx[k] = 0;
            }
            if (!advanced) break;
        }
    }
    return out;
}

std::vector<LassoWord> enumerate_satisfying_lassos(
    const Formula& atomic_f, const std::vector<std::vector<PropPair>>& alphabet,
    std::size_t max_total) {
    std::vector<LassoWord> out;
    for (auto& w : enumerate_lasso_words(alphabet, max_total))
        if (satisfies_word(w, atomic_f)) out.push_back(std::move(w));
    return out;
}

} // namespace ltlpsi
