#pragma once

// Seeded random generators for property tests. Every function is
// deterministic in the passed-in engine; tests construct engines from fixed
// seeds so failures reproduce exactly.

#include <random>
#include <vector>

#include "ltlpsi/formula.hpp"
#include "ltlpsi/vocab.hpp"

namespace ltlpsi::testgen {

inline int pick(std::mt19937_64& rng, int lo, int hi) {
    return static_cast<int>(lo + rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline BindingExpr random_binding_expr(std::mt19937_64& rng, int num_bindings, int depth) {
    if (depth <= 0 || pick(rng, 0, 99) < 45)
        return binding_leaf(pick(rng, 0, num_bindings - 1));
    int n = pick(rng, 2, 3);
    std::vector<BindingExpr> cs;
    cs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cs.push_back(random_binding_expr(rng, num_bindings, depth - 1));
    return pick(rng, 0, 1) ? binding_and(std::move(cs)) : binding_or(std::move(cs));
}

// Plain LTL over `num_props` action ids (no annotations).
inline Formula random_phi(std::mt19937_64& rng, int num_props, int depth) {
    if (depth <= 0 || pick(rng, 0, 99) < 30)
        return f_atom(static_cast<ActionId>(pick(rng, 0, num_props - 1)));
    switch (pick(rng, 0, 6)) {
        case 0: return f_not(random_phi(rng, num_props, depth - 1));
        case 1:
            return f_and({random_phi(rng, num_props, depth - 1),
                          random_phi(rng, num_props, depth - 1)});
        case 2:
            return f_or({random_phi(rng, num_props, depth - 1),
                         random_phi(rng, num_props, depth - 1)});
        case 3: return f_next(random_phi(rng, num_props, depth - 1));
        case 4:
            return f_until(random_phi(rng, num_props, depth - 1),
                           random_phi(rng, num_props, depth - 1));
        case 5: return f_always(random_phi(rng, num_props, depth - 1));
        default: return f_eventually(random_phi(rng, num_props, depth - 1));
    }
}

struct TaskGenOptions {
    int num_props = 3;      // distinct action propositions
    int num_bindings = 2;   // binding universe size
    int phi_depth = 2;      // depth budget inside annotations
    int psi_depth = 1;      // depth budget for binding expressions
    int task_depth = 2;     // depth budget for task-level structure
};

inline Formula random_task(std::mt19937_64& rng, const TaskGenOptions& opt) {
    auto leaf = [&]() {
        Formula b = f_bind(random_phi(rng, opt.num_props, opt.phi_depth),
                           random_binding_expr(rng, opt.num_bindings, opt.psi_depth));
        return pick(rng, 0, 3) == 0 ? f_outer_not(b) : b;
    };
    if (opt.task_depth <= 0 || pick(rng, 0, 99) < 35) return leaf();
    TaskGenOptions inner = opt;
    inner.task_depth = opt.task_depth - 1;
    switch (pick(rng, 0, 5)) {
        case 0: return f_and({random_task(rng, inner), random_task(rng, inner)});
        case 1: return f_or({random_task(rng, inner), random_task(rng, inner)});
        case 2: return f_next(random_task(rng, inner));
        case 3: return f_until(random_task(rng, inner), random_task(rng, inner));
        case 4: return f_always(random_task(rng, inner));
        default: return f_eventually(random_task(rng, inner));
    }
}

} // namespace ltlpsi::testgen
