#include <doctest.h>

#include <random>

#include "ltlpsi/semantics.hpp"
#include "support/gen.hpp"

using namespace ltlpsi;

namespace {

// Word over a single annotated proposition p^1: positions given as 0/1.
LassoWord word_of(std::size_t prefix_len, std::vector<int> bits, PropPair p) {
    LassoWord w;
    w.prefix_len = prefix_len;
    for (int b : bits) {
        if (b)
            w.letters.push_back({p});
        else
            w.letters.push_back({});
    }
    return w;
}

// Team trace where each agent's behavior is a 0/1 row over one action.
LassoTrace trace_of(std::size_t prefix_len, std::size_t cycle_len,
                    std::vector<std::vector<int>> rows, ActionId act) {
    LassoTrace t;
    t.prefix_len = prefix_len;
    t.cycle_len = cycle_len;
    for (const auto& row : rows) {
        std::vector<std::set<ActionId>> seq;
        for (int b : row) seq.push_back(b ? std::set<ActionId>{act} : std::set<ActionId>{});
        t.labels.push_back(std::move(seq));
    }
    return t;
}

Vocab one_prop_vocab() {
    Vocab v;
    v.actions.intern("p");
    v.actions.intern("q");
    v.bindings = BindingUniverse({1, 2});
    return v;
}

} // namespace

TEST_CASE("word evaluation: temporal operators on lassos") {
    Vocab v = one_prop_vocab();
    PropPair p{*v.actions.lookup("p"), *v.bindings.index_of(1)};
    Formula Gp = parse_task("G(p^{1})", v);
    Formula Fp = parse_task("F(p^{1})", v);
    Formula GFp = parse_task("G(F(p^{1}))", v);
    Formula FGp = parse_task("F(G(p^{1}))", v);

    // p everywhere.
    CHECK(satisfies_word(word_of(0, {1}, p), Gp));
    // p only in the cycle after an empty prefix position.
    LassoWord w1 = word_of(1, {0, 1}, p);
    CHECK_FALSE(satisfies_word(w1, Gp));
    CHECK(satisfies_word(w1, Fp));
    CHECK(satisfies_word(w1, parse_task("X(G(p^{1}))", v)));
    // Alternating cycle: GF but not FG.
    LassoWord w2 = word_of(0, {1, 0}, p);
    CHECK(satisfies_word(w2, GFp));
    CHECK_FALSE(satisfies_word(w2, FGp));
    CHECK_FALSE(satisfies_word(w2, Gp));
    // p nowhere.
    CHECK_FALSE(satisfies_word(word_of(0, {0}, p), Fp));

    // Next wraps from the last cycle position to the cycle start.
    LassoWord w3 = word_of(1, {0, 1}, p);  // cycle = [p]
    CHECK(satisfies_word(w3, parse_task("X(X(p^{1}))", v)));

    // Until across the wrap: q^1 holds only at the cycle start.
    Vocab v2 = one_prop_vocab();
    PropPair q{*v2.actions.lookup("q"), *v2.bindings.index_of(1)};
    LassoWord w4;
    w4.prefix_len = 1;
    w4.letters = {{p}, {q}, {p}};  // prefix [p], cycle [q, p]
    // At position 2 (p), p U q requires the wrap back to position 1.
    CHECK(satisfies_word(w4, parse_task("X(X(p^{1} U q^{1}))", v2)));
}

TEST_CASE("word evaluation: negated literals and task-level negation coincide") {
    Vocab v = one_prop_vocab();
    PropPair p{*v.actions.lookup("p"), *v.bindings.index_of(1)};
    LassoWord has = word_of(0, {1}, p);
    LassoWord lacks = word_of(0, {0}, p);

    CHECK_FALSE(satisfies_word(has, parse_task("!p^{1}", v)));
    CHECK(satisfies_word(lacks, parse_task("!p^{1}", v)));
    CHECK_FALSE(satisfies_word(has, parse_task("!(p^{1})", v)));
    CHECK(satisfies_word(lacks, parse_task("!(p^{1})", v)));
}

TEST_CASE("word evaluation: expansion laws hold on random words") {
    Vocab v;
    for (const char* n : {"p", "q"}) v.actions.intern(n);
    v.bindings = BindingUniverse({1});
    Formula a = parse_task("p^{1}", v);
    Formula b = parse_task("q^{1}", v);
    PropPair pp{*v.actions.lookup("p"), 0};
    PropPair qq{*v.actions.lookup("q"), 0};
    std::vector<std::vector<PropPair>> alphabet = {{}, {pp}, {qq}, {pp, qq}};

    Formula until = f_until(a, b);
    Formula until_exp = f_or({b, f_and({a, f_next(until)})});
    Formula release = f_release(a, b);
    Formula release_exp = f_and({b, f_or({a, f_next(release)})});
    Formula alw = f_always(a);
    Formula alw_exp = f_and({a, f_next(alw)});
    Formula ev = f_eventually(a);
    Formula ev_exp = f_or({a, f_next(ev)});
    // R as the dual of U, via classical word-level negation.
    Formula release_dual = f_not(f_until(f_not(a), f_not(b)));

    for (const auto& w : enumerate_lasso_words(alphabet, 4)) {
        CHECK(satisfies_word(w, until) == satisfies_word(w, until_exp));
        CHECK(satisfies_word(w, release) == satisfies_word(w, release_exp));
        CHECK(satisfies_word(w, alw) == satisfies_word(w, alw_exp));
        CHECK(satisfies_word(w, ev) == satisfies_word(w, ev_exp));
        CHECK(satisfies_word(w, release) == satisfies_word(w, release_dual));
    }
}

TEST_CASE("enumerate_lasso_words: counts and shape") {
    Vocab v = one_prop_vocab();
    PropPair p{*v.actions.lookup("p"), 0};
    std::vector<std::vector<PropPair>> alphabet = {{}, {p}};
    auto words = enumerate_lasso_words(alphabet, 3);
    // For total length n there are n prefix splits and 2^n letter choices:
    // 2*1 + 4*2 + 8*3 = 34.
    CHECK(words.size() == 34);
    for (const auto& w : words) {
        CHECK(w.cycle_len() >= 1);
        CHECK(w.length() <= 3);
    }
}

TEST_CASE("team evaluation: covering-set quantifier") {
    Vocab v = one_prop_vocab();
    ActionId p = *v.actions.lookup("p");
    BindingSet b1 = 1u << *v.bindings.index_of(1);
    BindingSet b2 = 1u << *v.bindings.index_of(2);

    // Uncovered binding: false for the positive and the negated block alike.
    LassoTrace t0 = trace_of(0, 1, {{1}}, p);
    CHECK_FALSE(satisfies(t0, {0}, parse_task("p^{1}", v), v.bindings));
    CHECK_FALSE(satisfies(t0, {0}, parse_task("!(p^{1})", v), v.bindings));
    CHECK_FALSE(satisfies(t0, {b2}, parse_task("p^{1}", v), v.bindings));

    // Two carriers of binding 1: agent 0 does p, agent 1 does not.
    LassoTrace t1 = trace_of(0, 1, {{1}, {0}}, p);
    CHECK_FALSE(satisfies(t1, {b1, b1}, parse_task("p^{1}", v), v.bindings));
    CHECK_FALSE(satisfies(t1, {b1, b1}, parse_task("(!p)^{1}", v), v.bindings));
    // "At least one agent violates" / "at least one agent satisfies":
    CHECK(satisfies(t1, {b1, b1}, parse_task("!(p^{1})", v), v.bindings));
    CHECK(satisfies(t1, {b1, b1}, parse_task("!((!p)^{1})", v), v.bindings));

    // Disjunctive annotation: a covering set may leave the failing agent out.
    LassoTrace t2 = trace_of(0, 1, {{1}, {0}}, p);
    CHECK(satisfies(t2, {b1, b2}, parse_task("p^{1 | 2}", v), v.bindings));
    CHECK_FALSE(satisfies(t2, {b1, b2}, parse_task("p^{1 & 2}", v), v.bindings));
    CHECK_FALSE(satisfies(t2, {b1, 0}, parse_task("p^{1 & 2}", v), v.bindings));
    LassoTrace t3 = trace_of(0, 1, {{1}, {1}}, p);
    CHECK(satisfies(t3, {b1, b2}, parse_task("p^{1 & 2}", v), v.bindings));

    // Temporal structure over annotated blocks.
    LassoTrace t4 = trace_of(2, 2, {{0, 0, 1, 0}}, p);
    CHECK(satisfies(t4, {b1}, parse_task("F(p^{1})", v), v.bindings));
    CHECK(satisfies(t4, {b1}, parse_task("G(F(p^{1}))", v), v.bindings));
    CHECK_FALSE(satisfies(t4, {b1}, parse_task("F(G(p^{1}))", v), v.bindings));

    // Unknown binding in the formula.
    Vocab wide = one_prop_vocab();
    wide.bindings = BindingUniverse({1, 2, 3});
    Formula f3 = parse_task("p^{3}", wide);
    CHECK_THROWS_AS(satisfies(t0, {b1}, f3, v.bindings), Error);
}

TEST_CASE("team evaluation: duality for conjunctive annotations") {
    // satisfies((!phi)^psi) implies !satisfies(phi^psi) when psi is a leaf or
    // a pure conjunction (any covering sets then share a nonempty carrier
    // group; a disjunctive psi may pick disjoint groups, so it is exempt).
    std::mt19937_64 rng(4412u);
    Vocab v;
    for (const char* n : {"p", "q"}) v.actions.intern(n);
    v.bindings = BindingUniverse({1, 2});

    for (int iter = 0; iter < 200; ++iter) {
        Formula phi = testgen::random_phi(rng, 2, 2);
        BindingExpr psi = testgen::pick(rng, 0, 1)
                              ? binding_leaf(testgen::pick(rng, 0, 1))
                              : binding_and({binding_leaf(0), binding_leaf(1)});
        int agents = testgen::pick(rng, 1, 3);
        std::size_t prefix = static_cast<std::size_t>(testgen::pick(rng, 0, 2));
        std::size_t cycle = static_cast<std::size_t>(testgen::pick(rng, 1, 2));
        LassoTrace t;
        t.prefix_len = prefix;
        t.cycle_len = cycle;
        std::vector<BindingSet> R;
        for (int j = 0; j < agents; ++j) {
            std::vector<std::set<ActionId>> seq;
            for (std::size_t i = 0; i < prefix + cycle; ++i) {
                std::set<ActionId> lab;
                if (testgen::pick(rng, 0, 1)) lab.insert(0);
                if (testgen::pick(rng, 0, 1)) lab.insert(1);
                seq.push_back(std::move(lab));
            }
            t.labels.push_back(std::move(seq));
            R.push_back(static_cast<BindingSet>(testgen::pick(rng, 0, 3)));
        }
        Formula pos = f_bind(phi, psi);
        Formula neg = f_bind(f_not(phi), psi);
        if (satisfies(t, R, neg, v.bindings)) CHECK_FALSE(satisfies(t, R, pos, v.bindings));
        // The existential negation is weaker than the universal one.
        if (satisfies(t, R, neg, v.bindings)) CHECK(satisfies(t, R, f_outer_not(pos), v.bindings));
    }
}

TEST_CASE("team evaluation: single agent carrying every binding matches word semantics") {
    std::mt19937_64 rng(90210u);
    Vocab v;
    for (const char* n : {"p", "q"}) v.actions.intern(n);
    v.bindings = BindingUniverse({1, 2});
    testgen::TaskGenOptions opt;
    opt.num_props = 2;
    opt.num_bindings = 2;

    for (int iter = 0; iter < 300; ++iter) {
        Formula atomic = rewrite_atomic(testgen::random_task(rng, opt));

        std::size_t prefix = static_cast<std::size_t>(testgen::pick(rng, 0, 2));
        std::size_t cycle = static_cast<std::size_t>(testgen::pick(rng, 1, 3));
        LassoTrace t;
        t.prefix_len = prefix;
        t.cycle_len = cycle;
        t.labels.emplace_back();
        LassoWord w;
        w.prefix_len = prefix;
        for (std::size_t i = 0; i < prefix + cycle; ++i) {
            std::set<ActionId> lab;
            std::vector<PropPair> letter;
            for (ActionId a : {0u, 1u}) {
                if (testgen::pick(rng, 0, 1)) {
                    lab.insert(a);
                    letter.push_back({a, 0});
                    letter.push_back({a, 1});
                }
            }
            std::sort(letter.begin(), letter.end());
            t.labels[0].push_back(std::move(lab));
            w.letters.push_back(std::move(letter));
        }

        std::vector<BindingSet> R = {v.bindings.full_mask()};
        CAPTURE(iter);
        CHECK(satisfies(t, R, atomic, v.bindings) == satisfies_word(w, atomic));
    }
}
