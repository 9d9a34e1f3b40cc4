#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "ltlpsi/errors.hpp"
#include "ltlpsi/formula.hpp"
#include "ltlpsi/product.hpp"
#include "support/fixtures.hpp"

using namespace ltlpsi;

namespace {

PropPair pp(const Vocab& v, const char* action, int external_binding) {
    return {*v.actions.lookup(action), *v.bindings.index_of(external_binding)};
}

EdgeLabel lbl(std::vector<PropPair> t, std::vector<PropPair> f) {
    std::sort(t.begin(), t.end());
    std::sort(f.begin(), f.end());
    return {std::move(t), std::move(f)};
}

BindingSet mask_of(const BindingUniverse& u, std::initializer_list<int> external) {
    BindingSet m = 0;
    for (int e : external) m = binding_set_with(m, *u.index_of(e));
    return m;
}

std::set<ActionId> acts(const Vocab& v, std::initializer_list<const char*> names) {
    std::set<ActionId> s;
    for (const char* n : names) s.insert(*v.actions.lookup(n));
    return s;
}

// All admissible assignments for a move: the nonempty subsets of `feasible`.
std::vector<BindingSet> assignments(BindingSet feasible) {
    std::vector<BindingSet> out;
    for (BindingSet r = feasible; r != 0; r = (r - 1) & feasible) out.push_back(r);
    std::sort(out.begin(), out.end());
    return out;
}

BuchiAutomaton single_state_buchi(EdgeLabel label) {
    BuchiAutomaton b;
    b.num_states = 1;
    b.initial = 0;
    b.edges.push_back({0, 0, std::move(label)});
    b.accepting = {1};
    b.finalize();
    return b;
}

Formula word_form(const std::string& text, const Vocab& v) {
    return outer_to_literal(rewrite_atomic(parse_task(text, v)));
}

} // namespace

TEST_CASE("binding requirements read off a label gate the next-state label") {
    const Vocab v = fixtures::mission_vocab();
    // "no pickup by binding 1, no region_A focus by binding 2" on this move
    const EdgeLabel e1 = lbl({}, {pp(v, "pickup", 1), pp(v, "region_A", 2)});
    const std::set<ActionId> every_ap = acts(
        v, {"pickup", "dropoff", "weed", "region_A", "region_B", "moisture", "UV"});

    const auto at = [&](std::initializer_list<const char*> label_props) {
        return feasible_bindings(e1, acts(v, label_props), every_ap, v.bindings);
    };

    CHECK(at({"region_B"}) == mask_of(v.bindings, {1, 2, 3}));
    CHECK(at({"region_A"}) == mask_of(v.bindings, {1, 3}));
    CHECK(at({"region_A", "pickup"}) == mask_of(v.bindings, {3}));

    // Expanding the generator reproduces the full assignment sets.
    CHECK(assignments(at({"region_B"})).size() == 7);  // 2^3 - 1
    CHECK(assignments(at({"region_A"})) ==
          std::vector<BindingSet>{mask_of(v.bindings, {1}), mask_of(v.bindings, {3}),
                                  mask_of(v.bindings, {1, 3})});
    CHECK(assignments(at({"region_A", "pickup"})) ==
          std::vector<BindingSet>{mask_of(v.bindings, {3})});

    // Required actions must be present in the target label.
    const EdgeLabel need = lbl({pp(v, "pickup", 1)}, {});
    CHECK(binding_feasible(*v.bindings.index_of(1), need, acts(v, {"pickup"}), every_ap));
    CHECK(!binding_feasible(*v.bindings.index_of(1), need, acts(v, {"region_A"}), every_ap));
    // Bindings the label never mentions are unconstrained.
    CHECK(binding_feasible(*v.bindings.index_of(3), need, {}, every_ap));

    // A forbidden action the agent cannot perform at all is vacuously avoided,
    // even against a (hypothetical) label that contains it.
    const EdgeLabel avoid = lbl({}, {pp(v, "thermal", 2)});
    CHECK(binding_feasible(*v.bindings.index_of(2), avoid, acts(v, {"thermal"}), every_ap));
}

TEST_CASE("product of the arm agent with a one-state guard keeps per-target feasibility") {
    const Vocab v = fixtures::mission_vocab();
    const AgentModel green = fixtures::green_agent(v);
    const BuchiAutomaton b =
        single_state_buchi(lbl({}, {pp(v, "pickup", 1), pp(v, "region_A", 2)}));

    const ProductAutomaton p = build_product(green, b, v.bindings);

    // Binding 3 is never mentioned, so every agent move survives: the product
    // mirrors the full agent model against the single guard state.
    CHECK(p.num_states() == green.num_states());
    CHECK(p.edges.size() == green.transitions.size());
    for (int q = 0; q < p.num_states(); ++q) CHECK(p.accepting[static_cast<std::size_t>(q)]);

    auto by_name = [&](const std::string& name) {
        for (int s = 0; s < green.num_states(); ++s)
            if (green.state_names[static_cast<std::size_t>(s)] == name)
                return p.state_index(s, 0);
        return -1;
    };
    const int s1 = by_name("region_B|idle");   // labeled {region_B}
    const int s2 = by_name("region_A|idle");   // labeled {region_A}
    const int s3 = by_name("region_A|pickup"); // labeled {region_A, pickup}
    REQUIRE(s1 == p.initial);
    REQUIRE(s2 >= 0);
    REQUIRE(s3 >= 0);

    auto edge_between = [&](int from, int to) -> const ProductEdge& {
        for (int ei : p.out[static_cast<std::size_t>(from)])
            if (p.edges[static_cast<std::size_t>(ei)].to == to)
                return p.edges[static_cast<std::size_t>(ei)];
        static const ProductEdge missing;
        return missing;
    };
    CHECK(edge_between(s1, s1).feasible_for(0) == mask_of(v.bindings, {1, 2, 3}));
    CHECK(edge_between(s1, s2).feasible_for(0) == mask_of(v.bindings, {1, 3}));
    CHECK(edge_between(s1, s3).feasible_for(0) == mask_of(v.bindings, {3}));

    // Costs carry over from the agent moves: stay 0, swing 1.0, swing+grab 1.5.
    CHECK(edge_between(s1, s1).weight == doctest::Approx(0.0));
    CHECK(edge_between(s1, s2).weight == doctest::Approx(1.0));
    CHECK(edge_between(s1, s3).weight == doctest::Approx(1.5));
}

TEST_CASE("single-state agent against an unconstrained guard gives the unit product") {
    Vocab v;
    v.actions.intern("ping");
    v.bindings = BindingUniverse({1, 2});

    ActionTable& at = v.actions;
    Capability cap;
    cap.name = "unit";
    cap.state_names = {"only"};
    cap.initial = 0;
    cap.ap = {*at.lookup("ping")};
    cap.labels = {{}};
    cap.transitions = {{0, 0, 0.0}};
    const AgentModel solo = compose_capabilities("solo", {cap});

    const ProductAutomaton p = build_product(solo, single_state_buchi(lbl({}, {})), v.bindings);
    CHECK(p.num_states() == 1);
    CHECK(p.initial == 0);
    CHECK(p.accepting[0]);
    REQUIRE(p.edges.size() == 1);
    REQUIRE(p.edges[0].records.size() == 1);
    CHECK(p.edges[0].records[0].feasible == v.bindings.full_mask());
}

TEST_CASE("an agent without the required faculty can never carry that binding") {
    const Vocab v = fixtures::mission_vocab();
    const AgentModel blue = fixtures::blue_agent(v);  // sensors only, no arm
    const BuchiAutomaton b = translate(word_form("F(pickup^{1})", v));

    const ActionId pickup = *v.actions.lookup("pickup");
    const int rho1 = *v.bindings.index_of(1);

    std::size_t constrained_edges = 0;
    for (const auto& be : b.edges) {
        const bool needs_pickup1 =
            std::find(be.label.sigma_t.begin(), be.label.sigma_t.end(),
                      PropPair{pickup, rho1}) != be.label.sigma_t.end();
        if (!needs_pickup1) continue;
        ++constrained_edges;
        for (int s = 0; s < blue.num_states(); ++s)
            CHECK(!binding_feasible(rho1, be.label, blue.labels[static_cast<std::size_t>(s)],
                                    blue.ap));
    }
    REQUIRE(constrained_edges > 0);

    // The product keeps those Büchi edges alive through other bindings only.
    const ProductAutomaton p = build_product(blue, b, v.bindings);
    const BindingSet bit1 = mask_of(v.bindings, {1});
    for (const auto& e : p.edges)
        for (const auto& rec : e.records) {
            const auto& label = b.edges[static_cast<std::size_t>(rec.buchi_edge)].label;
            const bool needs_pickup1 =
                std::find(label.sigma_t.begin(), label.sigma_t.end(),
                          PropPair{pickup, rho1}) != label.sigma_t.end();
            if (needs_pickup1) CHECK((rec.feasible & bit1) == 0);
            CHECK(rec.feasible != 0);
        }
}

TEST_CASE("assignment membership equals the per-binding conjunction") {
    const Vocab v = fixtures::mission_vocab();
    std::mt19937_64 rng(77001);
    auto pick = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    const std::vector<std::string> names = {"pickup", "region_A", "region_B",
                                            "moisture", "UV", "thermal"};

    for (int iter = 0; iter < 200; ++iter) {
        // Random disjoint sigma_t / sigma_f over random (action, binding) pairs.
        std::set<PropPair> pool;
        const int total = pick(0, 5);
        for (int i = 0; i < total; ++i)
            pool.insert(pp(v, names[static_cast<std::size_t>(pick(0, 5))].c_str(), pick(1, 3)));
        std::vector<PropPair> t, f;
        for (const auto& q : pool) (pick(0, 1) ? t : f).push_back(q);
        const EdgeLabel label = lbl(t, f);

        std::set<ActionId> next_label, ap;
        for (const auto& n : names) {
            const ActionId a = *v.actions.lookup(n);
            if (pick(0, 2) == 0) next_label.insert(a);
            if (pick(0, 3) != 0) ap.insert(a);  // sometimes missing a faculty
        }
        for (ActionId a : next_label) ap.insert(a);  // labels stay inside the alphabet

        const BindingSet feasible = feasible_bindings(label, next_label, ap, v.bindings);
        for (BindingSet r = 1; r <= v.bindings.full_mask(); ++r) {
            bool member = true;
            for (int rho = 0; rho < v.bindings.size(); ++rho)
                if (binding_set_contains(r, rho) &&
                    !binding_feasible(rho, label, next_label, ap))
                    member = false;
            // r is an admissible assignment exactly when it sits inside the
            // generator; nonempty subsets of members are members.
            CHECK(member == binding_set_subset(r, feasible));
            if (member)
                for (BindingSet sub = r; sub != 0; sub = (sub - 1) & r)
                    CHECK(binding_set_subset(sub, feasible));
        }

        // Feasibility only reads propositions the label mentions: adding any
        // other proposition to the target label changes nothing.
        std::set<ActionId> mentioned;
        for (const auto& q : label.sigma_t) mentioned.insert(q.action);
        for (const auto& q : label.sigma_f) mentioned.insert(q.action);
        for (const auto& n : names) {
            const ActionId a = *v.actions.lookup(n);
            if (mentioned.count(a) || next_label.count(a)) continue;
            std::set<ActionId> grown = next_label;
            grown.insert(a);
            std::set<ActionId> grown_ap = ap;
            grown_ap.insert(a);
            CHECK(feasible_bindings(label, grown, grown_ap, v.bindings) == feasible);
            break;
        }
    }
}

TEST_CASE("product construction is deterministic and respects the state cap") {
    const Vocab v = fixtures::mission_vocab();
    const AgentModel green = fixtures::green_agent(v);
    const BuchiAutomaton b = translate(word_form(fixtures::mission_text(), v));

    const ProductAutomaton p1 = build_product(green, b, v.bindings);
    const ProductAutomaton p2 = build_product(green, b, v.bindings);
    CHECK(p1.num_states() == p2.num_states());
    CHECK(p1.index == p2.index);
    REQUIRE(p1.edges.size() == p2.edges.size());
    for (std::size_t i = 0; i < p1.edges.size(); ++i) {
        CHECK(p1.edges[i].from == p2.edges[i].from);
        CHECK(p1.edges[i].to == p2.edges[i].to);
        CHECK(p1.edges[i].records == p2.edges[i].records);
    }
    CHECK(product_to_dot(p1, green, b, v) == product_to_dot(p2, green, b, v));

    // Structural sanity: adjacency matches edges, weights match agent moves.
    for (int s = 0; s < p1.num_states(); ++s)
        for (int ei : p1.out[static_cast<std::size_t>(s)])
            CHECK(p1.edges[static_cast<std::size_t>(ei)].from == s);
    for (const auto& e : p1.edges) {
        const int ti = green.transition_index(
            p1.agent_state[static_cast<std::size_t>(e.from)],
            p1.agent_state[static_cast<std::size_t>(e.to)]);
        REQUIRE(ti >= 0);
        CHECK(green.transitions[static_cast<std::size_t>(ti)].weight == e.weight);
        CHECK(p1.accepting[static_cast<std::size_t>(e.from)] ==
              (b.is_accepting(p1.buchi_state[static_cast<std::size_t>(e.from)]) ? 1 : 0));
    }

    CHECK_THROWS_AS(build_product(green, b, v.bindings, 3), ResourceLimitError);

    // Fragment view: restricting to the initial guard state drops the rest.
    const int z0 = p1.buchi_state[static_cast<std::size_t>(p1.initial)];
    const std::set<int> keep{z0};
    const std::string fragment = product_to_dot(p1, green, b, v, &keep);
    const std::string full = product_to_dot(p1, green, b, v);
    CHECK(fragment.size() < full.size());
    CHECK(fragment.find("region_B|idle") != std::string::npos);
}
