// Behavior synthesis and team execution: minimum-cost segment paths, the
// lockstep wait-and-cross simulator, message discipline, and end-to-end
// satisfaction of the task by the produced traces.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"

#include "ltlpsi/agent.hpp"
#include "ltlpsi/buchi.hpp"
#include "ltlpsi/errors.hpp"
#include "ltlpsi/executor.hpp"
#include "ltlpsi/feasibility.hpp"
#include "ltlpsi/formula.hpp"
#include "ltlpsi/product.hpp"
#include "ltlpsi/semantics.hpp"
#include "ltlpsi/team.hpp"
#include "ltlpsi/vocab.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"

namespace {

using namespace ltlpsi;

Formula word_form(const std::string& text, const Vocab& v) {
    return outer_to_literal(rewrite_atomic(parse_task(text, v)));
}

BindingSet mask_of(const BindingUniverse& u, std::initializer_list<int> external) {
    BindingSet s = 0;
    for (int id : external) s = binding_set_with(s, *u.index_of(id));
    return s;
}

// Unique edge of the plan between two states (tiny plans only).
int find_edge(const BuchiAutomaton& plan, int from, int to) {
    int found = -1;
    for (std::size_t i = 0; i < plan.edges.size(); ++i)
        if (plan.edges[i].from == from && plan.edges[i].to == to) {
            REQUIRE(found == -1);
            found = static_cast<int>(i);
        }
    REQUIRE(found >= 0);
    return found;
}

// Single-capability agent with explicit weighted moves (plus free holds).
AgentModel make_agent(const std::string& name, const std::vector<std::set<ActionId>>& labels,
                      const std::vector<WeightedEdge>& moves, int initial) {
    Capability cap;
    cap.name = name;
    cap.initial = initial;
    for (std::size_t s = 0; s < labels.size(); ++s) {
        cap.state_names.push_back("s" + std::to_string(s));
        cap.labels.push_back(labels[s]);
        for (ActionId a : labels[s]) cap.ap.insert(a);
        cap.transitions.push_back({static_cast<int>(s), static_cast<int>(s), 0.0});
    }
    for (const WeightedEdge& e : moves) cap.transitions.push_back(e);
    return compose_capabilities(name, {cap});
}

std::vector<int> agent_projection(const ProductAutomaton& g, const std::vector<int>& states) {
    std::vector<int> out;
    for (int q : states) out.push_back(g.agent_state[static_cast<std::size_t>(q)]);
    return out;
}

bool has_action(const std::set<ActionId>& label, const Vocab& v, const std::string& name) {
    return label.count(*v.actions.lookup(name)) != 0;
}

} // namespace

TEST_CASE("behaviors take the cheapest admissible route and park before crossing") {
    Vocab v;
    const ActionId p = v.actions.intern("p");
    v.bindings = BindingUniverse({1, 2});
    // The self-loop forbids showing p before the crossing, so the carrier
    // of binding 1 cannot park inside the goal state.
    const BuchiAutomaton plan = translate_plan(word_form("!p^{1} U p^{1}", v));
    REQUIRE(plan.num_states == 2);
    const int self0 = find_edge(plan, 0, 0);
    const int prog = find_edge(plan, 0, 1);
    const int fin = find_edge(plan, 1, 1);

    // Direct move to the goal costs 5; the two-hop detour costs 2.
    AgentModel tri = make_agent("tri", {{}, {p}, {}},
                                {{0, 1, 5.0}, {0, 2, 1.0}, {2, 1, 1.0}}, 0);
    ProductAutomaton g = build_product(tri, plan, v.bindings);
    AgentBehavior b = find_behavior(g, tri, mask_of(v.bindings, {1}), g.initial, self0, prog, fin);
    CHECK(agent_projection(g, b.states) == std::vector<int>{0, 2, 1});
    CHECK(b.cost == doctest::Approx(2.0));
    CHECK(b.wait_index() == 1);
    CHECK(b.labels.back().count(p) == 1);

    // A carrier the edge says nothing about takes the cheapest waiting
    // route: stay put and cross in place at zero cost.
    AgentModel idler = make_agent("idler", {{}, {p}}, {{0, 1, 1.0}}, 0);
    ProductAutomaton gi = build_product(idler, plan, v.bindings);
    AgentBehavior bi =
        find_behavior(gi, idler, mask_of(v.bindings, {2}), gi.initial, self0, prog, fin);
    CHECK(bi.cost == doctest::Approx(0.0));
    CHECK(agent_projection(gi, bi.states) == std::vector<int>{0, 0});

    // An agent that can never make p true has no admissible behavior for a
    // carrier of binding 1.
    AgentModel blank = make_agent("blank", {{}, {}}, {{0, 1, 1.0}}, 0);
    ProductAutomaton gb = build_product(blank, plan, v.bindings);
    CHECK_THROWS_AS(
        find_behavior(gb, blank, mask_of(v.bindings, {1}), gb.initial, self0, prog, fin), Error);
}

TEST_CASE("a crossing source must offer a wait move") {
    Vocab v;
    const ActionId p = v.actions.intern("p");
    v.bindings = BindingUniverse({1});
    const BuchiAutomaton plan = translate_plan(word_form("!p^{1} U p^{1}", v));
    REQUIRE(plan.num_states == 2);
    const int self0 = find_edge(plan, 0, 0);
    const int prog = find_edge(plan, 0, 1);
    const int fin = find_edge(plan, 1, 1);
    const BindingSet r = mask_of(v.bindings, {1});

    // The only way into the p-state runs through s1, and the self-loop at
    // the source forbids entering p early, so s1 is the only possible
    // pre-crossing state. Without a wait move there the agent could never
    // hold position for the rest of the team.
    const std::vector<std::set<ActionId>> labels = {{}, {}, {p}};
    Capability cap;
    cap.name = "stuck";
    cap.initial = 0;
    for (std::size_t s = 0; s < labels.size(); ++s) {
        cap.state_names.push_back("s" + std::to_string(s));
        cap.labels.push_back(labels[s]);
        for (ActionId a : labels[s]) cap.ap.insert(a);
    }
    cap.transitions = {{0, 0, 0.0}, {2, 2, 0.0}, {0, 1, 1.0}, {1, 2, 1.0}};
    const AgentModel stuck = compose_capabilities("stuck", {cap});
    ProductAutomaton gs = build_product(stuck, plan, v.bindings);
    CHECK_THROWS_AS(find_behavior(gs, stuck, r, gs.initial, self0, prog, fin), Error);

    // Adding the wait move at s1 makes the same route synthesizable.
    AgentModel ok = make_agent("ok", labels, {{0, 1, 1.0}, {1, 2, 1.0}}, 0);
    ProductAutomaton go = build_product(ok, plan, v.bindings);
    AgentBehavior b = find_behavior(go, ok, r, go.initial, self0, prog, fin);
    CHECK(agent_projection(go, b.states) == std::vector<int>{0, 1, 2});
    CHECK(b.wait_index() == 1);
}

TEST_CASE("an opening crossing happens standing still") {
    Vocab v;
    const ActionId p = v.actions.intern("p");
    const ActionId q = v.actions.intern("q");
    v.bindings = BindingUniverse({1});
    const BuchiAutomaton plan = translate_plan(word_form("F(p^{1})", v));
    const int prog = find_edge(plan, 0, 1);
    const int fin = find_edge(plan, 1, 1);
    const BindingSet r = mask_of(v.bindings, {1});

    AgentModel at_goal = fixtures::free_agent("at_goal", {{p}, {q}}, 0);
    ProductAutomaton g1 = build_product(at_goal, plan, v.bindings);
    AgentBehavior b = find_behavior(g1, at_goal, r, g1.initial, -1, prog, fin);
    REQUIRE(b.states.size() == 2);
    CHECK(g1.agent_state[static_cast<std::size_t>(b.states[0])] ==
          g1.agent_state[static_cast<std::size_t>(b.states[1])]);
    CHECK(b.cost == doctest::Approx(0.0));

    // Starting anywhere else, the agent would have to move to satisfy the
    // edge — but an opening crossing consumes the configuration the team
    // starts in, so there is no admissible behavior.
    AgentModel away = fixtures::free_agent("away", {{q}, {p}}, 0);
    ProductAutomaton g2 = build_product(away, plan, v.bindings);
    CHECK_THROWS_AS(find_behavior(g2, away, r, g2.initial, -1, prog, fin), Error);
}

TEST_CASE("a lone agent runs straight through without messages") {
    Vocab v = fixtures::mission_vocab();
    const Formula f = word_form("F(region_A^{1})", v);
    const BuchiAutomaton plan = translate_plan(f);
    std::vector<AgentModel> agents = {fixtures::green_agent(v)};
    fixtures::PipelineCrew crew = fixtures::build_crew(agents, plan, v);

    auto tp = find_team_trace(plan, crew.members, formula_binding_support(f));
    REQUIRE(tp.has_value());
    TeamTrace tr = run_team(plan, *tp, crew.members);

    CHECK(tr.messages.empty());
    CHECK(tr.ticks() == 2);
    CHECK(tr.crossing_tick == std::vector<int>{1});
    CHECK(has_action(tr.labels[0].back(), v, "region_A"));
    CHECK(check_sync_protocol(plan, *tp, crew.members, tr).empty());
    CHECK(satisfies(to_lasso(tr), tr.assignment, f, v.bindings));
}

TEST_CASE("a waiting-only plan holds the initial configuration") {
    Vocab v = fixtures::mission_vocab();
    const Formula f = word_form("G(!pickup^{1})", v);
    const BuchiAutomaton plan = translate_plan(f);
    std::vector<AgentModel> agents = {fixtures::green_agent(v)};
    fixtures::PipelineCrew crew = fixtures::build_crew(agents, plan, v);

    auto tp = find_team_trace(plan, crew.members, formula_binding_support(f));
    REQUIRE(tp.has_value());
    TeamTrace tr = run_team(plan, *tp, crew.members);

    CHECK(tr.ticks() == 1);
    CHECK(tr.crossing_tick.empty());
    CHECK(tr.messages.empty());
    CHECK(tr.run == std::vector<int>{tp->self_at[0]});
    CHECK(check_sync_protocol(plan, *tp, crew.members, tr).empty());
    CHECK(satisfies(to_lasso(tr), tr.assignment, f, v.bindings));
}

namespace {

// Two-agent scene with deliberately unequal travel times: `far` needs five
// moves to make p true (four of repositioning plus the crossing), `near`
// one. Used for the wait-protocol tests below.
struct UnequalScene {
    Vocab v;
    Formula f;
    BuchiAutomaton plan;
    std::vector<AgentModel> agents;
    fixtures::PipelineCrew crew;
    TeamPlan tp;

    UnequalScene() {
        const ActionId p = v.actions.intern("p");
        const ActionId q = v.actions.intern("q");
        v.bindings = BindingUniverse({1, 2});
        f = word_form("F(p^{1} & q^{2})", v);
        plan = translate_plan(f);

        std::vector<std::set<ActionId>> far_labels(6);
        far_labels[5] = {p};
        std::vector<WeightedEdge> far_moves;
        for (int s = 0; s + 1 < 6; ++s) far_moves.push_back({s, s + 1, 1.0});
        agents.push_back(make_agent("far", far_labels, far_moves, 0));
        agents.push_back(make_agent("near", {{}, {q}}, {{0, 1, 1.0}}, 0));
        crew = fixtures::build_crew(agents, plan, v);

        auto found = find_team_trace(plan, crew.members, formula_binding_support(f));
        REQUIRE(found.has_value());
        tp = *found;
    }
};

} // namespace

TEST_CASE("the early arriver parks and signals until the team catches up") {
    UnequalScene sc;
    REQUIRE(sc.tp.team == std::vector<int>{0, 1});
    REQUIRE(sc.tp.assignment ==
            std::vector<BindingSet>{mask_of(sc.v.bindings, {1}), mask_of(sc.v.bindings, {2})});
    REQUIRE(sc.tp.beta.size() == 1);

    TeamTrace tr = run_team(sc.plan, sc.tp, sc.crew.members);

    // far reaches its pre-crossing state after four moves; the team crosses
    // together one tick later. near sits at its wait state the whole time.
    CHECK(tr.crossing_tick == std::vector<int>{5});
    CHECK(tr.ticks() == 6);
    CHECK(tr.agent_states[0] == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(tr.agent_states[1] == std::vector<int>{0, 0, 0, 0, 0, 1});

    // Both carriers broadcast status every tick before the crossing; near
    // is ready from the start, far only once parked.
    const int target = sc.plan.edges[static_cast<std::size_t>(sc.tp.beta[0])].to;
    std::vector<SyncMessage> expected;
    for (int t = 0; t <= 4; ++t) {
        expected.push_back({t, 0, target, t >= 4 ? 1 : 0});
        expected.push_back({t, 1, target, 1});
    }
    CHECK(tr.messages == expected);

    CHECK(check_sync_protocol(sc.plan, sc.tp, sc.crew.members, tr).empty());
    CHECK(satisfies(to_lasso(tr), tr.assignment, sc.f, sc.v.bindings));
    CHECK(run_team(sc.plan, sc.tp, sc.crew.members) == tr);

    // Log rendering names the agents and shows the readiness handshake.
    const std::string log = trace_to_log(tr, sc.plan, sc.v);
    CHECK(log.find("far") != std::string::npos);
    CHECK(log.find("near") != std::string::npos);
    CHECK(log.find("ready=1") != std::string::npos);
    CHECK(log.find("tick 5") != std::string::npos);
}

TEST_CASE("doctored traces are flagged by the protocol audit") {
    UnequalScene sc;
    const TeamTrace clean = run_team(sc.plan, sc.tp, sc.crew.members);
    REQUIRE(check_sync_protocol(sc.plan, sc.tp, sc.crew.members, clean).empty());

    auto flags = [&](const TeamTrace& t) {
        return check_sync_protocol(sc.plan, sc.tp, sc.crew.members, t);
    };
    auto mentions = [](const std::vector<std::string>& bad, const std::string& needle) {
        return std::any_of(bad.begin(), bad.end(), [&](const std::string& s) {
            return s.find(needle) != std::string::npos;
        });
    };

    TeamTrace silent = clean;
    silent.messages.clear();
    CHECK(mentions(flags(silent), "never signaled ready"));

    TeamTrace wrong_label = clean;
    wrong_label.labels[1].back().clear();
    CHECK(mentions(flags(wrong_label), "pooled labels"));

    TeamTrace no_show = clean;
    no_show.agent_states[1].back() = 0;
    no_show.labels[1].back() = sc.agents[1].labels[0];
    CHECK(mentions(flags(no_show), "not admissible"));

    TeamTrace shifted = clean;
    shifted.crossing_tick = {4};
    CHECK_FALSE(flags(shifted).empty());
}

TEST_CASE("the field mission synchronizes its final step") {
    Vocab v = fixtures::mission_vocab();
    const Formula f = word_form(fixtures::mission_text(), v);
    const BuchiAutomaton plan = translate_plan(f);
    std::vector<AgentModel> agents = {fixtures::green_agent(v), fixtures::blue_agent(v),
                                      fixtures::orange_agent(v), fixtures::pink_agent(v)};
    fixtures::PipelineCrew crew = fixtures::build_crew(agents, plan, v);

    auto tp = find_team_trace(plan, crew.members, formula_binding_support(f));
    REQUIRE(tp.has_value());
    REQUIRE(tp->team == std::vector<int>{0, 1, 2, 3});
    REQUIRE(tp->beta.size() == 2);

    TeamTrace tr = run_team(plan, *tp, crew.members);
    auto slot = [&](const std::string& name) {
        auto it = std::find(tr.agent_names.begin(), tr.agent_names.end(), name);
        REQUIRE(it != tr.agent_names.end());
        return static_cast<std::size_t>(it - tr.agent_names.begin());
    };
    const std::size_t green = slot("green"), blue = slot("blue"), orange = slot("orange"),
                      pink = slot("pink");

    CHECK(tr.assignment[green] == mask_of(v.bindings, {1}));
    CHECK(tr.assignment[blue] == mask_of(v.bindings, {3}));
    CHECK(tr.assignment[orange] == mask_of(v.bindings, {1}));
    CHECK(tr.assignment[pink] == mask_of(v.bindings, {2}));

    // Final synchronized step: the mobile carriers of binding 1 pick up in
    // region A while both sensor carriers measure moisture and UV in
    // region B.
    const std::size_t last = tr.ticks() - 1;
    REQUIRE(tr.crossing_tick.back() == static_cast<int>(last));
    for (std::size_t who : {green, orange}) {
        CHECK(has_action(tr.labels[who][last], v, "region_A"));
        CHECK(has_action(tr.labels[who][last], v, "pickup"));
    }
    for (std::size_t who : {blue, pink}) {
        CHECK(has_action(tr.labels[who][last], v, "region_B"));
        CHECK(has_action(tr.labels[who][last], v, "moisture"));
        CHECK(has_action(tr.labels[who][last], v, "UV"));
    }

    // First progress edge: the imaging agent takes exactly one of the two
    // picture types in region A; until then nobody holding binding 1 may
    // pick anything up.
    const std::size_t mid = static_cast<std::size_t>(tr.crossing_tick[0]);
    CHECK(has_action(tr.labels[pink][mid], v, "region_A"));
    CHECK(has_action(tr.labels[pink][mid], v, "thermal") !=
          has_action(tr.labels[pink][mid], v, "visual"));
    for (std::size_t t = 0; t < mid; ++t) {
        CHECK_FALSE(has_action(tr.labels[green][t], v, "pickup"));
        CHECK_FALSE(has_action(tr.labels[orange][t], v, "pickup"));
    }

    // Only the second edge involves more than one carrier, so all messages
    // belong to its window and every slot signals ready before crossing.
    std::set<int> ready;
    for (const SyncMessage& m : tr.messages) {
        CHECK(m.tick >= tr.crossing_tick[0]);
        if (m.ready == 1) ready.insert(m.agent);
    }
    CHECK(ready == std::set<int>{0, 1, 2, 3});

    CHECK(check_sync_protocol(plan, *tp, crew.members, tr).empty());
    CHECK(satisfies(to_lasso(tr), tr.assignment, f, v.bindings));
    CHECK(run_team(plan, *tp, crew.members) == tr);
}

TEST_CASE("random scenes execute cleanly and satisfy the oracle") {
    std::mt19937_64 rng(411907);
    auto pick = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };

    int executed = 0;
    int gaps = 0;  // per-segment synthesis failed on a plan the search accepted
    for (int iter = 0; iter < 60; ++iter) {
        Vocab v;
        const ActionId props[3] = {v.actions.intern("a"), v.actions.intern("b"),
                                   v.actions.intern("c")};
        const int m = pick(2, 3);
        std::vector<int> ids;
        for (int i = 0; i < m; ++i) ids.push_back(i + 1);
        v.bindings = BindingUniverse(ids);

        testgen::TaskGenOptions opt;
        opt.num_props = 3;
        opt.num_bindings = m;
        opt.phi_depth = 2;
        opt.psi_depth = 1;
        opt.task_depth = 1;
        const Formula task = testgen::random_task(rng, opt);
        const Formula atomic = outer_to_literal(rewrite_atomic(task));
        const BuchiAutomaton plan = translate_plan(atomic);
        if (plan.num_states > 8 || plan.edges.size() > 16) continue;

        std::vector<AgentModel> agents;
        const int n = pick(1, 3);
        for (int j = 0; j < n; ++j) {
            std::vector<std::set<ActionId>> labels(static_cast<std::size_t>(pick(2, 4)));
            for (auto& l : labels) {
                if (pick(0, 1)) l.insert(props[0]);
                if (pick(0, 1)) l.insert(props[1]);
                if (pick(0, 3) == 0) l.insert(props[2]);
            }
            agents.push_back(fixtures::free_agent("r" + std::to_string(j), labels,
                                                  pick(0, static_cast<int>(labels.size()) - 1)));
        }
        fixtures::PipelineCrew crew = fixtures::build_crew(agents, plan, v);

        auto tp = find_team_trace(plan, crew.members, formula_binding_support(atomic));
        if (!tp.has_value()) continue;

        TeamTrace tr;
        try {
            tr = run_team(plan, *tp, crew.members);
        } catch (const Error&) {
            // The plan tracks feasibility edge by edge; stitching the edges
            // into one connected path per agent can still fail. Count it —
            // it should stay rare on these complete-move-graph agents.
            ++gaps;
            continue;
        }
        ++executed;

        auto bad = check_sync_protocol(plan, *tp, crew.members, tr);
        if (!bad.empty()) {
            for (const std::string& b : bad) MESSAGE(b);
            REQUIRE(bad.empty());
        }
        REQUIRE(satisfies(to_lasso(tr), tr.assignment, atomic, v.bindings));
        REQUIRE(run_team(plan, *tp, crew.members) == tr);
    }
    CHECK(executed > 15);
    CHECK(gaps <= 3);
    if (gaps > 0) MESSAGE("behavior synthesis declined ", gaps, " accepted plans");
}
