#pragma once

// Shared fixtures: the four-agent precision-agriculture scenario used across
// the suite.  Stationary sensing agents orient toward adjacent regions; the
// mobile manipulator drives between regions; sensors toggle on and off; the
// arm performs one action at a time from an idle pose.

#include <initializer_list>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ltlpsi/agent.hpp"
#include "ltlpsi/feasibility.hpp"
#include "ltlpsi/product.hpp"
#include "ltlpsi/team.hpp"
#include "ltlpsi/vocab.hpp"

namespace fixtures {

inline ltlpsi::Vocab mission_vocab() {
    ltlpsi::Vocab v;
    for (const char* n : {"pickup", "dropoff", "weed", "region_A", "region_B", "region_C",
                          "region_D", "region_E", "moisture", "UV", "thermal", "visual"})
        v.actions.intern(n);
    v.bindings = ltlpsi::BindingUniverse({1, 2, 3});
    return v;
}

// "Whoever holds bindings 2 and 3 measures moisture and UV in region B while
// binding 1 picks up a soil sample in region A; no pickup happens until
// binding 2 has taken exactly one of a thermal or visual image of region A."
inline std::string mission_text() {
    return "F((region_B & moisture & UV)^{2 & 3} & (region_A & pickup)^{1}) & "
           "(!pickup^{1} U (region_A & ((thermal | visual) & !(thermal & visual)))^{2})";
}

// Regions along a line; the device can hold position (cost 0) or swing its
// focus to an adjacent region (cost `move_cost`).  State i is labeled with
// regions[i].
inline ltlpsi::Capability chain_area(const std::string& name,
                                     std::initializer_list<const char*> regions,
                                     int initial, const ltlpsi::ActionTable& actions,
                                     double move_cost = 1.0) {
    ltlpsi::Capability cap;
    cap.name = name;
    cap.initial = initial;
    int i = 0;
    for (const char* r : regions) {
        const ltlpsi::ActionId id = *actions.lookup(r);
        cap.state_names.push_back(r);
        cap.ap.insert(id);
        cap.labels.push_back({id});
        cap.transitions.push_back({i, i, 0.0});
        if (i > 0) {
            cap.transitions.push_back({i - 1, i, move_cost});
            cap.transitions.push_back({i, i - 1, move_cost});
        }
        ++i;
    }
    return cap;
}

// Two-state sensor: off <-> on, switching costs `switch_cost`, holding is free.
inline ltlpsi::Capability toggle_cap(const std::string& name, const char* prop,
                                     const ltlpsi::ActionTable& actions,
                                     double switch_cost = 0.25) {
    ltlpsi::Capability cap;
    cap.name = name;
    cap.initial = 0;
    cap.state_names = {"off", "on"};
    const ltlpsi::ActionId id = *actions.lookup(prop);
    cap.ap = {id};
    cap.labels = {{}, {id}};
    cap.transitions = {{0, 0, 0.0}, {1, 1, 0.0}, {0, 1, switch_cost}, {1, 0, switch_cost}};
    return cap;
}

// Manipulator: idle pose plus one state per action, reached from idle only.
inline ltlpsi::Capability arm_cap(const ltlpsi::ActionTable& actions,
                                  double action_cost = 0.5) {
    ltlpsi::Capability cap;
    cap.name = "arm";
    cap.initial = 0;
    cap.state_names = {"idle", "pickup", "dropoff", "weed"};
    cap.labels.push_back({});
    for (int i = 1; i <= 3; ++i) {
        const ltlpsi::ActionId id = *actions.lookup(cap.state_names[static_cast<std::size_t>(i)]);
        cap.ap.insert(id);
        cap.labels.push_back({id});
        cap.transitions.push_back({0, i, action_cost});
        cap.transitions.push_back({i, 0, action_cost});
    }
    for (int i = 0; i <= 3; ++i) cap.transitions.push_back({i, i, 0.0});
    return cap;
}

// Stationary arm agent watching regions A-B, starting at B with the arm idle.
inline ltlpsi::AgentModel green_agent(const ltlpsi::Vocab& v) {
    return ltlpsi::compose_capabilities(
        "green", {chain_area("area_green", {"region_A", "region_B"}, 1, v.actions),
                  arm_cap(v.actions)});
}

// Stationary sensing agent sweeping regions B-C-D, starting at D.
inline ltlpsi::AgentModel blue_agent(const ltlpsi::Vocab& v) {
    return ltlpsi::compose_capabilities(
        "blue", {chain_area("area_blue", {"region_B", "region_C", "region_D"}, 2, v.actions),
                 toggle_cap("moisture_sensor", "moisture", v.actions),
                 toggle_cap("uv_sensor", "UV", v.actions)});
}

// Mobile manipulator driving the region chain A-B-C-D-E, starting at E.
inline ltlpsi::AgentModel orange_agent(const ltlpsi::Vocab& v) {
    return ltlpsi::compose_capabilities(
        "orange",
        {chain_area("motion", {"region_A", "region_B", "region_C", "region_D", "region_E"}, 4,
                    v.actions),
         toggle_cap("moisture_sensor", "moisture", v.actions),
         toggle_cap("uv_sensor", "UV", v.actions), arm_cap(v.actions)});
}

// Stationary imaging agent sweeping regions A-B-C, starting at C.
inline ltlpsi::AgentModel pink_agent(const ltlpsi::Vocab& v) {
    return ltlpsi::compose_capabilities(
        "pink", {chain_area("area_pink", {"region_A", "region_B", "region_C"}, 2, v.actions),
                 toggle_cap("thermal_camera", "thermal", v.actions),
                 toggle_cap("visual_camera", "visual", v.actions),
                 toggle_cap("moisture_sensor", "moisture", v.actions),
                 toggle_cap("uv_sensor", "UV", v.actions)});
}

// Single-capability agent over a complete move graph: any state to any other
// at cost 1, staying put free.  State i carries labels[i].
inline ltlpsi::AgentModel free_agent(const std::string& name,
                                     const std::vector<std::set<ltlpsi::ActionId>>& labels,
                                     int initial) {
    ltlpsi::Capability cap;
    cap.name = name;
    cap.initial = initial;
    for (std::size_t s = 0; s < labels.size(); ++s) {
        cap.state_names.push_back("s" + std::to_string(s));
        cap.labels.push_back(labels[s]);
        for (ltlpsi::ActionId a : labels[s]) cap.ap.insert(a);
        for (std::size_t t = 0; t < labels.size(); ++t)
            cap.transitions.push_back(
                {static_cast<int>(s), static_cast<int>(t), s == t ? 0.0 : 1.0});
    }
    return ltlpsi::compose_capabilities(name, {cap});
}

// Per-agent planning artifacts (product, pruned view, binding family) with
// stable addresses, viewable as the member list the team search consumes.
struct PipelineCrew {
    std::vector<ltlpsi::ProductAutomaton> products;
    std::vector<ltlpsi::BuchiAutomaton> pruned;
    std::vector<ltlpsi::TeamMember> members;
};

inline PipelineCrew build_crew(const std::vector<ltlpsi::AgentModel>& agents,
                               const ltlpsi::BuchiAutomaton& plan, const ltlpsi::Vocab& v) {
    PipelineCrew crew;
    crew.products.reserve(agents.size());
    crew.pruned.reserve(agents.size());
    for (const auto& a : agents) {
        crew.products.push_back(ltlpsi::build_product(a, plan, v.bindings));
        const auto& g = crew.products.back();
        ltlpsi::BindingFamily fam = ltlpsi::feasible_binding_sets(g, v.bindings.full_mask());
        crew.pruned.push_back(ltlpsi::prune_buchi(plan, fam, g));
        crew.members.push_back({a.name, &g, &crew.pruned.back(), std::move(fam), &a});
    }
    return crew;
}

} // namespace fixtures
