#include "ltlpsi/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "ltlpsi/errors.hpp"
#include "ltlpsi/formula.hpp"

namespace ltlpsi {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ScenarioError(msg, path);
}

std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string at(const std::string& path, std::size_t index) {
    return path + "/" + std::to_string(index);
}

const json& need(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(at(path, key), "missing required field");
    return *it;
}

std::string need_string(const json& j, const std::string& key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_string() || v.get<std::string>().empty())
        fail(at(path, key), "expected a nonempty string");
    return v.get<std::string>();
}

const json& need_array(const json& j, const std::string& key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_array() || v.empty()) fail(at(path, key), "expected a nonempty array");
    return v;
}

double number_at(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

int int_at(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(what + ": not valid JSON");
    return j;
}

// ---------------------------------------------------------------------------
// Scenario parsing.
// ---------------------------------------------------------------------------

BindingUniverse parse_bindings(const json& root, const std::string& path) {
    const json& arr = need_array(root, "bindings", path);
    std::vector<int> ids;
    std::set<int> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = at(at(path, "bindings"), i);
        int id = int_at(arr[i], p);
        if (id <= 0) fail(p, "binding ids must be positive");
        if (!seen.insert(id).second) fail(p, "duplicate binding id");
        ids.push_back(id);
    }
    return BindingUniverse(ids);
}

Capability parse_capability(const json& jc, const ActionTable& actions, const std::string& path,
                            std::size_t index) {
    if (!jc.is_object()) fail(path, "expected an object");
    Capability cap;
    cap.name = jc.contains("name") ? need_string(jc, "name", path)
                                   : "cap" + std::to_string(index);

    const json& jstates = need_array(jc, "states", path);
    std::map<std::string, int> state_id;
    for (std::size_t i = 0; i < jstates.size(); ++i) {
        const std::string p = at(at(path, "states"), i);
        if (!jstates[i].is_string() || jstates[i].get<std::string>().empty())
            fail(p, "expected a nonempty string");
        std::string name = jstates[i].get<std::string>();
        if (!state_id.emplace(name, static_cast<int>(i)).second) fail(p, "duplicate state name");
        cap.state_names.push_back(std::move(name));
        cap.labels.emplace_back();
    }

    const std::string init = need_string(jc, "initial", path);
    auto init_it = state_id.find(init);
    if (init_it == state_id.end()) fail(at(path, "initial"), "unknown state '" + init + "'");
    cap.initial = init_it->second;

    if (jc.contains("labels")) {
        const json& jl = jc["labels"];
        if (!jl.is_object()) fail(at(path, "labels"), "expected an object");
        for (auto it = jl.begin(); it != jl.end(); ++it) {
            const std::string p = at(at(path, "labels"), it.key());
            auto sit = state_id.find(it.key());
            if (sit == state_id.end()) fail(p, "unknown state '" + it.key() + "'");
            if (!it.value().is_array()) fail(p, "expected an array of action names");
            for (std::size_t i = 0; i < it.value().size(); ++i) {
                const json& ja = it.value()[i];
                if (!ja.is_string()) fail(at(p, i), "expected an action name");
                auto aid = actions.lookup(ja.get<std::string>());
                if (!aid) fail(at(p, i), "unknown action '" + ja.get<std::string>() + "'");
                cap.ap.insert(*aid);
                cap.labels[static_cast<std::size_t>(sit->second)].insert(*aid);
            }
        }
    }

    const json& jt = need_array(jc, "transitions", path);
    std::set<std::pair<int, int>> present;
    for (std::size_t i = 0; i < jt.size(); ++i) {
        const std::string p = at(at(path, "transitions"), i);
        const json& row = jt[i];
        if (!row.is_array() || row.size() != 3)
            fail(p, "expected [from_state, to_state, weight]");
        auto endpoint = [&](std::size_t k) {
            if (!row[k].is_string()) fail(at(p, k), "expected a state name");
            auto sit = state_id.find(row[k].get<std::string>());
            if (sit == state_id.end())
                fail(at(p, k), "unknown state '" + row[k].get<std::string>() + "'");
            return sit->second;
        };
        const int from = endpoint(0);
        const int to = endpoint(1);
        const double w = number_at(row[2], at(p, 2));
        if (w < 0) fail(at(p, 2), "weights must be nonnegative");
        cap.transitions.push_back({from, to, w});
        present.insert({from, to});
    }

    bool auto_holds = true;
    if (jc.contains("auto_holds")) {
        if (!jc["auto_holds"].is_boolean()) fail(at(path, "auto_holds"), "expected a boolean");
        auto_holds = jc["auto_holds"].get<bool>();
    }
    if (auto_holds)
        for (int s = 0; s < static_cast<int>(cap.state_names.size()); ++s)
            if (!present.count({s, s})) cap.transitions.push_back({s, s, 0.0});

    return cap;
}

} // namespace

Scenario parse_scenario_text(const std::string& text) {
    json root = parse_json(text, "scenario");
    if (!root.is_object()) fail("", "expected a JSON object");

    Scenario sc;
    sc.vocab.bindings = parse_bindings(root, "");

    const bool synthesis = root.contains("task");
    if (synthesis) {
        sc.task = need_string(root, "task", "");
        const json& ja = need_array(root, "actions", "");
        for (std::size_t i = 0; i < ja.size(); ++i) {
            const std::string p = at("/actions", i);
            if (!ja[i].is_string() || ja[i].get<std::string>().empty())
                fail(p, "expected a nonempty action name");
            const std::string name = ja[i].get<std::string>();
            if (sc.vocab.actions.lookup(name)) fail(p, "duplicate action '" + name + "'");
            sc.vocab.actions.intern(name);
        }
    } else if (root.contains("actions")) {
        fail("/actions", "a roster scenario (no task) must not declare actions");
    }

    const json& jagents = need_array(root, "agents", "");
    std::set<std::string> names;
    for (std::size_t i = 0; i < jagents.size(); ++i) {
        const std::string p = at("/agents", i);
        const json& ja = jagents[i];
        ScenarioAgent agent;
        agent.name = need_string(ja, "name", p);
        if (!names.insert(agent.name).second)
            fail(at(p, "name"), "duplicate agent name '" + agent.name + "'");
        if (ja.contains("cost")) {
            agent.cost = number_at(ja["cost"], at(p, "cost"));
            if (agent.cost < 0) fail(at(p, "cost"), "costs must be nonnegative");
        }

        if (synthesis) {
            if (ja.contains("assignment"))
                fail(at(p, "assignment"), "capability agents carry no fixed assignment");
            const json& jc = need_array(ja, "capabilities", p);
            std::vector<Capability> caps;
            for (std::size_t k = 0; k < jc.size(); ++k)
                caps.push_back(
                    parse_capability(jc[k], sc.vocab.actions, at(at(p, "capabilities"), k), k));
            try {
                agent.model = compose_capabilities(agent.name, caps);
            } catch (const Error& e) {
                fail(p, e.what());
            }
        } else {
            if (ja.contains("capabilities"))
                fail(at(p, "capabilities"), "roster agents declare assignments, not capabilities");
            const json& jr = need_array(ja, "assignment", p);
            for (std::size_t k = 0; k < jr.size(); ++k) {
                const std::string pk = at(at(p, "assignment"), k);
                const int id = int_at(jr[k], pk);
                auto idx = sc.vocab.bindings.index_of(id);
                if (!idx) fail(pk, "unknown binding id " + std::to_string(id));
                agent.assignment = binding_set_with(agent.assignment, *idx);
            }
        }
        sc.agents.push_back(std::move(agent));
    }

    // Validates the task text against the declared vocabulary up front, so a
    // bad scenario fails at load rather than mid-pipeline.
    if (synthesis) parse_task(sc.task, sc.vocab);

    return sc;
}

Scenario load_scenario(const std::string& path) { return parse_scenario_text(read_file(path)); }

// ---------------------------------------------------------------------------
// Plan files.
// ---------------------------------------------------------------------------

namespace {

json props_to_json(const std::vector<PropPair>& props, const Vocab& v) {
    json out = json::array();
    for (const PropPair& p : props)
        out.push_back({v.actions.name(p.action), v.bindings.external_id(p.binding)});
    return out;
}

std::vector<PropPair> props_from_json(const json& j, const Vocab& v, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of [action, binding] pairs");
    std::vector<PropPair> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = at(path, i);
        const json& row = j[i];
        if (!row.is_array() || row.size() != 2 || !row[0].is_string())
            fail(p, "expected [action, binding]");
        auto aid = v.actions.lookup(row[0].get<std::string>());
        if (!aid) fail(at(p, 0), "unknown action '" + row[0].get<std::string>() + "'");
        auto bid = v.bindings.index_of(int_at(row[1], at(p, 1)));
        if (!bid) fail(at(p, 1), "unknown binding id");
        out.push_back({*aid, *bid});
        if (out.size() > 1 && !(out[out.size() - 2] < out.back()))
            fail(p, "propositions must be sorted by (action, binding) and unique");
    }
    return out;
}

json binding_set_to_json(BindingSet s, const BindingUniverse& u) {
    json out = json::array();
    for (int idx : binding_set_indices(s)) out.push_back(u.external_id(idx));
    return out;
}

BindingSet binding_set_from_json(const json& j, const BindingUniverse& u,
                                 const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of binding ids");
    BindingSet s = 0;
    for (std::size_t i = 0; i < j.size(); ++i) {
        auto idx = u.index_of(int_at(j[i], at(path, i)));
        if (!idx) fail(at(path, i), "unknown binding id");
        s = binding_set_with(s, *idx);
    }
    return s;
}

std::vector<int> ints_from_json(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(int_at(j[i], at(path, i)));
    return out;
}

Vocab vocab_from_json(const json& root) {
    Vocab v;
    v.bindings = parse_bindings(root, "");
    const json& ja = need_array(root, "actions", "");
    for (std::size_t i = 0; i < ja.size(); ++i) {
        if (!ja[i].is_string()) fail(at("/actions", i), "expected an action name");
        const std::string name = ja[i].get<std::string>();
        if (v.actions.lookup(name)) fail(at("/actions", i), "duplicate action");
        v.actions.intern(name);
    }
    return v;
}

void check_format(const json& root, const std::string& expect) {
    if (!root.is_object()) fail("", "expected a JSON object");
    if (need_string(root, "format", "") != expect) fail("/format", "expected \"" + expect + "\"");
    if (int_at(need(root, "version", ""), "/version") != 1) fail("/version", "unsupported version");
}

} // namespace

std::string plan_to_json(const StoredPlan& p) {
    const Vocab& v = p.vocab;
    json root;
    root["format"] = "ltlpsi-plan";
    root["version"] = 1;
    root["actions"] = v.actions.names();
    root["bindings"] = v.bindings.external_ids();
    root["task"] = p.task;

    json ja;
    ja["states"] = p.automaton.num_states;
    ja["initial"] = p.automaton.initial;
    json acc = json::array();
    for (int s = 0; s < p.automaton.num_states; ++s)
        if (p.automaton.is_accepting(s)) acc.push_back(s);
    ja["accepting"] = std::move(acc);
    json edges = json::array();
    for (const BuchiEdge& e : p.automaton.edges) {
        json je;
        je["from"] = e.from;
        je["to"] = e.to;
        je["t"] = props_to_json(e.label.sigma_t, v);
        je["f"] = props_to_json(e.label.sigma_f, v);
        edges.push_back(std::move(je));
    }
    ja["edges"] = std::move(edges);
    root["automaton"] = std::move(ja);

    root["path"] = p.plan.path;
    root["beta"] = p.plan.beta;
    root["self_at"] = p.plan.self_at;

    json team = json::array();
    for (std::size_t i = 0; i < p.plan.team.size(); ++i) {
        json jm;
        jm["agent"] = p.plan.team[i];
        jm["name"] = p.team_names[i];
        jm["assignment"] = binding_set_to_json(p.plan.assignment[i], v.bindings);
        json fam = json::array();
        for (BindingSet m : p.plan.families[i].maximal)
            fam.push_back(binding_set_to_json(m, v.bindings));
        jm["family"] = std::move(fam);
        team.push_back(std::move(jm));
    }
    root["team"] = std::move(team);

    return root.dump(2) + "\n";
}

StoredPlan plan_from_json(const std::string& text) {
    json root = parse_json(text, "plan");
    check_format(root, "ltlpsi-plan");

    StoredPlan p;
    p.vocab = vocab_from_json(root);
    p.task = need_string(root, "task", "");

    const json& ja = need(root, "automaton", "");
    BuchiAutomaton& b = p.automaton;
    b.num_states = int_at(need(ja, "states", "/automaton"), "/automaton/states");
    if (b.num_states <= 0) fail("/automaton/states", "expected a positive state count");
    b.initial = int_at(need(ja, "initial", "/automaton"), "/automaton/initial");
    b.accepting.assign(static_cast<std::size_t>(b.num_states), 0);
    auto check_state = [&](int s, const std::string& path) {
        if (s < 0 || s >= b.num_states) fail(path, "state index out of range");
    };
    check_state(b.initial, "/automaton/initial");
    const json& jacc = need(ja, "accepting", "/automaton");
    if (!jacc.is_array()) fail("/automaton/accepting", "expected an array");
    for (std::size_t i = 0; i < jacc.size(); ++i) {
        const std::string pth = at("/automaton/accepting", i);
        int s = int_at(jacc[i], pth);
        check_state(s, pth);
        b.accepting[static_cast<std::size_t>(s)] = 1;
    }
    const json& jedges = need(ja, "edges", "/automaton");
    if (!jedges.is_array() || jedges.empty()) fail("/automaton/edges", "expected a nonempty array");
    for (std::size_t i = 0; i < jedges.size(); ++i) {
        const std::string pth = at("/automaton/edges", i);
        const json& je = jedges[i];
        BuchiEdge e;
        e.from = int_at(need(je, "from", pth), at(pth, "from"));
        e.to = int_at(need(je, "to", pth), at(pth, "to"));
        check_state(e.from, at(pth, "from"));
        check_state(e.to, at(pth, "to"));
        e.label.sigma_t = props_from_json(need(je, "t", pth), p.vocab, at(pth, "t"));
        e.label.sigma_f = props_from_json(need(je, "f", pth), p.vocab, at(pth, "f"));
        b.edges.push_back(std::move(e));
    }
    // Edge order is significant (the plan's path stores edge indices), so the
    // stored order must already be the canonical sorted order.
    std::vector<BuchiEdge> as_stored = b.edges;
    b.finalize();
    if (b.edges != as_stored)
        fail("/automaton/edges", "edges must be sorted by (from, to, label) and duplicate-free");

    TeamPlan& tp = p.plan;
    tp.path = ints_from_json(need(root, "path", ""), "/path");
    for (std::size_t i = 0; i < tp.path.size(); ++i)
        if (tp.path[i] < 0 || tp.path[i] >= static_cast<int>(b.edges.size()))
            fail(at("/path", i), "edge index out of range");
    std::pair<std::vector<int>, std::map<int, int>> parsed;
    try {
        parsed = parse_path(b, tp.path);
    } catch (const Error& e) {
        fail("/path", e.what());
    }
    tp.beta = ints_from_json(need(root, "beta", ""), "/beta");
    if (tp.beta != parsed.first) fail("/beta", "does not match the path's progress subsequence");
    tp.self_edges = std::move(parsed.second);

    tp.self_at = ints_from_json(need(root, "self_at", ""), "/self_at");
    std::vector<int> self_expect(tp.beta.size() + 1, -1);
    std::size_t stage = 0;
    for (int ei : tp.path) {
        const BuchiEdge& pe = b.edges[static_cast<std::size_t>(ei)];
        if (pe.from == pe.to)
            self_expect[stage] = ei;
        else
            ++stage;
    }
    if (tp.self_at != self_expect) fail("/self_at", "does not match the path's self edges");
    if (tp.path.empty() || tp.self_at.back() < 0)
        fail("/path", "a plan must end holding a state");
    const BuchiEdge& last = b.edges[static_cast<std::size_t>(tp.self_at.back())];
    if (!b.is_accepting(last.to)) fail("/path", "a plan must end holding an accepting state");

    const json& jteam = need_array(root, "team", "");
    int prev = -1;
    for (std::size_t i = 0; i < jteam.size(); ++i) {
        const std::string pth = at("/team", i);
        const json& jm = jteam[i];
        const int agent = int_at(need(jm, "agent", pth), at(pth, "agent"));
        if (agent <= prev) fail(at(pth, "agent"), "agent indices must be ascending");
        prev = agent;
        tp.team.push_back(agent);
        p.team_names.push_back(need_string(jm, "name", pth));
        BindingSet r =
            binding_set_from_json(need(jm, "assignment", pth), p.vocab.bindings,
                                  at(pth, "assignment"));
        if (r == 0) fail(at(pth, "assignment"), "assignments must be nonempty");
        const json& jf = need_array(jm, "family", pth);
        BindingFamily fam;
        for (std::size_t k = 0; k < jf.size(); ++k) {
            BindingSet m =
                binding_set_from_json(jf[k], p.vocab.bindings, at(at(pth, "family"), k));
            if (m == 0 || (!fam.maximal.empty() && m <= fam.maximal.back()))
                fail(at(at(pth, "family"), k),
                     "family members must be nonempty and strictly ascending");
            fam.maximal.push_back(m);
        }
        if (!fam.contains(r))
            fail(at(pth, "assignment"), "assignment not supported by the stored family");
        tp.assignment.push_back(r);
        tp.families.push_back(std::move(fam));
    }

    return p;
}

// ---------------------------------------------------------------------------
// Trace files.
// ---------------------------------------------------------------------------

std::string trace_to_json(const TeamTrace& trace, const Vocab& vocab) {
    json root;
    root["format"] = "ltlpsi-trace";
    root["version"] = 1;
    root["agents"] = trace.agent_names;
    json assignment = json::array();
    for (BindingSet r : trace.assignment)
        assignment.push_back(binding_set_to_json(r, vocab.bindings));
    root["assignment"] = std::move(assignment);
    root["states"] = trace.agent_states;
    json labels = json::array();
    for (const auto& row : trace.labels) {
        json jrow = json::array();
        for (const auto& label : row) {
            json jl = json::array();
            for (ActionId a : label) jl.push_back(vocab.actions.name(a));
            jrow.push_back(std::move(jl));
        }
        labels.push_back(std::move(jrow));
    }
    root["labels"] = std::move(labels);
    root["run"] = trace.run;
    root["crossings"] = trace.crossing_tick;
    json messages = json::array();
    for (const SyncMessage& m : trace.messages)
        messages.push_back({m.tick, m.agent, m.target, m.ready});
    root["messages"] = std::move(messages);
    return root.dump(2) + "\n";
}

TeamTrace trace_from_json(const std::string& text, const Vocab& vocab) {
    json root = parse_json(text, "trace");
    check_format(root, "ltlpsi-trace");

    TeamTrace t;
    const json& jagents = need_array(root, "agents", "");
    for (std::size_t i = 0; i < jagents.size(); ++i) {
        if (!jagents[i].is_string()) fail(at("/agents", i), "expected an agent name");
        t.agent_names.push_back(jagents[i].get<std::string>());
    }
    const json& jassign = need(root, "assignment", "");
    if (!jassign.is_array() || jassign.size() != t.agent_names.size())
        fail("/assignment", "expected one assignment per agent");
    for (std::size_t i = 0; i < jassign.size(); ++i)
        t.assignment.push_back(
            binding_set_from_json(jassign[i], vocab.bindings, at("/assignment", i)));

    t.run = ints_from_json(need(root, "run", ""), "/run");
    if (t.run.empty()) fail("/run", "expected at least one tick");

    const json& jstates = need(root, "states", "");
    if (!jstates.is_array() || jstates.size() != t.agent_names.size())
        fail("/states", "expected one row per agent");
    for (std::size_t i = 0; i < jstates.size(); ++i) {
        std::vector<int> row = ints_from_json(jstates[i], at("/states", i));
        if (row.size() != t.run.size()) fail(at("/states", i), "expected one entry per tick");
        t.agent_states.push_back(std::move(row));
    }

    const json& jlabels = need(root, "labels", "");
    if (!jlabels.is_array() || jlabels.size() != t.agent_names.size())
        fail("/labels", "expected one row per agent");
    for (std::size_t i = 0; i < jlabels.size(); ++i) {
        const std::string pth = at("/labels", i);
        if (!jlabels[i].is_array() || jlabels[i].size() != t.run.size())
            fail(pth, "expected one label per tick");
        std::vector<std::set<ActionId>> row;
        for (std::size_t k = 0; k < jlabels[i].size(); ++k) {
            const std::string pk = at(pth, k);
            const json& jl = jlabels[i][k];
            if (!jl.is_array()) fail(pk, "expected an array of action names");
            std::set<ActionId> label;
            for (std::size_t a = 0; a < jl.size(); ++a) {
                if (!jl[a].is_string()) fail(at(pk, a), "expected an action name");
                auto aid = vocab.actions.lookup(jl[a].get<std::string>());
                if (!aid) fail(at(pk, a), "unknown action '" + jl[a].get<std::string>() + "'");
                label.insert(*aid);
            }
            row.push_back(std::move(label));
        }
        t.labels.push_back(std::move(row));
    }

    t.crossing_tick = ints_from_json(need(root, "crossings", ""), "/crossings");
    const json& jmsgs = need(root, "messages", "");
    if (!jmsgs.is_array()) fail("/messages", "expected an array");
    for (std::size_t i = 0; i < jmsgs.size(); ++i) {
        const std::string pth = at("/messages", i);
        const json& jm = jmsgs[i];
        if (!jm.is_array() || jm.size() != 4) fail(pth, "expected [tick, agent, target, ready]");
        SyncMessage m;
        m.tick = int_at(jm[0], at(pth, 0));
        m.agent = int_at(jm[1], at(pth, 1));
        m.target = int_at(jm[2], at(pth, 2));
        m.ready = int_at(jm[3], at(pth, 3));
        t.messages.push_back(m);
    }
    return t;
}

// ---------------------------------------------------------------------------
// File I/O.
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    if (in.bad()) throw Error("cannot read '" + path + "'");
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw Error("cannot write '" + path + "'");
}

} // namespace ltlpsi
