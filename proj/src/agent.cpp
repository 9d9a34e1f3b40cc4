#include "ltlpsi/agent.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "ltlpsi/errors.hpp"

namespace ltlpsi {

int AgentModel::transition_index(int from, int to) const {
    auto cmp = [](const WeightedEdge& e, std::pair<int, int> key) {
        return std::pair(e.from, e.to) < key;
    };
    auto it = std::lower_bound(transitions.begin(), transitions.end(),
                               std::pair(from, to), cmp);
    if (it == transitions.end() || it->from != from || it->to != to) return -1;
    return static_cast<int>(it - transitions.begin());
}

void AgentModel::finalize() {
    std::sort(transitions.begin(), transitions.end(),
              [](const WeightedEdge& a, const WeightedEdge& b) {
                  if (a.from != b.from) return a.from < b.from;
                  if (a.to != b.to) return a.to < b.to;
                  return a.weight < b.weight;
              });
    std::vector<WeightedEdge> unique;
    for (const auto& e : transitions) {
        if (!unique.empty() && unique.back().from == e.from && unique.back().to == e.to)
            continue;  // sorted by weight within (from, to): keep the cheapest
        unique.push_back(e);
    }
    transitions = std::move(unique);
    out.assign(state_names.size(), {});
    for (std::size_t i = 0; i < transitions.size(); ++i)
        out[static_cast<std::size_t>(transitions[i].from)].push_back(static_cast<int>(i));
}

namespace {

void check_capability(const Capability& cap) {
    const int n = static_cast<int>(cap.state_names.size());
    if (n == 0)
        throw Error("capability '" + cap.name + "' has no states");
    if (cap.initial < 0 || cap.initial >= n)
        throw Error("capability '" + cap.name + "' has an out-of-range initial state");
    if (cap.labels.size() != cap.state_names.size())
        throw Error("capability '" + cap.name + "' needs one label set per state");
    for (int s = 0; s < n; ++s)
        for (ActionId a : cap.labels[static_cast<std::size_t>(s)])
            if (!cap.ap.count(a))
                throw Error("capability '" + cap.name + "' labels state '" +
                            cap.state_names[static_cast<std::size_t>(s)] +
                            "' with a proposition outside its alphabet");
    std::vector<char> has_out(static_cast<std::size_t>(n), 0);
    for (const auto& e : cap.transitions) {
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            throw Error("capability '" + cap.name + "' has a transition with bad state indices");
        if (e.weight < 0.0)
            throw Error("capability '" + cap.name + "' has a negative transition weight");
        has_out[static_cast<std::size_t>(e.from)] = 1;
    }
    for (int s = 0; s < n; ++s)
        if (!has_out[static_cast<std::size_t>(s)])
            throw Error("capability '" + cap.name + "' has no outgoing transition from state '" +
                        cap.state_names[static_cast<std::size_t>(s)] + "'");
}

} // namespace

AgentModel compose_capabilities(const std::string& agent_name,
                                const std::vector<Capability>& caps) {
    if (caps.empty())
        throw Error("agent '" + agent_name + "' has no capabilities");
    for (const auto& cap : caps) check_capability(cap);

    const std::size_t k = caps.size();
    // Per-capability adjacency with the cheapest cost per (from, to) pair.
    std::vector<std::vector<std::map<int, double>>> adj(k);
    for (std::size_t c = 0; c < k; ++c) {
        adj[c].resize(caps[c].state_names.size());
        for (const auto& e : caps[c].transitions) {
            auto& slot = adj[c][static_cast<std::size_t>(e.from)];
            auto [it, inserted] = slot.emplace(e.to, e.weight);
            if (!inserted) it->second = std::min(it->second, e.weight);
        }
    }

    AgentModel model;
    model.name = agent_name;
    for (const auto& cap : caps) model.ap.insert(cap.ap.begin(), cap.ap.end());

    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> tuples;
    auto intern = [&](const std::vector<int>& tuple) {
        auto [it, inserted] = index.emplace(tuple, static_cast<int>(tuples.size()));
        if (inserted) {
            tuples.push_back(tuple);
            std::string name;
            std::set<ActionId> label;
            for (std::size_t c = 0; c < k; ++c) {
                if (c > 0) name += "|";
                name += caps[c].state_names[static_cast<std::size_t>(tuple[c])];
                const auto& l = caps[c].labels[static_cast<std::size_t>(tuple[c])];
                label.insert(l.begin(), l.end());
            }
            model.state_names.push_back(std::move(name));
            model.labels.push_back(std::move(label));
        }
        return it->second;
    };

    std::vector<int> start(k);
    for (std::size_t c = 0; c < k; ++c) start[c] = caps[c].initial;
    model.initial = intern(start);

    std::queue<int> work;
    work.push(model.initial);
    std::vector<char> expanded(1, 0);
    while (!work.empty()) {
        const int id = work.front();
        work.pop();
        if (expanded[static_cast<std::size_t>(id)]) continue;
        expanded[static_cast<std::size_t>(id)] = 1;
        const std::vector<int> tuple = tuples[static_cast<std::size_t>(id)];

        // Odometer over the per-component successor choices.
        std::vector<std::map<int, double>::const_iterator> pos(k);
        for (std::size_t c = 0; c < k; ++c)
            pos[c] = adj[c][static_cast<std::size_t>(tuple[c])].begin();
        while (true) {
            std::vector<int> next(k);
            double weight = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                next[c] = pos[c]->first;
                weight += pos[c]->second;
            }
            const int to = intern(next);
            if (static_cast<std::size_t>(to) >= expanded.size()) {
                expanded.resize(static_cast<std::size_t>(to) + 1, 0);
                work.push(to);
            } else if (!expanded[static_cast<std::size_t>(to)]) {
                work.push(to);
            }
            model.transitions.push_back({id, to, weight});

            std::size_t c = k;
            while (c-- > 0) {
                ++pos[c];
                if (pos[c] != adj[c][static_cast<std::size_t>(tuple[c])].end()) break;
                pos[c] = adj[c][static_cast<std::size_t>(tuple[c])].begin();
                if (c == 0) {
                    c = k;  // odometer wrapped completely
                    break;
                }
            }
            if (c == k) break;
        }
    }

    model.finalize();
    return model;
}

std::vector<std::string> validate_agent(const AgentModel& a, const ActionTable& actions) {
    std::vector<std::string> issues;
    const int n = a.num_states();
    for (int s = 0; s < n; ++s)
        if (a.transition_index(s, s) < 0)
            issues.push_back("agent '" + a.name + "': state '" +
                             a.state_names[static_cast<std::size_t>(s)] +
                             "' has no self-transition (cannot wait)");

    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<int> work;
    if (n > 0) {
        seen[static_cast<std::size_t>(a.initial)] = 1;
        work.push(a.initial);
    }
    while (!work.empty()) {
        const int s = work.front();
        work.pop();
        for (int ei : a.out[static_cast<std::size_t>(s)]) {
            const int to = a.transitions[static_cast<std::size_t>(ei)].to;
            if (!seen[static_cast<std::size_t>(to)]) {
                seen[static_cast<std::size_t>(to)] = 1;
                work.push(to);
            }
        }
    }
    for (int s = 0; s < n; ++s)
        if (!seen[static_cast<std::size_t>(s)])
            issues.push_back("agent '" + a.name + "': state '" +
                             a.state_names[static_cast<std::size_t>(s)] +
                             "' is unreachable from the initial state");

    for (int s = 0; s < n; ++s)
        for (ActionId p : a.labels[static_cast<std::size_t>(s)])
            if (!a.ap.count(p))
                issues.push_back("agent '" + a.name + "': state '" +
                                 a.state_names[static_cast<std::size_t>(s)] +
                                 "' is labeled with '" + actions.name(p) +
                                 "' which is outside the agent alphabet");
    return issues;
}

} // namespace ltlpsi
