#include "ltlpsi/executor.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <sstream>
#include <utility>

#include "ltlpsi/errors.hpp"

namespace ltlpsi {

namespace {

// Product edge index from -> to, or -1. Product edges are unique per pair.
int edge_between(const ProductAutomaton& g, int from, int to) {
    for (int ei : g.out[static_cast<std::size_t>(from)])
        if (g.edges[static_cast<std::size_t>(ei)].to == to) return ei;
    return -1;
}

// True when q has a self-move realizing `buchi_edge` with all of r, i.e. the
// agent can sit at q while the plan stays on that edge.
bool can_hold(const ProductAutomaton& g, int q, int buchi_edge, BindingSet r) {
    int ei = edge_between(g, q, q);
    if (ei < 0) return false;
    return binding_set_subset(r, g.edges[static_cast<std::size_t>(ei)].feasible_for(buchi_edge));
}

} // namespace

AgentBehavior find_behavior(const ProductAutomaton& g, const AgentModel& agent, BindingSet r,
                            int start, int self_edge, int progress_edge, int hold_edge) {
    if (start < 0 || start >= g.num_states())
        throw Error("find_behavior: start state out of range");

    auto finish = [&](std::vector<int> states) {
        AgentBehavior b;
        b.states = std::move(states);
        for (std::size_t i = 0; i + 1 < b.states.size(); ++i) {
            int ei = edge_between(g, b.states[i], b.states[i + 1]);
            b.cost += g.edges[static_cast<std::size_t>(ei)].weight;
        }
        for (int q : b.states)
            b.labels.push_back(agent.labels[static_cast<std::size_t>(g.agent_state[static_cast<std::size_t>(q)])]);
        return b;
    };

    if (self_edge < 0) {
        // The plan consumes the initial configuration with the progress edge
        // itself: cross while standing still, no repositioning available.
        int best = -1;
        for (int ei : g.out[static_cast<std::size_t>(start)]) {
            const ProductEdge& e = g.edges[static_cast<std::size_t>(ei)];
            if (g.agent_state[static_cast<std::size_t>(e.to)] !=
                g.agent_state[static_cast<std::size_t>(start)])
                continue;
            if (!binding_set_subset(r, e.feasible_for(progress_edge))) continue;
            if (hold_edge >= 0 && !can_hold(g, e.to, hold_edge, r)) continue;
            if (best < 0) {
                best = ei;
                continue;
            }
            const ProductEdge& b = g.edges[static_cast<std::size_t>(best)];
            if (e.weight < b.weight || (e.weight == b.weight && e.to < b.to)) best = ei;
        }
        if (best < 0)
            throw Error("find_behavior: " + agent.name +
                        " cannot cross the opening edge from its initial state");
        return finish({start, g.edges[static_cast<std::size_t>(best)].to});
    }

    // Shortest repositioning distances along moves that realize the
    // self-loop with all of r. Ties resolve by state id via the queue order
    // and strict relaxation, so the parent tree is deterministic.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(g.num_states()), inf);
    std::vector<int> parent(static_cast<std::size_t>(g.num_states()), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[static_cast<std::size_t>(start)] = 0.0;
    pq.push({0.0, start});
    while (!pq.empty()) {
        auto [d, q] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(q)]) continue;
        for (int ei : g.out[static_cast<std::size_t>(q)]) {
            const ProductEdge& e = g.edges[static_cast<std::size_t>(ei)];
            if (!binding_set_subset(r, e.feasible_for(self_edge))) continue;
            double nd = d + e.weight;
            if (nd < dist[static_cast<std::size_t>(e.to)]) {
                dist[static_cast<std::size_t>(e.to)] = nd;
                parent[static_cast<std::size_t>(e.to)] = q;
                pq.push({nd, e.to});
            }
        }
    }

    // Cheapest (pre-crossing, target) pair: the pre-crossing state must be
    // holdable (the agent may wait there arbitrarily long for the rest of
    // the team) and the final move must realize the progress edge.
    int best_src = -1, best_tgt = -1;
    double best_cost = inf;
    for (int q = 0; q < g.num_states(); ++q) {
        if (dist[static_cast<std::size_t>(q)] == inf) continue;
        if (!can_hold(g, q, self_edge, r)) continue;
        for (int ei : g.out[static_cast<std::size_t>(q)]) {
            const ProductEdge& e = g.edges[static_cast<std::size_t>(ei)];
            if (!binding_set_subset(r, e.feasible_for(progress_edge))) continue;
            if (hold_edge >= 0 && !can_hold(g, e.to, hold_edge, r)) continue;
            double total = dist[static_cast<std::size_t>(q)] + e.weight;
            if (total < best_cost || (total == best_cost && (q < best_src || (q == best_src && e.to < best_tgt)))) {
                best_cost = total;
                best_src = q;
                best_tgt = e.to;
            }
        }
    }
    if (best_src < 0)
        throw Error("find_behavior: " + agent.name +
                    " has no admissible path for the segment (plan inconsistency)");

    std::vector<int> states;
    for (int q = best_src; q != -1; q = parent[static_cast<std::size_t>(q)]) states.push_back(q);
    std::reverse(states.begin(), states.end());
    states.push_back(best_tgt);
    return finish(std::move(states));
}

TeamTrace run_team(const BuchiAutomaton& plan, const TeamPlan& tp,
                   const std::vector<TeamMember>& members) {
    const std::size_t n = tp.team.size();
    if (n == 0) throw Error("run_team: empty team");
    if (tp.self_at.size() != tp.beta.size() + 1 || tp.assignment.size() != n)
        throw Error("run_team: malformed plan");

    std::vector<const ProductAutomaton*> g(n);
    std::vector<const AgentModel*> ag(n);
    for (std::size_t i = 0; i < n; ++i) {
        int m = tp.team[i];
        if (m < 0 || static_cast<std::size_t>(m) >= members.size())
            throw Error("run_team: team index out of range");
        g[i] = members[static_cast<std::size_t>(m)].product;
        ag[i] = members[static_cast<std::size_t>(m)].agent;
        if (g[i] == nullptr || ag[i] == nullptr)
            throw Error("run_team: member lacks product or agent model");
    }

    TeamTrace tr;
    std::vector<int> cur(n);
    for (std::size_t i = 0; i < n; ++i) {
        int m = tp.team[i];
        tr.agent_names.push_back(members[static_cast<std::size_t>(m)].name);
        tr.assignment.push_back(tp.assignment[i]);
        cur[i] = g[i]->initial;
        tr.agent_states.emplace_back();
        tr.labels.emplace_back();
    }
    auto record = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            int s = g[i]->agent_state[static_cast<std::size_t>(cur[i])];
            tr.agent_states[i].push_back(s);
            tr.labels[i].push_back(ag[i]->labels[static_cast<std::size_t>(s)]);
        }
    };
    record();  // tick 0: initial configuration

    const std::size_t stages = tp.beta.size();
    if (stages == 0) {
        // The team satisfies the task by holding its initial configuration.
        for (std::size_t i = 0; i < n; ++i)
            if (!can_hold(*g[i], cur[i], tp.self_at[0], tp.assignment[i]))
                throw Error("run_team: " + tr.agent_names[i] + " cannot hold the initial state");
        tr.run.push_back(tp.self_at[0]);
        return tr;
    }

    if (tp.self_at[0] >= 0) tr.run.push_back(tp.self_at[0]);
    int base = 0;  // last recorded tick

    for (std::size_t k = 0; k < stages; ++k) {
        int self_k = tp.self_at[k];
        int prog = tp.beta[k];
        int hold = (k + 1 == stages) ? tp.self_at[stages] : -1;

        if (self_k < 0) {
            // Opening stutter crossing: the initial configuration itself is
            // read by the progress edge; nobody moves and no tick elapses.
            for (std::size_t i = 0; i < n; ++i) {
                AgentBehavior b = find_behavior(*g[i], *ag[i], tp.assignment[i], cur[i], -1, prog, hold);
                cur[i] = b.states.back();
            }
            tr.run.push_back(prog);  // becomes run[0]
            tr.crossing_tick.push_back(0);
            continue;
        }

        std::vector<AgentBehavior> beh(n);
        std::vector<int> reposition(n);
        int longest = 0;
        for (std::size_t i = 0; i < n; ++i) {
            beh[i] = find_behavior(*g[i], *ag[i], tp.assignment[i], cur[i], self_k, prog, hold);
            reposition[i] = static_cast<int>(beh[i].states.size()) - 2;
            longest = std::max(longest, reposition[i]);
        }

        // Synchronization group: agents whose assignment shares a binding
        // with the edge. Groups of two or more broadcast their status at the
        // end of every tick until the crossing; a lone (or absent) carrier
        // proceeds without messages.
        BindingSet need = binding_fn(plan.edges[static_cast<std::size_t>(prog)].label);
        std::vector<std::size_t> group;
        for (std::size_t i = 0; i < n; ++i)
            if ((tp.assignment[i] & need) != 0) group.push_back(i);
        if (group.size() >= 2) {
            int target = plan.edges[static_cast<std::size_t>(prog)].to;
            BindingSet covered = 0;
            for (std::size_t i : group) covered |= tp.assignment[i];
            if (!binding_set_subset(need, covered))
                throw Error("run_team: synchronization deadlock — group assignments never cover the edge");
            for (int t = 0; t <= longest; ++t)
                for (std::size_t i : group)
                    tr.messages.push_back({base + t, static_cast<int>(i), target,
                                           t >= reposition[i] ? 1 : 0});
        }

        // Repositioning ticks: movers advance, everyone else holds its
        // pre-crossing state.
        for (int step = 1; step <= longest; ++step) {
            for (std::size_t i = 0; i < n; ++i)
                cur[i] = beh[i].states[static_cast<std::size_t>(std::min(step, reposition[i]))];
            record();
            tr.run.push_back(self_k);
        }
        // Crossing tick: the whole team takes its final move together.
        for (std::size_t i = 0; i < n; ++i) cur[i] = beh[i].states.back();
        record();
        tr.run.push_back(prog);
        base += longest + 1;
        tr.crossing_tick.push_back(base);
    }
    return tr;
}

LassoTrace to_lasso(const TeamTrace& trace) {
    LassoTrace lt;
    lt.prefix_len = trace.ticks() - 1;
    lt.cycle_len = 1;
    lt.labels = trace.labels;
    return lt;
}

namespace {

// Pooled letter at one tick: every annotated proposition some agent makes
// true under its assignment.
std::vector<PropPair> pooled_letter(const TeamTrace& tr, std::size_t t) {
    std::vector<PropPair> letter;
    for (std::size_t i = 0; i < tr.labels.size(); ++i)
        for (int rho : binding_set_indices(tr.assignment[i]))
            for (ActionId a : tr.labels[i][t]) letter.push_back({a, rho});
    std::sort(letter.begin(), letter.end());
    letter.erase(std::unique(letter.begin(), letter.end()), letter.end());
    return letter;
}

} // namespace

std::vector<std::string> check_sync_protocol(const BuchiAutomaton& plan, const TeamPlan& tp,
                                             const std::vector<TeamMember>& members,
                                             const TeamTrace& trace) {
    std::vector<std::string> bad;
    const std::size_t n = tp.team.size();
    const std::size_t ticks = trace.ticks();

    // Shape first; the remaining checks index freely.
    if (ticks == 0 || trace.agent_states.size() != n || trace.labels.size() != n ||
        trace.assignment.size() != n || trace.crossing_tick.size() != tp.beta.size() ||
        tp.self_at.size() != tp.beta.size() + 1) {
        bad.push_back("trace shape does not match the plan");
        return bad;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (trace.agent_states[i].size() != ticks || trace.labels[i].size() != ticks) {
            bad.push_back("trace rows have inconsistent lengths");
            return bad;
        }
    for (int e : trace.run)
        if (e < 0 || static_cast<std::size_t>(e) >= plan.edges.size()) {
            bad.push_back("run references an edge outside the plan");
            return bad;
        }

    // The run must walk the plan's path: each progress edge exactly once at
    // its recorded tick, the enclosing stage's self-loop everywhere else.
    {
        std::size_t k = 0;
        for (std::size_t t = 0; t < ticks; ++t) {
            if (k < tp.beta.size() && trace.crossing_tick[k] == static_cast<int>(t)) {
                if (trace.run[t] != tp.beta[k])
                    bad.push_back("tick " + std::to_string(t) + " does not cross progress edge " +
                                  std::to_string(k));
                ++k;
            } else if (trace.run[t] != tp.self_at[k]) {
                bad.push_back("tick " + std::to_string(t) + " strays from the stage self-loop");
            }
        }
        if (k != tp.beta.size()) bad.push_back("trace ends before every progress edge is crossed");
        if (!tp.beta.empty() && trace.crossing_tick.back() != static_cast<int>(ticks) - 1)
            bad.push_back("trace does not end at the final crossing");
    }

    // Per-agent admissibility: every move must be a product move serving the
    // consumed edge with the agent's full assignment; the final state must
    // keep serving the accepting self-loop forever.
    int self_final = tp.self_at.back();
    for (std::size_t i = 0; i < n; ++i) {
        const TeamMember& m = members[static_cast<std::size_t>(tp.team[i])];
        const ProductAutomaton& g = *m.product;
        BindingSet r = trace.assignment[i];
        const std::string& who = trace.agent_names[i];
        auto admissible = [&](int s_from, int s_to, int plan_edge) {
            const BuchiEdge& pe = plan.edges[static_cast<std::size_t>(plan_edge)];
            int qf = g.state_index(s_from, pe.from);
            int qt = g.state_index(s_to, pe.to);
            if (qf < 0 || qt < 0) return false;
            int ei = edge_between(g, qf, qt);
            if (ei < 0) return false;
            return binding_set_subset(r, g.edges[static_cast<std::size_t>(ei)].feasible_for(plan_edge));
        };
        // Tick 0 is consumed standing still: a self-loop realization for a
        // waiting stage, a stutter move for an opening crossing.
        if (!admissible(trace.agent_states[i][0], trace.agent_states[i][0], trace.run[0]))
            bad.push_back(who + ": initial configuration does not serve the first edge");
        for (std::size_t t = 1; t < ticks; ++t)
            if (!admissible(trace.agent_states[i][t - 1], trace.agent_states[i][t], trace.run[t]))
                bad.push_back(who + ": move at tick " + std::to_string(t) +
                              " is not admissible for the consumed edge");
        if (!admissible(trace.agent_states[i][ticks - 1], trace.agent_states[i][ticks - 1], self_final))
            bad.push_back(who + ": cannot hold the final state forever");
    }

    // Letter-level satisfaction: the pooled labels must satisfy every
    // consumed edge label, and the final configuration the accepting
    // self-loop (the trace repeats it forever).
    for (std::size_t t = 0; t < ticks; ++t)
        if (!label_compatible(plan.edges[static_cast<std::size_t>(trace.run[t])].label,
                              pooled_letter(trace, t)))
            bad.push_back("pooled labels at tick " + std::to_string(t) +
                          " violate the consumed edge label");
    if (!label_compatible(plan.edges[static_cast<std::size_t>(self_final)].label,
                          pooled_letter(trace, ticks - 1)))
        bad.push_back("final configuration violates the accepting self-loop label");

    // Message discipline per progress edge: groups of two or more carriers
    // must each signal ready before crossing; nobody else may speak, and
    // every message names the edge's target.
    for (std::size_t k = 0; k < tp.beta.size(); ++k) {
        int from_tick = k == 0 ? 0 : trace.crossing_tick[k - 1];
        int cross = trace.crossing_tick[k];
        const BuchiEdge& pe = plan.edges[static_cast<std::size_t>(tp.beta[k])];
        BindingSet need = binding_fn(pe.label);
        std::vector<std::size_t> group;
        for (std::size_t i = 0; i < n; ++i)
            if ((trace.assignment[i] & need) != 0) group.push_back(i);
        bool sync = group.size() >= 2 && cross > from_tick;
        std::vector<char> readied(n, 0);
        for (const SyncMessage& msg : trace.messages) {
            if (msg.tick < from_tick || msg.tick >= cross) continue;
            if (!sync) {
                bad.push_back("message before crossing " + std::to_string(k) +
                              " from a segment without a synchronization group");
                continue;
            }
            bool in_group = std::find(group.begin(), group.end(),
                                      static_cast<std::size_t>(msg.agent)) != group.end();
            if (!in_group)
                bad.push_back(trace.agent_names[static_cast<std::size_t>(msg.agent)] +
                              ": message from outside the synchronization group of edge " +
                              std::to_string(k));
            if (msg.target != pe.to)
                bad.push_back("message before crossing " + std::to_string(k) +
                              " names the wrong target state");
            if (msg.ready == 1 && msg.agent >= 0 && static_cast<std::size_t>(msg.agent) < n)
                readied[static_cast<std::size_t>(msg.agent)] = 1;
        }
        if (sync)
            for (std::size_t i : group)
                if (!readied[i])
                    bad.push_back(trace.agent_names[i] + ": never signaled ready before crossing " +
                                  std::to_string(k));
    }
    return bad;
}

std::string trace_to_log(const TeamTrace& trace, const BuchiAutomaton& plan, const Vocab& vocab) {
    std::ostringstream os;
    const std::size_t n = trace.agent_names.size();
    std::size_t mi = 0;
    for (std::size_t t = 0; t < trace.ticks(); ++t) {
        const BuchiEdge& e = plan.edges[static_cast<std::size_t>(trace.run[t])];
        os << "tick " << t << " | edge " << trace.run[t] << " (" << e.from
           << (e.from == e.to ? " self" : " -> " + std::to_string(e.to)) << ")\n";
        for (std::size_t i = 0; i < n; ++i) {
            os << "  " << trace.agent_names[i] << " [" << binding_set_to_string(trace.assignment[i], vocab.bindings)
               << "] state " << trace.agent_states[i][t] << " {";
            bool first = true;
            for (ActionId a : trace.labels[i][t]) {
                if (!first) os << ", ";
                os << vocab.actions.name(a);
                first = false;
            }
            os << "}\n";
        }
        for (; mi < trace.messages.size() &&
               trace.messages[mi].tick == static_cast<int>(t);
             ++mi) {
            const SyncMessage& msg = trace.messages[mi];
            os << "  msg " << trace.agent_names[static_cast<std::size_t>(msg.agent)] << " -> * (z"
               << msg.target << ", ready=" << msg.ready << ")\n";
        }
    }
    os << "(final configuration repeats forever)\n";
    return os.str();
}

} // namespace ltlpsi
