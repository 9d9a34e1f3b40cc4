#include "ltlpsi/team.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "ltlpsi/errors.hpp"

namespace ltlpsi {

namespace {

bool pruned_has(const BuchiAutomaton& pruned, const BuchiEdge& e) {
    return std::binary_search(pruned.edges.begin(), pruned.edges.end(), e);
}

// Normalizes candidate maximal sets: drops empties and dominated sets.
BindingFamily family_from_candidates(std::vector<BindingSet> cand) {
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    BindingFamily out;
    for (BindingSet r : cand) {
        if (r == 0) continue;
        bool dominated = false;
        for (BindingSet s : cand)
            if (s != r && binding_set_subset(r, s)) {
                dominated = true;
                break;
            }
        if (!dominated) out.maximal.push_back(r);
    }
    return out;
}

} // namespace

std::vector<int> update_team(const BuchiAutomaton& plan, int edge,
                             const std::vector<TeamMember>& members,
                             const std::vector<int>& current) {
    const BuchiEdge& e = plan.edges[static_cast<std::size_t>(edge)];
    std::vector<int> out;
    for (int j : current)
        if (pruned_has(*members[static_cast<std::size_t>(j)].pruned, e)) out.push_back(j);
    return out;
}

BindingFamily update_bindings(const BindingFamily& family, const ProductAutomaton& product,
                              int edge, bool first_step) {
    // Collect the feasible sets of every product realization of the edge.
    // An assignment survives iff it lies under one of them, so the surviving
    // family's maximal elements are the maximal nonempty intersections of
    // old maximal elements with realization sets.
    std::vector<BindingSet> realized;
    for (const ProductEdge& pe : product.edges) {
        if (first_step) {
            if (pe.from != product.initial) continue;
            if (product.agent_state[static_cast<std::size_t>(pe.to)] !=
                product.agent_state[static_cast<std::size_t>(pe.from)])
                continue;  // the agent must hold still while the first label is read
        }
        BindingSet f = pe.feasible_for(edge);
        if (f != 0) realized.push_back(f);
    }
    std::vector<BindingSet> cand;
    for (BindingSet m : family.maximal)
        for (BindingSet f : realized) cand.push_back(m & f);
    return family_from_candidates(std::move(cand));
}

std::pair<std::vector<int>, std::map<int, int>> parse_path(const BuchiAutomaton& plan,
                                                           const std::vector<int>& path) {
    std::vector<int> beta;
    std::map<int, int> selfs;
    int at = plan.initial;
    int last_kind = -1;  // -1 none, 0 self, 1 progress
    for (int ei : path) {
        const BuchiEdge& e = plan.edges[static_cast<std::size_t>(ei)];
        if (e.from != at) throw Error("plan path is disconnected");
        int kind = e.from == e.to ? 0 : 1;
        if (kind == last_kind)
            throw Error("plan path must alternate between self and progress edges");
        if (kind == 0) {
            selfs.emplace(e.from, ei);
        } else {
            beta.push_back(ei);
            at = e.to;
        }
        last_kind = kind;
    }
    return {std::move(beta), std::move(selfs)};
}

namespace {

// Picks one assignment per team entry so the union covers `mentioned`,
// preferring, agent by agent, the smallest-cardinality lexicographically
// first member that still lets the remaining agents finish the cover.
// Returns an empty vector when no combination covers.
std::vector<BindingSet> choose_assignment(const std::vector<BindingFamily>& fams,
                                          BindingSet mentioned) {
    std::size_t n = fams.size();
    std::vector<std::vector<BindingSet>> cand(n);
    std::vector<BindingSet> reach(n + 1, 0);  // union of everything agents i.. can add
    for (std::size_t i = 0; i < n; ++i) {
        cand[i] = fams[i].members();
        std::sort(cand[i].begin(), cand[i].end(), [](BindingSet a, BindingSet b) {
            int pa = binding_set_size(a), pb = binding_set_size(b);
            return pa != pb ? pa < pb : a < b;
        });
    }
    for (std::size_t i = n; i-- > 0;) reach[i] = reach[i + 1] | fams[i].union_mask();

    std::vector<BindingSet> chosen(n, 0);
    std::set<std::pair<std::size_t, BindingSet>> dead;
    auto search = [&](auto&& self, std::size_t i, BindingSet covered) -> bool {
        covered &= mentioned;
        if (i == n) return covered == mentioned;
        if ((covered | (reach[i] & mentioned)) != mentioned) return false;
        if (dead.count({i, covered})) return false;
        for (BindingSet r : cand[i]) {
            chosen[i] = r;
            if (self(self, i + 1, covered | r)) return true;
        }
        dead.emplace(i, covered);
        return false;
    };
    if (!search(search, 0, 0)) return {};
    return chosen;
}

struct Frame {
    int edge = 0;
    std::vector<int> team;
    std::vector<BindingFamily> fams;
    std::vector<int> path;  // edges before this one
};

} // namespace

std::optional<TeamPlan> find_team_trace(const BuchiAutomaton& plan,
                                        const std::vector<TeamMember>& members,
                                        BindingSet mentioned,
                                        TeamSearchStats* stats) {
    TeamSearchStats local;
    TeamSearchStats& st = stats ? *stats : local;

    std::vector<int> everyone;
    std::vector<BindingFamily> start_fams;
    for (std::size_t j = 0; j < members.size(); ++j) {
        if (members[j].family.maximal.empty()) continue;
        everyone.push_back(static_cast<int>(j));
        start_fams.push_back(members[j].family);
    }

    std::vector<Frame> stack;
    std::set<int> visited;
    auto push_from = [&](int state, int popped_kind, const Frame& base) {
        // popped_kind: -1 start (both kinds allowed), 0 self (progress next),
        // 1 progress (self next).
        const auto& outs = plan.out_edges[static_cast<std::size_t>(state)];
        for (std::size_t k = outs.size(); k-- > 0;) {
            int ni = outs[k];
            const BuchiEdge& ne = plan.edges[static_cast<std::size_t>(ni)];
            int kind = ne.from == ne.to ? 0 : 1;
            if (popped_kind != -1 && kind == popped_kind) continue;
            if (visited.count(ni)) continue;
            stack.push_back({ni, base.team, base.fams, base.path});
            ++st.pushed;
        }
    };

    Frame root;
    root.team = everyone;
    root.fams = start_fams;
    push_from(plan.initial, -1, root);

    while (!stack.empty()) {
        Frame fr = std::move(stack.back());
        stack.pop_back();
        if (visited.count(fr.edge)) continue;
        visited.insert(fr.edge);
        ++st.expanded;

        const BuchiEdge& e = plan.edges[static_cast<std::size_t>(fr.edge)];
        bool first = fr.path.empty();
        std::vector<int> team2;
        std::vector<BindingFamily> fams2;
        for (std::size_t i = 0; i < fr.team.size(); ++i) {
            ++st.updates;
            const TeamMember& m = members[static_cast<std::size_t>(fr.team[i])];
            if (!pruned_has(*m.pruned, e)) continue;
            BindingFamily f2 = update_bindings(fr.fams[i], *m.product, fr.edge, first);
            if (f2.maximal.empty()) continue;
            team2.push_back(fr.team[i]);
            fams2.push_back(std::move(f2));
        }

        BindingSet covered = 0;
        for (const BindingFamily& f : fams2) covered |= f.union_mask();
        if ((mentioned & ~covered) != 0) continue;  // cover lost; extensions cannot regain it

        fr.path.push_back(fr.edge);

        if (e.from == e.to && plan.is_accepting(e.to) && !team2.empty()) {
            std::vector<BindingSet> chosen = choose_assignment(fams2, mentioned);
            if (!chosen.empty()) {
                TeamPlan out;
                out.path = fr.path;
                auto [beta, selfs] = parse_path(plan, fr.path);
                out.beta = std::move(beta);
                out.self_edges = std::move(selfs);
                out.self_at.assign(out.beta.size() + 1, -1);
                std::size_t stage = 0;
                for (int ei : fr.path) {
                    const BuchiEdge& pe = plan.edges[static_cast<std::size_t>(ei)];
                    if (pe.from == pe.to)
                        out.self_at[stage] = ei;
                    else
                        ++stage;
                }
                out.team = std::move(team2);
                out.assignment = std::move(chosen);
                out.families = std::move(fams2);
                return out;
            }
            // No concrete cover: the family union covers only jointly, e.g.
            // one agent able to carry {1} or {2} but not both.  Keep looking.
        }

        Frame base;
        base.team = std::move(team2);
        base.fams = std::move(fams2);
        base.path = std::move(fr.path);
        push_from(e.to, e.from == e.to ? 0 : 1, base);
    }
    return std::nullopt;
}

} // namespace ltlpsi
