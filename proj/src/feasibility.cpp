#include "ltlpsi/feasibility.hpp"

#include <algorithm>
#include <set>

#include "ltlpsi/errors.hpp"

namespace ltlpsi {

bool BindingFamily::contains(BindingSet r) const {
    if (r == 0) return false;
    for (BindingSet m : maximal)
        if (binding_set_subset(r, m)) return true;
    return false;
}

BindingSet BindingFamily::union_mask() const {
    BindingSet u = 0;
    for (BindingSet m : maximal) u |= m;
    return u;
}

std::vector<BindingSet> BindingFamily::members() const {
    std::set<BindingSet> all;
    for (BindingSet m : maximal)
        for (BindingSet r = m; r != 0; r = (r - 1) & m) all.insert(r);
    return {all.begin(), all.end()};
}

namespace {

// Adjacency restricted to edges the assignment r can ride: some contributing
// guard edge must admit all of r.
struct RestrictedGraph {
    std::vector<std::vector<int>> succ;  // general successors per state
    std::vector<int> first;              // q0 successors through a wait move
};

bool admits(const ProductEdge& e, BindingSet r) {
    for (const auto& rec : e.records)
        if (binding_set_subset(r, rec.feasible)) return true;
    return false;
}

RestrictedGraph restrict_edges(const ProductAutomaton& g, BindingSet r) {
    RestrictedGraph rg;
    rg.succ.resize(static_cast<std::size_t>(g.num_states()));
    const int s0 = g.agent_state[static_cast<std::size_t>(g.initial)];
    for (const auto& e : g.edges) {
        if (!admits(e, r)) continue;
        rg.succ[static_cast<std::size_t>(e.from)].push_back(e.to);
        if (e.from == g.initial && g.agent_state[static_cast<std::size_t>(e.to)] == s0)
            rg.first.push_back(e.to);
    }
    return rg;
}

// Cycle through `seed` over rg.succ; `red` marks persist across seeds, which
// stays sound because seeds are visited in outer-search post-order.
bool red_search(const RestrictedGraph& rg, int seed, std::vector<char>& red) {
    std::vector<int> stack{seed};
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : rg.succ[static_cast<std::size_t>(u)]) {
            if (v == seed) return true;
            if (!red[static_cast<std::size_t>(v)]) {
                red[static_cast<std::size_t>(v)] = 1;
                stack.push_back(v);
            }
        }
    }
    return false;
}

} // namespace

bool accepting_trace_exists(const ProductAutomaton& g, BindingSet r) {
    if (r == 0) throw Error("binding assignment must be nonempty");
    if (g.num_states() == 0) return false;
    const RestrictedGraph rg = restrict_edges(g, r);

    // Two-pass nested depth-first search: the outer pass orders states by
    // completion, the inner pass looks for a cycle through each accepting
    // state as it completes.
    std::vector<char> blue(static_cast<std::size_t>(g.num_states()), 0);
    std::vector<char> red(static_cast<std::size_t>(g.num_states()), 0);
    std::vector<std::pair<int, std::size_t>> stack;  // (state, next child index)
    for (int root : rg.first) {
        if (blue[static_cast<std::size_t>(root)]) continue;
        blue[static_cast<std::size_t>(root)] = 1;
        stack.push_back({root, 0});
        while (!stack.empty()) {
            auto& [u, child] = stack.back();
            const auto& succ = rg.succ[static_cast<std::size_t>(u)];
            if (child < succ.size()) {
                const int v = succ[child++];
                if (!blue[static_cast<std::size_t>(v)]) {
                    blue[static_cast<std::size_t>(v)] = 1;
                    stack.push_back({v, 0});
                }
            } else {
                if (g.accepting[static_cast<std::size_t>(u)] && red_search(rg, u, red))
                    return true;
                stack.pop_back();
            }
        }
    }
    return false;
}

BindingFamily feasible_binding_sets(const ProductAutomaton& g, BindingSet universe,
                                    std::size_t* checks) {
    BindingFamily fam;
    if (universe == 0) return fam;
    std::set<BindingSet> level{universe};
    while (!level.empty()) {
        std::set<BindingSet> next;
        for (BindingSet r : level) {
            if (fam.contains(r)) continue;  // covered by a confirmed assignment
            if (checks != nullptr) ++*checks;
            if (accepting_trace_exists(g, r)) {
                fam.maximal.push_back(r);
            } else {
                for (int rho = 0; rho < 32; ++rho) {
                    if (!binding_set_contains(r, rho)) continue;
                    const BindingSet sub = r & ~(BindingSet{1} << rho);
                    if (sub != 0) next.insert(sub);
                }
            }
        }
        level = std::move(next);
    }
    std::sort(fam.maximal.begin(), fam.maximal.end());
    return fam;
}

BuchiAutomaton prune_buchi(const BuchiAutomaton& b, const BindingFamily& fam,
                           const ProductAutomaton& g) {
    // An edge survives iff some family member fits inside some feasibility
    // record for it; by downward closure that reduces to a singleton, i.e. to
    // the record meeting the union of the maximal elements.
    const BindingSet u = fam.union_mask();
    std::vector<char> keep(b.edges.size(), 0);
    for (const auto& e : g.edges)
        for (const auto& rec : e.records)
            if ((rec.feasible & u) != 0) keep[static_cast<std::size_t>(rec.buchi_edge)] = 1;

    BuchiAutomaton out;
    out.num_states = b.num_states;
    out.initial = b.initial;
    out.accepting = b.accepting;
    for (std::size_t i = 0; i < b.edges.size(); ++i)
        if (keep[i]) out.edges.push_back(b.edges[i]);
    out.finalize();
    return out;
}

} // namespace ltlpsi
