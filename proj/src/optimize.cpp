#include "ltlpsi/optimize.hpp"

#include <algorithm>
#include <limits>

#include "ltlpsi/errors.hpp"

namespace ltlpsi {

namespace {

// Lexicographic objective value; smaller is better. Meaning of the slots
// depends on the objective; ties beyond them keep the first solution found,
// which the include-first depth-first order makes the one using the
// earliest-indexed agents.
struct Score {
    double a = std::numeric_limits<double>::infinity();
    double b = std::numeric_limits<double>::infinity();
    double c = std::numeric_limits<double>::infinity();

    bool better_than(const Score& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return c < o.c;
    }
};

// Subset branch-and-bound for MinAgents / MinCost: walk agents in input
// order, include first, and cut branches that already score no better than
// the incumbent or can no longer reach the required multiplicity.
struct SubsetSearch {
    const std::vector<BindingSet>& r;
    const std::vector<double>& costs;
    const std::vector<int>& need;  // binding indices to cover
    int redundancy;
    bool by_cost;

    std::vector<std::vector<int>> tail;  // tail[i][k]: carriers of need[k] among agents i..n-1
    std::vector<int> have;               // current carriers per need[k]
    std::vector<char> in;
    Score best;
    std::vector<char> best_in;

    explicit SubsetSearch(const std::vector<BindingSet>& r_, const std::vector<double>& costs_,
                          const std::vector<int>& need_, int red, bool by_cost_)
        : r(r_), costs(costs_), need(need_), redundancy(red), by_cost(by_cost_) {
        const std::size_t n = r.size();
        tail.assign(n + 1, std::vector<int>(need.size(), 0));
        for (std::size_t i = n; i-- > 0;)
            for (std::size_t k = 0; k < need.size(); ++k)
                tail[i][k] = tail[i + 1][k] + (binding_set_contains(r[i], need[k]) ? 1 : 0);
        have.assign(need.size(), 0);
        in.assign(n, 0);
    }

    Score partial(int count, double cost) const {
        return by_cost ? Score{cost, static_cast<double>(count), 0.0}
                       : Score{static_cast<double>(count), cost, 0.0};
    }

    void walk(std::size_t i, int count, double cost) {
        if (!partial(count, cost).better_than(best)) return;  // adding agents never improves
        for (std::size_t k = 0; k < need.size(); ++k)
            if (have[k] + tail[i][k] < redundancy) return;
        if (i == r.size()) {
            best = partial(count, cost);
            best_in = in;
            return;
        }
        in[i] = 1;
        for (std::size_t k = 0; k < need.size(); ++k)
            if (binding_set_contains(r[i], need[k])) ++have[k];
        walk(i + 1, count + 1, cost + costs[i]);
        for (std::size_t k = 0; k < need.size(); ++k)
            if (binding_set_contains(r[i], need[k])) --have[k];
        in[i] = 0;
        walk(i + 1, count, cost);
    }
};

// Exact minimization of the largest per-agent binding count: pick, for each
// required binding, `redundancy` of its carriers, and charge each chosen
// agent the bindings routed to it. Bindings are processed in ascending
// order and carrier combinations in ascending index order, so ties keep the
// earliest-indexed agents.
struct LoadSearch {
    const std::vector<BindingSet>& r;
    const std::vector<double>& costs;
    const std::vector<int>& need;
    int redundancy;

    std::vector<std::vector<int>> carriers;  // per need[k], ascending agent indices
    std::vector<BindingSet> picked;          // current routing, per agent
    Score best;
    std::vector<BindingSet> best_picked;

    LoadSearch(const std::vector<BindingSet>& r_, const std::vector<double>& costs_,
               const std::vector<int>& need_, int red)
        : r(r_), costs(costs_), need(need_), redundancy(red) {
        carriers.resize(need.size());
        for (std::size_t k = 0; k < need.size(); ++k)
            for (std::size_t j = 0; j < r.size(); ++j)
                if (binding_set_contains(r[j], need[k]))
                    carriers[k].push_back(static_cast<int>(j));
        picked.assign(r.size(), 0);
    }

    void evaluate() {
        Score s{0.0, 0.0, 0.0};
        for (std::size_t j = 0; j < r.size(); ++j)
            if (picked[j] != 0) {
                s.a = std::max(s.a, static_cast<double>(binding_set_size(picked[j])));
                s.b += 1.0;
                s.c += costs[j];
            }
        if (s.better_than(best)) {
            best = s;
            best_picked = picked;
        }
    }

    int current_max() const {
        int m = 0;
        for (BindingSet p : picked) m = std::max(m, binding_set_size(p));
        return m;
    }

    void choose(std::size_t k, std::size_t from, int left) {
        if (static_cast<double>(current_max()) > best.a) return;
        if (left == 0) {
            route(k + 1);
            return;
        }
        const auto& cs = carriers[k];
        for (std::size_t c = from; c + static_cast<std::size_t>(left) <= cs.size(); ++c) {
            const int j = cs[c];
            picked[static_cast<std::size_t>(j)] =
                binding_set_with(picked[static_cast<std::size_t>(j)], need[k]);
            choose(k, c + 1, left - 1);
            picked[static_cast<std::size_t>(j)] &= ~(BindingSet{1} << need[k]);
        }
    }

    void route(std::size_t k) {
        if (k == need.size()) {
            evaluate();
            return;
        }
        choose(k, 0, redundancy);
    }
};

} // namespace

SubTeamChoice select_subteam(const std::vector<BindingSet>& assignments,
                             const std::vector<double>& costs, Objective objective,
                             int redundancy, BindingSet required) {
    if (assignments.size() != costs.size())
        throw Error("select_subteam: assignments and costs must run parallel");
    for (double c : costs)
        if (!(c >= 0.0)) throw Error("select_subteam: costs must be nonnegative");
    if (redundancy < 1) throw Error("select_subteam: redundancy must be positive");

    if (required == 0)
        for (BindingSet r : assignments) required |= r;
    std::vector<int> need = binding_set_indices(required);
    for (int rho : need) {
        int carriers = 0;
        for (BindingSet r : assignments)
            if (binding_set_contains(r, rho)) ++carriers;
        if (carriers < redundancy)
            throw Error("select_subteam: binding covered by " + std::to_string(carriers) +
                        " agents, need " + std::to_string(redundancy));
    }

    SubTeamChoice out;
    if (need.empty()) return out;

    if (objective == Objective::MinBindingsPerAgent) {
        LoadSearch ls(assignments, costs, need, redundancy);
        ls.route(0);
        for (std::size_t j = 0; j < assignments.size(); ++j)
            if (ls.best_picked[j] != 0) {
                out.agents.push_back(static_cast<int>(j));
                out.assignment.push_back(ls.best_picked[j]);
                out.cost += costs[j];
            }
        return out;
    }

    SubsetSearch ss(assignments, costs, need, redundancy, objective == Objective::MinCost);
    ss.walk(0, 0, 0.0);
    for (std::size_t j = 0; j < assignments.size(); ++j)
        if (ss.best_in[j]) {
            out.agents.push_back(static_cast<int>(j));
            out.assignment.push_back(assignments[j]);
            out.cost += costs[j];
        }
    return out;
}

TeamPlan restrict_plan(const TeamPlan& tp, const SubTeamChoice& choice) {
    if (choice.agents.empty()) throw Error("restrict_plan: empty sub-team");
    if (choice.assignment.size() != choice.agents.size())
        throw Error("restrict_plan: malformed choice");
    TeamPlan out = tp;
    out.team.clear();
    out.assignment.clear();
    out.families.clear();
    int prev = -1;
    for (std::size_t i = 0; i < choice.agents.size(); ++i) {
        const int slot = choice.agents[i];
        if (slot <= prev || static_cast<std::size_t>(slot) >= tp.team.size())
            throw Error("restrict_plan: choice slots must be ascending team positions");
        prev = slot;
        const BindingSet r = choice.assignment[i];
        if (r == 0 || !tp.families[static_cast<std::size_t>(slot)].contains(r))
            throw Error("restrict_plan: assignment not supported by the slot's family");
        out.team.push_back(tp.team[static_cast<std::size_t>(slot)]);
        out.assignment.push_back(r);
        out.families.push_back(tp.families[static_cast<std::size_t>(slot)]);
    }
    return out;
}

} // namespace ltlpsi
