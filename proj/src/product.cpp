#include "ltlpsi/product.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "ltlpsi/errors.hpp"

namespace ltlpsi {

BindingSet ProductEdge::feasible_for(int buchi_edge) const {
    auto cmp = [](const ProductEdgeRecord& r, int key) { return r.buchi_edge < key; };
    auto it = std::lower_bound(records.begin(), records.end(), buchi_edge, cmp);
    if (it == records.end() || it->buchi_edge != buchi_edge) return 0;
    return it->feasible;
}

int ProductAutomaton::state_index(int s, int z) const {
    auto it = index.find({s, z});
    return it == index.end() ? -1 : it->second;
}

bool binding_feasible(int rho, const EdgeLabel& label,
                      const std::set<ActionId>& next_state_label,
                      const std::set<ActionId>& agent_ap) {
    const CapabilityReq req = capability_fn(label, rho);
    for (ActionId a : req.c_t)
        if (!next_state_label.count(a)) return false;
    for (ActionId a : req.c_f) {
        if (!agent_ap.count(a)) continue;  // never performable, so never violated
        if (next_state_label.count(a)) return false;
    }
    return true;
}

BindingSet feasible_bindings(const EdgeLabel& label,
                             const std::set<ActionId>& next_state_label,
                             const std::set<ActionId>& agent_ap,
                             const BindingUniverse& universe) {
    BindingSet result = 0;
    for (int rho = 0; rho < universe.size(); ++rho)
        if (binding_feasible(rho, label, next_state_label, agent_ap))
            result = binding_set_with(result, rho);
    return result;
}

ProductAutomaton build_product(const AgentModel& a, const BuchiAutomaton& b,
                               const BindingUniverse& universe,
                               std::size_t state_cap) {
    ProductAutomaton p;
    auto intern = [&](int s, int z) {
        auto [it, inserted] = p.index.emplace(std::pair(s, z),
                                              static_cast<int>(p.agent_state.size()));
        if (inserted) {
            if (p.agent_state.size() >= state_cap)
                throw ResourceLimitError("product automaton exceeds " +
                                         std::to_string(state_cap) + " states");
            p.agent_state.push_back(s);
            p.buchi_state.push_back(z);
            p.accepting.push_back(b.is_accepting(z) ? 1 : 0);
        }
        return it->second;
    };

    // Cache the feasible set per (Büchi edge, agent target state): it only
    // depends on the label and the target's label set.
    std::vector<std::vector<BindingSet>> feasible_cache(
        b.edges.size(), std::vector<BindingSet>(static_cast<std::size_t>(a.num_states()),
                                                ~BindingSet{0}));
    auto feasible_at = [&](std::size_t buchi_edge, int s_next) {
        BindingSet& slot = feasible_cache[buchi_edge][static_cast<std::size_t>(s_next)];
        if (slot == ~BindingSet{0})
            slot = feasible_bindings(b.edges[buchi_edge].label,
                                     a.labels[static_cast<std::size_t>(s_next)],
                                     a.ap, universe);
        return slot;
    };

    p.initial = intern(a.initial, b.initial);
    std::queue<int> work;
    work.push(p.initial);
    std::vector<char> expanded;
    while (!work.empty()) {
        const int q = work.front();
        work.pop();
        if (static_cast<std::size_t>(q) < expanded.size() &&
            expanded[static_cast<std::size_t>(q)])
            continue;
        if (static_cast<std::size_t>(q) >= expanded.size())
            expanded.resize(static_cast<std::size_t>(q) + 1, 0);
        expanded[static_cast<std::size_t>(q)] = 1;

        const int s = p.agent_state[static_cast<std::size_t>(q)];
        const int z = p.buchi_state[static_cast<std::size_t>(q)];
        for (int ti : a.out[static_cast<std::size_t>(s)]) {
            const WeightedEdge& move = a.transitions[static_cast<std::size_t>(ti)];
            for (int bi : b.out_edges[static_cast<std::size_t>(z)]) {
                const BuchiEdge& be = b.edges[static_cast<std::size_t>(bi)];
                const BindingSet feasible = feasible_at(static_cast<std::size_t>(bi), move.to);
                if (feasible == 0) continue;
                const int to = intern(move.to, be.to);
                if (static_cast<std::size_t>(to) >= expanded.size() ||
                    !expanded[static_cast<std::size_t>(to)])
                    work.push(to);
                if (!p.edges.empty() && p.edges.back().from == q && p.edges.back().to == to) {
                    p.edges.back().records.push_back({bi, feasible});
                } else {
                    ProductEdge e;
                    e.from = q;
                    e.to = to;
                    e.weight = move.weight;
                    e.records.push_back({bi, feasible});
                    p.edges.push_back(std::move(e));
                }
            }
        }
    }

    std::sort(p.edges.begin(), p.edges.end(), [](const ProductEdge& x, const ProductEdge& y) {
        return std::pair(x.from, x.to) < std::pair(y.from, y.to);
    });
    for (auto& e : p.edges) {
        std::sort(e.records.begin(), e.records.end());
        e.records.erase(std::unique(e.records.begin(), e.records.end()), e.records.end());
    }
    p.out.assign(static_cast<std::size_t>(p.num_states()), {});
    for (std::size_t i = 0; i < p.edges.size(); ++i)
        p.out[static_cast<std::size_t>(p.edges[i].from)].push_back(static_cast<int>(i));
    return p;
}

std::string product_to_dot(const ProductAutomaton& p, const AgentModel& a,
                           const BuchiAutomaton& b, const Vocab& vocab,
                           const std::set<int>* buchi_filter) {
    auto keep = [&](int q) {
        return buchi_filter == nullptr ||
               buchi_filter->count(p.buchi_state[static_cast<std::size_t>(q)]) > 0;
    };
    std::ostringstream os;
    os << "digraph product {\n  rankdir=LR;\n";
    for (int q = 0; q < p.num_states(); ++q) {
        if (!keep(q)) continue;
        const int s = p.agent_state[static_cast<std::size_t>(q)];
        const int z = p.buchi_state[static_cast<std::size_t>(q)];
        os << "  q" << q << " [label=\"(" << a.state_names[static_cast<std::size_t>(s)]
           << ", " << z << ")";
        std::string props;
        for (ActionId id : a.labels[static_cast<std::size_t>(s)]) {
            if (!props.empty()) props += ", ";
            props += vocab.actions.name(id);
        }
        os << "\\n{" << props << "}\"";
        if (p.accepting[static_cast<std::size_t>(q)]) os << ", shape=doublecircle";
        os << "];\n";
    }
    if (keep(p.initial))
        os << "  __init [shape=point]; __init -> q" << p.initial << ";\n";
    for (const auto& e : p.edges) {
        if (!keep(e.from) || !keep(e.to)) continue;
        os << "  q" << e.from << " -> q" << e.to << " [label=\"";
        bool first = true;
        for (const auto& rec : e.records) {
            if (!first) os << "\\n";
            first = false;
            os << label_to_string(b.edges[static_cast<std::size_t>(rec.buchi_edge)].label, vocab)
               << " : " << binding_set_to_string(rec.feasible, vocab.bindings);
        }
        os << "\\nw=" << e.weight << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace ltlpsi
