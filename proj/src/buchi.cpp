#include "ltlpsi/buchi.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "ltlpsi/errors.hpp"

namespace ltlpsi {

// ===========================================================================
// Shared small pieces
// ===========================================================================

bool label_compatible(const EdgeLabel& label, const std::vector<PropPair>& letter) {
    for (const auto& p : label.sigma_t)
        if (!std::binary_search(letter.begin(), letter.end(), p)) return false;
    for (const auto& p : label.sigma_f)
        if (std::binary_search(letter.begin(), letter.end(), p)) return false;
    return true;
}

std::string label_to_string(const EdgeLabel& label, const Vocab& vocab) {
    std::string s;
    for (const auto& p : label.sigma_t) {
        if (!s.empty()) s += " & ";
        s += prop_pair_to_string(p, vocab);
    }
    for (const auto& p : label.sigma_f) {
        if (!s.empty()) s += " & ";
        s += "!" + prop_pair_to_string(p, vocab);
    }
    return s.empty() ? "true" : s;
}

void BuchiAutomaton::finalize() {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    out_edges.assign(static_cast<std::size_t>(num_states), {});
    for (std::size_t i = 0; i < edges.size(); ++i)
        out_edges[static_cast<std::size_t>(edges[i].from)].push_back(static_cast<int>(i));
}

BindingSet binding_fn(const EdgeLabel& label) {
    BindingSet s = 0;
    for (const auto& p : label.sigma_t) s = binding_set_with(s, p.binding);
    for (const auto& p : label.sigma_f) s = binding_set_with(s, p.binding);
    return s;
}

CapabilityReq capability_fn(const EdgeLabel& label, int rho) {
    CapabilityReq r;
    for (const auto& p : label.sigma_t)
        if (p.binding == rho) r.c_t.push_back(p.action);
    for (const auto& p : label.sigma_f)
        if (p.binding == rho) r.c_f.push_back(p.action);
    return r;
}

namespace {

// Iterative Tarjan; returns component id per node, -1 for nodes with
// adjacency restricted away (adj must cover all n nodes).
std::vector<int> strongly_connected(int n, const std::vector<std::vector<int>>& adj) {
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    std::vector<int> low(static_cast<std::size_t>(n), -1), disc(static_cast<std::size_t>(n), -1);
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    int timer = 0, ncomp = 0;

    struct Item {
        int v;
        std::size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (disc[static_cast<std::size_t>(root)] != -1) continue;
        std::vector<Item> call{{root, 0}};
        disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
        stack.push_back(root);
        on_stack[static_cast<std::size_t>(root)] = 1;
        while (!call.empty()) {
            auto& [v, child] = call.back();
            auto sv = static_cast<std::size_t>(v);
            if (child < adj[sv].size()) {
                int w = adj[sv][child++];
                auto sw = static_cast<std::size_t>(w);
                if (disc[sw] == -1) {
                    disc[sw] = low[sw] = timer++;
                    stack.push_back(w);
                    on_stack[sw] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[sw]) {
                    low[sv] = std::min(low[sv], disc[sw]);
                }
            } else {
                if (low[sv] == disc[sv]) {
                    for (;;) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[static_cast<std::size_t>(w)] = 0;
                        comp[static_cast<std::size_t>(w)] = ncomp;
                        if (w == v) break;
                    }
                    ++ncomp;
                }
                call.pop_back();
                if (!call.empty()) {
                    auto su = static_cast<std::size_t>(call.back().v);
                    low[su] = std::min(low[su], low[sv]);
                }
            }
        }
    }
    return comp;
}

// ===========================================================================
// Internal negation-normal-form arena (hash-consed)
// ===========================================================================

enum class LOp : std::uint8_t { True, False, Lit, And, Or, Next, Until, Release };

struct LNode {
    LOp op = LOp::True;
    PropPair lit{};
    bool neg = false;  // Lit only
    int a = -1, b = -1;
};

class Arena {
public:
    Arena() {
        nodes_.push_back({LOp::True, {}, false, -1, -1});
        nodes_.push_back({LOp::False, {}, false, -1, -1});
    }

    int tt() const { return 0; }
    int ff() const { return 1; }

    int lit(PropPair p, bool neg) {
        LNode n{LOp::Lit, p, neg, -1, -1};
        return intern(n);
    }

    int negated(int lit_id) {
        const LNode& n = nodes_[static_cast<std::size_t>(lit_id)];
        return lit(n.lit, !n.neg);
    }

    int mk(LOp op, int a, int b = -1) {
        switch (op) {
            case LOp::And:
                if (a == ff() || b == ff()) return ff();
                if (a == tt()) return b;
                if (b == tt()) return a;
                if (a == b) return a;
                break;
            case LOp::Or:
                if (a == tt() || b == tt()) return tt();
                if (a == ff()) return b;
                if (b == ff()) return a;
                if (a == b) return a;
                break;
            case LOp::Next:
                if (a == tt() || a == ff()) return a;
                break;
            case LOp::Until:
                if (b == tt() || b == ff()) return b;  // a U ff == ff, a U tt == tt
                if (a == ff()) return b;               // ff U b == b
                break;
            case LOp::Release:
                if (b == tt() || b == ff()) return b;
                if (a == tt()) return b;
                break;
            default: break;
        }
        LNode n{op, {}, false, a, b};
        return intern(n);
    }

    const LNode& at(int id) const { return nodes_[static_cast<std::size_t>(id)]; }

private:
    int intern(const LNode& n) {
        auto key = std::make_tuple(static_cast<int>(n.op), n.lit.action, n.lit.binding, n.neg,
                                   n.a, n.b);
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back(n);
        index_.emplace(key, id);
        return id;
    }

    std::vector<LNode> nodes_;
    std::map<std::tuple<int, ActionId, int, bool, int, int>, int> index_;
};

// Converts a binding-atomic formula into the arena, pushing classical
// negation down to literals.
int convert(const Formula& f, bool neg, Arena& ar) {
    switch (f->op) {
        case FOp::True: return neg ? ar.ff() : ar.tt();
        case FOp::False: return neg ? ar.tt() : ar.ff();
        case FOp::Bind: {
            if (f->psi->op != BindingOp::Leaf)
                throw Error("translation requires single-binding annotations");
            const Formula& phi = f->children[0];
            bool inner_neg = phi->op == FOp::Not;
            const Formula& atom = inner_neg ? phi->children[0] : phi;
            if (atom->op != FOp::Atom)
                throw Error("translation requires annotated literals");
            return ar.lit(PropPair{atom->atom, f->psi->binding}, inner_neg != neg);
        }
        case FOp::OuterNot:
            throw Error("translation input still contains task-level negation; convert it to "
                        "literal form first");
        case FOp::Not: return convert(f->children[0], !neg, ar);
        case FOp::And:
        case FOp::Or: {
            bool conj = (f->op == FOp::And) != neg;
            int acc = convert(f->children[0], neg, ar);
            for (std::size_t i = 1; i < f->children.size(); ++i)
                acc = ar.mk(conj ? LOp::And : LOp::Or, acc, convert(f->children[i], neg, ar));
            return acc;
        }
        case FOp::Next: return ar.mk(LOp::Next, convert(f->children[0], neg, ar));
        case FOp::Until: {
            int a = convert(f->children[0], neg, ar);
            int b = convert(f->children[1], neg, ar);
            return ar.mk(neg ? LOp::Release : LOp::Until, a, b);
        }
        case FOp::Release: {
            int a = convert(f->children[0], neg, ar);
            int b = convert(f->children[1], neg, ar);
            return ar.mk(neg ? LOp::Until : LOp::Release, a, b);
        }
        case FOp::Always: {
            int a = convert(f->children[0], neg, ar);
            return neg ? ar.mk(LOp::Until, ar.tt(), a) : ar.mk(LOp::Release, ar.ff(), a);
        }
        case FOp::Eventually: {
            int a = convert(f->children[0], neg, ar);
            return neg ? ar.mk(LOp::Release, ar.ff(), a) : ar.mk(LOp::Until, ar.tt(), a);
        }
        default: throw Error("translation requires a binding-atomic formula");
    }
}

// ===========================================================================
// Tableau expansion (generalized automaton with target-read labels)
// ===========================================================================

constexpr int kInit = 0;  // pseudo-initial state; tableau nodes start at 1

struct Tableau {
    Arena& ar;
    std::size_t cap;

    struct Done {
        std::set<int> old, nxt;
        std::set<int> incoming;
    };

    std::vector<Done> done;                              // index = name - 1
    std::map<std::pair<std::set<int>, std::set<int>>, int> by_content;

    explicit Tableau(Arena& arena, std::size_t state_cap) : ar(arena), cap(state_cap) {}

    struct Pending {
        std::set<int> incoming, neww, old, nxt;
    };

    void expand(Pending cur) {
        if (cur.neww.empty()) {
            auto key = std::make_pair(cur.old, cur.nxt);
            auto it = by_content.find(key);
            if (it != by_content.end()) {
                done[static_cast<std::size_t>(it->second - 1)].incoming.insert(
                    cur.incoming.begin(), cur.incoming.end());
                return;
            }
            if (done.size() >= cap)
                throw ResourceLimitError("automaton translation exceeded the state cap");
            int name = static_cast<int>(done.size()) + 1;
            done.push_back({cur.old, cur.nxt, cur.incoming});
            by_content.emplace(key, name);
            expand({{name}, cur.nxt, {}, {}});
            return;
        }
        int eta = *cur.neww.begin();
        cur.neww.erase(cur.neww.begin());
        const LNode& n = ar.at(eta);
        switch (n.op) {
            case LOp::True: expand(std::move(cur)); return;
            case LOp::False: return;
            case LOp::Lit:
                if (cur.old.count(ar.negated(eta))) return;  // contradiction
                cur.old.insert(eta);
                expand(std::move(cur));
                return;
            case LOp::And: {
                cur.old.insert(eta);
                if (!cur.old.count(n.a)) cur.neww.insert(n.a);
                if (!cur.old.count(n.b)) cur.neww.insert(n.b);
                expand(std::move(cur));
                return;
            }
            case LOp::Or: {
                cur.old.insert(eta);
                Pending left = cur, right = std::move(cur);
                if (!left.old.count(n.a)) left.neww.insert(n.a);
                if (!right.old.count(n.b)) right.neww.insert(n.b);
                expand(std::move(left));
                expand(std::move(right));
                return;
            }
            case LOp::Until: {
                cur.old.insert(eta);
                Pending defer = cur, settle = std::move(cur);
                if (!defer.old.count(n.a)) defer.neww.insert(n.a);
                defer.nxt.insert(eta);
                if (!settle.old.count(n.b)) settle.neww.insert(n.b);
                expand(std::move(defer));
                expand(std::move(settle));
                return;
            }
            case LOp::Release: {
                cur.old.insert(eta);
                Pending defer = cur, settle = std::move(cur);
                if (!defer.old.count(n.b)) defer.neww.insert(n.b);
                defer.nxt.insert(eta);
                if (!settle.old.count(n.a)) settle.neww.insert(n.a);
                if (!settle.old.count(n.b)) settle.neww.insert(n.b);
                expand(std::move(defer));
                expand(std::move(settle));
                return;
            }
            case LOp::Next: {
                cur.old.insert(eta);
                cur.nxt.insert(n.a);
                expand(std::move(cur));
                return;
            }
        }
    }
};

// Collects until-subformulas in the closure of `root`.
void collect_untils(const Arena& ar, int root, std::set<int>& seen, std::vector<int>& untils) {
    if (root < 0 || seen.count(root)) return;
    seen.insert(root);
    const LNode& n = ar.at(root);
    if (n.op == LOp::Until) untils.push_back(root);
    collect_untils(ar, n.a, seen, untils);
    collect_untils(ar, n.b, seen, untils);
}

EdgeLabel label_from_old(const Arena& ar, const std::set<int>& old) {
    EdgeLabel l;
    for (int id : old) {
        const LNode& n = ar.at(id);
        if (n.op != LOp::Lit) continue;
        (n.neg ? l.sigma_f : l.sigma_t).push_back(n.lit);
    }
    std::sort(l.sigma_t.begin(), l.sigma_t.end());
    std::sort(l.sigma_f.begin(), l.sigma_f.end());
    return l;
}

// Keeps states reachable from the initial state that can also reach a cycle
// through an accepting state; renumbers breadth-first for determinism.
BuchiAutomaton trim_and_renumber(const BuchiAutomaton& in) {
    auto n = static_cast<std::size_t>(in.num_states);
    std::vector<std::vector<int>> adj(n), radj(n);
    for (const auto& e : in.edges) {
        adj[static_cast<std::size_t>(e.from)].push_back(e.to);
        radj[static_cast<std::size_t>(e.to)].push_back(e.from);
    }

    std::vector<char> reach(n, 0);
    std::vector<int> bfs{in.initial};
    reach[static_cast<std::size_t>(in.initial)] = 1;
    for (std::size_t i = 0; i < bfs.size(); ++i)
        for (int w : adj[static_cast<std::size_t>(bfs[i])])
            if (!reach[static_cast<std::size_t>(w)]) {
                reach[static_cast<std::size_t>(w)] = 1;
                bfs.push_back(w);
            }

    std::vector<std::vector<int>> sub(n);
    for (const auto& e : in.edges)
        if (reach[static_cast<std::size_t>(e.from)] && reach[static_cast<std::size_t>(e.to)])
            sub[static_cast<std::size_t>(e.from)].push_back(e.to);
    std::vector<int> comp = strongly_connected(static_cast<int>(n), sub);

    std::map<int, char> comp_edge;
    for (const auto& e : in.edges)
        if (reach[static_cast<std::size_t>(e.from)] && reach[static_cast<std::size_t>(e.to)] &&
            comp[static_cast<std::size_t>(e.from)] == comp[static_cast<std::size_t>(e.to)])
            comp_edge[comp[static_cast<std::size_t>(e.from)]] = 1;

    std::vector<char> live(n, 0);
    std::vector<int> seeds;
    for (std::size_t v = 0; v < n; ++v) {
        if (!reach[v] || !in.accepting[v]) continue;
        if (comp_edge.count(comp[v]) && comp_edge.at(comp[v])) {
            live[v] = 1;
            seeds.push_back(static_cast<int>(v));
        }
    }
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (int w : radj[static_cast<std::size_t>(seeds[i])])
            if (reach[static_cast<std::size_t>(w)] && !live[static_cast<std::size_t>(w)]) {
                live[static_cast<std::size_t>(w)] = 1;
                seeds.push_back(w);
            }

    if (!live[static_cast<std::size_t>(in.initial)]) {
        BuchiAutomaton empty;
        empty.num_states = 1;
        empty.initial = 0;
        empty.accepting = {0};
        empty.finalize();
        return empty;
    }

    // Breadth-first renumbering over the kept subgraph.
    std::vector<int> renum(n, -1);
    std::vector<int> order{in.initial};
    renum[static_cast<std::size_t>(in.initial)] = 0;
    int next_id = 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::vector<int> outs;
        for (int w : adj[static_cast<std::size_t>(order[i])])
            if (live[static_cast<std::size_t>(w)]) outs.push_back(w);
        std::sort(outs.begin(), outs.end());
        for (int w : outs)
            if (renum[static_cast<std::size_t>(w)] == -1) {
                renum[static_cast<std::size_t>(w)] = next_id++;
                order.push_back(w);
            }
    }

    BuchiAutomaton out;
    out.num_states = next_id;
    out.initial = 0;
    out.accepting.assign(static_cast<std::size_t>(next_id), 0);
    for (std::size_t v = 0; v < n; ++v)
        if (renum[v] != -1) out.accepting[static_cast<std::size_t>(renum[v])] = in.accepting[v];
    for (const auto& e : in.edges) {
        int a = renum[static_cast<std::size_t>(e.from)];
        int b = renum[static_cast<std::size_t>(e.to)];
        if (a != -1 && b != -1) out.edges.push_back({a, b, e.label});
    }
    out.finalize();
    return out;
}

} // namespace

// ===========================================================================
// translate
// ===========================================================================

BuchiAutomaton translate(const Formula& atomic_f, std::size_t state_cap) {
    Arena ar;
    int root = convert(atomic_f, false, ar);

    Tableau tb(ar, state_cap);
    tb.expand({{kInit}, {root}, {}, {}});

    std::set<int> seen;
    std::vector<int> untils;
    collect_untils(ar, root, seen, untils);

    // Generalized automaton: state 0 = pseudo-initial, 1..N = tableau nodes.
    int gn = static_cast<int>(tb.done.size()) + 1;
    std::vector<BuchiEdge> gedges;
    for (std::size_t d = 0; d < tb.done.size(); ++d) {
        EdgeLabel l = label_from_old(ar, tb.done[d].old);
        for (int src : tb.done[d].incoming)
            gedges.push_back({src, static_cast<int>(d) + 1, l});
    }

    // Acceptance sets: for each until a U b, nodes with the until absent from
    // old or b present in old.
    auto in_set = [&](int state, int until_id) {
        if (state == kInit) return true;
        const auto& dn = tb.done[static_cast<std::size_t>(state - 1)];
        return !dn.old.count(until_id) || dn.old.count(ar.at(until_id).b) > 0;
    };

    BuchiAutomaton nba;
    if (untils.empty()) {
        nba.num_states = gn;
        nba.initial = kInit;
        nba.accepting.assign(static_cast<std::size_t>(gn), 1);
        nba.edges = std::move(gedges);
    } else {
        int k = static_cast<int>(untils.size());
        if (static_cast<std::size_t>(gn) * static_cast<std::size_t>(k) > state_cap)
            throw ResourceLimitError("automaton translation exceeded the state cap");
        auto id = [&](int q, int layer) { return q * k + layer; };
        nba.num_states = gn * k;
        nba.initial = id(kInit, 0);
        nba.accepting.assign(static_cast<std::size_t>(gn) * static_cast<std::size_t>(k), 0);
        for (int q = 0; q < gn; ++q)
            if (in_set(q, untils[0])) nba.accepting[static_cast<std::size_t>(id(q, 0))] = 1;
        for (const auto& e : gedges)
            for (int layer = 0; layer < k; ++layer) {
                int nl = in_set(e.from, untils[static_cast<std::size_t>(layer)])
                             ? (layer + 1) % k
                             : layer;
                nba.edges.push_back({id(e.from, layer), id(e.to, nl), e.label});
            }
    }
    nba.finalize();
    return trim_and_renumber(nba);
}

namespace {

// Quotient by forward bisimulation: states are merged when they agree on the
// accepting flag and on the multiset of (label, successor class) pairs.
// Merging a transient state into the waiting state behind it restores the
// self-loop structure plan execution relies on.
BuchiAutomaton bisim_quotient(const BuchiAutomaton& in) {
    auto n = static_cast<std::size_t>(in.num_states);
    std::vector<int> cls(n);
    for (std::size_t q = 0; q < n; ++q) cls[q] = in.accepting[q] ? 1 : 0;

    std::size_t count = std::set<int>(cls.begin(), cls.end()).size();
    for (;;) {
        std::map<std::pair<int, std::set<std::pair<EdgeLabel, int>>>, int> classify;
        std::vector<int> next(n);
        for (std::size_t q = 0; q < n; ++q) {
            std::set<std::pair<EdgeLabel, int>> sig;
            for (int ei : in.out_edges[q]) {
                const auto& e = in.edges[static_cast<std::size_t>(ei)];
                sig.emplace(e.label, cls[static_cast<std::size_t>(e.to)]);
            }
            auto key = std::make_pair(cls[q], std::move(sig));
            auto [it, inserted] = classify.emplace(key, static_cast<int>(classify.size()));
            next[q] = it->second;
            (void)inserted;
        }
        bool stable = classify.size() == count;
        count = classify.size();
        cls = std::move(next);
        if (stable) break;
    }

    BuchiAutomaton out;
    out.num_states = static_cast<int>(count);
    out.initial = cls[static_cast<std::size_t>(in.initial)];
    out.accepting.assign(count, 0);
    for (std::size_t q = 0; q < n; ++q)
        if (in.accepting[q]) out.accepting[static_cast<std::size_t>(cls[q])] = 1;
    for (const auto& e : in.edges)
        out.edges.push_back({cls[static_cast<std::size_t>(e.from)],
                             cls[static_cast<std::size_t>(e.to)], e.label});
    out.finalize();
    return out;
}

} // namespace

BuchiAutomaton translate_plan(const Formula& atomic_f, std::size_t state_cap) {
    Arena ar;
    int root = convert(atomic_f, false, ar);

    Tableau tb(ar, state_cap);
    tb.expand({{kInit}, {root}, {}, {}});

    std::set<int> seen;
    std::vector<int> untils;
    collect_untils(ar, root, seen, untils);

    int gn = static_cast<int>(tb.done.size()) + 1;
    BuchiAutomaton gba;
    gba.num_states = gn;
    gba.initial = kInit;
    for (std::size_t d = 0; d < tb.done.size(); ++d) {
        EdgeLabel l = label_from_old(ar, tb.done[d].old);
        for (int src : tb.done[d].incoming)
            gba.edges.push_back({src, static_cast<int>(d) + 1, l});
    }

    // A state is accepting when every until in its obligations is already
    // discharged; the pseudo-initial state carries the whole formula, so it
    // only qualifies when there are no untils at all.
    gba.accepting.assign(static_cast<std::size_t>(gn), 1);
    for (int q = 1; q < gn; ++q) {
        const auto& dn = tb.done[static_cast<std::size_t>(q - 1)];
        for (int u : untils)
            if (dn.old.count(u) && !dn.old.count(ar.at(u).b)) {
                gba.accepting[static_cast<std::size_t>(q)] = 0;
                break;
            }
    }
    if (!untils.empty()) gba.accepting[kInit] = 0;

    gba.finalize();
    return trim_and_renumber(bisim_quotient(gba));
}

// ===========================================================================
// normalize_edges
// ===========================================================================

namespace {

struct Clause {
    std::vector<PropPair> pos, neg;

    friend bool operator==(const Clause&, const Clause&) = default;
    friend auto operator<=>(const Clause&, const Clause&) = default;
};

void insert_sorted(std::vector<PropPair>& v, PropPair p) {
    auto it = std::lower_bound(v.begin(), v.end(), p);
    if (it == v.end() || *it != p) v.insert(it, p);
}

// nullopt-like empty signal: contradictory clauses are dropped by returning
// false from combine.
bool combine(const Clause& a, const Clause& b, Clause& out) {
    out = a;
    for (const auto& p : b.pos) insert_sorted(out.pos, p);
    for (const auto& p : b.neg) insert_sorted(out.neg, p);
    for (const auto& p : out.pos)
        if (std::binary_search(out.neg.begin(), out.neg.end(), p)) return false;
    return true;
}

std::vector<Clause> dnf(const Formula& g, bool neg) {
    switch (g->op) {
        case FOp::True: return neg ? std::vector<Clause>{} : std::vector<Clause>{Clause{}};
        case FOp::False: return neg ? std::vector<Clause>{Clause{}} : std::vector<Clause>{};
        case FOp::Not: return dnf(g->children[0], !neg);
        case FOp::OuterNot: return dnf(g->children[0], !neg);
        case FOp::Bind: {
            if (g->psi->op != BindingOp::Leaf)
                throw Error("guards must use single-binding annotations");
            const Formula& phi = g->children[0];
            bool inner = phi->op == FOp::Not;
            const Formula& atom = inner ? phi->children[0] : phi;
            if (atom->op != FOp::Atom) throw Error("guards must use annotated literals");
            Clause c;
            PropPair p{atom->atom, g->psi->binding};
            if (inner != neg)
                c.neg.push_back(p);
            else
                c.pos.push_back(p);
            return {c};
        }
        case FOp::And:
        case FOp::Or: {
            bool conj = (g->op == FOp::And) != neg;
            std::vector<Clause> acc = conj ? std::vector<Clause>{Clause{}} : std::vector<Clause>{};
            for (const auto& ch : g->children) {
                std::vector<Clause> cs = dnf(ch, neg);
                if (conj) {
                    std::vector<Clause> next;
                    for (const auto& a : acc)
                        for (const auto& b : cs) {
                            Clause merged;
                            if (combine(a, b, merged)) next.push_back(std::move(merged));
                        }
                    acc = std::move(next);
                } else {
                    acc.insert(acc.end(), cs.begin(), cs.end());
                }
            }
            std::sort(acc.begin(), acc.end());
            acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
            return acc;
        }
        default: throw Error("guards must be Boolean formulas over annotated literals");
    }
}

} // namespace

BuchiAutomaton normalize_edges(const GuardAutomaton& a) {
    BuchiAutomaton out;
    out.num_states = a.num_states;
    out.initial = a.initial;
    out.accepting = a.accepting;
    for (const auto& e : a.edges)
        for (const auto& c : dnf(e.guard, false))
            out.edges.push_back({e.from, e.to, EdgeLabel{c.pos, c.neg}});
    out.finalize();
    return out;
}

// ===========================================================================
// accepts_lasso
// ===========================================================================

bool accepts_lasso(const BuchiAutomaton& a, const LassoWord& w) {
    if (w.letters.empty() || w.prefix_len >= w.letters.size())
        throw Error("lasso word must have a nonempty cycle");
    auto np = w.letters.size();
    auto nq = static_cast<std::size_t>(a.num_states);
    auto succ = [&](std::size_t i) { return i + 1 < np ? i + 1 : w.prefix_len; };
    auto node = [&](std::size_t i, std::size_t q) { return i * nq + q; };

    std::vector<char> reach(np * nq, 0);
    std::vector<std::size_t> bfs{node(0, static_cast<std::size_t>(a.initial))};
    reach[bfs[0]] = 1;
    for (std::size_t i = 0; i < bfs.size(); ++i) {
        std::size_t pos = bfs[i] / nq, q = bfs[i] % nq;
        for (int ei : a.out_edges[q]) {
            const auto& e = a.edges[static_cast<std::size_t>(ei)];
            if (!label_compatible(e.label, w.letters[pos])) continue;
            std::size_t nid = node(succ(pos), static_cast<std::size_t>(e.to));
            if (!reach[nid]) {
                reach[nid] = 1;
                bfs.push_back(nid);
            }
        }
    }

    std::vector<std::vector<int>> adj(np * nq);
    for (std::size_t pos = 0; pos < np; ++pos)
        for (std::size_t q = 0; q < nq; ++q) {
            if (!reach[node(pos, q)]) continue;
            for (int ei : a.out_edges[q]) {
                const auto& e = a.edges[static_cast<std::size_t>(ei)];
                if (!label_compatible(e.label, w.letters[pos])) continue;
                adj[node(pos, q)].push_back(
                    static_cast<int>(node(succ(pos), static_cast<std::size_t>(e.to))));
            }
        }

    std::vector<int> comp = strongly_connected(static_cast<int>(np * nq), adj);
    std::map<int, char> comp_edge;
    for (std::size_t v = 0; v < np * nq; ++v)
        for (int wv : adj[v])
            if (comp[v] == comp[static_cast<std::size_t>(wv)]) comp_edge[comp[v]] = 1;
    for (std::size_t pos = 0; pos < np; ++pos)
        for (std::size_t q = 0; q < nq; ++q) {
            std::size_t v = node(pos, q);
            if (reach[v] && a.is_accepting(static_cast<int>(q)) && comp_edge.count(comp[v]))
                return true;
        }
    return false;
}

// ===========================================================================
// DOT export
// ===========================================================================

std::string to_dot(const BuchiAutomaton& a, const Vocab& vocab) {
    std::string s = "digraph buchi {\n  rankdir=LR;\n  __init [shape=point];\n";
    for (int q = 0; q < a.num_states; ++q) {
        s += "  z" + std::to_string(q) + " [shape=" +
             (a.is_accepting(q) ? "doublecircle" : "circle") + "];\n";
    }
    s += "  __init -> z" + std::to_string(a.initial) + ";\n";
    for (const auto& e : a.edges) {
        s += "  z" + std::to_string(e.from) + " -> z" + std::to_string(e.to) + " [label=\"" +
             label_to_string(e.label, vocab) + "\"];\n";
    }
    s += "}\n";
    return s;
}

} // namespace ltlpsi
