#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ltlpsi {

// ---------------------------------------------------------------------------
// Action propositions and binding propositions.
//
// Action propositions ("pickup", "region_A", ...) are interned into dense ids.
// Binding propositions are positive integers declared by the scenario; they
// are mapped to dense indices 0..m-1 so that sets of bindings can be carried
// as bit masks.
// ---------------------------------------------------------------------------

using ActionId = std::uint32_t;

// A set of binding *indices* (not external ids) as a bit mask. Universes are
// capped at 32 bindings, far above anything the tooling exercises.
using BindingSet = std::uint32_t;

class ActionTable {
public:
    ActionTable() = default;
    explicit ActionTable(const std::vector<std::string>& names) {
        for (const auto& n : names) intern(n);
    }

    ActionId intern(const std::string& name) {
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        ActionId id = static_cast<ActionId>(names_.size());
        names_.push_back(name);
        index_.emplace(name, id);
        return id;
    }

    std::optional<ActionId> lookup(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name(ActionId id) const { return names_.at(id); }
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::map<std::string, ActionId> index_;
};

class BindingUniverse {
public:
    BindingUniverse() = default;
    explicit BindingUniverse(std::vector<int> external_ids) : ids_(std::move(external_ids)) {
        for (std::size_t i = 0; i < ids_.size(); ++i) index_[ids_[i]] = static_cast<int>(i);
    }

    // Number of binding propositions (m).
    int size() const { return static_cast<int>(ids_.size()); }

    std::optional<int> index_of(int external_id) const {
        auto it = index_.find(external_id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    int external_id(int index) const { return ids_.at(static_cast<std::size_t>(index)); }
    const std::vector<int>& external_ids() const { return ids_; }

    // Mask holding every binding in the universe.
    BindingSet full_mask() const {
        return size() == 32 ? ~BindingSet{0} : ((BindingSet{1} << size()) - 1);
    }

private:
    std::vector<int> ids_;
    std::map<int, int> index_;
};

// Bundles the two symbol tables; every parsed formula refers to one of these.
struct Vocab {
    ActionTable actions;
    BindingUniverse bindings;
};

// ---------------------------------------------------------------------------
// BindingSet helpers.
// ---------------------------------------------------------------------------

inline bool binding_set_contains(BindingSet s, int index) { return (s >> index) & 1u; }
inline BindingSet binding_set_with(BindingSet s, int index) { return s | (BindingSet{1} << index); }
inline int binding_set_size(BindingSet s) { return __builtin_popcount(s); }
inline bool binding_set_subset(BindingSet a, BindingSet b) { return (a & ~b) == 0; }

// Sorted list of indices contained in the mask.
std::vector<int> binding_set_indices(BindingSet s);

// "{1, 3}"-style rendering using external ids.
std::string binding_set_to_string(BindingSet s, const BindingUniverse& u);

// ---------------------------------------------------------------------------
// Annotated propositions pi^rho: the alphabet of the translated automaton.
// `binding` is an index into the BindingUniverse.
// ---------------------------------------------------------------------------

struct PropPair {
    ActionId action = 0;
    int binding = 0;

    friend bool operator==(const PropPair&, const PropPair&) = default;
    friend auto operator<=>(const PropPair&, const PropPair&) = default;
};

// "pickup^{1}" rendering with the external binding id.
std::string prop_pair_to_string(const PropPair& p, const Vocab& v);

} // namespace ltlpsi
