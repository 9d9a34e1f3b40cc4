#include "ltlpsi/vocab.hpp"

namespace ltlpsi {

std::vector<int> binding_set_indices(BindingSet s) {
    std::vector<int> out;
    for (int i = 0; i < 32; ++i)
        if ((s >> i) & 1u) out.push_back(i);
    return out;
}

std::string binding_set_to_string(BindingSet s, const BindingUniverse& u) {
    std::string out = "{";
    bool first = true;
    for (int i : binding_set_indices(s)) {
        if (!first) out += ", ";
        first = false;
        out += std::to_string(u.external_id(i));
    }
    out += "}";
    return out;
}

std::string prop_pair_to_string(const PropPair& p, const Vocab& v) {
    return v.actions.name(p.action) + "^{" + std::to_string(v.bindings.external_id(p.binding)) + "}";
}

} // namespace ltlpsi
