#include "ins/overlay.hpp"

#include <algorithm>

namespace ins {

const char* kind_name(TransitionKind kind) {
    return kind == TransitionKind::Action ? "action" : "event";
}

void Overlay::declare_event(const TransitionId& id) {
    if (!added_transitions.emplace(id, TransitionKind::Event).second) {
        throw std::invalid_argument("overlay transition '" + id.name + "' already declared");
    }
}

void Overlay::add_rule(const TransitionRule& rule) {
    auto it = std::find_if(added_rules.begin(), added_rules.end(), [&](const TransitionRule& r) {
        return r.from == rule.from && r.via == rule.via;
    });
    if (it != added_rules.end()) {
        *it = rule;
    } else {
        added_rules.push_back(rule);
    }
}

bool Overlay::retract_rule(const Arc& arc) {
    auto it = std::find_if(added_rules.begin(), added_rules.end(), [&](const TransitionRule& r) {
        return r.from == arc.first && r.via == arc.second;
    });
    if (it == added_rules.end()) return false;
    added_rules.erase(it);
    probability_edits.erase(arc);
    return true;
}

const TransitionRule* Overlay::find_added(const Arc& arc) const {
    for (const auto& r : added_rules) {
        if (r.from == arc.first && r.via == arc.second) return &r;
    }
    return nullptr;
}

std::optional<double> Overlay::edit(const Arc& arc) const {
    auto it = probability_edits.find(arc);
    if (it == probability_edits.end()) return std::nullopt;
    return it->second;
}

}  // namespace ins
