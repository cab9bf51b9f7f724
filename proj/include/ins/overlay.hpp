#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ins/types.hpp"

namespace ins {

// Per-run delta an experience manager layers over the immutable base system.
// The effective transition set is T' = T + added_transitions and the
// effective transition function is the base rules minus removed_rules plus
// added_rules. Probability edits override the player model's weights.
struct Overlay {
    std::map<TransitionId, TransitionKind> added_transitions;
    std::vector<TransitionRule> added_rules;
    std::set<Arc> removed_rules;
    std::map<Arc, double> probability_edits;
    int adaptation_count = 0;
    int cancellation_count = 0;

    bool empty() const {
        return added_transitions.empty() && added_rules.empty() && removed_rules.empty() &&
               probability_edits.empty();
    }

    // Declares an EM-side event. Throws if the name is already declared here.
    void declare_event(const TransitionId& id);

    // Adds or replaces the added rule for (rule.from, rule.via).
    void add_rule(const TransitionRule& rule);
    // Drops an added rule and any probability edit on it. Returns false if absent.
    bool retract_rule(const Arc& arc);

    void remove_base_rule(const Arc& arc) { removed_rules.insert(arc); }
    bool restore_base_rule(const Arc& arc) { return removed_rules.erase(arc) > 0; }

    const TransitionRule* find_added(const Arc& arc) const;
    std::optional<double> edit(const Arc& arc) const;

    bool operator==(const Overlay&) const = default;
};

}  // namespace ins
