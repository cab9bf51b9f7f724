#include "ins/policy.hpp"

#include <algorithm>
#include <stdexcept>

namespace ins {

namespace {

TransitionId fresh_fairy(const NarrativeSystem& sys, const Overlay& overlay) {
    int k = 1;
    for (;;) {
        TransitionId id(std::string(kFairyPrefix) + std::to_string(k));
        if (!overlay.added_transitions.contains(id) && !sys.kind(id)) return id;
        ++k;
    }
}

// Removes (q, t) from the effective system and rescales the weights still
// enabled at q so that q's row sums to one again.
void ban_and_renormalize(const NarrativeSystem& sys, const PlayerModel& model, Overlay& overlay,
                         const Arc& banned) {
    if (!overlay.retract_rule(banned)) overlay.remove_base_rule(banned);
    overlay.probability_edits.erase(banned);

    const auto& q = banned.first;
    const auto remaining = successors(sys, overlay, q);
    if (remaining.empty()) return;

    double mass = 0.0;
    for (const auto& succ : remaining) mass += effective_weight(model, overlay, {q, succ.via});
    for (const auto& succ : remaining) {
        Arc arc{q, succ.via};
        overlay.probability_edits[arc] =
            mass > 0.0 ? effective_weight(model, overlay, arc) / mass
                       : 1.0 / static_cast<double>(remaining.size());
    }
}

EmDecision fairy_intervene(const NarrativeSystem& sys, const PlayerModel& model, Overlay& overlay,
                           const RunContext& ctx) {
    if (ctx.history.empty()) throw NoHistoryError(ctx.current);
    const Arc entered = ctx.history.back();
    const StateId& previous = entered.first;

    // The problematic state keeps a single way out: the newest fairy.
    std::vector<Arc> stale;
    for (const auto& r : overlay.added_rules) {
        if (r.from == ctx.current) stale.push_back({r.from, r.via});
    }
    for (const auto& arc : stale) overlay.retract_rule(arc);

    const TransitionId fairy = fresh_fairy(sys, overlay);
    overlay.declare_event(fairy);
    overlay.add_rule(TransitionRule{ctx.current, fairy, previous});
    overlay.probability_edits[{ctx.current, fairy}] = 1.0;
    ++overlay.adaptation_count;

    ban_and_renormalize(sys, model, overlay, entered);
    ++overlay.adaptation_count;

    return EmDecision{fairy, previous, Intervention::Adaptation};
}

}  // namespace

std::string_view Manager::name() const {
    switch (kind_) {
        case ManagerKind::Vanilla: return "vanilla";
        case ManagerKind::Fairy: return "fairy";
        case ManagerKind::Mimesis: return "mimesis";
    }
    return "unknown";
}

std::optional<Manager> Manager::from_name(std::string_view name) {
    if (name == "vanilla") return vanilla_manager();
    if (name == "fairy") return fairy_manager();
    if (name == "mimesis") return mimesis_manager();
    return std::nullopt;
}

bool Manager::can_extend(const NarrativeSystem& sys, const StateId& current) const {
    return kind_ == ManagerKind::Fairy && sys.is_problematic(current);
}

Manager vanilla_manager() { return Manager(ManagerKind::Vanilla); }
Manager fairy_manager() { return Manager(ManagerKind::Fairy); }
Manager mimesis_manager() { return Manager(ManagerKind::Mimesis); }

const char* intervention_name(Intervention i) {
    switch (i) {
        case Intervention::None: return "none";
        case Intervention::Adaptation: return "adaptation";
        case Intervention::Cancellation: return "cancellation";
    }
    return "none";
}

std::optional<EmDecision> em_policy(const Manager& manager, const NarrativeSystem& sys,
                                    const PlayerModel& model, Overlay& overlay, const RunContext& ctx,
                                    const std::optional<TransitionId>& drawn) {
    if (manager.kind() == ManagerKind::Fairy && sys.is_problematic(ctx.current)) {
        return fairy_intervene(sys, model, overlay, ctx);
    }
    if (!drawn) return std::nullopt;

    auto target = effective_target(sys, overlay, ctx.current, *drawn);
    if (!target) {
        throw std::invalid_argument("transition '" + drawn->name + "' is not enabled from '" +
                                    ctx.current.name + "'");
    }

    if (manager.kind() == ManagerKind::Mimesis && sys.is_problematic(*target)) {
        ++overlay.cancellation_count;
        return EmDecision{*drawn, ctx.current, Intervention::Cancellation};
    }
    return EmDecision{*drawn, *target, Intervention::None};
}

}  // namespace ins
