#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "ins/model.hpp"
#include "ins/overlay.hpp"
#include "ins/player_model.hpp"

namespace ins {

enum class ManagerKind {
    Vanilla,  // validates whatever is drawn, never edits the system
    Fairy,    // EM n°1: resurrects out of problematic states and bans the offending arc
    Mimesis,  // EM n°2: cancels transitions whose target is problematic
};

class Manager {
public:
    explicit Manager(ManagerKind kind) : kind_(kind) {}

    ManagerKind kind() const { return kind_; }
    std::string_view name() const;

    // Accepts "vanilla", "fairy" and "mimesis".
    static std::optional<Manager> from_name(std::string_view name);

    // True when the manager can add transitions out of `current` even if the
    // effective system offers none there.
    bool can_extend(const NarrativeSystem& sys, const StateId& current) const;

    bool operator==(const Manager&) const = default;

private:
    ManagerKind kind_;
};

Manager vanilla_manager();
Manager fairy_manager();
Manager mimesis_manager();

enum class Intervention { None, Adaptation, Cancellation };

const char* intervention_name(Intervention i);

struct EmDecision {
    TransitionId chosen;
    StateId resulting_state;
    Intervention intervention = Intervention::None;

    bool operator==(const EmDecision&) const = default;
};

struct RunContext {
    StateId current;
    // (state left, transition taken) for every step so far.
    std::vector<Arc> history;
    int step_index = 0;
};

class NoHistoryError : public std::runtime_error {
public:
    explicit NoHistoryError(const StateId& s)
        : std::runtime_error("problematic state '" + s.name + "' has no predecessor in the run history") {}
};

// The policy mu_EM. `drawn` is the transition drawn for this step: an Action
// is the player's proposal, an Event is the manager acting while the player
// is passive, and nullopt means nothing is enabled. The overlay may be
// mutated before the decision is taken; the returned decision is always
// enabled under the mutated overlay. nullopt means the run is stuck.
//
// Throws NoHistoryError when the fairy manager must intervene at a
// problematic state that has no recorded predecessor, and
// std::invalid_argument when `drawn` is not enabled from ctx.current.
std::optional<EmDecision> em_policy(const Manager& manager, const NarrativeSystem& sys,
                                    const PlayerModel& model, Overlay& overlay, const RunContext& ctx,
                                    const std::optional<TransitionId>& drawn);

// Prefix of the fresh events the fairy manager declares, "e_fairy#<k>".
inline constexpr std::string_view kFairyPrefix = "e_fairy#";

}  // namespace ins
