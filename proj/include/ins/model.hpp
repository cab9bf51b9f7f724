#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ins/overlay.hpp"
#include "ins/types.hpp"

namespace ins {

// Intermediate objective: complete plans must visit islands in index order.
struct Island {
    int index = 0;  // 1-based position in the objective sequence
    std::string name;
    std::set<StateId> members;

    bool operator==(const Island&) const = default;
};

// The system tuple (S, T, gamma, s_init, S_goal) plus islands. Construction
// never rejects input so that validate() can report every defect; the
// query helpers assume references resolve.
class NarrativeSystem {
public:
    NarrativeSystem(std::vector<StateId> states, std::vector<Transition> transitions,
                    std::vector<TransitionRule> rules, StateId initial, std::vector<StateId> goals,
                    std::vector<Island> islands = {});

    const std::set<StateId>& states() const { return states_; }
    const std::map<TransitionId, TransitionKind>& transitions() const { return transitions_; }
    const std::vector<TransitionRule>& rules() const { return rules_; }
    const StateId& initial() const { return initial_; }
    const std::set<StateId>& goals() const { return goals_; }
    const std::vector<Island>& islands() const { return islands_; }

    bool has_state(const StateId& s) const { return states_.contains(s); }
    std::optional<TransitionKind> kind(const TransitionId& t) const;

    // Base rules leaving s, ordered by transition name.
    std::vector<const TransitionRule*> outgoing(const StateId& s) const;
    // Base gamma(s, t); first matching rule wins if gamma is not a function.
    std::optional<StateId> target(const StateId& s, const TransitionId& t) const;

    bool is_sink(const StateId& s) const { return !outgoing_.contains(s); }
    bool is_goal(const StateId& s) const { return goals_.contains(s); }
    // S_prob membership: a sink that is not a declared goal.
    bool is_problematic(const StateId& s) const { return has_state(s) && is_sink(s) && !is_goal(s); }

    // Stable 64-bit FNV-1a fingerprint of the canonical tuple, as 16 hex digits.
    const std::string& fingerprint() const { return fingerprint_; }

private:
    std::set<StateId> states_;
    std::map<TransitionId, TransitionKind> transitions_;
    std::vector<TransitionRule> rules_;
    StateId initial_;
    std::set<StateId> goals_;
    std::vector<Island> islands_;
    std::map<StateId, std::vector<std::size_t>> outgoing_;
    std::string fingerprint_;
};

struct EndStates {
    std::set<StateId> goal;
    std::set<StateId> problematic;

    bool operator==(const EndStates&) const = default;
};

class GoalNotTerminalError : public std::runtime_error {
public:
    explicit GoalNotTerminalError(const StateId& s)
        : std::runtime_error("goal state '" + s.name + "' has outgoing rules"), state_(s) {}
    const StateId& state() const { return state_; }

private:
    StateId state_;
};

EndStates classify_end_states(const NarrativeSystem& sys);

std::set<StateId> reachable_states(const NarrativeSystem& sys);

enum class ViolationCode {
    StateUndeclared,       // rule, goal or island references an unknown state
    InitialUndeclared,
    TransitionUndeclared,  // rule uses a transition with no declared kind
    GammaNotFunction,
    Unreachable,
    GoalNotTerminal,
    NoGoal,
    IslandEmpty,
    IslandOverlap,
    IslandContainsInitial,
    IslandContainsEndState,
};

struct Violation {
    ViolationCode code;
    std::string element;

    // "<code-name>@ <element>", e.g. "gamma-not-function@ (s0,a1)".
    std::string describe() const;
    bool operator==(const Violation&) const = default;
};

const char* violation_name(ViolationCode code);
// Short machine-parsable prefix used by the CLI, e.g. "E-REACH".
const char* violation_prefix(ViolationCode code);

std::vector<Violation> validate(const NarrativeSystem& sys);

struct Successor {
    TransitionId via;
    StateId to;

    bool operator==(const Successor&) const = default;
};

// Enabled transitions from s under gamma' = base rules (minus removals) plus
// overlay additions, ordered by transition name.
std::vector<Successor> successors(const NarrativeSystem& sys, const Overlay& overlay, const StateId& s);

// gamma'(s, t), or nullopt when t is not enabled from s.
std::optional<StateId> effective_target(const NarrativeSystem& sys, const Overlay& overlay, const StateId& s,
                                        const TransitionId& t);

bool has_successors(const NarrativeSystem& sys, const Overlay& overlay, const StateId& s);

}  // namespace ins
