#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace ins {

// Opaque state token. Names are non-empty and contain no whitespace.
struct StateId {
    std::string name;

    StateId() = default;
    explicit StateId(std::string n) : name(std::move(n)) {}

    auto operator<=>(const StateId&) const = default;
    bool operator==(const StateId&) const = default;
};

struct TransitionId {
    std::string name;

    TransitionId() = default;
    explicit TransitionId(std::string n) : name(std::move(n)) {}

    auto operator<=>(const TransitionId&) const = default;
    bool operator==(const TransitionId&) const = default;
};

// Actions belong to the player, events to the experience manager.
enum class TransitionKind { Action, Event };

struct Transition {
    TransitionId id;
    TransitionKind kind = TransitionKind::Action;

    bool operator==(const Transition&) const = default;
};

struct TransitionRule {
    StateId from;
    TransitionId via;
    StateId to;

    auto operator<=>(const TransitionRule&) const = default;
    bool operator==(const TransitionRule&) const = default;
};

// (state, transition) key used for removals and probability weights.
using Arc = std::pair<StateId, TransitionId>;

const char* kind_name(TransitionKind kind);

class UnknownStateError : public std::runtime_error {
public:
    explicit UnknownStateError(const StateId& s)
        : std::runtime_error("unknown state '" + s.name + "'"), state_(s) {}
    const StateId& state() const { return state_; }

private:
    StateId state_;
};

}  // namespace ins
