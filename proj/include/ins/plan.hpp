#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ins/model.hpp"

namespace ins {

using Plan = std::vector<StateId>;

enum class PlanReason {
    Complete,
    EmptyPlan,
    WrongInitial,     // "first state is not s_init"
    NotGoal,          // "last state not in S_goal"
    IslandUnvisited,  // "island <k> unvisited"
    IslandOrder,      // "island order"
};

const char* plan_reason_code(PlanReason r);

struct PlanVerdict {
    bool complete = false;
    PlanReason reason = PlanReason::EmptyPlan;
    std::string message;
};

struct IslandCheck {
    // (island index, first plan position) for each visited island, in island order.
    std::vector<std::pair<int, std::size_t>> first_occurrences;
    std::optional<PlanReason> violation;
    std::string message;

    bool ok() const { return !violation.has_value(); }
};

// Every island must occur, and first occurrences must be strictly increasing
// in island order. Later revisits of earlier islands are allowed.
IslandCheck first_occurrence_order(const Plan& plan, const std::vector<Island>& islands);

// Clauses are checked in order: initial state, goal at the end, islands.
// Throws UnknownStateError for states the system does not declare.
PlanVerdict is_complete_plan(const NarrativeSystem& sys, const Plan& plan);

class ExplosionGuardError : public std::runtime_error {
public:
    explicit ExplosionGuardError(std::size_t ceiling)
        : std::runtime_error("plan enumeration exceeded " + std::to_string(ceiling) + " plans") {}
};

// All distinct state sequences from s_init to a goal over the base rules in
// which no state is entered more than 1 + max_revisits times, filtered by
// island order, sorted lexicographically by state name.
std::vector<Plan> enumerate_complete_plans(const NarrativeSystem& sys, int max_revisits,
                                           std::size_t ceiling = 1'000'000);

}  // namespace ins
