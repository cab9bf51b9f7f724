#include "ins/plan.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ins {

const char* plan_reason_code(PlanReason r) {
    switch (r) {
        case PlanReason::Complete: return "complete";
        case PlanReason::EmptyPlan: return "empty-plan";
        case PlanReason::WrongInitial: return "wrong-initial";
        case PlanReason::NotGoal: return "not-goal";
        case PlanReason::IslandUnvisited: return "island-unvisited";
        case PlanReason::IslandOrder: return "island-order";
    }
    return "unknown";
}

IslandCheck first_occurrence_order(const Plan& plan, const std::vector<Island>& islands) {
    IslandCheck out;
    std::vector<std::optional<std::size_t>> first(islands.size());
    for (std::size_t k = 0; k < islands.size(); ++k) {
        for (std::size_t i = 0; i < plan.size(); ++i) {
            if (islands[k].members.contains(plan[i])) {
                first[k] = i;
                break;
            }
        }
    }
    for (std::size_t k = 0; k < islands.size(); ++k) {
        if (first[k]) {
            out.first_occurrences.emplace_back(islands[k].index, *first[k]);
        } else if (!out.violation) {
            out.violation = PlanReason::IslandUnvisited;
            out.message = "island " + std::to_string(islands[k].index) + " unvisited";
        }
    }
    if (out.violation) return out;
    for (std::size_t k = 1; k < islands.size(); ++k) {
        if (*first[k] <= *first[k - 1]) {
            out.violation = PlanReason::IslandOrder;
            out.message = "island order";
            break;
        }
    }
    return out;
}

PlanVerdict is_complete_plan(const NarrativeSystem& sys, const Plan& plan) {
    for (const auto& s : plan) {
        if (!sys.has_state(s)) throw UnknownStateError(s);
    }
    if (plan.empty()) return {false, PlanReason::EmptyPlan, "empty plan"};
    if (plan.front() != sys.initial()) return {false, PlanReason::WrongInitial, "first state is not s_init"};
    if (!sys.is_goal(plan.back())) return {false, PlanReason::NotGoal, "last state not in S_goal"};
    auto islands = first_occurrence_order(plan, sys.islands());
    if (!islands.ok()) return {false, *islands.violation, islands.message};
    return {true, PlanReason::Complete, "complete"};
}

std::vector<Plan> enumerate_complete_plans(const NarrativeSystem& sys, int max_revisits, std::size_t ceiling) {
    if (max_revisits < 0) throw std::invalid_argument("max_revisits must be non-negative");
    std::set<Plan> found;
    Plan path{sys.initial()};
    std::map<StateId, int> entries{{sys.initial(), 1}};
    const int limit = max_revisits + 1;

    auto dfs = [&](auto&& self, const StateId& s) -> void {
        if (sys.is_goal(s)) {
            if (first_occurrence_order(path, sys.islands()).ok()) {
                found.insert(path);
                if (found.size() > ceiling) throw ExplosionGuardError(ceiling);
            }
            return;
        }
        for (const auto* r : sys.outgoing(s)) {
            int& n = entries[r->to];
            if (n >= limit) continue;
            ++n;
            path.push_back(r->to);
            self(self, r->to);
            path.pop_back();
            --entries[r->to];
        }
    };
    dfs(dfs, sys.initial());
    return {found.begin(), found.end()};
}

}  // namespace ins
