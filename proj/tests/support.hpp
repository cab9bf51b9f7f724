#pragma once

// Builders and independent oracles shared by the unit and acceptance suites.
// Nothing here calls into the code paths it is used to check.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ins/model.hpp"
#include "ins/player_model.hpp"
#include "ins/plan.hpp"
#include "ins/storyio.hpp"

namespace test {

using namespace ins;

inline StateId S(const char* n) { return StateId(n); }
inline TransitionId T(const char* n) { return TransitionId(n); }

struct Arcspec {
    std::string from;
    std::string via;
    std::string to;
    double p = 1.0;
    TransitionKind kind = TransitionKind::Action;
};

struct Story {
    NarrativeSystem sys;
    PlayerModel model;
};

inline Story build(const std::vector<std::string>& states, const std::vector<Arcspec>& arcs, const std::string& initial,
                   const std::vector<std::string>& goals, const std::vector<std::vector<std::string>>& islands = {}) {
    std::vector<StateId> st;
    for (const auto& s : states) st.emplace_back(s);
    std::map<std::string, TransitionKind> kinds;
    std::vector<TransitionRule> rules;
    PlayerModel model;
    for (const auto& a : arcs) {
        kinds.emplace(a.via, a.kind);
        rules.push_back(TransitionRule{StateId(a.from), TransitionId(a.via), StateId(a.to)});
        model.set({StateId(a.from), TransitionId(a.via)}, a.p);
    }
    std::vector<Transition> ts;
    for (const auto& [n, k] : kinds) ts.push_back(Transition{TransitionId(n), k});
    std::vector<StateId> gs;
    for (const auto& g : goals) gs.emplace_back(g);
    std::vector<Island> is;
    for (std::size_t k = 0; k < islands.size(); ++k) {
        Island i;
        i.index = static_cast<int>(k) + 1;
        i.name = "I" + std::to_string(k + 1);
        for (const auto& m : islands[k]) i.members.emplace(m);
        is.push_back(std::move(i));
    }
    return Story{NarrativeSystem(std::move(st), std::move(ts), std::move(rules), StateId(initial), std::move(gs),
                                 std::move(is)),
                 std::move(model)};
}

// s0 -a1-> s1 -a2-> goal
inline Story chain() {
    return build({"s0", "s1", "goal"}, {{"s0", "a1", "s1"}, {"s1", "a2", "goal"}}, "s0", {"goal"});
}

// s0 {a_prob 0.3 -> p0, e_meet 0.7 -> s1}; s1 -a_done-> goal
inline Story one_trap() {
    return build({"s0", "s1", "p0", "goal"},
                 {{"s0", "a_prob", "p0", 0.3, TransitionKind::Action},
                  {"s0", "e_meet", "s1", 0.7, TransitionKind::Event},
                  {"s1", "a_done", "goal", 1.0, TransitionKind::Action}},
                 "s0", {"goal"});
}

inline Story lrrh() {
    auto doc = bundled_lrrh();
    return Story{to_system(doc), to_player_model(doc)};
}

// Random system with up to `max_states` states, forward-biased edges, some
// back edges, sinks at the tail, and up to `max_islands` disjoint islands
// drawn from non-initial non-sink states.
inline Story random_system(std::mt19937_64& rng, int max_states = 10, int max_islands = 3) {
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int n = uniform(3, max_states);
    const int sinks = uniform(1, std::max(1, n / 3));
    const int inner = n - sinks;

    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("q" + std::to_string(i));

    std::vector<Arcspec> arcs;
    for (int i = 0; i < inner; ++i) {
        const int out = uniform(1, 3);
        std::set<int> targets;
        for (int k = 0; k < out; ++k) {
            int to = uniform(0, 3) == 0 ? uniform(0, n - 1) : uniform(std::min(i + 1, n - 1), n - 1);
            if (to == i) to = std::min(i + 1, n - 1);
            targets.insert(to);
        }
        for (int to : targets) {
            Arcspec a;
            a.from = names[static_cast<std::size_t>(i)];
            a.to = names[static_cast<std::size_t>(to)];
            a.via = "t" + std::to_string(i) + "_" + std::to_string(to);
            a.p = 1.0 / static_cast<double>(targets.size());
            a.kind = uniform(0, 1) ? TransitionKind::Action : TransitionKind::Event;
            arcs.push_back(a);
        }
    }

    std::vector<std::string> goals;
    for (int i = inner; i < n; ++i) {
        if (uniform(0, 2) != 0) goals.push_back(names[static_cast<std::size_t>(i)]);
    }
    if (goals.empty()) goals.push_back(names.back());

    std::vector<int> pool;
    for (int i = 1; i < inner; ++i) pool.push_back(i);
    std::shuffle(pool.begin(), pool.end(), rng);
    const int m = std::min<int>(uniform(0, max_islands), static_cast<int>(pool.size()));
    std::vector<std::vector<std::string>> islands(static_cast<std::size_t>(m));
    std::size_t next = 0;
    for (int k = 0; k < m; ++k) {
        const int size = uniform(1, 2);
        for (int j = 0; j < size && next < pool.size(); ++j) {
            islands[static_cast<std::size_t>(k)].push_back(names[static_cast<std::size_t>(pool[next++])]);
        }
    }
    islands.erase(std::remove_if(islands.begin(), islands.end(), [](const auto& v) { return v.empty(); }),
                  islands.end());
    return build(names, arcs, "q0", goals, islands);
}

// Island ordering written independently of first_occurrence_order.
inline bool islands_in_order(const Plan& plan, const std::vector<Island>& islands) {
    long previous = -1;
    for (const auto& island : islands) {
        long first = -1;
        for (std::size_t i = 0; i < plan.size(); ++i) {
            if (island.members.count(plan[i])) {
                first = static_cast<long>(i);
                break;
            }
        }
        if (first < 0 || first <= previous) return false;
        previous = first;
    }
    return true;
}

// Breadth-first enumeration of simple paths from s_init to a goal, filtered
// by island order. Independent of enumerate_complete_plans.
inline std::set<Plan> simple_goal_paths(const NarrativeSystem& sys) {
    std::set<Plan> out;
    std::deque<Plan> queue{{sys.initial()}};
    while (!queue.empty()) {
        Plan p = std::move(queue.front());
        queue.pop_front();
        const auto& last = p.back();
        if (sys.goals().count(last)) {
            if (islands_in_order(p, sys.islands())) out.insert(p);
            continue;
        }
        for (const auto& r : sys.rules()) {
            if (r.from != last) continue;
            if (std::find(p.begin(), p.end(), r.to) != p.end()) continue;
            Plan q = p;
            q.push_back(r.to);
            queue.push_back(std::move(q));
        }
    }
    return out;
}

// Absorption into goals by value iteration x <- b + Qx, independent of the
// LU solve. Converges geometrically for absorbing chains.
inline std::map<StateId, double> absorption_by_iteration(const NarrativeSystem& sys, const PlayerModel& model,
                                                         int iterations = 20000) {
    std::map<StateId, double> x;
    for (const auto& s : sys.states()) x[s] = sys.goals().count(s) ? 1.0 : 0.0;
    for (int it = 0; it < iterations; ++it) {
        std::map<StateId, double> next = x;
        for (const auto& s : sys.states()) {
            double total = 0.0;
            double acc = 0.0;
            for (const auto& r : sys.rules()) {
                if (r.from != s) continue;
                const double w = model.weight({r.from, r.via});
                total += w;
                acc += w * x[r.to];
            }
            if (total > 0.0) next[s] = acc / total;
        }
        x = std::move(next);
    }
    return x;
}

}  // namespace test
