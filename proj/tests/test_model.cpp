#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace test;

TEST_CASE("classify_end_states") {
    SUBCASE("single sink is the goal") {
        auto st = chain();
        auto ends = classify_end_states(st.sys);
        CHECK(ends.goal == std::set<StateId>{S("goal")});
        CHECK(ends.problematic.empty());
    }
    SUBCASE("undeclared sink is problematic") {
        auto st = build({"s0", "s1", "s2"}, {{"s0", "a", "s1"}, {"s0", "b", "s2"}}, "s0", {"s1"});
        auto ends = classify_end_states(st.sys);
        CHECK(ends.goal == std::set<StateId>{S("s1")});
        CHECK(ends.problematic == std::set<StateId>{S("s2")});
    }
    SUBCASE("bundled story") {
        auto ends = classify_end_states(lrrh().sys);
        CHECK(ends.goal == std::set<StateId>{S("rescued_cake_delivered")});
        CHECK(ends.problematic == std::set<StateId>{S("wolf_dead_early")});
    }
    SUBCASE("goal with an outgoing rule") {
        auto st = build({"s0", "g", "h"}, {{"s0", "a", "g"}, {"g", "b", "h"}}, "s0", {"g", "h"});
        CHECK_THROWS_AS(classify_end_states(st.sys), GoalNotTerminalError);
    }
}

TEST_CASE("reachable_states") {
    CHECK(reachable_states(chain().sys) == std::set<StateId>{S("s0"), S("s1"), S("goal")});

    auto st = build({"s0", "s1", "s2"}, {{"s0", "a", "s1"}}, "s0", {"s1"});
    CHECK(reachable_states(st.sys) == std::set<StateId>{S("s0"), S("s1")});

    auto story = lrrh();
    CHECK(reachable_states(story.sys) == story.sys.states());
    CHECK(story.sys.states().size() == 7);
}

TEST_CASE("validate") {
    CHECK(validate(lrrh().sys).empty());
    CHECK(validate(chain().sys).empty());

    SUBCASE("gamma must be a function") {
        auto st = build({"s0", "s1", "s2"}, {{"s0", "a1", "s1"}, {"s0", "a1", "s2"}}, "s0", {"s1", "s2"});
        auto v = validate(st.sys);
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::GammaNotFunction);
        CHECK(v[0].describe() == "gamma-not-function@ (s0,a1)");
    }
    SUBCASE("unreachable state") {
        auto st = build({"s0", "s1", "s2"}, {{"s0", "a", "s1"}}, "s0", {"s1", "s2"});
        auto v = validate(st.sys);
        REQUIRE(v.size() == 1);
        CHECK(v[0] == Violation{ViolationCode::Unreachable, "s2"});
        CHECK(std::string(violation_prefix(v[0].code)) == "E-REACH");
    }
    SUBCASE("goal with outgoing rule") {
        auto st = build({"s0", "g", "h"}, {{"s0", "a", "g"}, {"g", "b", "h"}}, "s0", {"g", "h"});
        auto v = validate(st.sys);
        REQUIRE(v.size() == 1);
        CHECK(v[0] == Violation{ViolationCode::GoalNotTerminal, "g"});
    }
    SUBCASE("island containing a goal") {
        auto st = build({"s0", "s1", "g"}, {{"s0", "a", "s1"}, {"s1", "b", "g"}}, "s0", {"g"}, {{"g"}});
        auto v = validate(st.sys);
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::IslandContainsEndState);
        CHECK(v[0].describe().starts_with("island-contains-end-state"));
    }
    SUBCASE("island containing the initial state") {
        auto st = build({"s0", "s1", "g"}, {{"s0", "a", "s1"}, {"s1", "b", "g"}}, "s0", {"g"}, {{"s0"}});
        auto v = validate(st.sys);
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::IslandContainsInitial);
    }
    SUBCASE("overlapping islands") {
        auto st = build({"s0", "s1", "g"}, {{"s0", "a", "s1"}, {"s1", "b", "g"}}, "s0", {"g"}, {{"s1"}, {"s1"}});
        auto v = validate(st.sys);
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::IslandOverlap);
    }
    SUBCASE("rule over an undeclared transition") {
        NarrativeSystem sys({S("s0"), S("g")}, {}, {TransitionRule{S("s0"), T("ghost"), S("g")}}, S("s0"), {S("g")});
        auto v = validate(sys);
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::TransitionUndeclared);
    }
    SUBCASE("no goal") {
        auto st = build({"s0", "s1"}, {{"s0", "a", "s1"}}, "s0", {});
        auto v = validate(st.sys);
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::NoGoal);
    }
}

TEST_CASE("successors under an overlay") {
    auto st = build({"s0", "s1", "s2", "p0"}, {{"s0", "a1", "s1"}, {"s0", "e1", "s2", 1.0, TransitionKind::Event}},
                    "s0", {"s1", "s2"});
    Overlay none;
    CHECK(successors(st.sys, none, S("s0")) == std::vector<Successor>{{T("a1"), S("s1")}, {T("e1"), S("s2")}});

    Overlay removal;
    removal.remove_base_rule({S("s0"), T("a1")});
    CHECK(successors(st.sys, removal, S("s0")) == std::vector<Successor>{{T("e1"), S("s2")}});

    Overlay fairy;
    fairy.declare_event(T("e_fairy"));
    fairy.add_rule({S("p0"), T("e_fairy"), S("s0")});
    CHECK(successors(st.sys, fairy, S("p0")) == std::vector<Successor>{{T("e_fairy"), S("s0")}});

    CHECK_THROWS_AS(successors(st.sys, none, S("nowhere")), UnknownStateError);
}

TEST_CASE("property: end-state partition equals the sinks of the rule graph") {
    std::mt19937_64 rng(7);
    for (int c = 0; c < 300; ++c) {
        auto st = random_system(rng);
        auto ends = classify_end_states(st.sys);
        std::set<StateId> sinks;
        for (const auto& s : st.sys.states()) {
            bool has_out = std::any_of(st.sys.rules().begin(), st.sys.rules().end(),
                                       [&](const TransitionRule& r) { return r.from == s; });
            if (!has_out) sinks.insert(s);
        }
        std::set<StateId> both;
        std::set_intersection(ends.goal.begin(), ends.goal.end(), ends.problematic.begin(), ends.problematic.end(),
                              std::inserter(both, both.end()));
        CHECK(both.empty());
        std::set<StateId> all = ends.goal;
        all.insert(ends.problematic.begin(), ends.problematic.end());
        CHECK(all == sinks);
    }
}

TEST_CASE("property: adding a rule never shrinks the reachable set") {
    std::mt19937_64 rng(11);
    for (int c = 0; c < 300; ++c) {
        auto st = random_system(rng);
        const auto before = reachable_states(st.sys);
        std::vector<StateId> states(st.sys.states().begin(), st.sys.states().end());
        auto pick = [&] { return states[std::uniform_int_distribution<std::size_t>(0, states.size() - 1)(rng)]; };
        auto rules = st.sys.rules();
        rules.push_back(TransitionRule{pick(), T("extra"), pick()});
        std::vector<Transition> ts;
        for (const auto& [id, k] : st.sys.transitions()) ts.push_back({id, k});
        ts.push_back({T("extra"), TransitionKind::Action});
        NarrativeSystem bigger(states, ts, rules, st.sys.initial(),
                               {st.sys.goals().begin(), st.sys.goals().end()}, st.sys.islands());
        const auto after = reachable_states(bigger);
        CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
    }
}

TEST_CASE("property: undoing overlay edits in reverse restores successors") {
    std::mt19937_64 rng(13);
    for (int c = 0; c < 200; ++c) {
        auto st = random_system(rng);
        std::vector<StateId> states(st.sys.states().begin(), st.sys.states().end());
        auto pick = [&] { return states[std::uniform_int_distribution<std::size_t>(0, states.size() - 1)(rng)]; };

        Overlay ov;
        std::vector<std::pair<bool, Arc>> applied;  // (was addition, arc)
        for (int k = 0; k < 6; ++k) {
            if (std::uniform_int_distribution<int>(0, 1)(rng) && !st.sys.rules().empty()) {
                const auto& r = st.sys.rules()[std::uniform_int_distribution<std::size_t>(0, st.sys.rules().size() - 1)(rng)];
                Arc arc{r.from, r.via};
                if (ov.removed_rules.contains(arc)) continue;
                ov.remove_base_rule(arc);
                applied.emplace_back(false, arc);
            } else {
                TransitionId id("ev" + std::to_string(k));
                ov.declare_event(id);
                auto from = pick();
                ov.add_rule({from, id, pick()});
                applied.emplace_back(true, Arc{from, id});
            }
        }
        for (auto it = applied.rbegin(); it != applied.rend(); ++it) {
            if (it->first) {
                CHECK(ov.retract_rule(it->second));
            } else {
                CHECK(ov.restore_base_rule(it->second));
            }
        }
        Overlay empty;
        for (const auto& s : states) CHECK(successors(st.sys, ov, s) == successors(st.sys, empty, s));
    }
}

TEST_CASE("fingerprint is stable and sensitive") {
    CHECK(lrrh().sys.fingerprint() == lrrh().sys.fingerprint());
    CHECK(lrrh().sys.fingerprint().size() == 16);
    CHECK(chain().sys.fingerprint() != one_trap().sys.fingerprint());
}
