#include "ins/model.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <deque>

namespace ins {

namespace {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string canonical_text(const std::set<StateId>& states,
                           const std::map<TransitionId, TransitionKind>& transitions,
                           std::vector<TransitionRule> rules, const StateId& initial,
                           const std::set<StateId>& goals, const std::vector<Island>& islands) {
    std::sort(rules.begin(), rules.end());
    std::string out = "S";
    for (const auto& s : states) out += ' ' + s.name;
    out += "\nT";
    for (const auto& [t, k] : transitions) out += ' ' + t.name + ':' + kind_name(k);
    out += "\nR";
    for (const auto& r : rules) out += ' ' + r.from.name + ',' + r.via.name + ',' + r.to.name;
    out += "\nI " + initial.name + "\nG";
    for (const auto& g : goals) out += ' ' + g.name;
    for (const auto& island : islands) {
        out += "\nK" + std::to_string(island.index) + ' ' + island.name + ':';
        for (const auto& m : island.members) out += ' ' + m.name;
    }
    return out;
}

}  // namespace

NarrativeSystem::NarrativeSystem(std::vector<StateId> states, std::vector<Transition> transitions,
                                 std::vector<TransitionRule> rules, StateId initial,
                                 std::vector<StateId> goals, std::vector<Island> islands)
    : states_(states.begin(), states.end()),
      rules_(std::move(rules)),
      initial_(std::move(initial)),
      goals_(goals.begin(), goals.end()),
      islands_(std::move(islands)) {
    for (const auto& t : transitions) transitions_.emplace(t.id, t.kind);
    for (std::size_t i = 0; i < rules_.size(); ++i) outgoing_[rules_[i].from].push_back(i);
    for (auto& [s, idx] : outgoing_) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rules_[a].via < rules_[b].via; });
    }

    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(
                      canonical_text(states_, transitions_, rules_, initial_, goals_, islands_))));
    fingerprint_ = buf;
}

std::optional<TransitionKind> NarrativeSystem::kind(const TransitionId& t) const {
    auto it = transitions_.find(t);
    if (it == transitions_.end()) return std::nullopt;
    return it->second;
}

std::vector<const TransitionRule*> NarrativeSystem::outgoing(const StateId& s) const {
    std::vector<const TransitionRule*> out;
    auto it = outgoing_.find(s);
    if (it == outgoing_.end()) return out;
    out.reserve(it->second.size());
    for (auto i : it->second) out.push_back(&rules_[i]);
    return out;
}

std::optional<StateId> effective_target(const NarrativeSystem& sys, const Overlay& overlay, const StateId& s,
                                        const TransitionId& t) {
    if (const auto* added = overlay.find_added({s, t})) return added->to;
    if (!overlay.removed_rules.empty() && overlay.removed_rules.contains({s, t})) return std::nullopt;
    return sys.target(s, t);
}

bool has_successors(const NarrativeSystem& sys, const Overlay& overlay, const StateId& s) {
    for (const auto& r : overlay.added_rules) {
        if (r.from == s) return true;
    }
    for (const auto* r : sys.outgoing(s)) {
        if (!overlay.removed_rules.contains({r->from, r->via})) return true;
    }
    return false;
}

std::optional<StateId> NarrativeSystem::target(const StateId& s, const TransitionId& t) const {
    auto it = outgoing_.find(s);
    if (it == outgoing_.end()) return std::nullopt;
    for (auto i : it->second) {
        if (rules_[i].via == t) return rules_[i].to;
    }
    return std::nullopt;
}

EndStates classify_end_states(const NarrativeSystem& sys) {
    EndStates out;
    for (const auto& g : sys.goals()) {
        if (!sys.is_sink(g)) throw GoalNotTerminalError(g);
    }
    for (const auto& s : sys.states()) {
        if (!sys.is_sink(s)) continue;
        if (sys.is_goal(s)) {
            out.goal.insert(s);
        } else {
            out.problematic.insert(s);
        }
    }
    return out;
}

std::set<StateId> reachable_states(const NarrativeSystem& sys) {
    std::set<StateId> seen{sys.initial()};
    std::deque<StateId> frontier{sys.initial()};
    while (!frontier.empty()) {
        StateId s = std::move(frontier.front());
        frontier.pop_front();
        for (const auto* r : sys.outgoing(s)) {
            if (seen.insert(r->to).second) frontier.push_back(r->to);
        }
    }
    return seen;
}

const char* violation_name(ViolationCode code) {
    switch (code) {
        case ViolationCode::StateUndeclared: return "state-undeclared";
        case ViolationCode::InitialUndeclared: return "initial-undeclared";
        case ViolationCode::TransitionUndeclared: return "transition-kind-undeclared";
        case ViolationCode::GammaNotFunction: return "gamma-not-function";
        case ViolationCode::Unreachable: return "state-unreachable";
        case ViolationCode::GoalNotTerminal: return "goal-not-terminal";
        case ViolationCode::NoGoal: return "no-goal";
        case ViolationCode::IslandEmpty: return "island-empty";
        case ViolationCode::IslandOverlap: return "island-overlap";
        case ViolationCode::IslandContainsInitial: return "island-contains-initial";
        case ViolationCode::IslandContainsEndState: return "island-contains-end-state";
    }
    return "unknown";
}

const char* violation_prefix(ViolationCode code) {
    switch (code) {
        case ViolationCode::StateUndeclared: return "E-REF";
        case ViolationCode::InitialUndeclared: return "E-INIT";
        case ViolationCode::TransitionUndeclared: return "E-KIND";
        case ViolationCode::GammaNotFunction: return "E-GAMMA";
        case ViolationCode::Unreachable: return "E-REACH";
        case ViolationCode::GoalNotTerminal: return "E-GOAL";
        case ViolationCode::NoGoal: return "E-NOGOAL";
        case ViolationCode::IslandEmpty: return "E-ISLAND-EMPTY";
        case ViolationCode::IslandOverlap: return "E-ISLAND-OVERLAP";
        case ViolationCode::IslandContainsInitial: return "E-ISLAND-INIT";
        case ViolationCode::IslandContainsEndState: return "E-ISLAND-END";
    }
    return "E-UNKNOWN";
}

std::string Violation::describe() const {
    return std::string(violation_name(code)) + "@ " + element;
}

std::vector<Violation> validate(const NarrativeSystem& sys) {
    std::vector<Violation> out;
    auto report = [&](ViolationCode c, std::string element) {
        out.push_back(Violation{c, std::move(element)});
    };

    if (!sys.has_state(sys.initial())) report(ViolationCode::InitialUndeclared, sys.initial().name);

    // Reference and kind checks, then gamma functionality.
    std::set<Arc> seen_arcs;
    std::set<Arc> reported_arcs;
    for (const auto& r : sys.rules()) {
        const std::string rule = "(" + r.from.name + "," + r.via.name + "," + r.to.name + ")";
        if (!sys.has_state(r.from)) report(ViolationCode::StateUndeclared, rule + " from " + r.from.name);
        if (!sys.has_state(r.to)) report(ViolationCode::StateUndeclared, rule + " to " + r.to.name);
        if (!sys.kind(r.via)) report(ViolationCode::TransitionUndeclared, rule + " via " + r.via.name);
        Arc arc{r.from, r.via};
        if (!seen_arcs.insert(arc).second && reported_arcs.insert(arc).second) {
            report(ViolationCode::GammaNotFunction, "(" + r.from.name + "," + r.via.name + ")");
        }
    }

    const auto reachable = reachable_states(sys);
    for (const auto& s : sys.states()) {
        if (!reachable.contains(s)) report(ViolationCode::Unreachable, s.name);
    }

    for (const auto& g : sys.goals()) {
        if (!sys.has_state(g)) {
            report(ViolationCode::StateUndeclared, "goal " + g.name);
        } else if (!sys.is_sink(g)) {
            report(ViolationCode::GoalNotTerminal, g.name);
        }
    }

    if (sys.goals().empty()) report(ViolationCode::NoGoal, "S_goal");

    std::map<StateId, std::string> owner;
    for (const auto& island : sys.islands()) {
        const std::string label = island.name.empty() ? "I" + std::to_string(island.index) : island.name;
        if (island.members.empty()) report(ViolationCode::IslandEmpty, label);
        for (const auto& m : island.members) {
            if (!sys.has_state(m)) {
                report(ViolationCode::StateUndeclared, label + " member " + m.name);
                continue;
            }
            auto [it, fresh] = owner.emplace(m, label);
            if (!fresh) report(ViolationCode::IslandOverlap, m.name + " in " + it->second + "," + label);
            if (m == sys.initial()) report(ViolationCode::IslandContainsInitial, label + ":" + m.name);
            if (sys.is_sink(m)) report(ViolationCode::IslandContainsEndState, label + ":" + m.name);
        }
    }
    return out;
}

std::vector<Successor> successors(const NarrativeSystem& sys, const Overlay& overlay, const StateId& s) {
    if (!sys.has_state(s)) throw UnknownStateError(s);
    std::vector<Successor> out;
    if (overlay.added_rules.empty() && overlay.removed_rules.empty()) {
        for (const auto* r : sys.outgoing(s)) out.push_back(Successor{r->via, r->to});
        return out;
    }
    for (const auto* r : sys.outgoing(s)) {
        Arc arc{r->from, r->via};
        if (overlay.removed_rules.contains(arc) || overlay.find_added(arc)) continue;
        out.push_back(Successor{r->via, r->to});
    }
    for (const auto& r : overlay.added_rules) {
        if (r.from == s) out.push_back(Successor{r.via, r.to});
    }
    std::sort(out.begin(), out.end(),
              [](const Successor& a, const Successor& b) { return a.via < b.via; });
    return out;
}

}  // namespace ins
