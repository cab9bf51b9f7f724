#include "ins/storyio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "canonical_json.hpp"

namespace ins {

using nlohmann::json;

const char* story_error_name(StoryErrorCode code) {
    switch (code) {
        case StoryErrorCode::Syntax: return "SyntaxError";
        case StoryErrorCode::Schema: return "SchemaError";
        case StoryErrorCode::Duplicate: return "DuplicateError";
        case StoryErrorCode::Reference: return "ReferenceError";
        case StoryErrorCode::Probability: return "ProbabilityError";
        case StoryErrorCode::Role: return "RoleError";
    }
    return "StoryError";
}

namespace {

[[noreturn]] void fail(StoryErrorCode code, const std::string& message) { throw StoryError(code, message); }

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character.
        const std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < offset; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        fail(StoryErrorCode::Syntax, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                         " (byte " + std::to_string(e.byte) + "): " + e.what());
    }
}

const json& field(const json& obj, const char* key, json::value_t type, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(StoryErrorCode::Schema, where + ": missing field '" + key + "'");
    const bool ok = type == json::value_t::number_float ? it->is_number() : it->type() == type;
    if (!ok) fail(StoryErrorCode::Schema, where + ": field '" + key + "' has the wrong type");
    return *it;
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
            fail(StoryErrorCode::Schema, where + ": unknown field '" + it.key() + "'");
        }
    }
}

std::string token(const json& obj, const char* key, const std::string& where) {
    auto s = field(obj, key, json::value_t::string, where).get<std::string>();
    if (s.empty() || std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); })) {
        fail(StoryErrorCode::Schema, where + ": '" + key + "' must be a non-empty token without whitespace");
    }
    return s;
}

const json& array_field(const json& obj, const char* key, const std::string& where) {
    const auto& a = field(obj, key, json::value_t::array, where);
    for (const auto& item : a) {
        if (!item.is_object()) fail(StoryErrorCode::Schema, where + ": entries of '" + key + "' must be objects");
    }
    return a;
}

StoryDocument read_document(const json& root) {
    if (!root.is_object()) fail(StoryErrorCode::Schema, "top level must be an object");
    only_keys(root, {"schema_version", "metadata", "states", "transitions", "rules", "islands"}, "story");

    StoryDocument doc;
    doc.schema_version = field(root, "schema_version", json::value_t::string, "story").get<std::string>();
    if (doc.schema_version != "1") fail(StoryErrorCode::Schema, "unsupported schema_version '" + doc.schema_version + "'");

    if (auto it = root.find("metadata"); it != root.end()) {
        if (!it->is_object()) fail(StoryErrorCode::Schema, "metadata must be an object");
        only_keys(*it, {"title", "description"}, "metadata");
        if (it->contains("title")) doc.title = field(*it, "title", json::value_t::string, "metadata").get<std::string>();
        if (it->contains("description")) {
            doc.description = field(*it, "description", json::value_t::string, "metadata").get<std::string>();
        }
    }

    std::set<std::string> state_names;
    int initial_count = 0;
    for (const auto& s : array_field(root, "states", "story")) {
        only_keys(s, {"name", "roles"}, "state");
        StoryState st;
        st.name = token(s, "name", "state");
        const std::string where = "state '" + st.name + "'";
        if (s.contains("roles")) {
            for (const auto& role : field(s, "roles", json::value_t::array, where)) {
                if (!role.is_string()) fail(StoryErrorCode::Schema, where + ": roles must be strings");
                const auto r = role.get<std::string>();
                if (r == "initial") {
                    st.initial = true;
                } else if (r == "goal") {
                    st.goal = true;
                } else {
                    fail(StoryErrorCode::Role, where + ": unknown role '" + r + "'");
                }
            }
        }
        if (!state_names.insert(st.name).second) fail(StoryErrorCode::Duplicate, "state '" + st.name + "' declared twice");
        if (st.initial) ++initial_count;
        doc.states.push_back(std::move(st));
    }
    if (initial_count != 1) {
        fail(StoryErrorCode::Role, "exactly one state must carry role 'initial', found " + std::to_string(initial_count));
    }

    std::set<std::string> transition_names;
    for (const auto& t : array_field(root, "transitions", "story")) {
        only_keys(t, {"name", "kind"}, "transition");
        StoryTransition tr;
        tr.name = token(t, "name", "transition");
        const auto kind = field(t, "kind", json::value_t::string, "transition '" + tr.name + "'").get<std::string>();
        if (kind == "action") {
            tr.kind = TransitionKind::Action;
        } else if (kind == "event") {
            tr.kind = TransitionKind::Event;
        } else {
            fail(StoryErrorCode::Schema, "transition '" + tr.name + "': kind must be 'action' or 'event'");
        }
        if (!transition_names.insert(tr.name).second) {
            fail(StoryErrorCode::Duplicate, "transition '" + tr.name + "' declared twice");
        }
        doc.transitions.push_back(std::move(tr));
    }

    std::map<std::string, double> row_sums;
    for (const auto& r : array_field(root, "rules", "story")) {
        only_keys(r, {"from", "via", "to", "probability"}, "rule");
        StoryRule rule;
        rule.from = token(r, "from", "rule");
        rule.via = token(r, "via", "rule");
        rule.to = token(r, "to", "rule");
        const std::string where = "rule (" + rule.from + "," + rule.via + "," + rule.to + ")";
        rule.probability = field(r, "probability", json::value_t::number_float, where).get<double>();
        if (!state_names.contains(rule.from)) fail(StoryErrorCode::Reference, where + ": undeclared state '" + rule.from + "'");
        if (!state_names.contains(rule.to)) fail(StoryErrorCode::Reference, where + ": undeclared state '" + rule.to + "'");
        if (!transition_names.contains(rule.via)) {
            fail(StoryErrorCode::Reference, where + ": undeclared transition '" + rule.via + "'");
        }
        if (!(rule.probability >= 0.0 && rule.probability <= 1.0)) {
            fail(StoryErrorCode::Probability, where + ": probability must lie in [0,1]");
        }
        row_sums[rule.from] += rule.probability;
        doc.rules.push_back(std::move(rule));
    }
    for (const auto& [state, sum] : row_sums) {
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "outgoing probabilities of state '" << state << "' sum to " << sum << ", expected 1";
            fail(StoryErrorCode::Probability, msg.str());
        }
    }

    if (auto it = root.find("islands"); it != root.end()) {
        if (!it->is_array()) fail(StoryErrorCode::Schema, "islands must be an array");
        std::set<std::string> island_names;
        for (const auto& i : *it) {
            if (!i.is_object()) fail(StoryErrorCode::Schema, "entries of 'islands' must be objects");
            only_keys(i, {"name", "members"}, "island");
            StoryIsland island;
            island.name = token(i, "name", "island");
            const std::string where = "island '" + island.name + "'";
            for (const auto& m : field(i, "members", json::value_t::array, where)) {
                if (!m.is_string()) fail(StoryErrorCode::Schema, where + ": members must be strings");
                auto name = m.get<std::string>();
                if (!state_names.contains(name)) fail(StoryErrorCode::Reference, where + ": undeclared state '" + name + "'");
                island.members.push_back(std::move(name));
            }
            if (!island_names.insert(island.name).second) {
                fail(StoryErrorCode::Duplicate, "island '" + island.name + "' declared twice");
            }
            doc.islands.push_back(std::move(island));
        }
    }
    return doc;
}

}  // namespace

StoryDocument parse_story(std::string_view text) {
    const json root = parse_json(text);
    try {
        return read_document(root);
    } catch (const json::exception& e) {
        fail(StoryErrorCode::Schema, e.what());
    }
}

StoryDocument load_story_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open story file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_story(buf.str());
}

std::string serialize_story(const StoryDocument& doc) {
    json root = json::object();
    root["schema_version"] = doc.schema_version;
    root["metadata"] = {{"title", doc.title}, {"description", doc.description}};
    root["states"] = json::array();
    for (const auto& s : doc.states) {
        json roles = json::array();
        if (s.initial) roles.push_back("initial");
        if (s.goal) roles.push_back("goal");
        root["states"].push_back({{"name", s.name}, {"roles", roles}});
    }
    root["transitions"] = json::array();
    for (const auto& t : doc.transitions) root["transitions"].push_back({{"name", t.name}, {"kind", kind_name(t.kind)}});
    root["rules"] = json::array();
    for (const auto& r : doc.rules) {
        root["rules"].push_back({{"from", r.from}, {"via", r.via}, {"to", r.to}, {"probability", r.probability}});
    }
    root["islands"] = json::array();
    for (const auto& i : doc.islands) root["islands"].push_back({{"name", i.name}, {"members", i.members}});
    return detail::canonical_dump(root, 2, true) + "\n";
}

NarrativeSystem to_system(const StoryDocument& doc) {
    std::vector<StateId> states;
    std::vector<StateId> goals;
    StateId initial;
    for (const auto& s : doc.states) {
        states.emplace_back(s.name);
        if (s.initial) initial = StateId(s.name);
        if (s.goal) goals.emplace_back(s.name);
    }
    std::vector<Transition> transitions;
    for (const auto& t : doc.transitions) transitions.push_back(Transition{TransitionId(t.name), t.kind});
    std::vector<TransitionRule> rules;
    for (const auto& r : doc.rules) rules.push_back(TransitionRule{StateId(r.from), TransitionId(r.via), StateId(r.to)});
    std::vector<Island> islands;
    for (std::size_t k = 0; k < doc.islands.size(); ++k) {
        Island island;
        island.index = static_cast<int>(k) + 1;
        island.name = doc.islands[k].name;
        for (const auto& m : doc.islands[k].members) island.members.emplace(m);
        islands.push_back(std::move(island));
    }
    return NarrativeSystem(std::move(states), std::move(transitions), std::move(rules), std::move(initial),
                           std::move(goals), std::move(islands));
}

PlayerModel to_player_model(const StoryDocument& doc) {
    PlayerModel model;
    for (const auto& r : doc.rules) model.set({StateId(r.from), TransitionId(r.via)}, r.probability);
    return model;
}

StoryDocument bundled_lrrh() {
    static constexpr std::string_view kText = R"({
  "schema_version": "1",
  "metadata": {
    "title": "Little Red Riding Hood",
    "description": "On her way to deliver a cake, Red meets the wolf, who may eat Red, the grandmother or both. The player is the hunter: killing the wolf before it has eaten anyone ends the story; killing it after it has devoured someone rescues them."
  },
  "states": [
    {"name": "start", "roles": ["initial"]},
    {"name": "wolf_met_red", "roles": []},
    {"name": "wolf_ate_red", "roles": []},
    {"name": "wolf_ate_grandma", "roles": []},
    {"name": "wolf_ate_both", "roles": []},
    {"name": "rescued_cake_delivered", "roles": ["goal"]},
    {"name": "wolf_dead_early", "roles": []}
  ],
  "transitions": [
    {"name": "meet", "kind": "event"},
    {"name": "kill_wolf_early", "kind": "action"},
    {"name": "eat_red", "kind": "event"},
    {"name": "eat_grandma", "kind": "event"},
    {"name": "kill_wolf_early2", "kind": "action"},
    {"name": "eat_grandma2", "kind": "event"},
    {"name": "eat_red2", "kind": "event"},
    {"name": "kill_wolf", "kind": "action"}
  ],
  "rules": [
    {"from": "start", "via": "kill_wolf_early", "to": "wolf_dead_early", "probability": 0.3},
    {"from": "start", "via": "meet", "to": "wolf_met_red", "probability": 0.7},
    {"from": "wolf_met_red", "via": "eat_red", "to": "wolf_ate_red", "probability": 0.4},
    {"from": "wolf_met_red", "via": "eat_grandma", "to": "wolf_ate_grandma", "probability": 0.3},
    {"from": "wolf_met_red", "via": "kill_wolf_early2", "to": "wolf_dead_early", "probability": 0.3},
    {"from": "wolf_ate_red", "via": "eat_grandma2", "to": "wolf_ate_both", "probability": 0.4},
    {"from": "wolf_ate_red", "via": "kill_wolf", "to": "rescued_cake_delivered", "probability": 0.6},
    {"from": "wolf_ate_grandma", "via": "eat_red2", "to": "wolf_ate_both", "probability": 0.5},
    {"from": "wolf_ate_grandma", "via": "kill_wolf", "to": "rescued_cake_delivered", "probability": 0.5},
    {"from": "wolf_ate_both", "via": "kill_wolf", "to": "rescued_cake_delivered", "probability": 1.0}
  ],
  "islands": [
    {"name": "devoured", "members": ["wolf_ate_red", "wolf_ate_grandma", "wolf_ate_both"]}
  ]
})";
    return parse_story(kText);
}

namespace {

json report_json(const SimulationReport& r) {
    json root = json::object();
    root["schema_version"] = "1";
    root["manager"] = r.manager_name;
    root["system_hash"] = r.system_hash;
    root["n_runs"] = r.n_runs;
    root["complete_count"] = r.complete_count();
    root["complete_rate"] = r.complete_rate();
    root["adaptations"] = {{"total", r.total_adaptations},
                           {"mean", r.mean_adaptations()},
                           {"min", r.min_adaptations},
                           {"max", r.max_adaptations}};
    root["cancellations"] = {{"total", r.total_cancellations},
                             {"mean", r.mean_cancellations()},
                             {"min", r.min_cancellations},
                             {"max", r.max_cancellations}};
    json visits = json::object();
    for (const auto& [s, n] : r.visit_counts) visits[s.name] = n;
    root["visit_counts"] = visits;
    json histogram = json::object();
    for (const auto& [o, n] : r.outcome_histogram) histogram[outcome_name(o)] = n;
    root["outcome_histogram"] = histogram;
    return root;
}

}  // namespace

std::string serialize_report(const SimulationReport& report) {
    return detail::canonical_dump(report_json(report)) + "\n";
}

std::string serialize_reports(const std::vector<SimulationReport>& reports) {
    json list = json::array();
    for (const auto& r : reports) list.push_back(report_json(r));
    return detail::canonical_dump(json{{"reports", list}}) + "\n";
}

SimulationReport parse_report(std::string_view text) {
    const json root = parse_json(text);
    try {
        SimulationReport r;
        r.manager_name = root.at("manager").get<std::string>();
        r.system_hash = root.at("system_hash").get<std::string>();
        r.n_runs = root.at("n_runs").get<int>();
        const auto& a = root.at("adaptations");
        r.total_adaptations = a.at("total").get<long long>();
        r.min_adaptations = a.at("min").get<int>();
        r.max_adaptations = a.at("max").get<int>();
        const auto& c = root.at("cancellations");
        r.total_cancellations = c.at("total").get<long long>();
        r.min_cancellations = c.at("min").get<int>();
        r.max_cancellations = c.at("max").get<int>();
        for (const auto& [name, n] : root.at("visit_counts").items()) r.visit_counts[StateId(name)] = n.get<long long>();
        for (const auto& [name, n] : root.at("outcome_histogram").items()) {
            auto o = outcome_from_name(name);
            if (!o) fail(StoryErrorCode::Schema, "unknown outcome '" + name + "'");
            r.outcome_histogram[*o] = n.get<int>();
        }
        return r;
    } catch (const json::exception& e) {
        fail(StoryErrorCode::Schema, e.what());
    }
}

std::string report_table(const std::vector<SimulationReport>& reports, const std::vector<StateId>& visit_states) {
    std::string out = "manager,n_runs,complete_rate,mean_adaptations,mean_cancellations";
    for (const auto& s : visit_states) out += ",visits_" + s.name;
    out += '\n';
    for (const auto& r : reports) {
        out += r.manager_name + ',' + std::to_string(r.n_runs) + ',' + detail::format_decimal(r.complete_rate()) + ',' +
               detail::format_decimal(r.mean_adaptations()) + ',' + detail::format_decimal(r.mean_cancellations());
        for (const auto& s : visit_states) {
            auto it = r.visit_counts.find(s);
            out += ',' + std::to_string(it == r.visit_counts.end() ? 0 : it->second);
        }
        out += '\n';
    }
    return out;
}

std::string serialize_trace(const Trace& trace, const StateId& initial, bool include_snapshots) {
    json root = json::object();
    root["run_id"] = trace.run_id;
    root["seed"] = trace.seed;
    root["manager"] = trace.manager;
    root["system_hash"] = trace.system_hash;
    root["outcome"] = outcome_name(trace.outcome);
    if (!trace.abort_reason.empty()) root["abort_reason"] = trace.abort_reason;
    root["adaptations"] = trace.adaptations;
    root["cancellations"] = trace.cancellations;
    json plan = json::array();
    for (const auto& s : trace.plan(initial)) plan.push_back(s.name);
    root["plan"] = plan;
    json steps = json::array();
    for (const auto& st : trace.steps) {
        json step = {{"index", st.index},
                     {"from", st.from.name},
                     {"sampled", st.sampled ? json(st.sampled->name) : json(nullptr)},
                     {"chosen", st.decision.chosen.name},
                     {"intervention", intervention_name(st.decision.intervention)},
                     {"to", st.to.name}};
        if (include_snapshots && st.snapshot) {
            json entries = json::array();
            for (const auto& [rule, p] : st.snapshot->entries) {
                entries.push_back({{"from", rule.from.name}, {"via", rule.via.name}, {"to", rule.to.name}, {"p", p}});
            }
            step["snapshot"] = entries;
        }
        steps.push_back(step);
    }
    root["steps"] = steps;
    return detail::canonical_dump(root, -1);
}

}  // namespace ins
