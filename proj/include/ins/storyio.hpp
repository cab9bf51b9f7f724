#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ins/analyze.hpp"
#include "ins/model.hpp"
#include "ins/player_model.hpp"
#include "ins/simulate.hpp"

namespace ins {

struct StoryState {
    std::string name;
    bool initial = false;
    bool goal = false;

    bool operator==(const StoryState&) const = default;
};

struct StoryTransition {
    std::string name;
    TransitionKind kind = TransitionKind::Action;

    bool operator==(const StoryTransition&) const = default;
};

struct StoryRule {
    std::string from;
    std::string via;
    std::string to;
    double probability = 0.0;

    bool operator==(const StoryRule&) const = default;
};

struct StoryIsland {
    std::string name;
    std::vector<std::string> members;

    bool operator==(const StoryIsland&) const = default;
};

// A `.story` file: the system tuple together with the player's arc weights.
struct StoryDocument {
    std::string schema_version = "1";
    std::string title;
    std::string description;
    std::vector<StoryState> states;
    std::vector<StoryTransition> transitions;
    std::vector<StoryRule> rules;
    std::vector<StoryIsland> islands;

    bool operator==(const StoryDocument&) const = default;
};

enum class StoryErrorCode { Syntax, Schema, Duplicate, Reference, Probability, Role };

const char* story_error_name(StoryErrorCode code);

class StoryError : public std::runtime_error {
public:
    StoryError(StoryErrorCode code, const std::string& message)
        : std::runtime_error(std::string(story_error_name(code)) + ": " + message), code_(code) {}
    StoryErrorCode code() const { return code_; }

private:
    StoryErrorCode code_;
};

inline constexpr double kRowSumTolerance = 1e-9;

// Throws StoryError; never returns a partially checked document.
StoryDocument parse_story(std::string_view text);
StoryDocument load_story_file(const std::filesystem::path& path);

// Canonical text: key-sorted, two-space indent, arrays in document order.
std::string serialize_story(const StoryDocument& doc);

NarrativeSystem to_system(const StoryDocument& doc);
PlayerModel to_player_model(const StoryDocument& doc);

// Little Red Riding Hood reference story with the shipped default weights.
StoryDocument bundled_lrrh();

std::string serialize_report(const SimulationReport& report);
SimulationReport parse_report(std::string_view text);
// {"reports": [...]} with one canonical report object per entry.
std::string serialize_reports(const std::vector<SimulationReport>& reports);

// `manager,n_runs,complete_rate,mean_adaptations,mean_cancellations` then one
// `visits_<state>` column per entry of `visit_states`.
std::string report_table(const std::vector<SimulationReport>& reports, const std::vector<StateId>& visit_states);

// One single-line record per run.
std::string serialize_trace(const Trace& trace, const StateId& initial, bool include_snapshots);

}  // namespace ins
