#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ins/analyze.hpp"
#include "ins/model.hpp"
#include "ins/policy.hpp"
#include "ins/simulate.hpp"
#include "ins/storyio.hpp"

namespace ins::cli {

namespace {

struct LoadedStory {
    NarrativeSystem system;
    PlayerModel model;
};

std::optional<LoadedStory> load(const std::filesystem::path& path, std::ostream& err) {
    try {
        auto doc = load_story_file(path);
        return LoadedStory{to_system(doc), to_player_model(doc)};
    } catch (const std::exception& e) {
        err << path.string() << ": " << e.what() << "\n";
        return std::nullopt;
    }
}

void print_violations(const std::vector<Violation>& violations, std::ostream& os) {
    for (const auto& v : violations) os << violation_prefix(v.code) << ' ' << v.element << "\n";
}

bool write_file(const std::filesystem::path& path, const std::string& content, std::ostream& err) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        err << "cannot write " << path.string() << "\n";
        return false;
    }
    f << content;
    return static_cast<bool>(f);
}

std::string traces_text(const std::vector<Trace>& traces, const StateId& initial, bool snapshots) {
    std::string out;
    for (const auto& t : traces) out += serialize_trace(t, initial, snapshots) + "\n";
    return out;
}

struct BatchResult {
    SimulationReport report;
    std::vector<Trace> traces;
    int aborted = 0;
};

BatchResult run_manager(const LoadedStory& story, const Manager& manager, const CliConfig& config) {
    RunOptions options;
    options.max_steps = config.max_steps;
    options.record_snapshots = config.snapshots;
    BatchResult r;
    r.traces = run_batch(story.system, manager, story.model, config.n_runs, config.master_seed, options);
    r.report = aggregate(r.traces, story.system);
    r.aborted = r.report.outcome_histogram[Outcome::Aborted];
    return r;
}

bool check_config(const CliConfig& config, std::ostream& err) {
    if (config.n_runs < 1) {
        err << "--runs must be at least 1\n";
        return false;
    }
    if (config.max_steps < 1) {
        err << "--max-steps must be at least 1\n";
        return false;
    }
    return true;
}

// Loads and validates; returns the exit code to use on failure.
std::optional<LoadedStory> load_valid(const std::filesystem::path& path, std::ostream& err, int& code) {
    auto story = load(path, err);
    if (!story) {
        code = kExitInput;
        return std::nullopt;
    }
    auto violations = validate(story->system);
    if (!violations.empty()) {
        print_violations(violations, err);
        code = kExitDomain;
        return std::nullopt;
    }
    return story;
}

const char* final_line(std::optional<Outcome> o) {
    if (!o) return "incomplete (quit)";
    switch (*o) {
        case Outcome::Complete: return "plan complete";
        case Outcome::IncompleteProblematic: return "incomplete (problematic)";
        case Outcome::IncompleteMaxSteps: return "incomplete (max steps)";
        case Outcome::IncompleteStuck: return "incomplete (stuck)";
        case Outcome::IncompleteIslands: return "incomplete (islands out of order)";
        case Outcome::Aborted: return "incomplete (aborted)";
    }
    return "incomplete";
}

}  // namespace

int cmd_validate(const std::filesystem::path& story_path, std::ostream& out, std::ostream& err) {
    auto story = load(story_path, err);
    if (!story) return kExitInput;
    const auto violations = validate(story->system);
    print_violations(violations, out);
    if (!violations.empty()) return kExitDomain;
    out << "OK " << story_path.string() << "\n";
    return kExitOk;
}

int cmd_simulate(const CliConfig& config, std::ostream& out, std::ostream& err) {
    if (!check_config(config, err)) return kExitInput;
    if (config.managers.size() != 1) {
        err << "simulate takes exactly one --manager\n";
        return kExitInput;
    }
    auto manager = Manager::from_name(config.managers.front());
    if (!manager) {
        err << "unknown manager '" << config.managers.front() << "' (expected vanilla, fairy or mimesis)\n";
        return kExitInput;
    }
    int code = kExitOk;
    auto story = load_valid(config.story_path, err, code);
    if (!story) return code;

    auto result = run_manager(*story, *manager, config);
    const std::vector<StateId> all_states(story->system.states().begin(), story->system.states().end());
    const std::string table = report_table({result.report}, all_states);
    const std::string structured = serialize_report(result.report);

    if (config.output_dir) {
        std::filesystem::create_directories(*config.output_dir);
        const auto& dir = *config.output_dir;
        if (!write_file(dir / "report.json", structured, err) || !write_file(dir / "report.csv", table, err) ||
            !write_file(dir / "traces.jsonl", traces_text(result.traces, story->system.initial(), config.snapshots), err)) {
            return kExitInput;
        }
    }
    out << (config.format == ReportFormat::Table ? table : structured);

    if (result.aborted > 0) {
        err << result.aborted << " run(s) aborted\n";
        return kExitDomain;
    }
    return kExitOk;
}

int cmd_compare(const CliConfig& config, std::ostream& out, std::ostream& err) {
    if (!check_config(config, err)) return kExitInput;
    std::vector<std::string> names = config.managers;
    if (names.empty()) names = {"vanilla", "fairy", "mimesis"};
    if (names.size() < 2) {
        err << "compare needs at least two managers\n";
        return kExitInput;
    }
    std::vector<Manager> managers;
    for (const auto& n : names) {
        auto m = Manager::from_name(n);
        if (!m) {
            err << "unknown manager '" << n << "' (expected vanilla, fairy or mimesis)\n";
            return kExitInput;
        }
        managers.push_back(*m);
    }
    int code = kExitOk;
    auto story = load_valid(config.story_path, err, code);
    if (!story) return code;

    const auto& sys = story->system;
    std::vector<StateId> columns{sys.initial()};
    for (const auto& s : classify_end_states(sys).problematic) columns.push_back(s);

    if (config.output_dir) std::filesystem::create_directories(*config.output_dir);
    std::vector<SimulationReport> reports;
    int aborted = 0;
    for (const auto& m : managers) {
        auto result = run_manager(*story, m, config);
        aborted += result.aborted;
        if (config.output_dir) {
            const auto& dir = *config.output_dir;
            const std::string stem(m.name());
            if (!write_file(dir / (stem + ".report.json"), serialize_report(result.report), err) ||
                !write_file(dir / (stem + ".traces.jsonl"), traces_text(result.traces, sys.initial(), config.snapshots),
                            err)) {
                return kExitInput;
            }
        }
        reports.push_back(std::move(result.report));
    }
    const std::string table = report_table(reports, columns);
    if (config.output_dir && !write_file(*config.output_dir / "compare.csv", table, err)) return kExitInput;
    out << (config.format == ReportFormat::Table ? table : serialize_reports(reports));

    if (aborted > 0) {
        err << aborted << " run(s) aborted\n";
        return kExitDomain;
    }
    return kExitOk;
}

int cmd_oracle(const std::filesystem::path& story_path, std::ostream& out, std::ostream& err) {
    auto story = load(story_path, err);
    if (!story) return kExitInput;
    try {
        const auto result = absorption_probabilities(story->system, story->model);
        out << "state,absorption_probability\n";
        char buf[64];
        for (const auto& [s, p] : result.probability) {
            if (story->system.is_sink(s)) continue;
            std::snprintf(buf, sizeof buf, "%.9f", p);
            out << s.name << ',' << buf << "\n";
        }
        std::snprintf(buf, sizeof buf, "%.3e", result.residual);
        out << "residual," << buf << "\n";
        return kExitOk;
    } catch (const SingularSystemError& e) {
        err << "singular system: " << e.what() << "\n";
        return kExitDomain;
    }
}

int cmd_play(const CliConfig& config, std::istream& in, std::ostream& out, std::ostream& err) {
    const std::string name = config.managers.empty() ? "vanilla" : config.managers.front();
    auto manager = Manager::from_name(name);
    if (!manager) {
        err << "unknown manager '" << name << "' (expected vanilla, fairy or mimesis)\n";
        return kExitInput;
    }
    int code = kExitOk;
    auto story = load_valid(config.story_path, err, code);
    if (!story) return code;
    const auto& sys = story->system;

    Session session(sys, story->model, *manager, config.master_seed, config.snapshots);
    bool quit = false;
    while (!session.finished()) {
        const auto options = session.enabled();
        std::vector<TransitionId> actions;
        std::vector<std::string> events;
        for (const auto& succ : options) {
            if (session.kind_of(succ.via) == TransitionKind::Action) {
                actions.push_back(succ.via);
            } else {
                events.push_back(succ.via.name);
            }
        }
        out << "state: " << session.current().name << "\n";
        for (std::size_t i = 0; i < actions.size(); ++i) out << "  [" << i + 1 << "] " << actions[i].name << "\n";
        if (!events.empty()) {
            out << "  (enter to wait:";
            for (const auto& e : events) out << ' ' << e;
            out << ")\n";
        } else {
            out << "  (enter to wait)\n";
        }
        out << "> " << std::flush;

        std::string line;
        if (!std::getline(in, line) || line == "q" || line == "quit") {
            quit = true;
            out << "\n";
            break;
        }
        std::optional<TransitionId> proposal;
        if (!line.empty()) {
            std::size_t index = 0;
            try {
                index = std::stoul(line);
            } catch (const std::exception&) {
                index = 0;
            }
            if (index < 1 || index > actions.size()) {
                out << "invalid choice '" << line << "'\n";
                continue;
            }
            proposal = actions[index - 1];
        }
        const std::size_t before = session.steps().size();
        if (!session.advance_with(proposal)) {
            out << "nothing happens\n";
            continue;
        }
        for (std::size_t i = before; i < session.steps().size(); ++i) {
            const auto& st = session.steps()[i];
            out << "  " << st.decision.chosen.name << ": " << st.from.name << " -> " << st.to.name;
            if (st.decision.intervention != Intervention::None) {
                out << " [" << intervention_name(st.decision.intervention) << "]";
            }
            out << "\n";
        }
    }

    const auto outcome = quit ? std::nullopt : session.outcome();
    if (config.output_dir && !quit) {
        std::filesystem::create_directories(*config.output_dir);
        const Trace trace = session.to_trace(0);
        write_file(*config.output_dir / "play.traces.jsonl", serialize_trace(trace, sys.initial(), config.snapshots) + "\n",
                   err);
    }
    out << final_line(outcome) << "\n";
    return outcome == Outcome::Complete ? kExitOk : kExitDomain;
}

}  // namespace ins::cli
