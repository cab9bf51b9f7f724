// One line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "ins/analyze.hpp"
#include "ins/plan.hpp"
#include "ins/policy.hpp"
#include "ins/simulate.hpp"
#include "ins/storyio.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace ins;
using json = nlohmann::json;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
    std::printf("[%s] AC%d %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* kManagers[] = {"vanilla", "fairy", "mimesis"};

int compare_into(const fs::path& dir) {
    cli::CliConfig c;
    c.story_path = fs::path(INS_STORIES) / "lrrh.story";
    c.n_runs = 100;
    c.master_seed = 42;
    c.output_dir = dir;
    std::ostringstream out, err;
    return cli::cmd_compare(c, out, err);
}

}  // namespace

int main() {
    const auto base = fs::temp_directory_path() / ("ins_acceptance_" + std::to_string(std::random_device{}()));
    const auto dir_a = base / "a";
    const auto dir_b = base / "b";

    const auto doc = load_story_file(fs::path(INS_STORIES) / "lrrh.story");
    const auto sys = to_system(doc);
    const auto model = to_player_model(doc);
    const auto problematic = classify_end_states(sys).problematic;

    // 1: three managers, 100 runs, seed 42.
    auto t0 = std::chrono::steady_clock::now();
    const int code = compare_into(dir_a);
    const double compare_time = seconds_since(t0);
    std::map<std::string, SimulationReport> reports;
    for (const char* m : kManagers) {
        const auto path = dir_a / (std::string(m) + ".report.json");
        if (fs::exists(path)) reports.emplace(m, parse_report(slurp(path)));
    }
    const bool have_all = code == 0 && reports.size() == 3;
    auto rate = [&](const char* m) { return have_all ? reports.at(m).complete_rate() : -1.0; };
    report(1,
           have_all && rate("fairy") == 1.0 && rate("mimesis") == 1.0 && rate("vanilla") < 1.0 && compare_time < 1.0,
           "complete_rate fairy=" + fmt("%.3f", rate("fairy")) + " mimesis=" + fmt("%.3f", rate("mimesis")) +
               " vanilla=" + fmt("%.3f", rate("vanilla")) + " time=" + fmt("%.3fs", compare_time));

    // 2: mimesis never enters a problematic end state.
    long prob_visits = -1;
    if (have_all) {
        prob_visits = 0;
        for (const auto& s : problematic) prob_visits += reports.at("mimesis").visit_counts.at(s);
    }
    report(2, prob_visits == 0 && !problematic.empty(),
           "mimesis visits to S_prob=" + std::to_string(prob_visits));

    // 3: interventions by kind.
    auto mean_a = [&](const char* m) { return have_all ? reports.at(m).mean_adaptations() : -1.0; };
    auto mean_c = [&](const char* m) { return have_all ? reports.at(m).mean_cancellations() : -1.0; };
    report(3,
           have_all && mean_a("fairy") > 0.0 && mean_a("vanilla") == 0.0 && mean_a("mimesis") == 0.0 &&
               mean_c("mimesis") > 0.0,
           "mean_adaptations fairy=" + fmt("%.3f", mean_a("fairy")) + " vanilla=" + fmt("%.3f", mean_a("vanilla")) +
               " mimesis=" + fmt("%.3f", mean_a("mimesis")) + " mean_cancellations mimesis=" +
               fmt("%.3f", mean_c("mimesis")));

    // 4: interventions send the player back through the initial state.
    auto start_visits = [&](const char* m) {
        return have_all ? static_cast<long>(reports.at(m).visit_counts.at(sys.initial())) : -1L;
    };
    report(4, start_visits("fairy") > 100 && start_visits("mimesis") > 100 && start_visits("vanilla") == 100,
           "visits[" + sys.initial().name + "] fairy=" + std::to_string(start_visits("fairy")) +
               " mimesis=" + std::to_string(start_visits("mimesis")) +
               " vanilla=" + std::to_string(start_visits("vanilla")));

    // 5: vanilla Monte Carlo agrees with the absorption solve.
    {
        const int n = 10'000;
        t0 = std::chrono::steady_clock::now();
        bool ok = true;
        std::string what;
        try {
            const auto exact = absorption_probabilities(sys, model);
            const auto mc = aggregate(run_batch(sys, vanilla_manager(), model, n, 42, {.max_steps = 1000, .record_snapshots = false}), sys);
            const double elapsed = seconds_since(t0);
            const double p = exact.probability.at(sys.initial());
            const double bound = 3.0 * std::sqrt(p * (1.0 - p) / n);
            const double diff = std::fabs(mc.complete_rate() - p);
            ok = diff <= bound && exact.residual <= 1e-10 && elapsed < 5.0;
            what = "x[" + sys.initial().name + "]=" + fmt("%.6f", p) + " mc=" + fmt("%.6f", mc.complete_rate()) +
                   " |diff|=" + fmt("%.6f", diff) + " bound=" + fmt("%.6f", bound) +
                   " residual=" + fmt("%.3e", exact.residual) + " time=" + fmt("%.3fs", elapsed);
        } catch (const std::exception& e) {
            ok = false;
            what = e.what();
        }
        report(5, ok, what);
    }

    // 6: every recorded snapshot is row-stochastic.
    {
        long rows = 0;
        double worst = 0.0;
        bool ok = have_all;
        for (const char* m : kManagers) {
            std::ifstream in(dir_a / (std::string(m) + ".traces.jsonl"));
            for (std::string line; std::getline(in, line);) {
                const auto trace = json::parse(line);
                for (const auto& step : trace.at("steps")) {
                    if (!step.contains("snapshot")) {
                        ok = false;
                        continue;
                    }
                    std::map<std::string, double> sums;
                    for (const auto& e : step.at("snapshot")) sums[e.at("from").get<std::string>()] += e.at("p").get<double>();
                    for (const auto& [s, v] : sums) {
                        ++rows;
                        worst = std::max(worst, std::fabs(v - 1.0));
                    }
                }
            }
        }
        ok = ok && rows > 0 && worst <= 1e-9;
        report(6, ok, "snapshot rows=" + std::to_string(rows) + " max|sum-1|=" + fmt("%.3e", worst));
    }

    // 7: plan enumeration and the completeness predicate agree.
    {
        t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(2024);
        int cases = 0, plans = 0, swaps = 0, bad = 0, attempts = 0;
        while (cases < 1000 && attempts < 100'000) {
            ++attempts;
            const auto st = test::random_system(rng, 10, 3);
            if (!validate(st.sys).empty()) continue;
            const auto found = enumerate_complete_plans(st.sys, 1);
            if (found.empty()) continue;
            ++cases;
            const auto simple = test::simple_goal_paths(st.sys);
            std::set<Plan> expected;
            for (const auto& p : simple) {
                if (test::islands_in_order(p, st.sys.islands())) expected.insert(p);
            }
            const auto at_zero = enumerate_complete_plans(st.sys, 0);
            if (std::set<Plan>(at_zero.begin(), at_zero.end()) != expected) ++bad;

            std::set<StateId> non_goals;
            for (const auto& s : st.sys.states()) {
                if (!st.sys.is_goal(s)) non_goals.insert(s);
            }
            for (const auto& plan : found) {
                ++plans;
                if (!is_complete_plan(st.sys, plan).complete) ++bad;

                auto truncated = plan;
                truncated.pop_back();
                auto v = is_complete_plan(st.sys, truncated);
                if (v.complete || v.reason != PlanReason::NotGoal) ++bad;

                auto wrong_end = plan;
                wrong_end.back() = *non_goals.begin();
                v = is_complete_plan(st.sys, wrong_end);
                if (v.complete || v.reason != PlanReason::NotGoal) ++bad;

                const auto order = first_occurrence_order(plan, st.sys.islands());
                if (order.first_occurrences.size() >= 2) {
                    ++swaps;
                    auto swapped = plan;
                    std::swap(swapped[order.first_occurrences[0].second], swapped[order.first_occurrences[1].second]);
                    v = is_complete_plan(st.sys, swapped);
                    if (v.complete || v.reason != PlanReason::IslandOrder) ++bad;
                }
            }
        }
        const double elapsed = seconds_since(t0);
        report(7, cases >= 1000 && swaps > 0 && bad == 0 && elapsed < 10.0,
               "cases=" + std::to_string(cases) + " plans=" + std::to_string(plans) +
                   " island swaps=" + std::to_string(swaps) + " mismatches=" + std::to_string(bad) +
                   " time=" + fmt("%.3fs", elapsed));
    }

    // 8: each invalid story reports exactly its own violation.
    {
        const std::vector<std::pair<const char*, ViolationCode>> cases = {
            {"unreachable.story", ViolationCode::Unreachable},
            {"goal_not_terminal.story", ViolationCode::GoalNotTerminal},
            {"gamma_not_function.story", ViolationCode::GammaNotFunction},
            {"island_end_state.story", ViolationCode::IslandContainsEndState},
            {"island_overlap.story", ViolationCode::IslandOverlap},
            {"no_goal.story", ViolationCode::NoGoal},
        };
        bool ok = validate(sys).empty();
        std::string what = ok ? "lrrh clean" : "lrrh has violations";
        for (const auto& [file, expected] : cases) {
            std::string got;
            try {
                const auto violations = validate(to_system(load_story_file(fs::path(INS_FIXTURES) / file)));
                std::set<ViolationCode> codes;
                for (const auto& v : violations) codes.insert(v.code);
                const bool match = codes == std::set<ViolationCode>{expected};
                ok = ok && match;
                for (const auto& c : codes) got += std::string(got.empty() ? "" : "+") + violation_prefix(c);
            } catch (const std::exception& e) {
                ok = false;
                got = e.what();
            }
            what += std::string(", ") + file + "=" + (got.empty() ? "none" : got);
        }
        report(8, ok, what);
    }

    // 9: repeated invocations write identical bytes.
    {
        const int second = compare_into(dir_b);
        int files = 0, differ = 0;
        if (fs::exists(dir_a)) {
            for (const auto& entry : fs::directory_iterator(dir_a)) {
                ++files;
                const auto other = dir_b / entry.path().filename();
                if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differ;
            }
        }
        report(9, code == 0 && second == 0 && files == 7 && differ == 0,
               "files=" + std::to_string(files) + " differing=" + std::to_string(differ));
    }

    std::error_code ec;
    fs::remove_all(base, ec);
    return failures;
}
