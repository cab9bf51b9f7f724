#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ins/model.hpp"
#include "ins/player_model.hpp"
#include "ins/policy.hpp"

namespace ins {

// Portable stream: std::mt19937_64 (fully specified by the standard) with
// uniform doubles built from the top 53 bits, so traces reproduce across
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed of run `run_id` in a batch: splitmix64(master + (run_id + 1) * 0x9E3779B97F4A7C15).
std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t run_id);

class DegenerateDistributionError : public std::runtime_error {
public:
    explicit DegenerateDistributionError(const StateId& s)
        : std::runtime_error("all enabled weights at '" + s.name + "' are zero") {}
};

// Draws t from T_s with probability w(s,t) / sum of enabled weights.
TransitionId sample_transition(const PlayerModel& model, const NarrativeSystem& sys, const Overlay& overlay,
                               const StateId& s, Rng& rng);

// Effective weights of every enabled arc, keyed by (from, via, to).
struct ProbabilityMatrix {
    int captured_at = 0;
    std::map<TransitionRule, double> entries;

    std::map<StateId, double> row_sums() const;
    bool operator==(const ProbabilityMatrix&) const = default;
};

ProbabilityMatrix capture_matrix(const NarrativeSystem& sys, const PlayerModel& model, const Overlay& overlay,
                                 int step_index);

enum class Outcome {
    Complete,
    IncompleteProblematic,
    IncompleteMaxSteps,
    IncompleteStuck,
    IncompleteIslands,  // reached a goal without honouring the island sequence
    Aborted,
};

const char* outcome_name(Outcome o);
std::optional<Outcome> outcome_from_name(std::string_view name);

struct TraceStep {
    int index = 0;
    StateId from;
    std::optional<TransitionId> sampled;
    EmDecision decision;
    StateId to;
    std::optional<ProbabilityMatrix> snapshot;

    bool operator==(const TraceStep&) const = default;
};

struct Trace {
    int run_id = 0;
    std::uint64_t seed = 0;
    std::string manager;
    std::string system_hash;
    std::vector<TraceStep> steps;
    Outcome outcome = Outcome::Aborted;
    std::string abort_reason;
    int adaptations = 0;
    int cancellations = 0;

    // s_init followed by each step's resulting state.
    std::vector<StateId> plan(const StateId& initial) const;
    bool operator==(const Trace&) const = default;
};

struct RunOptions {
    int max_steps = 1000;
    bool record_snapshots = true;
};

// One run's mutable state. Drives both the sampled loop and interactive play.
class Session {
public:
    Session(const NarrativeSystem& sys, const PlayerModel& model, Manager manager, std::uint64_t seed,
            bool record_snapshots = true);

    bool finished() const { return outcome_.has_value(); }
    std::optional<Outcome> outcome() const { return outcome_; }
    const StateId& current() const { return ctx_.current; }
    int steps_taken() const { return ctx_.step_index; }
    const Overlay& overlay() const { return overlay_; }
    const std::vector<TraceStep>& steps() const { return steps_; }

    std::vector<Successor> enabled() const;
    TransitionKind kind_of(const TransitionId& t) const;

    // Player draws from the model; the manager resolves.
    void advance_sampled();

    // Interactive step. An action is submitted as the player's proposal;
    // nullopt is inaction, in which case the manager fires an enabled event
    // (drawn by weight) or adapts. Returns false if nothing could happen.
    bool advance_with(const std::optional<TransitionId>& proposal);

    void stop(Outcome o) { outcome_ = o; }

    Trace to_trace(int run_id) const;

private:
    void resolve(const std::optional<TransitionId>& drawn);
    void settle();

    const NarrativeSystem* sys_;
    const PlayerModel* model_;
    Manager manager_;
    std::uint64_t seed_;
    Rng rng_;
    bool record_snapshots_;
    Overlay overlay_;
    RunContext ctx_;
    std::vector<TraceStep> steps_;
    std::optional<Outcome> outcome_;
    std::string abort_reason_;
};

Trace run_once(const NarrativeSystem& sys, const Manager& manager, const PlayerModel& model, std::uint64_t seed,
               const RunOptions& options = {});

// Runs 0..n-1 with seeds run_seed(master_seed, i). Runs execute concurrently;
// the result is ordered by run_id.
std::vector<Trace> run_batch(const NarrativeSystem& sys, const Manager& manager, const PlayerModel& model, int n,
                             std::uint64_t master_seed, const RunOptions& options = {});

}  // namespace ins
