#pragma once

#include <map>
#include <string>
#include <vector>

#include "ins/model.hpp"
#include "ins/player_model.hpp"
#include "ins/simulate.hpp"

namespace ins {

// Aggregate metrics over a batch. Totals are kept as integers so the report
// round-trips exactly; means and rates are derived.
struct SimulationReport {
    std::string manager_name;
    std::string system_hash;
    int n_runs = 0;
    long long total_adaptations = 0;
    int min_adaptations = 0;
    int max_adaptations = 0;
    long long total_cancellations = 0;
    int min_cancellations = 0;
    int max_cancellations = 0;
    // Occupancies across runs, counting s_init once per run and every stay.
    std::map<StateId, long long> visit_counts;
    std::map<Outcome, int> outcome_histogram;

    int complete_count() const;
    double complete_rate() const;
    double mean_adaptations() const;
    double mean_cancellations() const;

    bool operator==(const SimulationReport&) const = default;
};

class MixedSystemsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Throws MixedSystemsError if any trace was produced on a different system.
SimulationReport aggregate(const std::vector<Trace>& traces, const NarrativeSystem& sys);

// Only the static (vanilla) dynamics form a time-homogeneous chain.
enum class ChainMode { Vanilla };

struct AbsorptionResult {
    // Probability of absorbing in S_goal: solved for transient states, 1 for
    // goals, 0 for problematic sinks.
    std::map<StateId, double> probability;
    // max-norm of (I - Q) x - b over transient states.
    double residual = 0.0;
};

class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Solves (I - Q) x = b by LU with partial pivoting, where Q holds the
// transient-to-transient probabilities and b the one-step mass into S_goal.
// Throws SingularSystemError when some transient state cannot reach S_end
// or the system declares no goal.
AbsorptionResult absorption_probabilities(const NarrativeSystem& sys, const PlayerModel& model,
                                          ChainMode mode = ChainMode::Vanilla);

}  // namespace ins
