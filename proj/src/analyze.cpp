#include "ins/analyze.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace ins {

int SimulationReport::complete_count() const {
    auto it = outcome_histogram.find(Outcome::Complete);
    return it == outcome_histogram.end() ? 0 : it->second;
}

double SimulationReport::complete_rate() const {
    return n_runs == 0 ? 0.0 : static_cast<double>(complete_count()) / n_runs;
}

double SimulationReport::mean_adaptations() const {
    return n_runs == 0 ? 0.0 : static_cast<double>(total_adaptations) / n_runs;
}

double SimulationReport::mean_cancellations() const {
    return n_runs == 0 ? 0.0 : static_cast<double>(total_cancellations) / n_runs;
}

SimulationReport aggregate(const std::vector<Trace>& traces, const NarrativeSystem& sys) {
    if (traces.empty()) throw std::invalid_argument("aggregate needs at least one trace");

    SimulationReport r;
    r.manager_name = traces.front().manager;
    r.system_hash = sys.fingerprint();
    r.n_runs = static_cast<int>(traces.size());
    r.min_adaptations = traces.front().adaptations;
    r.min_cancellations = traces.front().cancellations;
    for (const auto& s : sys.states()) r.visit_counts[s] = 0;
    for (auto o : {Outcome::Complete, Outcome::IncompleteProblematic, Outcome::IncompleteMaxSteps,
                   Outcome::IncompleteStuck, Outcome::IncompleteIslands, Outcome::Aborted}) {
        r.outcome_histogram[o] = 0;
    }

    for (const auto& t : traces) {
        if (t.system_hash != r.system_hash) {
            throw MixedSystemsError("trace " + std::to_string(t.run_id) + " was produced on system " +
                                    t.system_hash + ", expected " + r.system_hash);
        }
        r.total_adaptations += t.adaptations;
        r.min_adaptations = std::min(r.min_adaptations, t.adaptations);
        r.max_adaptations = std::max(r.max_adaptations, t.adaptations);
        r.total_cancellations += t.cancellations;
        r.min_cancellations = std::min(r.min_cancellations, t.cancellations);
        r.max_cancellations = std::max(r.max_cancellations, t.cancellations);
        ++r.visit_counts[sys.initial()];
        for (const auto& step : t.steps) ++r.visit_counts[step.to];
        ++r.outcome_histogram[t.outcome];
    }
    return r;
}

AbsorptionResult absorption_probabilities(const NarrativeSystem& sys, const PlayerModel& model, ChainMode) {
    if (sys.goals().empty()) throw SingularSystemError("no goal states declared");

    std::vector<StateId> transient;
    std::map<StateId, Eigen::Index> slot;
    for (const auto& s : sys.states()) {
        if (sys.is_sink(s)) continue;
        slot[s] = static_cast<Eigen::Index>(transient.size());
        transient.push_back(s);
    }

    AbsorptionResult out;
    for (const auto& s : sys.states()) {
        if (sys.is_sink(s)) out.probability[s] = sys.is_goal(s) ? 1.0 : 0.0;
    }
    if (transient.empty()) return out;

    const auto n = static_cast<Eigen::Index>(transient.size());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    // Reverse adjacency over positive-weight arcs, for the absorption check.
    std::map<StateId, std::vector<StateId>> preds;

    for (const auto& s : transient) {
        const auto row = slot[s];
        const auto out_rules = sys.outgoing(s);
        double total = 0.0;
        for (const auto* r : out_rules) total += model.weight({s, r->via});
        if (!(total > 0.0)) {
            throw SingularSystemError("state '" + s.name + "' has no positive outgoing weight");
        }
        for (const auto* r : out_rules) {
            const double p = model.weight({s, r->via}) / total;
            if (p <= 0.0) continue;
            preds[r->to].push_back(s);
            if (auto it = slot.find(r->to); it != slot.end()) {
                q(row, it->second) += p;
            } else if (sys.is_goal(r->to)) {
                b(row) += p;
            }
        }
    }

    std::set<StateId> absorbing_reach;
    std::deque<StateId> frontier;
    for (const auto& s : sys.states()) {
        if (sys.is_sink(s)) {
            absorbing_reach.insert(s);
            frontier.push_back(s);
        }
    }
    while (!frontier.empty()) {
        auto s = frontier.front();
        frontier.pop_front();
        for (const auto& p : preds[s]) {
            if (absorbing_reach.insert(p).second) frontier.push_back(p);
        }
    }
    for (const auto& s : transient) {
        if (!absorbing_reach.contains(s)) {
            throw SingularSystemError("state '" + s.name + "' cannot reach an end state");
        }
    }

    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - q;
    const Eigen::VectorXd x = a.partialPivLu().solve(b);
    out.residual = (a * x - b).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(out.residual)) throw SingularSystemError("linear solve produced non-finite values");
    for (Eigen::Index i = 0; i < n; ++i) out.probability[transient[static_cast<std::size_t>(i)]] = x(i);
    return out;
}

}  // namespace ins
