#include "ins/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "ins/plan.hpp"

namespace ins {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t run_id) {
    return splitmix64(master_seed + (run_id + 1) * 0x9E3779B97F4A7C15ULL);
}

namespace {

TransitionId draw(const std::vector<std::pair<TransitionId, double>>& weighted, const StateId& s, Rng& rng) {
    double total = 0.0;
    for (const auto& [t, w] : weighted) total += w;
    if (!(total > 0.0)) throw DegenerateDistributionError(s);
    const double u = rng.next_unit() * total;
    double cumulative = 0.0;
    const TransitionId* last_positive = nullptr;
    for (const auto& [t, w] : weighted) {
        if (w <= 0.0) continue;
        cumulative += w;
        last_positive = &t;
        if (u < cumulative) return t;
    }
    return *last_positive;
}

}  // namespace

TransitionId sample_transition(const PlayerModel& model, const NarrativeSystem& sys, const Overlay& overlay,
                               const StateId& s, Rng& rng) {
    const auto enabled = successors(sys, overlay, s);
    if (enabled.empty()) throw std::invalid_argument("no transition enabled from '" + s.name + "'");
    std::vector<std::pair<TransitionId, double>> weighted;
    weighted.reserve(enabled.size());
    for (const auto& succ : enabled) weighted.emplace_back(succ.via, effective_weight(model, overlay, {s, succ.via}));
    return draw(weighted, s, rng);
}

std::map<StateId, double> ProbabilityMatrix::row_sums() const {
    std::map<StateId, double> out;
    for (const auto& [rule, p] : entries) out[rule.from] += p;
    return out;
}

ProbabilityMatrix capture_matrix(const NarrativeSystem& sys, const PlayerModel& model, const Overlay& overlay,
                                 int step_index) {
    ProbabilityMatrix m;
    m.captured_at = step_index;
    for (const auto& s : sys.states()) {
        for (const auto& succ : successors(sys, overlay, s)) {
            m.entries[TransitionRule{s, succ.via, succ.to}] = effective_weight(model, overlay, {s, succ.via});
        }
    }
    return m;
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Complete: return "complete";
        case Outcome::IncompleteProblematic: return "incomplete_problematic";
        case Outcome::IncompleteMaxSteps: return "incomplete_max_steps";
        case Outcome::IncompleteStuck: return "incomplete_stuck";
        case Outcome::IncompleteIslands: return "incomplete_islands";
        case Outcome::Aborted: return "aborted";
    }
    return "aborted";
}

std::optional<Outcome> outcome_from_name(std::string_view name) {
    for (auto o : {Outcome::Complete, Outcome::IncompleteProblematic, Outcome::IncompleteMaxSteps,
                   Outcome::IncompleteStuck, Outcome::IncompleteIslands, Outcome::Aborted}) {
        if (name == outcome_name(o)) return o;
    }
    return std::nullopt;
}

std::vector<StateId> Trace::plan(const StateId& initial) const {
    std::vector<StateId> out;
    out.reserve(steps.size() + 1);
    out.push_back(initial);
    for (const auto& step : steps) out.push_back(step.to);
    return out;
}

Session::Session(const NarrativeSystem& sys, const PlayerModel& model, Manager manager, std::uint64_t seed,
                 bool record_snapshots)
    : sys_(&sys),
      model_(&model),
      manager_(manager),
      seed_(seed),
      rng_(seed),
      record_snapshots_(record_snapshots) {
    ctx_.current = sys.initial();
    settle();
}

std::vector<Successor> Session::enabled() const { return successors(*sys_, overlay_, ctx_.current); }

TransitionKind Session::kind_of(const TransitionId& t) const {
    if (auto k = sys_->kind(t)) return *k;
    if (auto it = overlay_.added_transitions.find(t); it != overlay_.added_transitions.end()) return it->second;
    throw std::invalid_argument("undeclared transition '" + t.name + "'");
}

void Session::settle() {
    const auto& s = ctx_.current;
    if (sys_->is_goal(s)) {
        Plan plan{sys_->initial()};
        for (const auto& step : steps_) plan.push_back(step.to);
        outcome_ = is_complete_plan(*sys_, plan).complete ? Outcome::Complete : Outcome::IncompleteIslands;
        return;
    }
    if (!has_successors(*sys_, overlay_, s) && !manager_.can_extend(*sys_, s)) {
        outcome_ = sys_->is_problematic(s) ? Outcome::IncompleteProblematic : Outcome::IncompleteStuck;
    }
}

void Session::resolve(const std::optional<TransitionId>& drawn) {
    std::optional<EmDecision> decision;
    try {
        decision = em_policy(manager_, *sys_, *model_, overlay_, ctx_, drawn);
    } catch (const NoHistoryError& e) {
        outcome_ = Outcome::Aborted;
        abort_reason_ = e.what();
        return;
    }
    if (!decision) {
        outcome_ = sys_->is_problematic(ctx_.current) ? Outcome::IncompleteProblematic : Outcome::IncompleteStuck;
        return;
    }

    TraceStep step;
    step.index = ctx_.step_index;
    step.from = ctx_.current;
    step.sampled = drawn;
    step.decision = *decision;
    step.to = decision->resulting_state;
    if (record_snapshots_) step.snapshot = capture_matrix(*sys_, *model_, overlay_, ctx_.step_index);
    steps_.push_back(std::move(step));

    ctx_.history.emplace_back(ctx_.current, decision->chosen);
    ctx_.current = decision->resulting_state;
    ++ctx_.step_index;
    settle();
}

void Session::advance_sampled() {
    if (finished()) return;
    std::optional<TransitionId> drawn;
    // Problematic states belong to the manager: the player draws nothing there.
    if (!sys_->is_problematic(ctx_.current) && has_successors(*sys_, overlay_, ctx_.current)) {
        drawn = sample_transition(*model_, *sys_, overlay_, ctx_.current, rng_);
    }
    resolve(drawn);
}

bool Session::advance_with(const std::optional<TransitionId>& proposal) {
    if (finished()) return false;
    const auto options = enabled();
    if (proposal) {
        auto it = std::find_if(options.begin(), options.end(), [&](const Successor& s) { return s.via == *proposal; });
        if (it == options.end() || kind_of(*proposal) != TransitionKind::Action) return false;
        resolve(proposal);
        return true;
    }
    if (manager_.can_extend(*sys_, ctx_.current)) {
        resolve(std::nullopt);
        return true;
    }
    std::vector<std::pair<TransitionId, double>> events;
    for (const auto& succ : options) {
        if (kind_of(succ.via) == TransitionKind::Event) {
            events.emplace_back(succ.via, effective_weight(*model_, overlay_, {ctx_.current, succ.via}));
        }
    }
    if (events.empty()) return false;
    double total = 0.0;
    for (auto& [t, w] : events) total += w;
    if (!(total > 0.0)) {
        for (auto& [t, w] : events) w = 1.0;
    }
    resolve(draw(events, ctx_.current, rng_));
    return true;
}

Trace Session::to_trace(int run_id) const {
    Trace t;
    t.run_id = run_id;
    t.seed = seed_;
    t.manager = std::string(manager_.name());
    t.system_hash = sys_->fingerprint();
    t.steps = steps_;
    t.outcome = outcome_.value_or(Outcome::IncompleteMaxSteps);
    t.abort_reason = abort_reason_;
    t.adaptations = overlay_.adaptation_count;
    t.cancellations = overlay_.cancellation_count;
    return t;
}

Trace run_once(const NarrativeSystem& sys, const Manager& manager, const PlayerModel& model, std::uint64_t seed,
               const RunOptions& options) {
    if (options.max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
    Session session(sys, model, manager, seed, options.record_snapshots);
    while (!session.finished()) {
        if (session.steps_taken() >= options.max_steps) {
            session.stop(Outcome::IncompleteMaxSteps);
            break;
        }
        session.advance_sampled();
    }
    return session.to_trace(0);
}

std::vector<Trace> run_batch(const NarrativeSystem& sys, const Manager& manager, const PlayerModel& model, int n,
                             std::uint64_t master_seed, const RunOptions& options) {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    std::vector<Trace> traces(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        try {
            for (int i = next++; i < n; i = next++) {
                Trace t = run_once(sys, manager, model, run_seed(master_seed, static_cast<std::uint64_t>(i)), options);
                t.run_id = i;
                traces[static_cast<std::size_t>(i)] = std::move(t);
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(n / 64 + 1));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    return traces;
}

}  // namespace ins
