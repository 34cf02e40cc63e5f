#pragma once

/// @file budget.hpp
/// @brief Anytime-run plumbing: wall-clock or evaluation-count budgets and
/// best-so-far traces.

#include <chrono>
#include <cstdint>
#include <utility>
#include <stdexcept>
#include <vector>

#include "opsbd/objective.hpp"

namespace opsbd {

struct Budget {
    enum class Mode { WallClock, EvalCount };

    Mode mode = Mode::EvalCount;
    double seconds = 0.0;
    std::uint64_t evals = 0;

    static Budget wall_clock(double s) {
        if (!(s > 0.0)) throw std::invalid_argument("time budget must be positive");
        return {Mode::WallClock, s, 0};
    }
    static Budget eval_count(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("evaluation budget must be positive");
        return {Mode::EvalCount, 0.0, n};
    }
};

/// Counts objective evaluations and tells solvers when to stop. The clock
/// starts at construction, i.e. after the instance has been precomputed.
class BudgetClock {
public:
    using Clock = std::chrono::steady_clock;

    explicit BudgetClock(Budget b) : budget_(b), start_(Clock::now()) {}

    void charge(std::uint64_t n = 1) { evals_ += n; }
    std::uint64_t evals() const { return evals_; }

    double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

    bool exhausted() {
        if (budget_.mode == Budget::Mode::EvalCount) return evals_ >= budget_.evals;
        if (expired_) return true;
        // Reading the clock costs about as much as one sparse evaluation.
        if (evals_ < next_check_) return false;
        next_check_ = evals_ + kCheckStride;
        expired_ = elapsed() >= budget_.seconds;
        return expired_;
    }

    const Budget& budget() const { return budget_; }

private:
    static constexpr std::uint64_t kCheckStride = 16;

    Budget budget_;
    Clock::time_point start_;
    std::uint64_t evals_ = 0;
    std::uint64_t next_check_ = 0;
    bool expired_ = false;
};

struct TraceEvent {
    double elapsed_s = 0.0;
    std::uint64_t evals = 0;
    double best_w = 0.0;
};

/// Strictly improving best-so-far values over a run, plus the final best.
struct RunTrace {
    std::vector<TraceEvent> events;
    Solution best;
    std::uint64_t evaluations = 0;
    double elapsed_s = 0.0;
};

class TraceRecorder {
public:
    explicit TraceRecorder(BudgetClock& clock) : clock_(&clock) {}

    /// Records `s` if it beats the incumbent. Returns true on improvement.
    bool offer(const Solution& s) {
        if (!(s.value < trace_.best.value)) return false;
        trace_.best = s;
        trace_.events.push_back({clock_->elapsed(), clock_->evals(), s.value});
        return true;
    }

    const Solution& best() const { return trace_.best; }

    RunTrace finish() {
        trace_.evaluations = clock_->evals();
        trace_.elapsed_s = clock_->elapsed();
        return std::move(trace_);
    }

private:
    BudgetClock* clock_;
    RunTrace trace_;
};

}  // namespace opsbd
