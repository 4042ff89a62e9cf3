#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace vrte {

/// Fixed-size worker pool. parallel_for partitions an index range into
/// contiguous chunks; tasks must write only to disjoint, preallocated slots so
/// results are independent of scheduling and thread count.
class ExecutionContext {
  public:
    explicit ExecutionContext(int threads = 0);
    ~ExecutionContext();

    ExecutionContext(const ExecutionContext&) = delete;
    ExecutionContext& operator=(const ExecutionContext&) = delete;

    int thread_count() const { return static_cast<int>(workers_.size()) + 1; }

    /// Run fn(i) for i in [0, n). Blocks until all items complete. Nested
    /// calls from inside a task execute inline.
    void parallel_for(size_t n, const std::function<void(size_t)>& fn);

    static int default_thread_count();

  private:
    struct Batch {
        const std::function<void(size_t)>* fn = nullptr;
        std::atomic<size_t> next{0};
        size_t end = 0;
        size_t chunk = 1;
        std::atomic<size_t> remaining{0};
    };

    void worker_loop();
    static void run_batch(Batch& b);

    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable cv_work_;
    std::condition_variable cv_done_;
    Batch* batch_ = nullptr;
    uint64_t generation_ = 0;
    bool stop_ = false;
    static thread_local bool inside_task_;
};

/// Wall-clock seconds per solver stage plus bookkeeping counters. The stage
/// split mirrors the solution process: homogeneous (kernels, reduced
/// operators, eigen solves), particular, boundary, reconstruction.
struct StepTimers {
    double homogeneous = 0.0;
    double particular = 0.0;
    double boundary = 0.0;
    double reconstruction = 0.0;
    double total_wall = 0.0;

    double step_sum() const { return homogeneous + particular + boundary + reconstruction; }
};

struct WorkCounters {
    std::uint64_t homogeneous_solves = 0;
    std::uint64_t particular_solves = 0;
    std::uint64_t boundary_solves = 0;
    std::uint64_t reconstruction_items = 0;
    std::uint64_t clamped_brdf_entries = 0;
};

class StopWatch {
  public:
    StopWatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

/// Accumulates elapsed time into a StepTimers field on destruction.
class ScopedStageTimer {
  public:
    ScopedStageTimer(double& slot) : slot_(slot) {}
    ~ScopedStageTimer() { slot_ += watch_.seconds(); }

  private:
    double& slot_;
    StopWatch watch_;
};

/// Run-scoped warning sink (resonance dithering, clamped outputs, ...).
struct Diagnostics {
    std::vector<std::string> warnings;
    void warn(std::string msg) { warnings.push_back(std::move(msg)); }
};

}  // namespace vrte
