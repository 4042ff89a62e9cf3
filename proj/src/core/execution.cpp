#include "core/execution.hpp"

#include <algorithm>
#include <cstdlib>

namespace vrte {

thread_local bool ExecutionContext::inside_task_ = false;

int ExecutionContext::default_thread_count() {
    if (const char* env = std::getenv("VRTE_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1)
            return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

ExecutionContext::ExecutionContext(int threads) {
    if (threads < 1)
        threads = default_thread_count();
    for (int k = 1; k < threads; ++k)
        workers_.emplace_back([this] { worker_loop(); });
}

ExecutionContext::~ExecutionContext() {
    {
        std::lock_guard<std::mutex> lk(mu_);
        stop_ = true;
    }
    cv_work_.notify_all();
    for (auto& w : workers_)
        w.join();
}

void ExecutionContext::run_batch(Batch& b) {
    for (;;) {
        const size_t begin = b.next.fetch_add(b.chunk);
        if (begin >= b.end)
            break;
        const size_t end = std::min(begin + b.chunk, b.end);
        for (size_t i = begin; i < end; ++i)
            (*b.fn)(i);
        b.remaining.fetch_sub(end - begin);
    }
}

void ExecutionContext::worker_loop() {
    inside_task_ = true;
    uint64_t seen = 0;
    for (;;) {
        Batch* batch = nullptr;
        {
            std::unique_lock<std::mutex> lk(mu_);
            cv_work_.wait(lk, [&] { return stop_ || (batch_ && generation_ != seen); });
            if (stop_)
                return;
            seen = generation_;
            batch = batch_;
        }
        run_batch(*batch);
        if (batch->remaining.load() == 0)
            cv_done_.notify_all();
    }
}

void ExecutionContext::parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    if (n == 0)
        return;
    if (workers_.empty() || inside_task_ || n == 1) {
        for (size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }

    Batch batch;
    batch.fn = &fn;
    batch.end = n;
    batch.chunk = std::max<size_t>(1, n / (4 * (workers_.size() + 1)));
    batch.remaining.store(n);
    {
        std::lock_guard<std::mutex> lk(mu_);
        batch_ = &batch;
        ++generation_;
    }
    cv_work_.notify_all();
    run_batch(batch);
    {
        std::unique_lock<std::mutex> lk(mu_);
        cv_done_.wait(lk, [&] { return batch.remaining.load() == 0; });
        batch_ = nullptr;
    }
}

}  // namespace vrte
