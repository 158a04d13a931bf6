#pragma once

#include "leaksim/protocol.hpp"
#include "leaksim/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace leaksim {

/// Seed of trajectory `index` in a batch with base seed `base`.
constexpr std::uint64_t trajectory_seed(std::uint64_t base, std::size_t index) { return derive_seed(base, index); }

/// Worker count: LEAKSIM_THREADS if set to a positive integer, otherwise the
/// hardware concurrency.
inline std::size_t worker_limit() {
    if (const char* env = std::getenv("LEAKSIM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Run `count` trajectories of `base` with derived seeds on a bounded worker
/// pool. Results are in trajectory-index order whatever the scheduling.
inline std::vector<TrajectoryLog> run_batch(const TrajectoryConfig& base, std::size_t count,
                                            std::size_t workers = worker_limit()) {
    base.validate();
    std::vector<TrajectoryLog> logs(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                TrajectoryConfig cfg = base;
                cfg.seed = trajectory_seed(base.seed, i);
                logs[i] = run_trajectory(cfg);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    if (failure) std::rethrow_exception(failure);
    return logs;
}

} // namespace leaksim
