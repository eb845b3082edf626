#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mlfrac {

namespace detail {

inline std::atomic<int>& thread_cap_storage() {
    static std::atomic<int> cap{-1};  // -1: not yet read from the environment
    return cap;
}

inline int env_thread_cap() {
    const char* raw = std::getenv("MLFRAC_THREADS");
    if (raw == nullptr || *raw == '\0') return 0;
    try {
        return std::max(0, std::stoi(raw));
    } catch (const std::exception&) {
        return 0;
    }
}

}  // namespace detail

/// Caps the worker threads used by the operators. 0 means one per hardware thread.
inline void set_thread_cap(int cap) { detail::thread_cap_storage().store(std::max(0, cap)); }

/// Effective worker count. Initialised from MLFRAC_THREADS on first use.
inline int thread_count() {
    auto& cap = detail::thread_cap_storage();
    int value = cap.load();
    if (value < 0) {
        value = detail::env_thread_cap();
        cap.store(value);
    }
    if (value == 0) value = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return value;
}

namespace detail {

/// Runs body(i) for i in [0, count). Each index is independent and written by
/// exactly one worker, so results do not depend on the thread count.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
    if (workers <= 1 || count < 64) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    constexpr std::size_t chunk = 16;
    auto worker = [&] {
        try {
            for (;;) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= count) break;
                const std::size_t end = std::min(count, begin + chunk);
                for (std::size_t i = begin; i < end; ++i) body(i);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(count);
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail
}  // namespace mlfrac
