#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace wordrhyme::detail {

/// Runs fn(worker, begin, end) over `threads` contiguous slices of [0, n).
/// With one thread the call happens inline.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        fn(std::size_t{0}, std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(n, t * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, t, begin, end] {
            try {
                fn(t, begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Parameter access for the trainers. With Shared = true every read and write
/// of a parameter is a relaxed atomic operation, so concurrent workers can
/// update the same rows without locks (last write wins) and without a data
/// race. With Shared = false these are plain loads and stores.
template <bool Shared>
struct ParamAccess {
    template <typename T>
    static T load(const T& x) {
        if constexpr (Shared) {
            return std::atomic_ref<T>(const_cast<T&>(x)).load(std::memory_order_relaxed);
        } else {
            return x;
        }
    }

    template <typename T>
    static void store(T& x, T v) {
        if constexpr (Shared) {
            std::atomic_ref<T>(x).store(v, std::memory_order_relaxed);
        } else {
            x = v;
        }
    }

    template <typename T>
    static void add(T& x, T delta) {
        store(x, static_cast<T>(load(x) + delta));
    }
};

}  // namespace wordrhyme::detail
