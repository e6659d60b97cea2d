#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace coxcs {

/**
 * Runs body(i) for i in [0, count) on `workers` threads using contiguous
 * static blocks. Callers write results into per-index slots, so the outcome
 * does not depend on the worker count. The exception from the lowest failing
 * block is rethrown after all threads join.
 */
template <class Body>
void parallel_for(std::ptrdiff_t count, int workers, Body&& body)
{
    if (count <= 0) return;
    const auto w = static_cast<std::ptrdiff_t>(std::clamp<std::ptrdiff_t>(workers, 1, count));
    if (w == 1) {
        for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(w));
    for (std::ptrdiff_t t = 0; t < w; ++t) {
        const auto begin = count * t / w;
        const auto end = count * (t + 1) / w;
        threads.emplace_back([&, t, begin, end] {
            try {
                for (auto i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace coxcs
