#pragma once

#include <cstddef>
#include <exception>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Deterministic grid-sweep execution. Every cell writes only its own slot, so
// results are byte-identical for any worker count; workers == 1 runs the plain
// serial loop that the tests and the benchmark use as reference.

namespace modmirror {

// Worker count resolution: explicit argument > MODMIRROR_WORKERS env var >
// OpenMP default. Always >= 1; 1 when built without OpenMP.
int default_workers();

namespace detail {

template <class F>
void serial_for(std::size_t count, F&& body) {
    for (std::size_t i = 0; i < count; ++i)
        body(i);
}

} // namespace detail

template <class F>
void for_each_index(std::size_t count, int workers, F&& body) {
    if (workers <= 0)
        workers = default_workers();
    if (workers == 1 || count < 2) {
        detail::serial_for(count, std::forward<F>(body));
        return;
    }
#ifdef _OPENMP
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
#else
    detail::serial_for(count, std::forward<F>(body));
#endif
}

} // namespace modmirror
