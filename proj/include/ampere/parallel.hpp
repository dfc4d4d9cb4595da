#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace ampere {

/// Execution policy for the data-parallel kernels. Both policies visit the
/// same work items and fold results in index order, so they produce
/// bit-identical output; `serial` is the reference path.
enum class Exec { serial, parallel };

/// Calls fn(i) for every i in [0, n). Under Exec::parallel the calls are
/// distributed over OpenMP threads. An exception thrown by any call is
/// rethrown after the loop; when several calls throw, the one with the
/// lowest index wins, so error reporting is deterministic too.
template <class Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
    if (exec == Exec::serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Evaluates fn(i) for every index into a vector and folds it left to right.
template <class T, class Fn>
T ordered_sum(std::size_t n, Exec exec, T zero, Fn&& fn) {
    std::vector<T> parts(n, zero);
    for_each_index(n, exec, [&](std::size_t i) { parts[i] = fn(i); });
    T total = zero;
    for (const auto& p : parts) total += p;
    return total;
}

/// Sets the OpenMP thread count (no-op without OpenMP).
void set_thread_count(int threads);
int max_thread_count();

}  // namespace ampere
