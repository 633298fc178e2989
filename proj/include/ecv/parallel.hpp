#pragma once

#include <cstddef>
#include <functional>

namespace ecv {

/// Worker cap used by the library's parallel loops. 0 means hardware concurrency.
void set_thread_count(std::size_t threads) noexcept;
std::size_t thread_count() noexcept;

/// Runs body(i) for i in [0, count). Work is claimed dynamically, so bodies
/// must write only to their own slot. If bodies throw, the exception from the
/// lowest index is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace ecv
