#pragma once

#include <array>
#include <cstdint>

namespace igamg::flops {

// Phase buckets for cost accounting. Counters are thread-local, so each
// concurrently running solve attributes its own work.
enum class Phase : int { setup = 0, smooth, residual, transfer, coarse, other };

inline constexpr int kNumPhases = 6;

namespace detail {
struct Counters {
    std::array<std::uint64_t, kNumPhases> buckets{};
    Phase current = Phase::other;
};
inline thread_local Counters tl_counters;
}  // namespace detail

inline void add(std::uint64_t n) {
    detail::tl_counters.buckets[static_cast<int>(detail::tl_counters.current)] += n;
}

inline void reset() { detail::tl_counters = {}; }

inline std::uint64_t bucket(Phase p) {
    return detail::tl_counters.buckets[static_cast<int>(p)];
}

inline std::uint64_t total() {
    std::uint64_t s = 0;
    for (auto v : detail::tl_counters.buckets) s += v;
    return s;
}

// Switches the active phase for the lifetime of the guard.
class ScopedPhase {
public:
    explicit ScopedPhase(Phase p) : previous_(detail::tl_counters.current) {
        detail::tl_counters.current = p;
    }
    ~ScopedPhase() { detail::tl_counters.current = previous_; }
    ScopedPhase(const ScopedPhase&) = delete;
    ScopedPhase& operator=(const ScopedPhase&) = delete;

private:
    Phase previous_;
};

}  // namespace igamg::flops
