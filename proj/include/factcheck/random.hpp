#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace factcheck {

/// Per-item seed from a global seed and a stable key (e.g. a para_id), so
/// results do not depend on processing order.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view key) noexcept;

class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n);

    /// `m` distinct indices drawn uniformly from [0, n), in draw order.
    std::vector<std::size_t> sample(std::size_t n, std::size_t m);

   private:
    std::mt19937_64 engine_;
};

}  // namespace factcheck
