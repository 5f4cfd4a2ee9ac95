#include "factcheck/random.hpp"

#include <numeric>

#include "factcheck/error.hpp"

namespace factcheck {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view key) noexcept
{
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (unsigned char c : key) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return splitmix64(global_seed ^ splitmix64(h));
}

std::size_t Rng::index(std::size_t n)
{
    if (n == 0) {
        throw PreconditionError("Rng::index: empty range");
    }
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
}

std::vector<std::size_t> Rng::sample(std::size_t n, std::size_t m)
{
    if (m > n) {
        throw PreconditionError("Rng::sample: cannot draw " + std::to_string(m) + " of " +
                                std::to_string(n));
    }
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> dist(i, n - 1);
        std::swap(pool[i], pool[dist(engine_)]);
    }
    pool.resize(m);
    return pool;
}

}  // namespace factcheck
