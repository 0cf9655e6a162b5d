#ifndef FRONTDOOR_RNG_HPP
#define FRONTDOOR_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace frontdoor {

/// Purposes that get their own substream of a root seed.
enum class Stream : std::uint64_t {
    Population = 1,
    Missingness = 2,
    Imputation = 3,
    Resampling = 4,
    Intervention = 5,
    Plotting = 6,
};

/// Mixes a root seed with a path of stream keys into a 64-bit seed.
/// Uses the SplitMix64 finalizer so nearby keys give unrelated seeds.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept;

/// Deterministic random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; uniforms, normals and indices are
/// computed here rather than through <random> distributions, which are
/// implementation-defined. Normals use Box-Muller (both variates consumed).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    RandomStream(std::uint64_t root, Stream purpose, std::initializer_list<std::uint64_t> path = {});

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    double normal() noexcept;

    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Uniform index in [0, n), unbiased by rejection. n must be > 0.
    std::size_t index(std::size_t n) noexcept;

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace frontdoor

#endif
