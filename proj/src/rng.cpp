#include "frontdoor/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace frontdoor {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = splitmix64(root);
    for (std::uint64_t key : path) {
        h = splitmix64(h ^ splitmix64(key + 0x632be59bd9b4e019ULL));
    }
    return h;
}

RandomStream::RandomStream(std::uint64_t root, Stream purpose, std::initializer_list<std::uint64_t> path)
    : engine_(0) {
    std::uint64_t h = derive_seed(root, {static_cast<std::uint64_t>(purpose)});
    for (std::uint64_t key : path) h = derive_seed(h, {key});
    engine_.seed(h);
}

double RandomStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // 1 - u lies in (0, 1], so the log is finite.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::size_t RandomStream::index(std::size_t n) noexcept {
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t draw;
    do {
        draw = engine_();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % range);
}

}  // namespace frontdoor
