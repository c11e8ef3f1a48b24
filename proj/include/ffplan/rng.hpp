#pragma once
/**
 * @file
 * @brief Seeded random source. Distribution helpers are implemented by hand
 *  because std:: distributions are not guaranteed bit-identical across
 *  standard libraries, and reproducibility of sampled problems matters more
 *  than distribution quality here.
 */

#include <cstdint>
#include <random>

#include "ffplan/world.hpp"

namespace ffplan {

class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t bits() { return eng_(); }

    /// Uniform in [0, 1).
    double unit() { return double(eng_() >> 11) * 0x1p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// Uniform integer in [0, n).
    int below(int n) { return int(unit() * n); }

    Vec2 in_rect(const Rect& r) {
        return {uniform(r.lo.x, r.hi.x), uniform(r.lo.y, r.hi.y)};
    }

    /// Derives an independent stream, e.g. per trial.
    Rng split(uint64_t salt) {
        return Rng(eng_() ^ (salt * 0x9e3779b97f4a7c15ull));
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace ffplan
