#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "episcale/geometry.hpp"

namespace episcale {

/// Seeded generator with platform-stable uniform draws (raw 53-bit mantissa
/// from mt19937_64; no implementation-defined distribution adapters).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // in [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double log_uniform(double lo, double hi) {
        return lo * std::exp(uniform() * std::log(hi / lo));
    }
    std::uint64_t integer(std::uint64_t n) {  // in [0, n)
        return engine_() % n;
    }
    Vec2 point(double x0, double x1, double y0, double y1) {
        const double x = uniform(x0, x1);
        const double y = uniform(y0, y1);
        return {x, y};
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace episcale
