#pragma once

#include "cns/grid.hpp"
#include "cns/scenario.hpp"

namespace testing {

inline cns::ScalarField noise(const cns::Grid& g, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    cns::Rng rng(seed);
    cns::ScalarField f(g);
    for (auto& v : f.values()) v = rng.uniform(lo, hi);
    return f;
}

inline cns::VectorField face_noise(const cns::Grid& g, std::uint64_t seed) {
    cns::Rng rng(seed);
    cns::VectorField v(g);
    v.fill([&](int, double, double, double) { return rng.uniform(-1.0, 1.0); });
    return v;
}

inline double max_abs_diff(const cns::ScalarField& a, const cns::ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace testing
