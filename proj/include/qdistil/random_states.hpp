#pragma once

#include <cmath>

#include "qdistil/rng.hpp"
#include "qdistil/state.hpp"

namespace qdistil {

namespace detail {

// Marsaglia polar method; two fresh uniforms per pair keeps the stream layout
// independent of call parity.
inline double standard_normal(Philox& rng) {
    for (;;) {
        const double u = 2.0 * rng.uniform() - 1.0;
        const double v = 2.0 * rng.uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

inline Eigen::Vector4cd haar_pure_vector(Philox& rng) {
    Eigen::Vector4cd v;
    for (int i = 0; i < 4; ++i)
        v(i) = std::complex<double>(standard_normal(rng), standard_normal(rng));
    return v / v.norm();
}

}  // namespace detail

// Mixture of `rank` Haar-random pure states with uniform simplex weights.
// Reproducible: the same (seed, rank) gives a bit-identical state.
inline TwoQubitStated random_state(std::uint64_t seed, int rank) {
    if (rank < 1 || rank > 4)
        throw InvalidArgumentError("random_state: rank must be in 1..4");
    Philox rng(seed, /*stream=*/0x5257u);
    Matrix4cd m = Matrix4cd::Zero();
    Eigen::Vector4d w = Eigen::Vector4d::Zero();
    double wsum = 0.0;
    for (int i = 0; i < rank; ++i) {
        w(i) = -std::log(1.0 - rng.uniform());
        wsum += w(i);
    }
    for (int i = 0; i < rank; ++i) {
        const Eigen::Vector4cd v = detail::haar_pure_vector(rng);
        m += (w(i) / wsum) * (v * v.adjoint());
    }
    return {m};
}

inline TwoQubitStated random_pure_state(std::uint64_t seed) {
    return random_state(seed, 1);
}

// Product of two independently random mixed single-qubit states.  Bloch radii
// are kept inside [0.15, 0.85] so both marginals are strictly mixed and the
// two-step distillation property is exercised away from edge cases.
inline TwoQubitStated random_product_state(std::uint64_t seed) {
    Philox rng(seed, /*stream=*/0x5053u);
    const auto single = [&rng] {
        Vector3d dir;
        for (int i = 0; i < 3; ++i) dir(i) = detail::standard_normal(rng);
        dir.normalize();
        const double radius = 0.15 + 0.7 * rng.uniform();
        return single_qubit_density(radius * dir);
    };
    const Matrix2cd a = single();
    const Matrix2cd b = single();
    return {kron2(a, b)};
}

}  // namespace qdistil
