#pragma once

#include <cmath>

#include "qdistil/state.hpp"

namespace qdistil {

// One side's beam-splitter configuration D = F(f) U(theta, phi):
// F(f) = [[1,0],[0,f]] (filtering, 0 <= f <= 1),
// U(theta,phi) = [[cos(t/2), sin(t/2) e^{-i phi}],
//                 [-sin(t/2) e^{i phi}, cos(t/2)]].
template <typename Scalar>
struct LocalOp {
    Scalar f = Scalar(1);
    Scalar theta = Scalar(0);
    Scalar phi = Scalar(0);

    bool is_identity(Scalar tol = Scalar(1e-15)) const {
        return std::abs(f - Scalar(1)) <= tol && std::abs(theta) <= tol;
    }
};

using LocalOpd = LocalOp<double>;

template <typename Scalar>
Matrix2c<Scalar> filter_matrix(Scalar f) {
    Matrix2c<Scalar> m;
    m << Scalar(1), Scalar(0), Scalar(0), f;
    return m;
}

template <typename Scalar>
Matrix2c<Scalar> rotation_matrix(Scalar theta, Scalar phi) {
    using C = std::complex<Scalar>;
    const Scalar c = std::cos(theta / 2), s = std::sin(theta / 2);
    Matrix2c<Scalar> m;
    m << C(c), s * std::exp(C(0, -phi)), -s * std::exp(C(0, phi)), C(c);
    return m;
}

template <typename Scalar>
Matrix2c<Scalar> op_matrix(const LocalOp<Scalar>& op) {
    return filter_matrix(op.f) * rotation_matrix(op.theta, op.phi);
}

// Amplitude of the branch discarded at detector D3: the lower path after the
// rotation, with reflection amplitude sqrt(1 - f^2).  Together with op_matrix
// this completes the channel: D^t D + G^t G = I.
template <typename Scalar>
Matrix2c<Scalar> filtered_branch_matrix(const LocalOp<Scalar>& op) {
    Matrix2c<Scalar> g = Matrix2c<Scalar>::Zero();
    g(1, 1) = std::sqrt(std::max(Scalar(0), Scalar(1) - op.f * op.f));
    return g * rotation_matrix(op.theta, op.phi);
}

// rho_out = (D_A (x) D_B) rho (D_A (x) D_B)^dagger, unnormalized; the trace
// is the probability that neither particle ends in a D3 detector.
template <typename Scalar>
TwoQubitState<Scalar> apply_local(const TwoQubitState<Scalar>& state,
                                  const LocalOp<Scalar>& op_a,
                                  const LocalOp<Scalar>& op_b) {
    const Matrix4c<Scalar> d = kron2(op_matrix(op_a), op_matrix(op_b));
    return {d * state.matrix * d.adjoint()};
}

// Single-qubit Bloch map of D = F U: returns the normalized output Bloch
// vector and the survival weight for a unit-weight input.
template <typename Scalar, typename Derived>
std::pair<BlochVector<Scalar>, Scalar> bloch_through(
    const LocalOp<Scalar>& op, const Eigen::MatrixBase<Derived>& g) {
    const Matrix2c<Scalar> d = op_matrix(op);
    const Matrix2c<Scalar> out =
        d * single_qubit_density(g) * d.adjoint();
    const Scalar w = out.trace().real();
    if (!(w > Scalar(0))) return {BlochVector<Scalar>::Zero(), Scalar(0)};
    return {bloch_of(out), w};
}

inline constexpr double kPureMarginalTol = 1e-9;

// The operation that makes a marginal with Bloch vector g maximally mixed:
// rotate g onto (0,0,-1) (rotation vector -g/|g|), then filter with
// f = sqrt((1-|g|)/(1+|g|)).  Identity for g = 0.  A pure marginal
// (|g| >= 1 - 1e-9) forces f = 0 and destroys the state, so it is rejected.
template <typename Derived>
LocalOp<typename Eigen::MatrixBase<Derived>::RealScalar> erase_marginal(
    const Eigen::MatrixBase<Derived>& gexpr) {
    using Scalar = typename Eigen::MatrixBase<Derived>::RealScalar;
    const BlochVector<Scalar> g = gexpr;
    const Scalar n = g.norm();
    if (n < Scalar(1e-15)) return {};
    if (n >= Scalar(1) - Scalar(kPureMarginalTol))
        throw NotDistillableError(
            "marginal is pure (|gamma| = " + std::to_string(static_cast<double>(n)) +
            "); the filtered state vanishes");
    const BlochVector<Scalar> v = (-g / n).eval();  // target rotation vector
    LocalOp<Scalar> op;
    op.f = std::sqrt((Scalar(1) - n) / (Scalar(1) + n));
    const Scalar rxy = std::hypot(v(0), v(1));
    if (rxy < Scalar(1e-15)) {
        // g along +z needs the degenerate half-turn; g along -z needs nothing
        op.theta = v(2) > Scalar(0) ? Scalar(0) : Scalar(M_PI);
        op.phi = Scalar(0);
    } else {
        op.theta = std::acos(std::clamp(v(2), Scalar(-1), Scalar(1)));
        op.phi = std::atan2(v(1), v(0));
        if (op.phi < Scalar(0)) op.phi += Scalar(2) * Scalar(M_PI);
    }
    return op;
}

}  // namespace qdistil
