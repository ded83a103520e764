#pragma once

#include <algorithm>
#include <cmath>

#include "qdistil/state.hpp"
#include "qdistil/svd3.hpp"

namespace qdistil {

// Detection-rotation vectors of BS3A / BS3B, each on the unit sphere:
// v = (sin t cos p, sin t sin p, cos t).
template <typename Scalar>
struct DetSetting {
    Vector3r<Scalar> v_a;
    Vector3r<Scalar> v_b;
};

using DetSettingd = DetSetting<double>;

template <typename Scalar>
Vector3r<Scalar> unit_from_angles(Scalar theta, Scalar phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
            std::cos(theta)};
}

// <n_1j (n_1jbar + n_2jbar)> = (1 + gamma_j . v)/2, counts normalized to the
// surviving ensemble.
template <typename Scalar>
Scalar single_count(const TwoQubitState<Scalar>& state, Side side,
                    const Vector3r<Scalar>& v) {
    return (Scalar(1) + marginal(state, side).dot(v)) / Scalar(2);
}

// Q(l,l') = R(l,l')/R(0,0) - R(l,0) R(0,l') / R(0,0)^2, l,l' = 1..3.
// Scale-invariant, so unnormalized (filtered) states are handled as-is.
template <typename Scalar>
Matrix3r<Scalar> q_matrix(const TwoQubitState<Scalar>& state) {
    const RMatrix<Scalar> r = to_r_matrix(state);
    const Scalar r00 = r.entries(0, 0);
    if (!(r00 > Scalar(0)))
        throw NonPhysicalStateError("q_matrix: zero-trace state");
    Matrix3r<Scalar> q;
    for (int l = 1; l < 4; ++l)
        for (int lp = 1; lp < 4; ++lp)
            q(l - 1, lp - 1) = r.entries(l, lp) / r00 -
                               r.entries(l, 0) * r.entries(0, lp) / (r00 * r00);
    return q;
}

// <delta n_1A delta n_1B> = (1/4) v_A Q' v_B^T.
template <typename Scalar>
Scalar cross_correlation(const TwoQubitState<Scalar>& state,
                         const DetSetting<Scalar>& setting) {
    return setting.v_a.dot(q_matrix(state) * setting.v_b) / Scalar(4);
}

// Singular structure of Q': ordered values lambda_1 >= lambda_2 >= lambda_3,
// the two orthonormal direction triples (columns), and the sign factor
// q = Det(v_A,1..3) Det(v_B,1..3).  Columns are sign-fixed so that the
// largest-magnitude component of each v_A,l is positive and
// v_A,l^T Q v_B,l = +lambda_l.
template <typename Scalar>
struct QDecomposition {
    Matrix3r<Scalar> q;
    Vector3r<Scalar> lambdas;
    Matrix3r<Scalar> vecs_a;
    Matrix3r<Scalar> vecs_b;
    Scalar q_sign = Scalar(1);
};

using QDecompositiond = QDecomposition<double>;

inline constexpr double kDegenerateLambdaTol = 1e-9;

template <typename Derived>
QDecomposition<typename Eigen::MatrixBase<Derived>::RealScalar> decompose_q(
    const Eigen::MatrixBase<Derived>& qexpr) {
    using Scalar = typename Eigen::MatrixBase<Derived>::RealScalar;
    QDecomposition<Scalar> out;
    out.q = qexpr;
    const Svd3<Scalar> svd = svd3<Scalar>(out.q);
    out.lambdas = svd.sigma;
    out.vecs_a = svd.u;
    out.vecs_b = svd.v;
    for (int l = 0; l < 3; ++l) {
        int imax = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(out.vecs_a(i, l)) > std::abs(out.vecs_a(imax, l)))
                imax = i;
        if (out.vecs_a(imax, l) < Scalar(0)) {
            out.vecs_a.col(l) = -out.vecs_a.col(l);
            out.vecs_b.col(l) = -out.vecs_b.col(l);
        }
    }
    if (out.lambdas(2) > Scalar(kDegenerateLambdaTol)) {
        out.q_sign = out.vecs_a.determinant() * out.vecs_b.determinant() >=
                             Scalar(0)
                         ? Scalar(1)
                         : Scalar(-1);
    } else {
        // q * lambda_3 is below noise; complete the triples right-handed
        out.q_sign = Scalar(1);
        out.vecs_a.col(2) = out.vecs_a.col(0).cross(out.vecs_a.col(1));
        out.vecs_b.col(2) = out.vecs_b.col(0).cross(out.vecs_b.col(1));
    }
    return out;
}

// (V_A, V_B, three two-qubit extrema): V_j = |gamma_j|, the single-valued
// extremum of the single-count signal; the two-qubit visibilities are the
// singular values of Q'.
template <typename Scalar>
struct Visibilities {
    Scalar v_a = Scalar(0);
    Scalar v_b = Scalar(0);
    Vector3r<Scalar> v_ab = Vector3r<Scalar>::Zero();
};

template <typename Scalar>
Visibilities<Scalar> visibilities(const TwoQubitState<Scalar>& state) {
    Visibilities<Scalar> out;
    out.v_a = marginal(state, Side::A).norm();
    out.v_b = marginal(state, Side::B).norm();
    out.v_ab = decompose_q(q_matrix(state)).lambdas;
    return out;
}

// s0 = (N/M)/(f_A f_B) with N/M the trace of the distilled state;
// s1 = s0 l1, s2 = s0 l2, s3 = q s0 l3 (sign carried by s3).
template <typename Scalar>
struct LorentzSingularValues {
    Scalar s0 = Scalar(0);
    Scalar s1 = Scalar(0);
    Scalar s2 = Scalar(0);
    Scalar s3 = Scalar(0);
};

using LorentzSingularValuesd = LorentzSingularValues<double>;

template <typename Scalar>
LorentzSingularValues<Scalar> lorentz_from_decomposition(
    const TwoQubitState<Scalar>& distilled, const QDecomposition<Scalar>& dec,
    Scalar f_a, Scalar f_b) {
    LorentzSingularValues<Scalar> s;
    s.s0 = distilled.trace() / (f_a * f_b);
    s.s1 = s.s0 * dec.lambdas(0);
    s.s2 = s.s0 * dec.lambdas(1);
    s.s3 = dec.q_sign * s.s0 * dec.lambdas(2);
    return s;
}

inline constexpr double kNormalFormTol = 1e-6;

// Requires a converged normal form: the first row and column of R (beyond
// R00) must vanish to within normal_tol relative to R00.
template <typename Scalar>
LorentzSingularValues<Scalar> lorentz_singular_values(
    const TwoQubitState<Scalar>& distilled, Scalar f_a, Scalar f_b,
    Scalar normal_tol = Scalar(kNormalFormTol)) {
    if (!(f_a > Scalar(0)) || !(f_b > Scalar(0)))
        throw NotDistillableError(
            "lorentz_singular_values: filtering parameters must be positive");
    const Scalar v_a = marginal(distilled, Side::A).norm();
    const Scalar v_b = marginal(distilled, Side::B).norm();
    if (v_a > normal_tol || v_b > normal_tol)
        throw InvalidArgumentError(
            "lorentz_singular_values: state is not a normal form "
            "(marginal norms " +
            std::to_string(static_cast<double>(v_a)) + ", " +
            std::to_string(static_cast<double>(v_b)) + ")");
    return lorentz_from_decomposition(distilled,
                                      decompose_q(q_matrix(distilled)), f_a,
                                      f_b);
}

template <typename Scalar>
struct ConcurrencePair {
    Scalar c_dis = Scalar(0);      // of the distilled state
    Scalar c_initial = Scalar(0);  // of the source state, s0 * c_dis
};

// C(rho_dis) = max(0, (1/2)(-1 + l1 + l2 - q l3)) and C(rho) = s0 C(rho_dis),
// both clipped to [0, 1].  A value beyond 1 + 1e-6 before clipping indicates
// an inconsistent input and raises instead of being hidden by the clip.
template <typename Scalar>
ConcurrencePair<Scalar> concurrence_from_visibilities(
    const LorentzSingularValues<Scalar>& s) {
    if (!(s.s0 > Scalar(0)))
        throw InvalidArgumentError(
            "concurrence_from_visibilities: s0 must be positive");
    const Scalar raw =
        Scalar(0.5) * (Scalar(-1) + (s.s1 + s.s2 - s.s3) / s.s0);
    const Scalar raw_initial = s.s0 * raw;
    const auto checked_clip = [](Scalar x, const char* what) {
        if (x > Scalar(1) + Scalar(1e-6))
            throw ConsistencyError(std::string(what) + " exceeds 1: " +
                                   std::to_string(static_cast<double>(x)));
        return std::clamp(x, Scalar(0), Scalar(1));
    };
    ConcurrencePair<Scalar> out;
    out.c_dis = checked_clip(raw, "distilled concurrence");
    out.c_initial = checked_clip(raw_initial, "initial concurrence");
    return out;
}

// Concurrence read off an intermediate protocol state as if it were the final
// normal form (no normal-form gate, plain clip); used for per-iteration C^(k)
// traces, where the value is only meaningful up to the residual visibility.
template <typename Scalar>
Scalar concurrence_if_distilled(const TwoQubitState<Scalar>& state, Scalar f_a,
                                Scalar f_b) {
    const auto s = lorentz_from_decomposition(
        state, decompose_q(q_matrix(state)), f_a, f_b);
    const Scalar raw =
        s.s0 * Scalar(0.5) * (Scalar(-1) + (s.s1 + s.s2 - s.s3) / s.s0);
    return std::clamp(raw, Scalar(0), Scalar(1));
}

}  // namespace qdistil
