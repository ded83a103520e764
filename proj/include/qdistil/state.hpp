#pragma once

#include <sstream>

#include "qdistil/pauli.hpp"
#include "qdistil/types.hpp"

namespace qdistil {

// Two-qubit density matrix in the fixed basis |uu>, |ud>, |du>, |dd>.
// The trace is the survival weight: 1 for source states, < 1 after filtering.
template <typename Scalar>
struct TwoQubitState {
    Matrix4c<Scalar> matrix;

    Scalar trace() const { return matrix.trace().real(); }
};

// Real Pauli-basis coefficients R(l,l') = Tr(rho sigma_l (x) sigma_l').
template <typename Scalar>
struct RMatrix {
    Matrix4r<Scalar> entries;
};

template <typename Scalar>
using BlochVector = Vector3r<Scalar>;

using TwoQubitStated = TwoQubitState<double>;
using RMatrixd = RMatrix<double>;
using BlochVectord = BlochVector<double>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

template <typename Scalar>
Scalar hermiticity_defect(const Matrix4c<Scalar>& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar min_eigenvalue(const Matrix4c<Scalar>& m) {
    Eigen::SelfAdjointEigenSolver<Matrix4c<Scalar>> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// Throws NonPhysicalStateError naming the violated invariant.
template <typename Scalar>
void validate(const TwoQubitState<Scalar>& state,
              Scalar hermitian_tol = Scalar(kHermitianTol),
              Scalar psd_tol = Scalar(kPsdTol)) {
    const Scalar herm = hermiticity_defect(state.matrix);
    if (!(herm <= hermitian_tol)) {
        std::ostringstream os;
        os << "state is not Hermitian: max |rho - rho^dagger| = " << herm;
        throw NonPhysicalStateError(os.str());
    }
    const Scalar tr = state.trace();
    if (!(tr > Scalar(0)) || tr > Scalar(1) + hermitian_tol) {
        std::ostringstream os;
        os << "state trace " << tr << " outside (0, 1]";
        throw NonPhysicalStateError(os.str());
    }
    const Scalar lo = min_eigenvalue(state.matrix);
    if (lo < -psd_tol) {
        std::ostringstream os;
        os << "state is not positive semidefinite: min eigenvalue = " << lo;
        throw NonPhysicalStateError(os.str());
    }
}

template <typename Scalar>
bool is_valid(const TwoQubitState<Scalar>& state) {
    try {
        validate(state);
        return true;
    } catch (const NonPhysicalStateError&) {
        return false;
    }
}

template <typename Scalar>
TwoQubitState<Scalar> normalized(const TwoQubitState<Scalar>& state) {
    const Scalar tr = state.trace();
    if (!(tr > Scalar(0)))
        throw NonPhysicalStateError("cannot normalize a zero-trace state");
    return {state.matrix / tr};
}

// R(l,l') = Tr(rho sigma_l (x) sigma_l'); R(0,0) equals the trace.
template <typename Scalar>
RMatrix<Scalar> to_r_matrix(const TwoQubitState<Scalar>& state) {
    RMatrix<Scalar> r;
    for (int l = 0; l < 4; ++l)
        for (int lp = 0; lp < 4; ++lp)
            r.entries(l, lp) =
                (state.matrix * pauli_pair<Scalar>(l, lp)).trace().real();
    return r;
}

// rho = 1/4 sum R(l,l') sigma_l (x) sigma_l'.  Throws NonPhysicalStateError if
// the reconstruction is not a (possibly subnormalized) density matrix, which
// signals a corrupted R-matrix.
template <typename Scalar>
TwoQubitState<Scalar> from_r_matrix(const RMatrix<Scalar>& r) {
    Matrix4c<Scalar> m = Matrix4c<Scalar>::Zero();
    for (int l = 0; l < 4; ++l)
        for (int lp = 0; lp < 4; ++lp)
            m += (r.entries(l, lp) / Scalar(4)) * pauli_pair<Scalar>(l, lp);
    TwoQubitState<Scalar> state{m};
    validate(state);
    return state;
}

template <typename Scalar>
Matrix2c<Scalar> partial_trace(const TwoQubitState<Scalar>& state, Side keep) {
    Matrix2c<Scalar> out = Matrix2c<Scalar>::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                if (keep == Side::A)
                    out(i, j) += state.matrix(2 * i + k, 2 * j + k);
                else
                    out(i, j) += state.matrix(2 * k + i, 2 * k + j);
            }
    return out;
}

template <typename Scalar>
BlochVector<Scalar> bloch_of(const Matrix2c<Scalar>& rho1) {
    const Scalar w = rho1.trace().real();
    if (!(w > Scalar(0)))
        throw NonPhysicalStateError("marginal undefined: zero-trace state");
    BlochVector<Scalar> g;
    for (int l = 0; l < 3; ++l)
        g(l) = (rho1 * pauli<Scalar>(l + 1)).trace().real() / w;
    return g;
}

template <typename Derived>
Matrix2c<typename Eigen::MatrixBase<Derived>::RealScalar> single_qubit_density(
    const Eigen::MatrixBase<Derived>& g,
    typename Eigen::MatrixBase<Derived>::RealScalar weight = 1) {
    using Scalar = typename Eigen::MatrixBase<Derived>::RealScalar;
    Matrix2c<Scalar> m = pauli<Scalar>(0);
    for (int l = 0; l < 3; ++l) m += g(l) * pauli<Scalar>(l + 1);
    return (weight / Scalar(2)) * m;
}

// Normalized Bloch vector of one side: (R_l0)/R_00 for A, (R_0l)/R_00 for B.
template <typename Scalar>
BlochVector<Scalar> marginal(const TwoQubitState<Scalar>& state, Side side) {
    return bloch_of(partial_trace(state, side));
}

}  // namespace qdistil
