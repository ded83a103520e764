#pragma once

#include <algorithm>
#include <cmath>

#include "qdistil/state.hpp"

namespace qdistil {

// Wootters concurrence via the spin-flip construction:
// C = max(0, mu1 - mu2 - mu3 - mu4) with mu_i the decreasing square roots of
// the eigenvalues of rho (sy(x)sy) rho* (sy(x)sy).  Those are computed as the
// singular values of conj(sqrt(rho)) (sy(x)sy) sqrt(rho), which has the same
// squared spectrum but stays a well-conditioned Hermitian/SVD problem (the
// raw product is non-normal and costs ~sqrt(eps) accuracy on pure states).
// Subnormalized states are normalized first; the pipeline routinely produces
// filtered states.
template <typename Scalar>
Scalar wootters_concurrence(const TwoQubitState<Scalar>& state) {
    const Matrix4c<Scalar> rho = normalized(state).matrix;
    const Matrix4c<Scalar> yy = pauli_pair<Scalar>(2, 2);
    Eigen::SelfAdjointEigenSolver<Matrix4c<Scalar>> es(rho);
    Matrix4c<Scalar> root = Matrix4c<Scalar>::Zero();
    for (int i = 0; i < 4; ++i)
        root += std::sqrt(std::max(Scalar(0), es.eigenvalues()(i))) *
                es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    const Matrix4c<Scalar> m = root.conjugate() * yy * root;
    Eigen::JacobiSVD<Matrix4c<Scalar>> svd(m);
    const auto& mu = svd.singularValues();
    return std::max(Scalar(0), mu(0) - mu(1) - mu(2) - mu(3));
}

}  // namespace qdistil
