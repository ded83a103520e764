#pragma once

#include "qdistil/types.hpp"

namespace qdistil {

// sigma_0..sigma_3 with sigma_3 |up> = +|up>, basis {|up>, |down>}.
template <typename Scalar>
const Matrix2c<Scalar>& pauli(int l) {
    using C = std::complex<Scalar>;
    static const Matrix2c<Scalar> sigma[4] = {
        (Matrix2c<Scalar>() << C(1, 0), C(0, 0), C(0, 0), C(1, 0)).finished(),
        (Matrix2c<Scalar>() << C(0, 0), C(1, 0), C(1, 0), C(0, 0)).finished(),
        (Matrix2c<Scalar>() << C(0, 0), C(0, -1), C(0, 1), C(0, 0)).finished(),
        (Matrix2c<Scalar>() << C(1, 0), C(0, 0), C(0, 0), C(-1, 0)).finished(),
    };
    return sigma[l];
}

// Kronecker product of two 2x2 blocks in the fixed ordering
// |uu>, |ud>, |du>, |dd> (first factor = qubit A).
template <typename DerivedA, typename DerivedB>
Matrix4c<typename Eigen::MatrixBase<DerivedA>::RealScalar> kron2(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    Matrix4c<typename Eigen::MatrixBase<DerivedA>::RealScalar> out;
    out.template block<2, 2>(0, 0) = a(0, 0) * b;
    out.template block<2, 2>(0, 2) = a(0, 1) * b;
    out.template block<2, 2>(2, 0) = a(1, 0) * b;
    out.template block<2, 2>(2, 2) = a(1, 1) * b;
    return out;
}

template <typename Scalar>
const Matrix4c<Scalar>& pauli_pair(int l, int lp) {
    static const auto table = [] {
        std::array<Matrix4c<Scalar>, 16> t;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                t[4 * i + j] = kron2(pauli<Scalar>(i), pauli<Scalar>(j));
        return t;
    }();
    return table[4 * l + lp];
}

}  // namespace qdistil
