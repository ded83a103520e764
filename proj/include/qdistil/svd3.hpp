#pragma once

#include <cmath>

#include "qdistil/types.hpp"

namespace qdistil {

template <typename Scalar>
struct Svd3 {
    Matrix3r<Scalar> u;      // left singular vectors (columns)
    Vector3r<Scalar> sigma;  // descending, nonnegative
    Matrix3r<Scalar> v;      // right singular vectors (columns)

    Matrix3r<Scalar> reconstruct() const {
        return u * sigma.asDiagonal() * v.transpose();
    }
};

// Two-sided cyclic Jacobi (Kogbetliantz) SVD of a 3x3 matrix with a fixed
// sweep order (0,1), (0,2), (1,2), so results are bit-stable across runs.
template <typename Scalar>
Svd3<Scalar> svd3(const Matrix3r<Scalar>& input) {
    Matrix3r<Scalar> a = input;
    Matrix3r<Scalar> u = Matrix3r<Scalar>::Identity();
    Matrix3r<Scalar> v = Matrix3r<Scalar>::Identity();
    const Scalar scale = a.cwiseAbs().maxCoeff();
    const Scalar tol = scale * Scalar(1e-15);

    constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int sweep = 0; sweep < 60; ++sweep) {
        Scalar off = Scalar(0);
        for (const auto& pq : pairs) {
            const int p = pq[0], q = pq[1];
            const Scalar w = a(p, p), x = a(p, q), y = a(q, p), z = a(q, q);
            if (std::abs(x) <= tol && std::abs(y) <= tol) continue;
            off = std::max({off, std::abs(x), std::abs(y)});

            // left rotation symmetrizing the 2x2 block
            const Scalar alpha = std::atan2(y - x, w + z);
            const Scalar ca = std::cos(alpha), sa = std::sin(alpha);
            const Scalar s00 = ca * w + sa * y, s01 = ca * x + sa * z;
            const Scalar s11 = -sa * x + ca * z;
            // Jacobi rotation diagonalizing the symmetric block
            const Scalar beta =
                Scalar(0.5) * std::atan2(Scalar(2) * s01, s00 - s11);
            const Scalar cb = std::cos(beta), sb = std::sin(beta);
            // J_L = Rot(alpha) * Rot(beta), J_R = Rot(beta)
            const Scalar cl = ca * cb - sa * sb, sl = sa * cb + ca * sb;

            for (int i = 0; i < 3; ++i) {  // A <- J_L^T A
                const Scalar ap = a(p, i), aq = a(q, i);
                a(p, i) = cl * ap + sl * aq;
                a(q, i) = -sl * ap + cl * aq;
            }
            for (int i = 0; i < 3; ++i) {  // A <- A J_R
                const Scalar ap = a(i, p), aq = a(i, q);
                a(i, p) = cb * ap + sb * aq;
                a(i, q) = -sb * ap + cb * aq;
            }
            for (int i = 0; i < 3; ++i) {  // U <- U J_L
                const Scalar up = u(i, p), uq = u(i, q);
                u(i, p) = cl * up + sl * uq;
                u(i, q) = -sl * up + cl * uq;
            }
            for (int i = 0; i < 3; ++i) {  // V <- V J_R
                const Scalar vp = v(i, p), vq = v(i, q);
                v(i, p) = cb * vp + sb * vq;
                v(i, q) = -sb * vp + cb * vq;
            }
        }
        if (off <= tol) break;
    }

    Svd3<Scalar> out;
    out.u = u;
    out.v = v;
    for (int i = 0; i < 3; ++i) {
        out.sigma(i) = a(i, i);
        if (out.sigma(i) < Scalar(0)) {
            out.sigma(i) = -out.sigma(i);
            out.v.col(i) = -out.v.col(i);
        }
    }
    // descending order, stable column swaps
    for (int i = 0; i < 2; ++i) {
        int best = i;
        for (int j = i + 1; j < 3; ++j)
            if (out.sigma(j) > out.sigma(best)) best = j;
        if (best != i) {
            std::swap(out.sigma(i), out.sigma(best));
            out.u.col(i).swap(out.u.col(best));
            out.v.col(i).swap(out.v.col(best));
        }
    }
    return out;
}

}  // namespace qdistil
