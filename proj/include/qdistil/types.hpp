#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qdistil {

template <typename Scalar>
using Matrix2c = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
template <typename Scalar>
using Matrix4c = Eigen::Matrix<std::complex<Scalar>, 4, 4>;
template <typename Scalar>
using Matrix3r = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Matrix4r = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using Vector3r = Eigen::Matrix<Scalar, 3, 1>;

using Matrix2cd = Matrix2c<double>;
using Matrix4cd = Matrix4c<double>;
using Matrix3d = Matrix3r<double>;
using Matrix4d = Matrix4r<double>;
using Vector3d = Vector3r<double>;

enum class Side { A, B };

inline const char* side_name(Side s) { return s == Side::A ? "A" : "B"; }
inline Side other_side(Side s) { return s == Side::A ? Side::B : Side::A; }

// A state (or reconstructed candidate) violates Hermiticity, positivity or
// the trace window.
struct NonPhysicalStateError : std::runtime_error {
    explicit NonPhysicalStateError(const std::string& what)
        : std::runtime_error(what) {}
};

// A marginal is pure (or numerically indistinguishable from pure): the
// filtering that would erase it has f = 0 and the distilled state vanishes.
struct NotDistillableError : std::runtime_error {
    explicit NotDistillableError(const std::string& what)
        : std::runtime_error(what) {}
};

// A shot-level estimator ran out of surviving copies.
struct EstimationError : std::runtime_error {
    explicit EstimationError(const std::string& what)
        : std::runtime_error(what) {}
};

// An internally inconsistent result (e.g. a concurrence far above 1).
struct ConsistencyError : std::runtime_error {
    explicit ConsistencyError(const std::string& what)
        : std::runtime_error(what) {}
};

struct InvalidArgumentError : std::invalid_argument {
    explicit InvalidArgumentError(const std::string& what)
        : std::invalid_argument(what) {}
};

}  // namespace qdistil
