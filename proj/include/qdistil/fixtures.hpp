#pragma once

#include <string>
#include <vector>

#include "qdistil/state.hpp"

namespace qdistil {

struct StateFixture {
    std::string name;
    TwoQubitStated state;
    std::vector<double> params;
};

namespace detail {

inline Eigen::Vector4cd ket_uu() { return {1, 0, 0, 0}; }
inline Eigen::Vector4cd ket_ud() { return {0, 1, 0, 0}; }
inline Eigen::Vector4cd ket_du() { return {0, 0, 1, 0}; }
inline Eigen::Vector4cd ket_dd() { return {0, 0, 0, 1}; }

inline Matrix4cd projector(const Eigen::Vector4cd& v) { return v * v.adjoint(); }

inline void require_unit_interval(const std::string& fixture, const char* pname,
                                  double value) {
    if (!(value >= 0.0 && value <= 1.0))
        throw InvalidArgumentError("fixture " + fixture + ": parameter " +
                                   pname + " = " + std::to_string(value) +
                                   " outside [0, 1]");
}

}  // namespace detail

// |Psi0> = (|uu> + |dd>)/sqrt(2)
inline TwoQubitStated bell_state() {
    const Eigen::Vector4cd v =
        (detail::ket_uu() + detail::ket_dd()) / std::sqrt(2.0);
    return {detail::projector(v)};
}

// Named source states:
//   bell            |Psi0><Psi0|
//   werner          (2/3)|Psi0><Psi0| + (1/3) I/4
//   mixed_identity  I/4
//   rho_prime       |Psi0><Psi0| + ((p-1)/2)(|uu><dd| + |dd><uu|), p in [0,1]
//   rho_eps_lambda  lam |phi_eps><phi_eps|
//                     + ((1-lam)/2)(|ud><ud| + |du><du|),
//                   |phi_eps> = (eps|uu> + |dd>)/sqrt(1+eps^2)
//   asymptotic_fig2b  (1/2)|uu><uu| + (2/5)|Psi+><Psi+| + (1/10)|Psi-><Psi-|,
//                   |Psi+-> = (|du> +- |ud>)/sqrt(2); slow-convergence case
inline StateFixture fixture(const std::string& name,
                            const std::vector<double>& params = {}) {
    using namespace detail;
    const auto expect_params = [&](std::size_t n) {
        if (params.size() != n)
            throw InvalidArgumentError("fixture " + name + ": expected " +
                                       std::to_string(n) + " parameter(s), got " +
                                       std::to_string(params.size()));
    };
    if (name == "bell") {
        expect_params(0);
        return {name, bell_state(), {}};
    }
    if (name == "werner") {
        expect_params(0);
        Matrix4cd m = (2.0 / 3.0) * bell_state().matrix +
                      (1.0 / 3.0) * Matrix4cd::Identity() / 4.0;
        return {name, {m}, {}};
    }
    if (name == "mixed_identity") {
        expect_params(0);
        return {name, {Matrix4cd::Identity() / 4.0}, {}};
    }
    if (name == "rho_prime") {
        expect_params(1);
        const double p = params[0];
        require_unit_interval(name, "p", p);
        Matrix4cd m = bell_state().matrix;
        m += ((p - 1.0) / 2.0) * (ket_uu() * ket_dd().adjoint() +
                                  ket_dd() * ket_uu().adjoint());
        return {name, {m}, {p}};
    }
    if (name == "rho_eps_lambda") {
        expect_params(2);
        const double eps = params[0];
        const double lam = params[1];
        require_unit_interval(name, "eps", eps);
        require_unit_interval(name, "lambda", lam);
        const Eigen::Vector4cd phi =
            (eps * ket_uu() + ket_dd()) / std::sqrt(1.0 + eps * eps);
        Matrix4cd m = lam * projector(phi);
        m += ((1.0 - lam) / 2.0) * (projector(ket_ud()) + projector(ket_du()));
        return {name, {m}, {eps, lam}};
    }
    if (name == "asymptotic_fig2b") {
        expect_params(0);
        const Eigen::Vector4cd psi_p =
            (ket_du() + ket_ud()) / std::sqrt(2.0);
        const Eigen::Vector4cd psi_m =
            (ket_du() - ket_ud()) / std::sqrt(2.0);
        Matrix4cd m = 0.5 * projector(ket_uu()) + 0.4 * projector(psi_p) +
                      0.1 * projector(psi_m);
        return {name, {m}, {}};
    }
    throw InvalidArgumentError("unknown fixture: " + name);
}

// The six source states of the copy-budget study, in canonical order.
inline std::vector<StateFixture> budget_fixtures() {
    return {fixture("bell"),
            fixture("werner"),
            fixture("mixed_identity"),
            fixture("rho_prime", {0.6}),
            fixture("rho_eps_lambda", {0.9, 0.6}),
            fixture("rho_eps_lambda", {0.5, 0.8})};
}

// Display label including parameters, e.g. "rho_eps_lambda(0.5,0.8)".
inline std::string fixture_label(const StateFixture& f) {
    if (f.params.empty()) return f.name;
    std::string s = f.name + "(";
    for (std::size_t i = 0; i < f.params.size(); ++i) {
        if (i) s += ",";
        std::ostringstream os;
        os << f.params[i];
        s += os.str();
    }
    return s + ")";
}

}  // namespace qdistil
