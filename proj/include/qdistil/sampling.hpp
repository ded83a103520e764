#pragma once

#include <array>
#include <random>

#include "qdistil/detection.hpp"
#include "qdistil/local_ops.hpp"
#include "qdistil/rng.hpp"

namespace qdistil {

// Copy-level tally for one beam-splitter setting.  Outcomes are indexed by
// detector: 0 -> D1, 1 -> D2, 2 -> D3 (filtered off).  N counts the copies
// ending in neither D3A nor D3B; all counts sum to M.
struct ShotLedger {
    long long injected = 0;   // M
    long long surviving = 0;  // N
    std::array<std::array<long long, 3>, 3> counts{};
    std::uint64_t stream = 0;

    long long count(int a, int b) const { return counts[a][b]; }

    void merge(const ShotLedger& o) {
        injected += o.injected;
        surviving += o.surviving;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) counts[a][b] += o.counts[a][b];
    }
};

// Exact 9-outcome joint distribution of one injected copy.  Per side the
// POVM is E1 = D^t P(v) D, E2 = D^t (1-P(v)) D, E3 = G^t G with D = F U the
// survival branch and G the filtered branch; P(a,b) = Tr[rho (E_a (x) E_b)].
template <typename Scalar>
std::array<std::array<Scalar, 3>, 3> outcome_probabilities(
    const TwoQubitState<Scalar>& state, const LocalOp<Scalar>& op_a,
    const LocalOp<Scalar>& op_b, const DetSetting<Scalar>& setting) {
    const Matrix4c<Scalar> rho = normalized(state).matrix;
    const auto povm = [](const LocalOp<Scalar>& op,
                         const Vector3r<Scalar>& v) {
        const Matrix2c<Scalar> d = op_matrix(op);
        const Matrix2c<Scalar> g = filtered_branch_matrix(op);
        const Matrix2c<Scalar> proj_up =
            (pauli<Scalar>(0) + v(0) * pauli<Scalar>(1) +
             v(1) * pauli<Scalar>(2) + v(2) * pauli<Scalar>(3)) /
            Scalar(2);
        std::array<Matrix2c<Scalar>, 3> e;
        e[0] = d.adjoint() * proj_up * d;
        e[1] = d.adjoint() * (pauli<Scalar>(0) - proj_up) * d;
        e[2] = g.adjoint() * g;
        return e;
    };
    const auto ea = povm(op_a, setting.v_a);
    const auto eb = povm(op_b, setting.v_b);
    std::array<std::array<Scalar, 3>, 3> p{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            p[a][b] =
                std::max(Scalar(0), (rho * kron2(ea[a], eb[b])).trace().real());
    return p;
}

namespace detail {

// Multinomial draw by sequential conditional binomials.
template <std::size_t N>
std::array<long long, N> multinomial(long long n,
                                     const std::array<double, N>& p,
                                     Philox& rng) {
    std::array<long long, N> out{};
    double rest = 0;
    for (double x : p) rest += x;
    long long remaining = n;
    for (std::size_t i = 0; i + 1 < N && remaining > 0; ++i) {
        if (rest <= 0) break;
        const double q = std::min(1.0, std::max(0.0, p[i] / rest));
        std::binomial_distribution<long long> bin(remaining, q);
        out[i] = bin(rng);
        remaining -= out[i];
        rest -= p[i];
    }
    out[N - 1] = remaining;
    return out;
}

}  // namespace detail

// Draw n_copies i.i.d. copies through the detector model (fixed injection
// count).  Deterministic for a given rng state.
inline ShotLedger sample_copies(const TwoQubitStated& state,
                                const LocalOpd& op_a, const LocalOpd& op_b,
                                const DetSettingd& setting, long long n_copies,
                                Philox& rng) {
    if (n_copies <= 0)
        throw InvalidArgumentError("sample_copies: n_copies must be positive");
    const auto p = outcome_probabilities(state, op_a, op_b, setting);
    std::array<double, 9> flat{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) flat[3 * a + b] = p[a][b];
    const auto draws = detail::multinomial(n_copies, flat, rng);
    ShotLedger ledger;
    ledger.stream = rng.stream();
    ledger.injected = n_copies;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            ledger.counts[a][b] = draws[3 * a + b];
            if (a != 2 && b != 2) ledger.surviving += draws[3 * a + b];
        }
    return ledger;
}

// Inject copies until n_surviving of them end in neither D3A nor D3B (the
// natural fixed-statistics design for N-normalized counts).  The injection
// count M is drawn from the matching negative-binomial law.
inline ShotLedger sample_surviving(const TwoQubitStated& state,
                                   const LocalOpd& op_a, const LocalOpd& op_b,
                                   const DetSettingd& setting,
                                   long long n_surviving, Philox& rng) {
    if (n_surviving <= 0)
        throw InvalidArgumentError(
            "sample_surviving: n_surviving must be positive");
    const auto p = outcome_probabilities(state, op_a, op_b, setting);
    double p_surv = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) p_surv += p[a][b];
    if (p_surv < 1e-9)
        throw EstimationError(
            "sample_surviving: essentially all copies are filtered off");

    ShotLedger ledger;
    ledger.stream = rng.stream();
    ledger.surviving = n_surviving;
    long long filtered = 0;
    if (p_surv < 1.0 - 1e-15) {
        std::negative_binomial_distribution<long long> nb(n_surviving, p_surv);
        filtered = nb(rng);
    }
    ledger.injected = n_surviving + filtered;

    std::array<double, 4> ps{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) ps[2 * a + b] = p[a][b] / p_surv;
    const auto sdraw = detail::multinomial(n_surviving, ps, rng);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) ledger.counts[a][b] = sdraw[2 * a + b];

    if (filtered > 0) {
        const double p_filt = std::max(1e-300, 1.0 - p_surv);
        std::array<double, 5> pf = {p[0][2] / p_filt, p[1][2] / p_filt,
                                    p[2][0] / p_filt, p[2][1] / p_filt,
                                    p[2][2] / p_filt};
        const auto fdraw = detail::multinomial(filtered, pf, rng);
        ledger.counts[0][2] = fdraw[0];
        ledger.counts[1][2] = fdraw[1];
        ledger.counts[2][0] = fdraw[2];
        ledger.counts[2][1] = fdraw[3];
        ledger.counts[2][2] = fdraw[4];
    }
    return ledger;
}

}  // namespace qdistil
