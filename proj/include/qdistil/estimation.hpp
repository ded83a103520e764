#pragma once

#include <optional>
#include <vector>

#include "qdistil/distill.hpp"
#include "qdistil/sampling.hpp"

namespace qdistil {

// Shot allocation: all shot counts are per-setting targets for the number of
// copies surviving both filters (counts are normalized by N, so the natural
// experimental unit is a surviving copy; injected copies are tallied
// separately and grow as 1/(N/M) for heavily filtered states).
struct ShotPlan {
    long long shots_per_gamma_setting = 400;
    long long shots_per_q_setting = 300;
    long long shots_per_lambda_setting = 1000;
    double distill_threshold = 0.1;
    double target_halfwidth = 0.01;

    void validate() const {
        if (shots_per_gamma_setting <= 0 || shots_per_q_setting <= 0 ||
            shots_per_lambda_setting <= 0)
            throw InvalidArgumentError("ShotPlan: shot counts must be positive");
        if (!(distill_threshold > 0) || !(target_halfwidth > 0))
            throw InvalidArgumentError(
                "ShotPlan: threshold and halfwidth must be positive");
    }
};

struct GammaEstimate {
    BlochVectord gamma = BlochVectord::Zero();
    Vector3d variance = Vector3d::Zero();
    long long injected = 0;
    long long surviving = 0;

    // Bias-corrected visibility estimate: subtracts the per-component
    // sampling variance from the squared norm before the root.
    double visibility() const {
        return std::sqrt(
            std::max(0.0, gamma.squaredNorm() - variance.sum()));
    }
};

// Invert the single-count law (1 + gamma.v)/2 at the three axis settings of
// one side; the partner's detector is parked at z and marginalized.
inline GammaEstimate estimate_gamma(const TwoQubitStated& state,
                                    const LocalOpd& op_a, const LocalOpd& op_b,
                                    Side side, long long shots_per_setting,
                                    Philox& rng) {
    if (shots_per_setting <= 0)
        throw InvalidArgumentError("estimate_gamma: shots must be positive");
    GammaEstimate est;
    const Vector3d axes[3] = {Vector3d::UnitX(), Vector3d::UnitY(),
                              Vector3d::UnitZ()};
    for (int i = 0; i < 3; ++i) {
        DetSettingd setting{Vector3d::UnitZ(), Vector3d::UnitZ()};
        (side == Side::A ? setting.v_a : setting.v_b) = axes[i];
        const ShotLedger led = sample_surviving(state, op_a, op_b, setting,
                                                shots_per_setting, rng);
        if (led.surviving == 0)
            throw EstimationError("estimate_gamma: all copies filtered");
        const long long hits = (side == Side::A)
                                   ? led.counts[0][0] + led.counts[0][1]
                                   : led.counts[0][0] + led.counts[1][0];
        const double p = static_cast<double>(hits) / led.surviving;
        est.gamma(i) = 2.0 * p - 1.0;
        est.variance(i) = 4.0 * p * (1.0 - p) / led.surviving;
        est.injected += led.injected;
        est.surviving += led.surviving;
    }
    return est;
}

struct NoisyStep {
    int turn = 0;
    Side side = Side::A;
    double visibility = 0;  // debiased norm of the measured gamma
    double f = 1, theta = 0, phi = 0;
    double check_v_a = 0, check_v_b = 0;  // post-erase check, debiased
    long long copies = 0;                 // injected during this turn + check
};

struct NoisyDistillResult {
    int iterations = 0;
    LocalOpd op_a, op_b;
    long long copies_distill = 0;
    double verification_v_a = 0, verification_v_b = 0;
    bool converged = false;
    std::vector<NoisyStep> history;
    ShotLedger verification_ledger;  // last both-sides check, pooled
};

// Number of erase turns the exact protocol needs before the measured
// visibility can be certified below `threshold`: the trajectory is iterated
// with a 2x safety margin so a noisy re-measurement at the stated threshold
// still passes.
inline int schedule_iterations(const TwoQubitStated& state, double threshold,
                               int max_iters = 200) {
    const auto exact = distill(state, threshold / 2.0, max_iters);
    if (exact.status == DistillStatus::NotDistillable)
        throw NotDistillableError("schedule_iterations: pure marginal");
    return exact.iterations;
}

// The alternating protocol with shot-estimated Bloch vectors.  Runs a fixed
// number of erase turns (derived from the exact trajectory unless the caller
// supplies a schedule, e.g. a reported iteration count being reproduced),
// re-checking both visibilities after every erase; the last check is the
// verification pass.  `converged` records whether both estimated
// visibilities ended below plan.distill_threshold.
inline NoisyDistillResult noisy_distill(
    const TwoQubitStated& state, const ShotPlan& plan, Philox& rng,
    std::optional<int> schedule = std::nullopt) {
    plan.validate();
    const int k = schedule ? *schedule
                           : schedule_iterations(state, plan.distill_threshold);
    if (k < 0) throw InvalidArgumentError("noisy_distill: negative schedule");

    NoisyDistillResult out;
    const LocalOpd id;
    Side side = Side::A;
    const auto check_both = [&](NoisyStep& step) {
        const GammaEstimate ca = estimate_gamma(
            state, out.op_a, out.op_b, Side::A,
            plan.shots_per_gamma_setting, rng);
        const GammaEstimate cb = estimate_gamma(
            state, out.op_a, out.op_b, Side::B,
            plan.shots_per_gamma_setting, rng);
        step.check_v_a = ca.visibility();
        step.check_v_b = cb.visibility();
        step.copies += ca.injected + cb.injected;
        out.verification_v_a = step.check_v_a;
        out.verification_v_b = step.check_v_b;
        out.verification_ledger = ShotLedger{};
        out.verification_ledger.injected = ca.injected + cb.injected;
        out.verification_ledger.surviving = ca.surviving + cb.surviving;
    };

    if (k == 0) {
        NoisyStep step;
        step.turn = 0;
        check_both(step);
        out.copies_distill = step.copies;
        out.history.push_back(step);
    } else {
        for (int turn = 1; turn <= k; ++turn) {
            NoisyStep step;
            step.turn = turn;
            step.side = side;
            const GammaEstimate est = estimate_gamma(
                state, side == Side::A ? id : out.op_a,
                side == Side::B ? id : out.op_b, side,
                plan.shots_per_gamma_setting, rng);
            step.copies += est.injected;
            step.visibility = est.visibility();
            BlochVectord g = est.gamma;
            if (g.norm() >= 0.999) {
                if (g.norm() >= 1.0)
                    throw NotDistillableError(
                        "noisy_distill: estimated marginal is pure");
                g *= (0.999 - 1e-12) / g.norm();
            }
            LocalOpd& mine = (side == Side::A) ? out.op_a : out.op_b;
            mine = erase_marginal(g);
            step.f = mine.f;
            step.theta = mine.theta;
            step.phi = mine.phi;
            ++out.iterations;
            check_both(step);
            out.history.push_back(step);
            out.copies_distill += step.copies;
            side = other_side(side);
        }
    }
    out.converged = out.verification_v_a < plan.distill_threshold &&
                    out.verification_v_b < plan.distill_threshold;
    return out;
}

struct ConcurrenceEstimate {
    double c = 0;        // clipped to [0, 1]
    double c_raw = 0;    // s0_hat * (1/2)(-1 + l1 + l2 - q l3), unclipped
    double stderr_ = 0;  // binomial error propagation
    double s0_hat = 0;
    Vector3d lambda_hat = Vector3d::Zero();
    double q_hat = 1;
    Matrix3d q_entries = Matrix3d::Zero();  // crude Q' estimate (stage 1)
    int k_dis = 0;
    long long copies_distill = 0;
    long long copies_quant = 0;
    bool distill_converged = false;
    double verification_v_a = 0, verification_v_b = 0;
    LocalOpd op_a, op_b;
};

namespace detail {

struct CovEstimate {
    double cov = 0;
    double variance = 0;  // of the covariance estimate
};

// Empirical covariance of the D1A/D1B indicators over the surviving copies,
// with its plug-in fourth-moment variance.
inline CovEstimate covariance_from(const ShotLedger& led) {
    const double n = static_cast<double>(led.surviving);
    if (n <= 1) throw EstimationError("covariance: too few surviving copies");
    const double n11 = static_cast<double>(led.counts[0][0]);
    const double n12 = static_cast<double>(led.counts[0][1]);
    const double n21 = static_cast<double>(led.counts[1][0]);
    const double n22 = static_cast<double>(led.counts[1][1]);
    const double pa = (n11 + n12) / n;
    const double pb = (n11 + n21) / n;
    CovEstimate out;
    out.cov = n11 / n - pa * pb;
    const double m4 =
        (n11 * (1 - pa) * (1 - pa) * (1 - pb) * (1 - pb) +
         n12 * (1 - pa) * (1 - pa) * pb * pb +
         n21 * pa * pa * (1 - pb) * (1 - pb) + n22 * pa * pa * pb * pb) /
        n;
    out.variance = std::max(0.0, m4 - out.cov * out.cov) / n;
    return out;
}

}  // namespace detail

// Full quantification run: distillation, nine axis-pair settings for a crude
// Q' estimate and its singular directions, three refined settings at the
// estimated extrema, survival bookkeeping, and the concurrence formula.
inline ConcurrenceEstimate estimate_concurrence(
    const TwoQubitStated& state, const ShotPlan& plan, Philox& rng,
    std::optional<int> schedule = std::nullopt) {
    plan.validate();
    const NoisyDistillResult nd = noisy_distill(state, plan, rng, schedule);

    ConcurrenceEstimate out;
    out.k_dis = nd.iterations;
    out.copies_distill = nd.copies_distill;
    out.distill_converged = nd.converged;
    out.verification_v_a = nd.verification_v_a;
    out.verification_v_b = nd.verification_v_b;
    out.op_a = nd.op_a;
    out.op_b = nd.op_b;

    const Vector3d axes[3] = {Vector3d::UnitX(), Vector3d::UnitY(),
                              Vector3d::UnitZ()};
    long long quant_injected = 0, quant_surviving = 0;

    // stage 1: crude Q' from the nine axis pairs
    for (int l = 0; l < 3; ++l)
        for (int lp = 0; lp < 3; ++lp) {
            const ShotLedger led =
                sample_surviving(state, nd.op_a, nd.op_b,
                                 {axes[l], axes[lp]},
                                 plan.shots_per_q_setting, rng);
            out.q_entries(l, lp) = 4.0 * detail::covariance_from(led).cov;
            quant_injected += led.injected;
            quant_surviving += led.surviving;
        }

    // stage 2: crude directions and sign factor
    const QDecompositiond dec = decompose_q(out.q_entries);
    out.q_hat = dec.q_sign;

    // stage 3: refined extrema at the estimated directions
    Vector3d lambda_var = Vector3d::Zero();
    for (int l = 0; l < 3; ++l) {
        const ShotLedger led = sample_surviving(
            state, nd.op_a, nd.op_b,
            {dec.vecs_a.col(l), dec.vecs_b.col(l)},
            plan.shots_per_lambda_setting, rng);
        const auto cov = detail::covariance_from(led);
        out.lambda_hat(l) = 4.0 * cov.cov;
        lambda_var(l) = 16.0 * cov.variance;
        quant_injected += led.injected;
        quant_surviving += led.surviving;
    }
    out.copies_quant = quant_injected;

    // stage 4: survival fraction pooled over every quantification setting
    const double nm =
        static_cast<double>(quant_surviving) / quant_injected;
    out.s0_hat = nm / (nd.op_a.f * nd.op_b.f);

    // stage 5: visibility-to-concurrence formula
    const double c_dis_raw =
        0.5 * (-1.0 + out.lambda_hat(0) + out.lambda_hat(1) -
               out.q_hat * out.lambda_hat(2));
    out.c_raw = out.s0_hat * c_dis_raw;
    out.c = std::clamp(out.c_raw, 0.0, 1.0);

    const double var_s0 = nm * (1.0 - nm) / quant_injected /
                          (nd.op_a.f * nd.op_b.f * nd.op_a.f * nd.op_b.f);
    const double var_c = out.s0_hat * out.s0_hat * 0.25 * lambda_var.sum() +
                         c_dis_raw * c_dis_raw * var_s0;
    out.stderr_ = std::sqrt(var_c);
    return out;
}

}  // namespace qdistil
