#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qdistil/budget.hpp"
#include "qdistil/concurrence.hpp"
#include "qdistil/estimation.hpp"
#include "qdistil/fixtures.hpp"
#include "qdistil/random_states.hpp"
#include "qdistil/reference.hpp"
#include "qdistil/sampling.hpp"

using namespace qdistil;

TEST_CASE("philox known-answer vectors") {
    // Published test vectors for Philox4x32-10.
    const auto zeros = Philox::round10({0, 0, 0, 0}, {0, 0});
    CHECK(zeros[0] == 0x6627e8d5u);
    CHECK(zeros[1] == 0xe169c58du);
    CHECK(zeros[2] == 0xbc57ac4cu);
    CHECK(zeros[3] == 0x9b00dbd8u);

    const auto ones = Philox::round10(
        {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
        {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    const auto pi = Philox::round10(
        {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
        {0xa4093822u, 0x299f31d0u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("philox streams are reproducible and distinct") {
    Philox a(99, 5), b(99, 5), c(99, 6);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    bool differs = false;
    Philox a2(99, 5);
    for (int i = 0; i < 100; ++i) differs |= (a2() != c());
    CHECK(differs);

    Philox u(1, 0);
    double mean = 0;
    for (int i = 0; i < 100000; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        mean += x;
    }
    CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("ledger invariants hold for random sampling runs") {
    Philox rng(321, 0);
    for (int i = 0; i < 20; ++i) {
        const auto s = random_state(4000 + i, 1 + i % 4);
        const LocalOpd a{0.3 + 0.7 * rng.uniform(), rng.uniform() * M_PI, 0.7};
        const LocalOpd b{0.3 + 0.7 * rng.uniform(), rng.uniform() * M_PI, 2.2};
        const DetSettingd st{Vector3d::UnitX(), Vector3d::UnitZ()};

        const auto probs = outcome_probabilities(s, a, b, st);
        double total = 0;
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) total += probs[x][y];
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

        const ShotLedger lm = sample_copies(s, a, b, st, 5000, rng);
        long long sum = 0, surv = 0;
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) {
                sum += lm.counts[x][y];
                if (x != 2 && y != 2) surv += lm.counts[x][y];
            }
        CHECK(sum == lm.injected);
        CHECK(surv == lm.surviving);
        CHECK(lm.injected == 5000);

        const ShotLedger ln = sample_surviving(s, a, b, st, 3000, rng);
        CHECK(ln.surviving == 3000);
        long long sum2 = 0, surv2 = 0;
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) {
                sum2 += ln.counts[x][y];
                if (x != 2 && y != 2) surv2 += ln.counts[x][y];
            }
        CHECK(sum2 == ln.injected);
        CHECK(surv2 == 3000);
    }
}

TEST_CASE("ledger merging is associative and commutative") {
    Philox rng(11, 4);
    const auto s = fixture("rho_eps_lambda", {0.5, 0.8}).state;
    const DetSettingd st{Vector3d::UnitX(), Vector3d::UnitZ()};
    const LocalOpd fa{0.7, 0.3, 0.1};
    const auto a = sample_copies(s, fa, LocalOpd{}, st, 4000, rng);
    const auto b = sample_copies(s, fa, LocalOpd{}, st, 6000, rng);
    const auto c = sample_copies(s, fa, LocalOpd{}, st, 2000, rng);
    ShotLedger ab = a;
    ab.merge(b);
    ShotLedger ba = b;
    ba.merge(a);
    CHECK(ab.injected == ba.injected);
    CHECK(ab.surviving == ba.surviving);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) CHECK(ab.counts[x][y] == ba.counts[x][y]);
    ShotLedger abc1 = ab;
    abc1.merge(c);
    ShotLedger bc = b;
    bc.merge(c);
    ShotLedger abc2 = a;
    abc2.merge(bc);
    CHECK(abc1.injected == abc2.injected);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            CHECK(abc1.counts[x][y] == abc2.counts[x][y]);
}

TEST_CASE("extrema of physical states never exceed one") {
    for (int i = 0; i < 60; ++i) {
        const auto s = random_state(7777 + i, 1 + i % 4);
        const auto dec = decompose_q(q_matrix(s));
        CHECK(dec.lambdas(0) <= 1.0 + 1e-10);
    }
}

TEST_CASE("sampling matches the exact distribution (chi-square)") {
    Philox rng(17, 3);
    const auto s = fixture("rho_eps_lambda", {0.5, 0.8}).state;
    const LocalOpd a{0.8, 0.4, 1.0};
    const LocalOpd b{0.9, 1.1, 0.2};
    const DetSettingd st{unit_from_angles(1.0, 0.5), unit_from_angles(2.0, 4.0)};
    const auto p = outcome_probabilities(s, a, b, st);
    const long long n = 200000;
    const auto led = sample_copies(s, a, b, st, n, rng);
    double chi2 = 0;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
            const double expect = p[x][y] * n;
            if (expect < 1e-9) {
                CHECK(led.counts[x][y] == 0);
                continue;
            }
            const double d = led.counts[x][y] - expect;
            chi2 += d * d / expect;
        }
    CHECK(chi2 < 27.9);  // chi-square(8) far tail
}

TEST_CASE("bell coincidences at aligned settings") {
    Philox rng(5, 0);
    const DetSettingd zz{Vector3d::UnitZ(), Vector3d::UnitZ()};
    const auto led = sample_copies(fixture("bell").state, LocalOpd{},
                                   LocalOpd{}, zz, 1000000, rng);
    const double p11 = static_cast<double>(led.counts[0][0]) / led.injected;
    CHECK(p11 == doctest::Approx(0.5).epsilon(0.004));
    CHECK(led.counts[0][1] == 0);  // perfectly correlated
    CHECK(led.counts[1][0] == 0);
    CHECK(led.surviving == led.injected);
}

TEST_CASE("half of I/4 survives an f=0 filter") {
    Philox rng(6, 0);
    const DetSettingd zz{Vector3d::UnitZ(), Vector3d::UnitZ()};
    const auto led = sample_copies(fixture("mixed_identity").state,
                                   LocalOpd{0.0, 0.0, 0.0}, LocalOpd{}, zz,
                                   100000, rng);
    CHECK(static_cast<double>(led.surviving) / led.injected ==
          doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("sampling is deterministic per seed and stream") {
    const auto s = fixture("werner").state;
    const DetSettingd st{Vector3d::UnitX(), Vector3d::UnitY()};
    Philox r1(1234, 7), r2(1234, 7);
    const auto a = sample_surviving(s, LocalOpd{}, LocalOpd{}, st, 5000, r1);
    const auto b = sample_surviving(s, LocalOpd{}, LocalOpd{}, st, 5000, r2);
    CHECK(a.injected == b.injected);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) CHECK(a.counts[x][y] == b.counts[x][y]);
}

TEST_CASE("fully filtered configurations raise") {
    Matrix2cd up = Matrix2cd::Zero();
    up(0, 0) = 1.0;
    const TwoQubitStated s{kron2(up, up)};
    // half-turn sends |up> to the lower path, f=0 discards it
    const LocalOpd kill{0.0, M_PI, 0.0};
    Philox rng(9, 0);
    const DetSettingd zz{Vector3d::UnitZ(), Vector3d::UnitZ()};
    CHECK_THROWS_AS(
        sample_surviving(s, kill, LocalOpd{}, zz, 100, rng),
        EstimationError);
}

TEST_CASE("estimate_gamma recovers known marginals") {
    Philox rng(21, 0);
    const auto id4 = fixture("mixed_identity").state;
    const auto e0 =
        estimate_gamma(id4, LocalOpd{}, LocalOpd{}, Side::A, 100000, rng);
    CHECK(e0.gamma.norm() < 0.02);

    Matrix2cd up = Matrix2cd::Zero();
    up(0, 0) = 1.0;
    const Matrix2cd mixed = single_qubit_density(BlochVectord(0.2, 0.1, 0.3));
    const TwoQubitStated upmix{kron2(up, mixed)};
    const auto e1 =
        estimate_gamma(upmix, LocalOpd{}, LocalOpd{}, Side::A, 50000, rng);
    CHECK(e1.gamma(2) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(e1.gamma(0)) < 0.02);

    const auto f2a = fixture("rho_eps_lambda", {0.5, 0.8}).state;
    const auto exact = marginal(f2a, Side::A);
    const auto e2 =
        estimate_gamma(f2a, LocalOpd{}, LocalOpd{}, Side::A, 20000, rng);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(e2.gamma(i) - exact(i)) <
              3.0 * std::sqrt(e2.variance(i)) + 1e-12);
}

TEST_CASE("noisy_distill copy accounting per schedule") {
    ShotPlan plan;  // gamma shots 400
    // no iterations: the check costs exactly 2 x 3 x 400 unfiltered copies
    for (const char* name : {"bell", "werner", "mixed_identity"}) {
        Philox rng(31, 0);
        const auto nd = noisy_distill(fixture(name).state, plan, rng, 0);
        CHECK(nd.iterations == 0);
        CHECK(nd.copies_distill == 2400);
        CHECK(nd.converged);
        CHECK(nd.op_a.is_identity());
        CHECK(nd.op_b.is_identity());
    }

    // one erase: reported cost 7200, reproduced within a factor of 2
    {
        Philox rng(31, 2);
        const auto nd = noisy_distill(
            fixture("rho_eps_lambda", {0.9, 0.6}).state, plan, rng, 1);
        CHECK(nd.iterations == 1);
        CHECK(nd.copies_distill >= 3600);
        CHECK(nd.copies_distill <= 14400);
        CHECK_FALSE(nd.op_a.is_identity());
        CHECK(nd.op_b.is_identity());
    }

    // five erases: reported cost 40800, reproduced within a factor of 2
    {
        Philox rng(31, 3);
        const auto nd = noisy_distill(
            fixture("rho_eps_lambda", {0.5, 0.8}).state, plan, rng, 5);
        CHECK(nd.iterations == 5);
        CHECK(nd.copies_distill >= 20400);
        CHECK(nd.copies_distill <= 81600);
    }
}

TEST_CASE("schedule derivation from the exact trajectory") {
    CHECK(schedule_iterations(fixture("bell").state, 0.1) == 0);
    CHECK(schedule_iterations(fixture("werner").state, 0.1) == 0);
    CHECK(schedule_iterations(fixture("rho_prime", {0.6}).state, 0.1) == 0);
    // with the 2x margin the 0.063-marginal state needs erasing
    CHECK(schedule_iterations(fixture("rho_eps_lambda", {0.9, 0.6}).state,
                              0.1) >= 1);
    CHECK(schedule_iterations(fixture("rho_eps_lambda", {0.5, 0.8}).state,
                              0.1) >= 3);
}

TEST_CASE("estimate_concurrence on the benchmark plans") {
    // bell with the reported plan: 9x100 + 3x200
    {
        ShotPlan plan;
        plan.shots_per_q_setting = 100;
        plan.shots_per_lambda_setting = 200;
        Philox rng(77, 0);
        const auto est =
            estimate_concurrence(fixture("bell").state, plan, rng, 0);
        CHECK(est.c == doctest::Approx(1.0).epsilon(0.03));
        CHECK(est.copies_quant == 9 * 100 + 3 * 200);
        CHECK(est.s0_hat == doctest::Approx(1.0));
    }
    // werner with the reported plan: 9x500 + 3x4000
    {
        ShotPlan plan;
        plan.shots_per_q_setting = 500;
        plan.shots_per_lambda_setting = 4000;
        Philox rng(77, 1);
        const auto est =
            estimate_concurrence(fixture("werner").state, plan, rng, 0);
        CHECK(std::abs(est.c - 0.5) < 0.03);
        CHECK(est.stderr_ < 0.02);
        CHECK(est.q_hat == doctest::Approx(-1.0));
    }
    // I/4: the max(0, .) clip is active
    {
        ShotPlan plan;
        plan.shots_per_q_setting = 100;
        plan.shots_per_lambda_setting = 7800;
        Philox rng(77, 2);
        const auto est = estimate_concurrence(fixture("mixed_identity").state,
                                              plan, rng, 0);
        CHECK(est.c_raw < 0.0);  // the raw linear form sits near -1/2
        CHECK(est.c == 0.0);
        CHECK(est.stderr_ == doctest::Approx(0.011).epsilon(0.4));
    }
}

TEST_CASE("estimator converges to the exact value with many shots") {
    ShotPlan plan;
    plan.shots_per_gamma_setting = 1000000;
    plan.shots_per_q_setting = 1000000;
    plan.shots_per_lambda_setting = 1000000;
    int idx = 0;
    for (const auto& f : budget_fixtures()) {
        const auto ref = reference_for(fixture_label(f));
        Philox rng(88, 10 + idx++);
        const auto est = estimate_concurrence(f.state, plan, rng, ref->k_dis);
        CHECK(std::abs(est.c - wootters_concurrence(f.state)) < 0.005);
    }
}

TEST_CASE("shot plans are validated") {
    ShotPlan bad;
    bad.shots_per_q_setting = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgumentError);
    ShotPlan neg;
    neg.distill_threshold = -1;
    CHECK_THROWS_AS(neg.validate(), InvalidArgumentError);
    Philox rng(1, 1);
    CHECK_THROWS_AS(
        estimate_concurrence(fixture("bell").state, bad, rng, 0),
        InvalidArgumentError);
}

TEST_CASE("search totals are consistent across replication counts") {
    const auto r30 =
        min_copies_search(fixture("werner").state, 0.01, 7, 30, 0);
    const auto r100 =
        min_copies_search(fixture("werner").state, 0.01, 7, 100, 0);
    CHECK_FALSE(r30.capped);
    CHECK_FALSE(r100.capped);
    // same grid, so totals agree up to a couple of sqrt(2) notches
    CHECK(r100.total <= r30.total * 2);
    CHECK(r30.total <= r100.total * 2);
}

TEST_CASE("survival fraction estimates match the protocol") {
    // unfiltered states: N = M exactly
    {
        ShotPlan plan;
        Philox rng(90, 0);
        const auto est =
            estimate_concurrence(fixture("werner").state, plan, rng, 0);
        CHECK(est.s0_hat == doctest::Approx(1.0));
    }
    // filtered states: exact-op sampling within 3 binomial sigma of truth
    {
        const auto f = fixture("rho_eps_lambda", {0.5, 0.8});
        const auto exact = distill(f.state, 1e-8, 200);
        Philox rng(90, 1);
        const DetSettingd zz{Vector3d::UnitZ(), Vector3d::UnitZ()};
        const auto led = sample_copies(f.state, exact.op_a, exact.op_b, zz,
                                       50000, rng);
        const double nm = static_cast<double>(led.surviving) / led.injected;
        const double truth = exact.survival;
        CHECK(std::abs(nm - truth) <
              3.0 * std::sqrt(truth * (1 - truth) / led.injected));
    }
}

TEST_CASE("estimate_concurrence is deterministic per seed") {
    ShotPlan plan;
    Philox r1(4242, 9), r2(4242, 9);
    const auto a = estimate_concurrence(
        fixture("rho_eps_lambda", {0.5, 0.8}).state, plan, r1, 5);
    const auto b = estimate_concurrence(
        fixture("rho_eps_lambda", {0.5, 0.8}).state, plan, r2, 5);
    CHECK(a.c == b.c);
    CHECK(a.c_raw == b.c_raw);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(a.copies_distill == b.copies_distill);
    CHECK(a.copies_quant == b.copies_quant);
}

TEST_CASE("crude extremum directions suffice") {
    // rotating all six direction estimates by 0.05 rad changes C by < 0.01
    const auto bell = fixture("bell").state;
    const auto dec = decompose_q(q_matrix(bell));
    Philox rng(91, 0);
    const auto rotate = [&rng](const Vector3d& v, double angle) {
        Vector3d axis;
        do {
            for (int i = 0; i < 3; ++i) axis(i) = 2 * rng.uniform() - 1;
            axis = axis.cross(v);
        } while (axis.norm() < 1e-6);
        axis.normalize();
        return (std::cos(angle) * v + std::sin(angle) * axis.cross(v) +
                (1 - std::cos(angle)) * axis.dot(v) * axis)
            .normalized();
    };
    Vector3d lam;
    for (int l = 0; l < 3; ++l) {
        const Vector3d va = rotate(dec.vecs_a.col(l), 0.05);
        const Vector3d vb = rotate(dec.vecs_b.col(l), 0.05);
        lam(l) = 4.0 * cross_correlation(bell, DetSettingd{va, vb});
    }
    const double c = std::max(
        0.0, 0.5 * (-1.0 + lam(0) + lam(1) - dec.q_sign * lam(2)));
    CHECK(std::abs(c - 1.0) < 0.01);
}

TEST_CASE("min_copies_search finds a plan near the reported budget") {
    // Werner: reported minimum 18900 copies
    const auto res =
        min_copies_search(fixture("werner").state, 0.01, 7, 30, 0);
    CHECK_FALSE(res.capped);
    CHECK(res.c_std_raw <= 0.01);
    CHECK(res.total >= 18900 / 2);
    CHECK(res.total <= 18900 * 2);
    CHECK(std::abs(res.c_mean - 0.5) < 0.02);
}

TEST_CASE("min_copies_search respects the budget cap") {
    const auto res = min_copies_search(fixture("mixed_identity").state, 1e-5,
                                       7, 10, 0, /*budget_cap=*/20000);
    CHECK(res.capped);
}
