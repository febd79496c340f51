#include "nsc/sysid.hpp"

#include "nsc/pipeline.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nsc;
using namespace nsc::sysid;

namespace {

lds::CostGen unit_costs(int dx, int du) {
    return lds::make_costs(lds::CostKind::kQuadratic, Mat::Identity(dx, dx),
                           Mat::Identity(du, du));
}

}  // namespace

TEST(Explore, SignInputsAtUnitScale) {
    const auto inst = lds::synth_stable_instance(3, 2, 2.0, 0.5, 1);
    const auto dist = lds::make_disturbance(lds::DisturbanceKind::kSinusoid, 3, 1.0, 1);
    const auto ex = explore(inst.sys, inst.cert.K, dist, 100, 7);
    ASSERT_EQ(ex.eta.size(), 101u);
    for (const auto& e : ex.eta)
        for (int c = 0; c < e.size(); ++c)
            ASSERT_TRUE(e(c) == 1.0 || e(c) == -1.0);
}

TEST(Explore, DeterministicGivenSeed) {
    const auto inst = lds::synth_stable_instance(3, 2, 2.0, 0.5, 2);
    const auto dist =
        lds::make_disturbance(lds::DisturbanceKind::kUniformBounded, 3, 1.0, 2);
    const auto a = explore(inst.sys, inst.cert.K, dist, 50, 11);
    const auto b = explore(inst.sys, inst.cert.K, dist, 50, 11);
    for (std::size_t t = 0; t < a.eta.size(); ++t) {
        ASSERT_EQ((a.eta[t] - b.eta[t]).norm(), 0.0);
        ASSERT_EQ((a.traj.x[t] - b.traj.x[t]).norm(), 0.0);
    }
}

TEST(Explore, CollapsedDynamicsExposeActuation) {
    // w = 0, K = 0, A = 0: x_{t+1} = B eta_t exactly
    const Mat b = test::random_mat(3, 3, 2);
    const lds::LinSystem sys(Mat::Zero(3, 3), b);
    const auto dist = lds::make_disturbance(lds::DisturbanceKind::kZero, 3, 0.0, 0);
    const auto ex = explore(sys, Mat::Zero(2, 3), dist, 40, 3);
    for (std::int64_t t = 0; t <= 40; ++t)
        ASSERT_EQ((ex.traj.x[t + 1] - b * ex.eta[t]).norm(), 0.0);
}

TEST(Explore, ScaleVariantUsesPlusMinusW) {
    const auto inst = lds::synth_stable_instance(2, 2, 2.0, 0.5, 4);
    const auto dist = lds::make_disturbance(lds::DisturbanceKind::kZero, 2, 0.0, 0);
    const double W = 3.0;
    const auto ex = explore(inst.sys, inst.cert.K, dist, 30, 5, W);
    for (const auto& e : ex.eta)
        for (int c = 0; c < e.size(); ++c) ASSERT_EQ(std::abs(e(c)), W);
}

TEST(EstimateMoments, ScalarControlExactActuationRecovery) {
    // d_u = 1, A' = 0 (A = BK compensated): with w = 0, N_0 = B exactly
    Mat b = test::random_mat(5, 3, 1);
    const lds::LinSystem sys(Mat::Zero(3, 3), b);
    const auto dist = lds::make_disturbance(lds::DisturbanceKind::kZero, 3, 0.0, 0);
    for (std::int64_t t0 : {5, 17, 64}) {
        const auto ex = explore(sys, Mat::Zero(1, 3), dist, t0, 6);
        const auto n = estimate_moments(ex.traj, ex.eta, 2, t0);
        EXPECT_LE((n[0] - b).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(EstimateMoments, CrossTermsShrinkWithHorizon) {
    Mat b = test::random_mat(7, 3, 1);
    const lds::LinSystem sys(Mat::Zero(3, 3), b);
    const auto dist = lds::make_disturbance(lds::DisturbanceKind::kZero, 3, 0.0, 0);
    auto mean_n1 = [&](std::int64_t t0) {
        double acc = 0.0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            const auto ex = explore(sys, Mat::Zero(1, 3), dist, t0, 100 + s);
            const auto n = estimate_moments(ex.traj, ex.eta, 2, t0);
            acc += spectral_norm(n[1]);  // true (A')^1 B = 0
        }
        return acc / 20.0;
    };
    const double small = mean_n1(64);
    const double large = mean_n1(4096);
    EXPECT_LT(large, 0.5 * small);
}

TEST(EstimateMoments, MatchesBruteForceSummation) {
    const auto inst = lds::synth_stable_instance(3, 2, 2.0, 0.5, 8);
    const auto dist =
        lds::make_disturbance(lds::DisturbanceKind::kSinusoid, 3, 1.0, 8, 30.0);
    const std::int64_t t0 = 200;
    const int k = 3;
    const auto ex = explore(inst.sys, inst.cert.K, dist, t0, 9);
    const auto n = estimate_moments(ex.traj, ex.eta, k, t0);
    for (int j = 0; j <= k; ++j) {
        Mat naive = Mat::Zero(3, 2);
        for (std::int64_t t = 0; t <= t0 - k - 1; ++t)
            naive += ex.traj.x[t + j + 1] * ex.eta[t].transpose();
        naive /= static_cast<double>(t0 - k);
        test::expect_mat_near(n[j], naive, 1e-12, "brute-force moment");
    }
}

TEST(EstimateMoments, FootnoteScalingNormalizes) {
    Mat b = test::random_mat(10, 2, 1);
    const lds::LinSystem sys(Mat::Zero(2, 2), b);
    const auto dist = lds::make_disturbance(lds::DisturbanceKind::kZero, 2, 0.0, 0);
    const double W = 2.5;
    const auto ex = explore(sys, Mat::Zero(1, 2), dist, 50, 11, W);
    const auto n = estimate_moments(ex.traj, ex.eta, 1, 50, W);
    EXPECT_LE((n[0] - b).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(EstimateMoments, RejectsShortHorizon) {
    const auto inst = lds::synth_stable_instance(2, 1, 2.0, 0.5, 12);
    const auto dist = lds::make_disturbance(lds::DisturbanceKind::kZero, 2, 0.0, 0);
    const auto ex = explore(inst.sys, inst.cert.K, dist, 3, 13);
    EXPECT_THROW(estimate_moments(ex.traj, ex.eta, 3, 3), ConfigError);
}

TEST(RecoverSystem, ExactMomentsReproduceTruth) {
    // acceptance-grade identity: feeding N_j = A'^j B recovers (A, B)
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto inst = lds::synth_stable_instance(3, 2, 2.0, 0.5, 10000 + s);
        const Mat ap = inst.sys.A - inst.sys.B * inst.cert.K;
        std::vector<Mat> n;
        for (int j = 0; j <= inst.ctrl_k; ++j)
            n.push_back(mat_power(ap, j) * inst.sys.B);
        const auto est = recover_system(n, inst.cert.K);
        const auto err = recovery_error(est, inst.sys);
        ASSERT_LE(err.eps_A, 1e-8) << "seed " << s;
        ASSERT_LE(err.eps_B, 1e-8) << "seed " << s;
    }
}

TEST(RecoverSystem, ZeroStabilizerKeepsAPrime) {
    const auto inst = lds::synth_stable_instance(3, 2, 2.0, 0.5, 14);
    std::vector<Mat> n;
    for (int j = 0; j <= 3; ++j) n.push_back(mat_power(inst.sys.A, j) * inst.sys.B);
    const auto est = recover_system(n, Mat::Zero(2, 3));
    test::expect_mat_near(est.A_hat, est.A_prime_hat, 0.0);
}

TEST(RecoverSystem, ZeroMomentsFailRankCheck) {
    std::vector<Mat> n(4, Mat::Zero(3, 2));
    try {
        recover_system(n, Mat::Zero(2, 3));
        FAIL() << "expected RankError";
    } catch (const RankError& e) {
        EXPECT_LT(e.sigma, kRankTol);
    }
}

TEST(RecoverSystem, EstimateLayoutInvariants) {
    const auto inst = lds::synth_stable_instance(3, 2, 2.0, 0.5, 15);
    const Mat ap = inst.sys.A - inst.sys.B * inst.cert.K;
    std::vector<Mat> n;
    for (int j = 0; j <= 3; ++j) n.push_back(mat_power(ap, j) * inst.sys.B);
    const auto est = recover_system(n, inst.cert.K);
    // C0 = [N_0..N_{k-1}], C1 = [N_1..N_k], A_hat = A'_hat + B_hat K
    test::expect_mat_near(est.C0.leftCols(2), n[0], 0.0);
    test::expect_mat_near(est.C1.rightCols(2), n[3], 0.0);
    test::expect_mat_near(est.A_hat, est.A_prime_hat + est.B_hat * inst.cert.K, 0.0);
}

TEST(EstimateDisturbance, ExactWithTrueSystem) {
    const auto inst = lds::synth_stable_instance(3, 2, 2.0, 0.5, 16);
    const Vec x = test::random_vec(20, 3);
    const Vec u = test::random_vec(21, 2);
    const Vec w = test::random_vec(22, 3);
    const Vec x_next = lds::step(inst.sys, x, u, w);
    const Vec w_hat = estimate_disturbance(x_next, x, u, inst.sys.A, inst.sys.B);
    EXPECT_LE((w_hat - w).norm(), 1e-13);
}

TEST(EstimateDisturbance, RestStateReturnsNextState) {
    const Mat a = test::random_mat(23, 2, 2);
    const Mat b = test::random_mat(24, 2, 1);
    const Vec x_next = test::random_vec(25, 2);
    test::expect_mat_near(
        estimate_disturbance(x_next, Vec::Zero(2), Vec::Zero(1), a, b), x_next, 0.0);
}

TEST(EstimateDisturbance, PerturbationEntersLinearly) {
    const auto inst = lds::synth_stable_instance(2, 1, 2.0, 0.5, 17);
    const Mat e = 0.01 * test::random_mat(26, 2, 2);
    const Vec x = test::random_vec(27, 2);
    const Vec u = test::random_vec(28, 1);
    const Vec w = test::random_vec(29, 2);
    const Vec x_next = lds::step(inst.sys, x, u, w);
    const Vec w_hat = estimate_disturbance(x_next, x, u, inst.sys.A + e, inst.sys.B);
    test::expect_mat_near(w_hat - w, -e * x, 1e-13, "w_hat - w = -E x");
}

TEST(RecoveryError, ZeroForTruthAndUnitForRankOneBump) {
    const auto inst = lds::synth_stable_instance(3, 2, 2.0, 0.5, 18);
    SysIdEstimate est;
    est.A_hat = inst.sys.A;
    est.B_hat = inst.sys.B;
    auto err = recovery_error(est, inst.sys);
    EXPECT_EQ(err.eps_A, 0.0);
    EXPECT_EQ(err.eps_B, 0.0);
    est.B_hat(0, 0) += 1.0;  // e1 e1^T bump has unit Frobenius norm
    err = recovery_error(est, inst.sys);
    EXPECT_NEAR(err.eps_B, 1.0, 1e-15);
}

TEST(RecoveryError, ScalesAsInverseSqrtT0) {
    // compact version of the scaling law: T0 over three octaves, 5 seeds
    const auto inst = lds::synth_stable_instance(3, 2, 2.0, 0.5, 19);
    const auto dist =
        lds::make_disturbance(lds::DisturbanceKind::kSinusoid, 3, 1.0, 19, 40.0);
    std::vector<double> t0s, errs;
    for (std::int64_t t0 : {1024, 4096, 16384}) {
        std::vector<double> eps;
        for (std::uint64_t s = 0; s < 5; ++s) {
            const auto ex = explore(inst.sys, inst.cert.K, dist, t0, 500 + s);
            const auto n = estimate_moments(ex.traj, ex.eta, 3, t0);
            const auto est = recover_system(n, inst.cert.K);
            eps.push_back(recovery_error(est, inst.sys).eps_A);
        }
        std::sort(eps.begin(), eps.end());
        t0s.push_back(static_cast<double>(t0));
        errs.push_back(eps[2]);
    }
    const double slope = nsc::pipeline::loglog_slope(t0s, errs);
    EXPECT_LT(slope, -0.25);
    EXPECT_GT(slope, -0.8);
}
