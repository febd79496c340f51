#include "nsc/lds.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nsc;
using namespace nsc::lds;

namespace {

LinSystem shift_system() {
    Mat a = Mat::Zero(2, 2);
    a(0, 1) = 1.0;
    return LinSystem(a, Mat::Identity(2, 2));
}

}  // namespace

TEST(Step, DirectArithmetic) {
    const LinSystem sys = shift_system();
    Vec x(2), u(2), w(2);
    x << 1, 2;
    u << 0, 0;
    w << 0.1, -0.1;
    const Vec next = step(sys, x, u, w);
    EXPECT_NEAR(next(0), 2.1, 1e-15);
    EXPECT_NEAR(next(1), -0.1, 1e-15);
}

TEST(Step, ZeroDynamicsPassThrough) {
    const LinSystem sys(Mat::Zero(2, 2), Mat::Identity(2, 2));
    const Vec x = test::random_vec(1, 2);
    const Vec u = test::random_vec(2, 2);
    const Vec w = test::random_vec(3, 2);
    test::expect_mat_near(step(sys, x, u, w), u + w, 1e-15);
}

TEST(Step, IdentityKeepsState) {
    const LinSystem sys(Mat::Identity(2, 2), Mat::Zero(2, 1));
    const Vec x = test::random_vec(4, 2);
    test::expect_mat_near(step(sys, x, Vec::Zero(1), Vec::Zero(2)), x, 0.0);
}

TEST(Step, ShapeMismatchThrows) {
    const LinSystem sys = shift_system();
    EXPECT_THROW(step(sys, Vec::Zero(3), Vec::Zero(2), Vec::Zero(2)), ShapeError);
    EXPECT_THROW(step(sys, Vec::Zero(2), Vec::Zero(1), Vec::Zero(2)), ShapeError);
}

TEST(Disturbance, KindsRespectBound) {
    const double W = 1.0;
    for (auto kind : {DisturbanceKind::kZero, DisturbanceKind::kConstant,
                      DisturbanceKind::kSinusoid, DisturbanceKind::kUniformBounded,
                      DisturbanceKind::kRademacherScaled,
                      DisturbanceKind::kGaussianClipped}) {
        const auto gen = make_disturbance(kind, 3, W, 77, 20.0);
        for (std::int64_t t = 0; t < 500; ++t)
            ASSERT_LE(gen.at(t).norm(), W + 1e-12) << static_cast<int>(kind);
    }
}

TEST(Disturbance, SinusoidBoundOverLongHorizon) {
    const auto gen = make_disturbance(DisturbanceKind::kSinusoid, 3, 1.0, 5, 20.0);
    for (std::int64_t t = 0; t < 10000; t += 7)
        ASSERT_LE(gen.at(t).norm(), 1.0 + 1e-12);
}

TEST(Disturbance, ZeroKindIsZero) {
    const auto gen = make_disturbance(DisturbanceKind::kZero, 2, 1.0, 1);
    for (std::int64_t t = 0; t < 10; ++t)
        EXPECT_EQ(gen.at(t).norm(), 0.0);
}

TEST(Disturbance, ObliviousToConsumptionOrder) {
    const auto gen = make_disturbance(DisturbanceKind::kUniformBounded, 3, 1.0, 9);
    const Vec w5_direct = gen.at(5);
    const auto gen2 = make_disturbance(DisturbanceKind::kUniformBounded, 3, 1.0, 9);
    for (std::int64_t t = 0; t < 5; ++t) (void)gen2.at(t);
    test::expect_mat_near(gen2.at(5), w5_direct, 0.0, "oblivious generator");
}

TEST(Disturbance, RejectsNegativeBound) {
    EXPECT_THROW(make_disturbance(DisturbanceKind::kZero, 2, -1.0, 0), ConfigError);
}

TEST(Costs, QuadraticIdentityGradientBound) {
    // Q = R = I gives grad (2x, 2u), so G = 2 under the blockwise norm
    const auto costs =
        make_costs(CostKind::kQuadratic, Mat::Identity(3, 3), Mat::Identity(2, 2));
    EXPECT_NEAR(costs.G, 2.0, 1e-12);
    const Vec x = test::random_vec(10, 3);
    const Vec u = test::random_vec(11, 2);
    test::expect_mat_near(costs.grad_x(0, x, u), 2.0 * x, 1e-15);
    test::expect_mat_near(costs.grad_u(0, x, u), 2.0 * u, 1e-15);
    EXPECT_TRUE(gradient_bound_ok(costs, 5, 200));
}

TEST(Costs, TimeVaryingStaysConvexAndBounded) {
    lds::CostParams p;
    p.mod_amp = 0.5;
    p.mod_period = 50.0;
    const auto costs = make_costs(CostKind::kTimeVaryingQuadratic,
                                  Mat::Identity(2, 2), Mat::Identity(2, 2), p);
    for (std::int64_t t = 0; t < 200; ++t) EXPECT_GT(costs.scale_at(t), 0.0);
    EXPECT_TRUE(gradient_bound_ok(costs, 6, 200));
}

TEST(Costs, LinearPlusQuadraticGradient) {
    lds::CostParams p;
    p.q = Vec::Ones(2);
    p.r = -0.5 * Vec::Ones(1);
    const auto costs = make_costs(CostKind::kLinearPlusQuadratic,
                                  Mat::Identity(2, 2), Mat::Identity(1, 1), p);
    const Vec x = test::random_vec(12, 2);
    const Vec u = test::random_vec(13, 1);
    test::expect_mat_near(costs.grad_x(0, x, u), 2.0 * x + p.q, 1e-15);
    test::expect_mat_near(costs.grad_u(0, x, u), 2.0 * u + p.r, 1e-15);
    EXPECT_TRUE(gradient_bound_ok(costs, 7, 200));
}

TEST(Costs, RejectsNonPsd) {
    Mat bad = Mat::Identity(2, 2);
    bad(0, 0) = -1.0;
    EXPECT_THROW(make_costs(CostKind::kQuadratic, bad, Mat::Identity(2, 2)),
                 ConfigError);
    Mat asym = Mat::Identity(2, 2);
    asym(0, 1) = 0.5;
    EXPECT_THROW(make_costs(CostKind::kQuadratic, asym, Mat::Identity(2, 2)),
                 ConfigError);
}

TEST(Rollout, StableFeedbackZeroDisturbanceStaysAtZero) {
    const auto inst = synth_stable_instance(3, 2, 2.0, 0.5, 21);
    const auto dist = make_disturbance(DisturbanceKind::kZero, 3, 0.0, 0);
    const auto costs =
        make_costs(CostKind::kQuadratic, Mat::Identity(3, 3), Mat::Identity(2, 2));
    const Mat k = inst.cert.K;
    const auto traj = rollout(
        inst.sys, [&k](std::int64_t, const Vec& x) { return Vec(-k * x); }, dist,
        costs, 50);
    EXPECT_EQ(traj.total_cost(), 0.0);
    for (const auto& x : traj.x) EXPECT_EQ(x.norm(), 0.0);
}

TEST(Rollout, ConstantDisturbanceWithZeroDynamics) {
    const LinSystem sys(Mat::Zero(2, 2), Mat::Identity(2, 2));
    const auto dist = make_disturbance(DisturbanceKind::kConstant, 2, 0.7, 3);
    const auto costs =
        make_costs(CostKind::kQuadratic, Mat::Identity(2, 2), Mat::Identity(2, 2));
    const auto traj = rollout(
        sys, [](std::int64_t, const Vec&) { return Vec(Vec::Zero(2)); }, dist,
        costs, 10);
    const Vec c = dist.at(0);
    for (std::int64_t t = 1; t <= 10; ++t)
        test::expect_mat_near(traj.x[t], c, 0.0, "x_t = c for t >= 1");
}

TEST(Rollout, TotalCostMatchesStepwiseReplay) {
    const auto inst = synth_stable_instance(3, 2, 2.0, 0.4, 31);
    const auto dist = make_disturbance(DisturbanceKind::kSinusoid, 3, 1.0, 31, 25.0);
    const auto costs =
        make_costs(CostKind::kQuadratic, Mat::Identity(3, 3), Mat::Identity(2, 2));
    const Mat k = inst.cert.K;
    const auto traj = rollout(
        inst.sys, [&k](std::int64_t, const Vec& x) { return Vec(-k * x); }, dist,
        costs, 200);
    // independent step-by-step recomputation
    double total = 0.0;
    Vec x = Vec::Zero(3);
    for (std::int64_t t = 0; t < 200; ++t) {
        const Vec u = -k * x;
        total += costs.at(t, x, u);
        x = inst.sys.A * x + inst.sys.B * u + dist.at(t);
    }
    EXPECT_NEAR(traj.total_cost(), total, 1e-12 * std::max(1.0, std::abs(total)));
    EXPECT_TRUE(replay_ok(traj, inst.sys));
}

TEST(Rollout, ControllerDimensionMismatchThrows) {
    const LinSystem sys(Mat::Zero(2, 2), Mat::Identity(2, 2));
    const auto dist = make_disturbance(DisturbanceKind::kZero, 2, 0.0, 0);
    const auto costs =
        make_costs(CostKind::kQuadratic, Mat::Identity(2, 2), Mat::Identity(2, 2));
    EXPECT_THROW(rollout(
                     sys, [](std::int64_t, const Vec&) { return Vec(Vec::Zero(3)); },
                     dist, costs, 5),
                 ShapeError);
}

TEST(UnrolledState, ZeroInputsGiveZero) {
    const Mat ap = 0.5 * Mat::Identity(2, 2);
    const std::vector<Vec> zeros(10, Vec::Zero(2));
    EXPECT_EQ(unrolled_state(ap, Mat::Identity(2, 2), zeros, zeros, 9).norm(), 0.0);
}

TEST(UnrolledState, ZeroTransitionKeepsLastTerm) {
    const Mat ap = Mat::Zero(2, 2);
    const Mat b = test::random_mat(41, 2, 2);
    std::vector<Vec> w, ut;
    for (int i = 0; i < 6; ++i) {
        w.push_back(test::random_vec(100 + i, 2));
        ut.push_back(test::random_vec(200 + i, 2));
    }
    test::expect_mat_near(unrolled_state(ap, b, w, ut, 5), w[5] + b * ut[5], 1e-14);
}

TEST(UnrolledState, MatchesRolloutOnRandomStableInstances) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto inst = synth_stable_instance(3, 2, 2.0, 0.4, 1000 + s);
        const auto dist =
            make_disturbance(DisturbanceKind::kUniformBounded, 3, 1.0, s);
        CounterRng urng(s, Stream::kVerify, 77);
        std::vector<Vec> u_tilde;
        for (int t = 0; t <= 50; ++t) u_tilde.push_back(urng.gaussian_vec(2, t));

        const Mat k = inst.cert.K;
        Vec x = Vec::Zero(3);
        std::vector<Vec> w_seq;
        std::vector<Vec> states{x};
        for (int t = 0; t <= 50; ++t) {
            const Vec u = -k * x + u_tilde[t];
            w_seq.push_back(dist.at(t));
            x = step(inst.sys, x, u, w_seq.back());
            states.push_back(x);
        }
        const Mat ap = inst.sys.A - inst.sys.B * k;
        for (int t : {0, 10, 25, 50}) {
            const Vec direct = unrolled_state(ap, inst.sys.B, w_seq, u_tilde, t);
            const double scale = std::max(1.0, states[t + 1].norm());
            ASSERT_LE((direct - states[t + 1]).norm() / scale, 1e-9)
                << "instance " << s << " t=" << t;
        }
    }
}

TEST(SynthInstance, ScalarCertificate) {
    const auto inst = synth_stable_instance(1, 1, 2.0, 0.5, 5);
    EXPECT_LE(std::abs(inst.sys.A(0, 0) - inst.sys.B(0, 0) * inst.cert.K(0, 0)),
              0.5 + 1e-12);
}

TEST(SynthInstance, CertificateAlwaysValid) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto inst = synth_stable_instance(3, 2, 2.0, 0.5, s);
        const auto rep = check_strong_stability(inst.sys, inst.cert);
        ASSERT_TRUE(rep.pass) << "seed " << s;
        ASSERT_GE(inst.sigma_ck, 0.01);
        ASSERT_NEAR(inst.kappa_c, 1.0 / (inst.sigma_ck * inst.sigma_ck), 1e-9);
    }
    // other shapes and parameter corners; single-input Krylov chains have
    // naturally small sigma_min, so relax the floor there
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto tall = synth_stable_instance(4, 1, 3.0, 0.2, s, 200, 0.002);
        EXPECT_TRUE(check_strong_stability(tall.sys, tall.cert).pass);
        const auto wide = synth_stable_instance(2, 3, 1.0, 0.8, s);
        EXPECT_TRUE(check_strong_stability(wide.sys, wide.cert).pass);
    }
}

TEST(SynthInstance, DeterministicGivenSeed) {
    const auto a = synth_stable_instance(3, 2, 2.0, 0.5, 123);
    const auto b = synth_stable_instance(3, 2, 2.0, 0.5, 123);
    test::expect_mat_near(a.sys.A, b.sys.A, 0.0);
    test::expect_mat_near(a.sys.B, b.sys.B, 0.0);
    test::expect_mat_near(a.cert.K, b.cert.K, 0.0);
}

TEST(CheckStrongStability, FlagsViolatedGammaBound) {
    auto inst = synth_stable_instance(2, 2, 2.0, 0.5, 9);
    inst.cert.L *= (0.5 + 0.1) / std::max(spectral_norm(inst.cert.L), 1e-9);
    const auto rep = check_strong_stability(inst.sys, inst.cert);
    EXPECT_FALSE(rep.pass);
    bool l_failed = false;
    for (const auto& e : rep.entries)
        if (e.name == "L_norm") l_failed = !e.pass;
    EXPECT_TRUE(l_failed);
}

TEST(CheckStrongStability, AllZeroSystemPasses) {
    const LinSystem sys(Mat::Zero(2, 2), Mat::Zero(2, 2));
    StabilityCertificate cert{Mat::Zero(2, 2), Mat::Identity(2, 2), Mat::Zero(2, 2),
                              1.0, 0.7};
    EXPECT_TRUE(check_strong_stability(sys, cert).pass);
}

TEST(ControllabilityMatrix, BasicShapes) {
    const Mat b = test::random_mat(51, 3, 2);
    test::expect_mat_near(controllability_matrix(Mat::Zero(3, 3), b, 1), b, 0.0);
    const Mat c3 = controllability_matrix(Mat::Zero(3, 3), b, 3);
    EXPECT_EQ(c3.cols(), 6);
    test::expect_mat_near(c3.leftCols(2), b, 0.0);
    test::expect_mat_near(c3.rightCols(4), Mat::Zero(3, 4), 0.0);
    const Mat ci = controllability_matrix(Mat::Identity(3, 3), b, 2);
    test::expect_mat_near(ci.leftCols(2), b, 0.0);
    test::expect_mat_near(ci.rightCols(2), b, 0.0);
}

TEST(CheckStrongControllability, IdentityActuation) {
    const auto rep =
        check_strong_controllability(Mat::Zero(2, 2), Mat::Identity(2, 2), 1, 1.0);
    EXPECT_TRUE(rep.pass);
    EXPECT_NEAR(rep.sigma, 1.0, 1e-12);
}

TEST(CheckStrongControllability, ZeroActuationFails) {
    const auto rep =
        check_strong_controllability(Mat::Identity(2, 2), Mat::Zero(2, 1), 2, 100.0);
    EXPECT_FALSE(rep.pass);
}

TEST(CheckStrongControllability, SigmaMatchesNumericsOracle) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto inst = synth_stable_instance(3, 2, 2.0, 0.5, 300 + s);
        const Mat ap = inst.sys.A - inst.sys.B * inst.cert.K;
        const auto rep = check_strong_controllability(ap, inst.sys.B, 3, 1e6);
        EXPECT_NEAR(rep.sigma, sigma_min(controllability_matrix(ap, inst.sys.B, 3)),
                    1e-12);
        EXPECT_TRUE(rep.pass);
    }
}

TEST(LiftControls, ZeroTargetGivesZero) {
    const auto inst = synth_stable_instance(3, 2, 2.0, 0.5, 61);
    const auto lift = lift_controls(inst.sys, inst.cert.K, 3, Vec::Zero(3));
    EXPECT_EQ(lift.stacked.norm(), 0.0);
    EXPECT_EQ(lift.norm_ratio, 0.0);
}

TEST(LiftControls, OpenLoopEqualsClosedLoopWhenKZero) {
    const auto inst = synth_stable_instance(3, 2, 2.0, 0.5, 62);
    const Mat k0 = Mat::Zero(2, 3);
    const Vec x = test::random_vec(62, 3);
    const auto lift = lift_controls(inst.sys, k0, 3, x);
    // with K = 0 the correspondence is the identity: C_k u' = x directly
    const Mat ck = controllability_matrix(inst.sys.A, inst.sys.B, 3);
    EXPECT_LE((ck * lift.stacked - x).norm(), 1e-8 * x.norm());
}

TEST(LiftControls, DrivesTargetExactly) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto inst = synth_stable_instance(3, 2, 2.0, 0.5, 5000 + s);
        const Vec x = test::random_vec(700 + s, 3);
        const auto lift = lift_controls(inst.sys, inst.cert.K, inst.ctrl_k, x);
        const Mat ck = controllability_matrix(inst.sys.A, inst.sys.B, inst.ctrl_k);
        ASSERT_LE((ck * lift.stacked - x).norm(), 1e-8 * x.norm()) << "seed " << s;
        ASSERT_TRUE(std::isfinite(lift.norm_ratio));
    }
}

TEST(LiftControls, UncontrollablePreconditionThrows) {
    const LinSystem sys(Mat::Identity(2, 2), Mat::Zero(2, 1));
    EXPECT_THROW(lift_controls(sys, Mat::Zero(1, 2), 2, Vec::Ones(2)),
                 PreconditionError);
}
