#pragma once

// Numerical verification of the lemma-level inequalities and identities, over
// randomized instances. Each check emits (lhs, rhs, margin, pass); violated
// preconditions are reported as skips, never silent passes.

#include "nsc/lds.hpp"
#include "nsc/numerics.hpp"
#include "nsc/pipeline.hpp"
#include "nsc/rng.hpp"
#include "nsc/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace nsc::verify {

using lds::LinSystem;
using lds::StabilityCertificate;
using lds::SynthInstance;

struct CheckReport {
    std::string check;
    std::string instance;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs unless noted
    bool pass = false;
    bool skipped = false;
    std::string note;
};

namespace detail {
inline CheckReport made(std::string check, std::string instance, double lhs,
                        double rhs, bool pass, std::string note = "") {
    CheckReport r;
    r.check = std::move(check);
    r.instance = std::move(instance);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.pass = pass;
    r.note = std::move(note);
    return r;
}

inline CheckReport skipped(std::string check, std::string instance, std::string why) {
    CheckReport r;
    r.check = std::move(check);
    r.instance = std::move(instance);
    r.skipped = true;
    r.note = std::move(why);
    return r;
}

inline Mat scaled_to_norm(Mat m, double target) {
    const double n = spectral_norm(m);
    if (n > 0.0) m *= target / n;
    return m;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Geometric series perturbation: sum_t ||(L+dL)^t - L^t|| <= ||dL|| / gamma^2
// whenever ||L||, ||L+dL|| <= 1-gamma. The sum is truncated once the
// geometric tail drops below 1e-12; the tail bound is added to the lhs so the
// check stays sound.
inline CheckReport check_series_perturbation(const Mat& l, const Mat& dl,
                                             double gamma, long t_max = -1,
                                             const std::string& instance = "") {
    const std::string name = "series_perturbation";
    const double nl = spectral_norm(l);
    const double nld = spectral_norm(l + dl);
    if (nl > 1.0 - gamma + 1e-12 || nld > 1.0 - gamma + 1e-12)
        return detail::skipped(name, instance, "norm precondition violated");
    if (t_max < 0) {
        // sum_{t>T} 2 (1-gamma)^t = 2 (1-gamma)^{T+1} / gamma
        t_max = 1;
        while (2.0 * std::pow(1.0 - gamma, t_max + 1) / gamma > 1e-12) ++t_max;
    }
    double lhs = 0.0;
    Mat pl = Mat::Identity(l.rows(), l.cols());
    Mat pld = pl;
    for (long t = 1; t <= t_max; ++t) {
        pl = pl * l;
        pld = pld * (l + dl);
        lhs += spectral_norm(pld - pl);
    }
    lhs += 2.0 * std::pow(1.0 - gamma, t_max + 1) / gamma;  // tail bound
    const double rhs = spectral_norm(dl) / (gamma * gamma);
    return detail::made(name, instance, lhs, rhs, lhs <= rhs + 1e-12);
}

// ---------------------------------------------------------------------------
// Linear solve perturbation: ||x* - x^|| <= (||db|| + ||dA|| ||x*||) /
// (sigma_min(A) - ||dA||) when ||dA|| < sigma_min(A).
inline CheckReport check_linear_solve(const Mat& a, const Mat& da, const Vec& b,
                                      const Vec& db,
                                      const std::string& instance = "") {
    const std::string name = "linear_solve_perturbation";
    const double smin = sigma_min(a);
    const double nda = spectral_norm(da);
    if (nda >= smin)
        return detail::skipped(name, instance, "||dA|| >= sigma_min(A)");
    const Vec x_star = a.fullPivLu().solve(b);
    const Vec x_hat = (a + da).fullPivLu().solve(b + db);
    const double lhs = (x_star - x_hat).norm();
    const double rhs = (db.norm() + nda * x_star.norm()) / (smin - nda);
    return detail::made(name, instance, lhs, rhs, lhs <= rhs + 1e-12);
}

// ---------------------------------------------------------------------------
// Preservation of stability: with the same Q and L^ = Q^-1 (A^ - B^ K) Q,
// ||L^|| <= 1 - gamma + 2 kappa^3 eps and ||L^ - L|| <= 2 kappa^3 eps.
inline std::vector<CheckReport> check_stability_preservation_given(
    const LinSystem& sys, const StabilityCertificate& cert, const Mat& a_hat,
    const Mat& b_hat, const std::string& instance = "") {
    const double eps =
        std::max(spectral_norm(a_hat - sys.A), spectral_norm(b_hat - sys.B));
    const Mat qinv = cert.Q.fullPivLu().inverse();
    const Mat l_hat = qinv * (a_hat - b_hat * cert.K) * cert.Q;
    const double bound = 2.0 * std::pow(cert.kappa, 3) * eps;
    std::vector<CheckReport> out;
    const double lhs1 = spectral_norm(l_hat);
    const double rhs1 = 1.0 - cert.gamma + bound;
    out.push_back(detail::made("stability_preservation/L_norm", instance, lhs1,
                               rhs1, lhs1 <= rhs1 + 1e-10));
    const double lhs2 = spectral_norm(l_hat - cert.L);
    out.push_back(detail::made("stability_preservation/L_drift", instance, lhs2,
                               bound, lhs2 <= bound + 1e-10));
    return out;
}

/// Sampling wrapper: perturbs (A, B) by random directions of spectral norm eps.
inline std::vector<CheckReport> check_stability_preservation(
    const LinSystem& sys, const StabilityCertificate& cert, double eps,
    std::uint64_t seed, const std::string& instance = "") {
    CounterRng rng(seed, Stream::kPerturb);
    CounterRng rng_b(seed, Stream::kPerturb, 1);
    const int dx = sys.state_dim();
    const int du = sys.control_dim();
    const Mat a_hat = sys.A + detail::scaled_to_norm(rng.gaussian_mat(dx, dx), eps);
    const Mat b_hat = sys.B + detail::scaled_to_norm(rng_b.gaussian_mat(dx, du), eps);
    return check_stability_preservation_given(sys, cert, a_hat, b_hat, instance);
}

// ---------------------------------------------------------------------------
// Simulation lemma: re-runs phase 2 on the fictitious system (A^, B^, {w^})
// and verifies states, controls, and the phase-2 cost total coincide with the
// recorded run to relative 1e-9.
inline CheckReport check_simulation(const pipeline::Algorithm1Result& run,
                                    const pipeline::ExperimentConfig& cfg,
                                    const std::string& instance = "") {
    const std::string name = "simulation_lemma";
    const auto& rep = run.report;
    const auto& traj = run.traj;
    const lds::CostGen costs = pipeline::make_costs_from(cfg);

    gpc::Phase2Controller ctrl(run.est.A_hat, run.est.B_hat, run.instance.cert.K,
                               rep.H, rep.eta, cfg.kappa, cfg.gamma, &costs);
    ctrl.push_disturbance(traj.x[rep.T0 + 1]);
    Vec x = traj.x[rep.T0 + 1];
    double max_rel = 0.0;
    double cost_replay = 0.0, cost_recorded = 0.0;
    for (std::int64_t t = rep.T0 + 1; t < rep.T; ++t) {
        const Vec u = ctrl.act(t, x);
        max_rel = std::max(max_rel,
                           (u - traj.u[t]).norm() / std::max(1.0, traj.u[t].norm()));
        cost_replay += costs.at(t, x, u);
        cost_recorded += traj.cost[t];
        Vec x_next = run.est.A_hat * x + run.est.B_hat * u + traj.w_hat[t];
        ctrl.observe(t, x, u, x_next);
        max_rel = std::max(max_rel, (x_next - traj.x[t + 1]).norm() /
                                        std::max(1.0, traj.x[t + 1].norm()));
        x = std::move(x_next);
    }
    max_rel = std::max(max_rel, std::abs(cost_replay - cost_recorded) /
                                    std::max(1.0, std::abs(cost_recorded)));
    return detail::made(name, instance, max_rel, 1e-9, max_rel <= 1e-9);
}

// ---------------------------------------------------------------------------
// Exploration bounds. The displayed form of the lemma does not dominate the
// proof's (W + kappa sqrt(n)) step when W < kappa sqrt(n), so W is replaced
// by max(W, sqrt(n) kappa), matching the proof.
inline std::vector<CheckReport> check_exploration(const LinSystem& sys,
                                                  const StabilityCertificate& cert,
                                                  const lds::DisturbanceGen& dist,
                                                  std::int64_t T0, std::uint64_t seed,
                                                  const std::string& instance = "") {
    const auto ex = sysid::explore(sys, cert.K, dist, T0, seed, 1.0);
    const double n = static_cast<double>(sys.control_dim());
    const double w_eff = std::max(dist.bound, std::sqrt(n) * cert.kappa);
    double max_x = 0.0, max_u = 0.0;
    for (const auto& xv : ex.traj.x) max_x = std::max(max_x, xv.norm());
    for (const auto& uv : ex.traj.u) max_u = std::max(max_u, uv.norm());
    const double rhs_x =
        std::sqrt(n) * std::pow(cert.kappa, 3) / cert.gamma * w_eff;
    const double rhs_u =
        2.0 * std::sqrt(n) * std::pow(cert.kappa, 4) / cert.gamma * w_eff;
    std::vector<CheckReport> out;
    out.push_back(detail::made("exploration/x_bound", instance, max_x, rhs_x,
                               max_x <= rhs_x, "W replaced by max(W, sqrt(n) kappa)"));
    out.push_back(detail::made("exploration/u_bound", instance, max_u, rhs_u,
                               max_u <= rhs_u, "W replaced by max(W, sqrt(n) kappa)"));
    return out;
}

/// Per-step exploration cost bound, 16 G n kappa^8 gamma^-2 W^2.
inline double exploration_cost_bound(double G, int du, double kappa, double gamma,
                                     double W) {
    return 16.0 * G * static_cast<double>(du) * std::pow(kappa, 8) /
           (gamma * gamma) * W * W;
}

// ---------------------------------------------------------------------------
// Phase-2 bounds, valid once eps_{A,B} <= 1e-3 kappa^-10 gamma^2.
// W_dist is the disturbance bound the run was driven with.
inline std::vector<CheckReport> check_phase2_bounds(
    const pipeline::Algorithm1Result& run, double W_dist,
    const std::string& instance = "") {
    const std::string name = "phase2_bounds";
    const auto& rep = run.report;
    const auto& traj = run.traj;
    const auto& cert = run.instance.cert;
    const double kappa = cert.kappa, gamma = cert.gamma;
    const double eps = std::max(spectral_norm(run.est.A_hat - run.instance.sys.A),
                                spectral_norm(run.est.B_hat - run.instance.sys.B));
    const double eps_req = 1e-3 * std::pow(kappa, -10) * gamma * gamma;
    if (eps > eps_req)
        return {detail::skipped(name, instance,
                                "eps_{A,B} exceeds 1e-3 kappa^-10 gamma^2")};
    const double n = static_cast<double>(run.instance.sys.control_dim());

    double max_x = 0.0, max_dev = 0.0, max_what = 0.0;
    for (std::int64_t t = rep.T0 + 1; t < rep.T; ++t) {
        max_x = std::max(max_x, traj.x[t].norm());
        max_dev = std::max(max_dev, (traj.w[t] - traj.w_hat[t]).norm());
        max_what = std::max(max_what, traj.w_hat[t - 1].norm());
    }
    std::vector<CheckReport> out;
    const double rhs_x = 4.0 * std::sqrt(n) * std::pow(kappa, 10) *
                         std::pow(gamma, -3) * W_dist;
    out.push_back(detail::made(name + "/x_bound", instance, max_x, rhs_x,
                               max_x <= rhs_x + 1e-10));
    const double rhs_dev = 20.0 * std::sqrt(n) * std::pow(kappa, 11) *
                           std::pow(gamma, -3) * W_dist * eps;
    out.push_back(detail::made(name + "/w_deviation", instance, max_dev, rhs_dev,
                               max_dev <= rhs_dev + 1e-10));
    const double rhs_what =
        2.0 * std::sqrt(n) * std::pow(kappa, 3) / gamma * W_dist;
    out.push_back(detail::made(name + "/w_hat_bound", instance, max_what, rhs_what,
                               max_what <= rhs_what + 1e-10));
    return out;
}

// ---------------------------------------------------------------------------
// Moment concentration: over seeded exploration runs with a fixed disturbance
// sequence, the (1-delta)-quantile of max_j ||N_j - A'^j B|| stays below
// n kappa^3 gamma^-1 W sqrt(8 log(m n k / delta) / (T0 - k)).
inline CheckReport check_concentration(const LinSystem& sys,
                                       const StabilityCertificate& cert,
                                       const lds::DisturbanceGen& dist, int k,
                                       std::int64_t T0, double delta, int n_seeds,
                                       std::uint64_t seed_base,
                                       const std::string& instance = "") {
    const std::string name = "moment_concentration";
    const Mat a_prime = sys.A - sys.B * cert.K;
    std::vector<double> errs;
    errs.reserve(n_seeds);
    for (int s = 0; s < n_seeds; ++s) {
        const auto ex = sysid::explore(sys, cert.K, dist, T0, seed_base + s, 1.0);
        const auto n_mats = sysid::estimate_moments(ex.traj, ex.eta, k, T0, 1.0);
        double err = 0.0;
        for (int j = 0; j <= k; ++j)
            err = std::max(err,
                           spectral_norm(n_mats[j] - mat_power(a_prime, j) * sys.B));
        errs.push_back(err);
    }
    std::sort(errs.begin(), errs.end());
    const int idx = std::min<int>(
        n_seeds - 1,
        std::max<int>(0, static_cast<int>(std::ceil((1.0 - delta) * n_seeds)) - 1));
    const double lhs = errs[idx];
    const double m = static_cast<double>(sys.state_dim());
    const double n = static_cast<double>(sys.control_dim());
    const double rhs = n * std::pow(cert.kappa, 3) / cert.gamma * dist.bound *
                       std::sqrt(8.0 * std::log(m * n * k / delta) /
                                 static_cast<double>(T0 - k));
    return detail::made(name, instance, lhs, rhs, lhs <= rhs,
                        "quantile over " + std::to_string(n_seeds) + " seeds");
}

// ---------------------------------------------------------------------------
// Value-function stability under system and disturbance perturbations.
inline CheckReport check_value_stability(const LinSystem& sys,
                                         const StabilityCertificate& cert,
                                         const lds::CostGen& costs,
                                         const lds::DisturbanceGen& dist,
                                         double eps_ab, double eps_w,
                                         std::int64_t T, std::uint64_t seed,
                                         const std::string& instance = "",
                                         bool identical_first_step = false) {
    const std::string name = "value_stability";
    const double kappa = cert.kappa, gamma = cert.gamma;
    if (eps_ab > 0.25 * std::pow(kappa, -3) * gamma)
        return detail::skipped(name, instance, "eps_{A,B} > 0.25 kappa^-3 gamma");

    CounterRng rng(seed, Stream::kPerturb, 10);
    CounterRng rng_b(seed, Stream::kPerturb, 11);
    CounterRng rng_w(seed, Stream::kPerturb, 12);
    const int dx = sys.state_dim();
    const Mat a_hat =
        sys.A + detail::scaled_to_norm(rng.gaussian_mat(dx, dx), eps_ab);
    const Mat b_hat =
        sys.B +
        detail::scaled_to_norm(rng_b.gaussian_mat(dx, sys.control_dim()), eps_ab);

    std::vector<Vec> w(T), w_hat(T);
    for (std::int64_t t = 0; t < T; ++t) w[t] = dist.at(t);
    // first-step hand-off: ||w_hat_0|| <= W0, later steps ||w_t - w_hat_t|| <= eps_w
    if (identical_first_step) {
        w_hat[0] = w[0];
    } else {
        Vec w0_dir = rng_w.gaussian_vec(dx, 0);
        w0_dir *= (1.2 * dist.bound) / std::max(w0_dir.norm(), 1e-12);
        w_hat[0] = w0_dir;
    }
    const double w0 = std::max({dist.bound, w_hat[0].norm(), eps_w});
    for (std::int64_t t = 1; t < T; ++t) {
        Vec d = rng_w.gaussian_vec(dx, t);
        d *= (eps_w * rng_w.uniform01(100000 + t)) / std::max(d.norm(), 1e-12);
        w_hat[t] = w[t] + d;
    }

    auto j_of = [&](const Mat& a, const Mat& b, const std::vector<Vec>& ws) {
        Vec x = Vec::Zero(dx);
        double j = 0.0;
        for (std::int64_t t = 0; t < T; ++t) {
            const Vec u = -cert.K * x;
            j += costs.at(t, x, u);
            x = a * x + b * u + ws[t];
        }
        return j;
    };
    const double lhs = std::abs(j_of(a_hat, b_hat, w_hat) - j_of(sys.A, sys.B, w));
    const double rhs = 1e3 * static_cast<double>(T) * costs.G * std::pow(kappa, 8) *
                           std::pow(gamma, -3) * w0 * (eps_w + w0 * eps_ab) +
                       32.0 * costs.G * std::pow(kappa, 5) * std::pow(gamma, -2) *
                           w0 * w0;
    return detail::made(name, instance, lhs, rhs, lhs <= rhs + 1e-12);
}

// ---------------------------------------------------------------------------
// Appendix lifting lemma: lift_controls drives C_k u = x exactly and the
// control magnification stays finite.
inline CheckReport check_controllability_lift(const LinSystem& sys, const Mat& k_mat,
                                              int k, const Vec& target,
                                              const std::string& instance = "") {
    const std::string name = "controllability_lift";
    lds::LiftResult lift;
    try {
        lift = lds::lift_controls(sys, k_mat, k, target);
    } catch (const PreconditionError& e) {
        return detail::skipped(name, instance, e.what());
    }
    const bool finite = std::isfinite(lift.norm_ratio);
    return detail::made(name, instance, lift.residual_rel, 1e-8,
                        lift.residual_rel <= 1e-8 && finite,
                        "norm_ratio=" + std::to_string(lift.norm_ratio));
}

// ---------------------------------------------------------------------------
// Adversarial vs least-squares contrast under constant disturbances.
struct LsComparison {
    std::vector<std::int64_t> T0_values;
    std::vector<double> alg2_err;  // median over seeds per T0
    std::vector<double> ls_err;
    double alg2_slope = 0.0;
    double contrast_at_largest = 0.0;  // ls / alg2 at the largest T0
};

inline LsComparison ls_inconsistency_curves(const LinSystem& sys,
                                            const StabilityCertificate& cert,
                                            const lds::DisturbanceGen& dist, int k,
                                            const std::vector<std::int64_t>& T0_grid,
                                            int n_seeds, std::uint64_t seed_base) {
    LsComparison cmp;
    cmp.T0_values = T0_grid;
    const int dx = sys.state_dim();
    const int du = sys.control_dim();
    Mat truth(dx, dx + du);
    truth.leftCols(dx) = sys.A;
    truth.rightCols(du) = sys.B;
    for (const auto t0 : T0_grid) {
        std::vector<double> a2, ls;
        for (int s = 0; s < n_seeds; ++s) {
            const auto ex = sysid::explore(sys, cert.K, dist, t0, seed_base + s, 1.0);
            const auto moments = sysid::estimate_moments(ex.traj, ex.eta, k, t0, 1.0);
            const auto est = sysid::recover_system(moments, cert.K);
            const auto err = sysid::recovery_error(est, sys);
            a2.push_back(std::max(err.eps_A, err.eps_B));

            // naive no-intercept regression of x_{t+1} on (x_t, u_t)
            Mat z(dx + du, t0);
            Mat y(dx, t0);
            for (std::int64_t t = 0; t < t0; ++t) {
                z.col(t).head(dx) = ex.traj.x[t];
                z.col(t).tail(du) = ex.traj.u[t];
                y.col(t) = ex.traj.x[t + 1];
            }
            const Mat theta = solve_least_squares(z, y);
            ls.push_back(std::max((theta.leftCols(dx) - sys.A).norm(),
                                  (theta.rightCols(du) - sys.B).norm()));
        }
        cmp.alg2_err.push_back(pipeline::median(std::move(a2)));
        cmp.ls_err.push_back(pipeline::median(std::move(ls)));
    }
    std::vector<double> xs(T0_grid.begin(), T0_grid.end());
    cmp.alg2_slope = pipeline::loglog_slope(xs, cmp.alg2_err);
    cmp.contrast_at_largest = cmp.ls_err.back() / cmp.alg2_err.back();
    return cmp;
}

inline std::vector<CheckReport> check_ls_inconsistency(
    const LinSystem& sys, const StabilityCertificate& cert,
    const lds::DisturbanceGen& dist, int k,
    const std::vector<std::int64_t>& T0_grid, int n_seeds,
    std::uint64_t seed_base, const std::string& instance = "") {
    const auto cmp =
        ls_inconsistency_curves(sys, cert, dist, k, T0_grid, n_seeds, seed_base);
    std::vector<CheckReport> out;
    for (std::size_t i = 0; i < cmp.T0_values.size(); ++i) {
        CheckReport r = detail::made(
            "ls_inconsistency/curve", instance + "/T0=" + std::to_string(cmp.T0_values[i]),
            cmp.alg2_err[i], cmp.ls_err[i], true,
            "lhs=alg2 error, rhs=least-squares error (informational)");
        out.push_back(std::move(r));
    }
    // contrast: least-squares error must exceed 10x algorithm-2 error at the
    // largest T0; margin is lhs - rhs here
    CheckReport contrast;
    contrast.check = "ls_inconsistency/contrast";
    contrast.instance = instance;
    contrast.lhs = cmp.contrast_at_largest;
    contrast.rhs = 10.0;
    contrast.margin = contrast.lhs - contrast.rhs;
    contrast.pass = contrast.lhs > contrast.rhs;
    contrast.note = "lhs = ls/alg2 error ratio at largest T0, must exceed rhs";
    out.push_back(std::move(contrast));
    return out;
}

// ---------------------------------------------------------------------------
// Suite runner

struct VerifyOptions {
    int dx = 3, du = 2;
    double kappa = 2.0, gamma = 0.5, W = 1.0;
    std::uint64_t seed = 12345;
    int lemma_instances = 100;     // series, linear-solve, stability, value, lift
    int sim_runs = 3;
    std::int64_t sim_T = 1500;
    int exploration_seeds = 10;
    std::int64_t exploration_T0 = 1500;
    int conc_seeds = 200;
    std::int64_t conc_T0 = 4096;
    double conc_delta = 0.1;
    int phase2_runs = 3;
    std::int64_t phase2_T = 1500;
    int ls_seeds = 5;
    std::vector<std::int64_t> ls_T0_grid = {1024, 4096, 16384, 65536};
    std::int64_t value_T = 400;
};

inline std::vector<CheckReport> run_all_checks(const VerifyOptions& o) {
    std::vector<CheckReport> out;
    auto emit = [&out](CheckReport r) { out.push_back(std::move(r)); };
    auto emit_all = [&out](std::vector<CheckReport> rs) {
        for (auto& r : rs) out.push_back(std::move(r));
    };

    // randomized compliant instances for the pure matrix lemmas
    for (int i = 0; i < o.lemma_instances; ++i) {
        const std::string id = std::to_string(i);
        CounterRng rng(o.seed, Stream::kVerify, 100 + i);
        const double gamma = 0.2 + 0.6 * rng.uniform01(0);

        Mat l = detail::scaled_to_norm(rng.gaussian_mat(o.dx, o.dx),
                                       (0.3 + 0.6 * rng.uniform01(1)) * (1.0 - gamma));
        CounterRng rng2(o.seed, Stream::kVerify, 5000 + i);
        const double room = (1.0 - gamma) - spectral_norm(l);
        Mat dl = detail::scaled_to_norm(rng2.gaussian_mat(o.dx, o.dx),
                                        0.9 * room * rng.uniform01(2));
        emit(check_series_perturbation(l, dl, gamma, -1, id));

        CounterRng rng3(o.seed, Stream::kVerify, 10000 + i);
        Mat a = rng3.gaussian_mat(o.dx, o.dx);
        a += (0.5 + sigma_min(a)) * Mat::Identity(o.dx, o.dx);  // keep well posed
        CounterRng rng4(o.seed, Stream::kVerify, 15000 + i);
        const Mat da = detail::scaled_to_norm(rng4.gaussian_mat(o.dx, o.dx),
                                              0.5 * sigma_min(a) * rng.uniform01(3));
        const Vec b = rng3.gaussian_vec(o.dx, 1000);
        const Vec db = 0.1 * rng.uniform01(4) * rng4.gaussian_vec(o.dx, 2000);
        emit(check_linear_solve(a, da, b, db, id));
    }

    for (int i = 0; i < o.lemma_instances; ++i) {
        const std::string id = std::to_string(i);
        const auto inst = lds::synth_stable_instance(o.dx, o.du, o.kappa, o.gamma,
                                                     o.seed + 7000 + i);
        CounterRng rng(o.seed, Stream::kVerify, 20000 + i);
        const double eps = 0.2 * rng.uniform01(0);
        emit_all(check_stability_preservation(inst.sys, inst.cert, eps,
                                              o.seed + 20000 + i, id));

        const auto dist = lds::make_disturbance(lds::DisturbanceKind::kSinusoid,
                                                o.dx, o.W, o.seed + i, 40.0);
        const auto costs = lds::make_costs(lds::CostKind::kQuadratic,
                                           Mat::Identity(o.dx, o.dx),
                                           Mat::Identity(o.du, o.du));
        const double eps_ab =
            0.8 * 0.25 * std::pow(o.kappa, -3) * o.gamma * rng.uniform01(1);
        const double eps_w = 0.2 * o.W * rng.uniform01(2);
        emit(check_value_stability(inst.sys, inst.cert, costs, dist, eps_ab, eps_w,
                                   o.value_T, o.seed + 30000 + i, id));

        CounterRng rng_t(o.seed, Stream::kVerify, 40000 + i);
        Vec target = rng_t.gaussian_vec(o.dx, 0);
        target *= (0.5 + 1.5 * rng.uniform01(3)) / std::max(target.norm(), 1e-12);
        emit(check_controllability_lift(inst.sys, inst.cert.K, inst.ctrl_k, target, id));
    }

    // simulation lemma on full pipeline runs
    for (int i = 0; i < o.sim_runs; ++i) {
        pipeline::ExperimentConfig cfg;
        cfg.dx = o.dx;
        cfg.du = o.du;
        cfg.kappa = o.kappa;
        cfg.gamma = o.gamma;
        cfg.W = o.W;
        cfg.T = o.sim_T;
        cfg.seed = o.seed + 50000 + i;
        pipeline::RunOptions ropts;
        ropts.with_comparator = false;
        const auto run = pipeline::run_algorithm1(cfg, ropts);
        emit(check_simulation(run, cfg, std::to_string(i)));
    }

    // exploration bounds
    {
        const auto inst =
            lds::synth_stable_instance(o.dx, o.du, o.kappa, o.gamma, o.seed + 60000);
        const auto dist = lds::make_disturbance(lds::DisturbanceKind::kSinusoid, o.dx,
                                                o.W, o.seed + 60000, 40.0);
        for (int s = 0; s < o.exploration_seeds; ++s)
            emit_all(check_exploration(inst.sys, inst.cert, dist, o.exploration_T0,
                                       o.seed + 61000 + s, std::to_string(s)));
    }

    // phase-2 bounds on injected near-exact estimates
    for (int i = 0; i < o.phase2_runs; ++i) {
        pipeline::ExperimentConfig cfg;
        cfg.dx = o.dx;
        cfg.du = o.du;
        cfg.kappa = o.kappa;
        cfg.gamma = o.gamma;
        cfg.W = std::max(o.W, std::sqrt(static_cast<double>(o.du)) * o.kappa);
        cfg.T = o.phase2_T;
        cfg.seed = o.seed + 70000 + i;
        const auto inst =
            lds::synth_stable_instance(o.dx, o.du, o.kappa, o.gamma, cfg.seed);
        const double eps_target =
            0.5 * 1e-3 * std::pow(o.kappa, -10) * o.gamma * o.gamma;
        CounterRng rng(cfg.seed, Stream::kPerturb, 42);
        CounterRng rng_b(cfg.seed, Stream::kPerturb, 43);
        pipeline::RunOptions ropts;
        ropts.instance = inst;
        ropts.inject = pipeline::InjectedEstimate{
            inst.sys.A + detail::scaled_to_norm(rng.gaussian_mat(o.dx, o.dx), eps_target),
            inst.sys.B +
                detail::scaled_to_norm(rng_b.gaussian_mat(o.dx, o.du), eps_target)};
        ropts.with_comparator = false;
        const auto run = pipeline::run_algorithm1(cfg, ropts);
        emit_all(check_phase2_bounds(run, cfg.W, std::to_string(i)));
    }

    // moment concentration
    {
        const auto inst =
            lds::synth_stable_instance(o.dx, o.du, o.kappa, o.gamma, o.seed + 80000);
        const auto dist = lds::make_disturbance(lds::DisturbanceKind::kSinusoid, o.dx,
                                                o.W, o.seed + 80000, 40.0);
        emit(check_concentration(inst.sys, inst.cert, dist, o.dx, o.conc_T0,
                                 o.conc_delta, o.conc_seeds, o.seed + 81000, "0"));
    }

    // least-squares contrast under constant disturbance
    {
        const auto inst =
            lds::synth_stable_instance(o.dx, o.du, o.kappa, o.gamma, o.seed + 90000);
        const auto dist = lds::make_disturbance(lds::DisturbanceKind::kConstant, o.dx,
                                                o.W, o.seed + 90000);
        emit_all(check_ls_inconsistency(inst.sys, inst.cert, dist, o.dx, o.ls_T0_grid,
                                        o.ls_seeds, o.seed + 91000, "0"));
    }

    return out;
}

}  // namespace nsc::verify
