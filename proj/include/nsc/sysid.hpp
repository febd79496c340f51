#pragma once

// System identification via random sign inputs: exploration, moment
// estimation, recovery of (A_hat, B_hat), and the phase-2 disturbance
// estimator.

#include "nsc/lds.hpp"
#include "nsc/numerics.hpp"
#include "nsc/rng.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nsc::sysid {

using lds::DisturbanceGen;
using lds::LinSystem;
using lds::Trajectory;

struct ExploreResult {
    Trajectory traj;          // controls u_0..u_T0, states x_0..x_{T0+1}
    std::vector<Vec> eta;     // exploration inputs, length T0+1
    double scale = 1.0;
};

// Executes u_t = -K x_t + eta_t for t = 0..T0 with eta_t entries i.i.d.
// +-scale from the counter-based generator; the extra step records x_{T0+1}
// for the phase-2 hand-off. The +-W variant is the scale=W footnote scheme.
inline ExploreResult explore(const LinSystem& sys, const Mat& k_mat,
                             const DisturbanceGen& dist, std::int64_t T0,
                             std::uint64_t seed, double scale = 1.0) {
    if (T0 < 1) throw ConfigError("T0", "exploration horizon must be positive");
    if (scale <= 0.0) throw ConfigError("explore_scale", "scale must be positive");
    if (k_mat.rows() != sys.control_dim() || k_mat.cols() != sys.state_dim())
        throw ShapeError("explore: stabilizer dimension mismatch");
    CounterRng rng(seed, Stream::kExploration);
    const int du = sys.control_dim();

    ExploreResult res;
    res.scale = scale;
    Trajectory& traj = res.traj;
    Vec x = Vec::Zero(sys.state_dim());
    traj.x.push_back(x);
    for (std::int64_t t = 0; t <= T0; ++t) {
        Vec eta = scale * rng.rademacher_vec(du, static_cast<std::uint64_t>(t));
        Vec u = -k_mat * x + eta;
        const Vec w = dist.at(t);
        Vec x_next = lds::step(sys, x, u, w);
        res.eta.push_back(std::move(eta));
        traj.u.push_back(std::move(u));
        traj.w.push_back(w);
        traj.x.push_back(x_next);
        x = std::move(x_next);
    }
    return res;
}

/// N_j = scale^-2 / (T0-k) * sum_{t=0..T0-k-1} x_{t+j+1} eta_t^T, j = 0..k.
inline std::vector<Mat> estimate_moments(const Trajectory& traj,
                                         const std::vector<Vec>& eta, int k,
                                         std::int64_t T0, double scale = 1.0) {
    if (k < 1) throw ConfigError("k", "moment window must be at least 1");
    if (T0 <= k) throw ConfigError("T0", "T0 must exceed k");
    if (static_cast<std::int64_t>(traj.x.size()) < T0 + 1 ||
        static_cast<std::int64_t>(eta.size()) < T0 - k)
        throw ShapeError("estimate_moments: trajectory does not cover x_0..x_T0");
    const int dx = static_cast<int>(traj.x[0].size());
    const int du = static_cast<int>(eta[0].size());
    const double norm = 1.0 / (scale * scale * static_cast<double>(T0 - k));
    std::vector<Mat> n(k + 1, Mat::Zero(dx, du));
    for (std::int64_t t = 0; t < T0 - k; ++t)
        for (int j = 0; j <= k; ++j)
            n[j] += traj.x[t + j + 1] * eta[t].transpose();
    for (auto& nj : n) nj *= norm;
    return n;
}

struct SysIdEstimate {
    std::vector<Mat> N;   // N_0..N_k
    Mat C0, C1;           // [N_0..N_{k-1}], [N_1..N_k]
    Mat A_prime_hat;      // solves X C0 ~= C1
    Mat A_hat, B_hat;
    double sigma_min_c0 = 0.0;
};

/// B_hat = N_0, A'_hat = C1 C0^T (C0 C0^T)^-1, A_hat = A'_hat + B_hat K.
inline SysIdEstimate recover_system(const std::vector<Mat>& n, const Mat& k_mat) {
    if (n.size() < 2)
        throw InvalidInputError("recover_system: need moments N_0..N_k with k >= 1");
    const int k = static_cast<int>(n.size()) - 1;
    const int dx = static_cast<int>(n[0].rows());
    const int du = static_cast<int>(n[0].cols());
    SysIdEstimate est;
    est.N = n;
    est.C0 = Mat(dx, k * du);
    est.C1 = Mat(dx, k * du);
    for (int j = 0; j < k; ++j) {
        est.C0.middleCols(j * du, du) = n[j];
        est.C1.middleCols(j * du, du) = n[j + 1];
    }
    est.sigma_min_c0 = (est.C0.rows() <= est.C0.cols()) ? sigma_min(est.C0) : 0.0;
    if (est.sigma_min_c0 < kRankTol)
        throw RankError("recover_system: moment matrix C0 is rank deficient",
                        est.sigma_min_c0);
    est.B_hat = n[0];
    est.A_prime_hat = solve_least_squares(est.C0, est.C1);
    est.A_hat = est.A_prime_hat + est.B_hat * k_mat;
    return est;
}

/// w_hat = x_next - A_hat x - B_hat u.
inline Vec estimate_disturbance(const Vec& x_next, const Vec& x, const Vec& u,
                                const Mat& a_hat, const Mat& b_hat) {
    if (x_next.size() != a_hat.rows() || x.size() != a_hat.cols())
        throw ShapeError("estimate_disturbance: state dimension mismatch");
    if (u.size() != b_hat.cols())
        throw ShapeError("estimate_disturbance: control dimension mismatch");
    return x_next - a_hat * x - b_hat * u;
}

struct RecoveryError {
    double eps_A = 0.0;
    double eps_B = 0.0;
};

/// Frobenius errors against a known truth (simulation mode).
inline RecoveryError recovery_error(const SysIdEstimate& est, const LinSystem& truth) {
    return {(est.A_hat - truth.A).norm(), (est.B_hat - truth.B).norm()};
}

}  // namespace nsc::sysid
