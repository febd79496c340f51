#pragma once

// Perturbation-based policy class: transfer matrices, surrogate state/action/
// cost, projected online gradient descent, and the known-system controller.

#include "nsc/lds.hpp"
#include "nsc/numerics.hpp"

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace nsc::gpc {

using lds::CostGen;
using lds::DisturbanceGen;
using lds::LinSystem;
using lds::StabilityCertificate;
using lds::Trajectory;

// ---------------------------------------------------------------------------
// Policy

/// M = (M^[0], ..., M^[H-1]); feasible set ||M^[i-1]|| <= kappa^4 (1-gamma)^i.
struct PerturbationPolicy {
    std::vector<Mat> blocks;  // each d_u x d_x

    int memory() const { return static_cast<int>(blocks.size()); }
};

inline PerturbationPolicy zero_policy(int H, int du, int dx) {
    PerturbationPolicy m;
    m.blocks.assign(H, Mat::Zero(du, dx));
    return m;
}

/// Spectral radius of the feasible ball for block index i (0-based).
inline double block_radius(double kappa, double gamma, int i) {
    return std::pow(kappa, 4) * std::pow(1.0 - gamma, i + 1);
}

inline PerturbationPolicy project_policy(PerturbationPolicy m, double kappa,
                                         double gamma) {
    for (int i = 0; i < m.memory(); ++i)
        m.blocks[i] = project_spectral_ball(m.blocks[i], block_radius(kappa, gamma, i));
    return m;
}

// ---------------------------------------------------------------------------
// Transfer matrices and surrogates

// Psi_i(M | A, B) = A'^i 1{i<=H} + sum_{j=0..H} A'^j B M^[i-j-1] 1{i-j in [1,H]}
// with A' = A - B K. Direct evaluation of the definition; the surrogate code
// below uses a restructured sum, and tests cross-check the two.
inline Mat transfer_matrix_psi(const PerturbationPolicy& m, const Mat& a_hat,
                               const Mat& b_hat, const Mat& k_mat, int H, int i) {
    if (i < 0 || i > 2 * H)
        throw InvalidInputError("transfer_matrix_psi: index out of range");
    const Mat a_prime = a_hat - b_hat * k_mat;
    Mat psi = Mat::Zero(a_hat.rows(), a_hat.cols());
    if (i <= H) psi += mat_power(a_prime, i);
    for (int j = 0; j <= H; ++j) {
        const int p = i - j - 1;
        if (p >= 0 && p <= H - 1)
            psi += mat_power(a_prime, j) * b_hat * m.blocks[p];
    }
    return psi;
}

// Everything needed to evaluate the surrogate loss f_t. The window holds the
// 2H+1 most recent estimated disturbances, oldest first; window.back() is the
// disturbance one step before the cost index t, so surrogate_state yields y_t.
struct SurrogateContext {
    Mat A_hat, B_hat, K;
    int H = 0;
    std::vector<Vec> window;
    const CostGen* cost = nullptr;
    std::int64_t t = 0;

    std::vector<Mat> ap_pow;    // (A-BK)^i, i = 0..2H
    std::vector<Mat> ap_pow_b;  // (A-BK)^j B, j = 0..H

    static SurrogateContext make(Mat a_hat, Mat b_hat, Mat k_mat, int H,
                                 std::vector<Vec> window, const CostGen* cost,
                                 std::int64_t t) {
        if (static_cast<int>(window.size()) != 2 * H + 1)
            throw ShapeError("SurrogateContext: window must hold 2H+1 entries");
        SurrogateContext c;
        c.A_hat = std::move(a_hat);
        c.B_hat = std::move(b_hat);
        c.K = std::move(k_mat);
        c.H = H;
        c.window = std::move(window);
        c.cost = cost;
        c.t = t;
        const Mat a_prime = c.A_hat - c.B_hat * c.K;
        c.ap_pow.reserve(2 * H + 1);
        c.ap_pow.push_back(Mat::Identity(a_prime.rows(), a_prime.cols()));
        for (int i = 1; i <= 2 * H; ++i) c.ap_pow.push_back(c.ap_pow.back() * a_prime);
        c.ap_pow_b.reserve(H + 1);
        for (int j = 0; j <= H; ++j) c.ap_pow_b.push_back(c.ap_pow[j] * c.B_hat);
        return c;
    }

    /// Disturbance i steps before the window end.
    const Vec& wbar(int i) const { return window[2 * H - i]; }
};

/// y_t = sum_{i=0..2H} Psi_i w_{t-1-i} for a window ending at w_{t-1}.
inline Vec surrogate_state(const PerturbationPolicy& m, const SurrogateContext& c) {
    const int H = c.H;
    Vec y = Vec::Zero(c.A_hat.rows());
    for (int i = 0; i <= H; ++i) y += c.ap_pow[i] * c.wbar(i);
    for (int j = 0; j <= H; ++j) {
        Vec s = Vec::Zero(c.B_hat.cols());
        for (int p = 0; p < H; ++p) s += m.blocks[p] * c.wbar(p + j + 1);
        y += c.ap_pow_b[j] * s;
    }
    return y;
}

/// v_t = -K y_t + sum_{i=1..H} M^[i-1] w_{t-i}.
inline Vec surrogate_action(const PerturbationPolicy& m, const SurrogateContext& c) {
    Vec v = -c.K * surrogate_state(m, c);
    for (int p = 0; p < c.H; ++p) v += m.blocks[p] * c.wbar(p);
    return v;
}

/// f_t = c_t(y_t, v_t).
inline double surrogate_cost(const PerturbationPolicy& m, const SurrogateContext& c) {
    const Vec y = surrogate_state(m, c);
    Vec v = -c.K * y;
    for (int p = 0; p < c.H; ++p) v += m.blocks[p] * c.wbar(p);
    return c.cost->at(c.t, y, v);
}

/// Central finite differences of f_t in each policy entry.
inline std::vector<Mat> grad_surrogate_fd(const PerturbationPolicy& m,
                                          const SurrogateContext& c,
                                          double step = 1e-6) {
    std::vector<Mat> g;
    g.reserve(m.memory());
    PerturbationPolicy probe = m;
    for (int p = 0; p < m.memory(); ++p) {
        Mat gp(m.blocks[p].rows(), m.blocks[p].cols());
        for (int i = 0; i < gp.rows(); ++i) {
            for (int j = 0; j < gp.cols(); ++j) {
                const double saved = probe.blocks[p](i, j);
                probe.blocks[p](i, j) = saved + step;
                const double fp = surrogate_cost(probe, c);
                probe.blocks[p](i, j) = saved - step;
                const double fm = surrogate_cost(probe, c);
                probe.blocks[p](i, j) = saved;
                gp(i, j) = (fp - fm) / (2.0 * step);
            }
        }
        g.push_back(std::move(gp));
    }
    return g;
}

// Gradient of f_t in the policy blocks. y and v are affine in M, so for costs
// with analytic gradients the chain rule gives
//   d f / d M^[p] = g_u wbar_p^T + sum_{j=0..H} B^T (A'^T)^j (g_x - K^T g_u) wbar_{p+j+1}^T.
inline std::vector<Mat> grad_surrogate(const PerturbationPolicy& m,
                                       const SurrogateContext& c) {
    if (!c.cost->has_analytic_gradient()) return grad_surrogate_fd(m, c);
    const int H = c.H;
    const Vec y = surrogate_state(m, c);
    Vec v = -c.K * y;
    for (int p = 0; p < H; ++p) v += m.blocks[p] * c.wbar(p);
    const Vec gx = c.cost->grad_x(c.t, y, v);
    const Vec gu = c.cost->grad_u(c.t, y, v);
    const Vec r = gx - c.K.transpose() * gu;
    std::vector<Vec> q(H + 1);
    for (int j = 0; j <= H; ++j) q[j] = c.ap_pow_b[j].transpose() * r;
    std::vector<Mat> g;
    g.reserve(H);
    for (int p = 0; p < H; ++p) {
        Mat gp = gu * c.wbar(p).transpose();
        for (int j = 0; j <= H; ++j) gp += q[j] * c.wbar(p + j + 1).transpose();
        g.push_back(std::move(gp));
    }
    return g;
}

/// M_{t+1} = Pi_M(M_t - eta grad f_t(M_t)).
inline PerturbationPolicy ogd_update(const PerturbationPolicy& m,
                                     const SurrogateContext& c, double eta,
                                     double kappa, double gamma) {
    if (eta < 0.0) throw InvalidInputError("ogd_update: eta must be nonnegative");
    const std::vector<Mat> g = grad_surrogate(m, c);
    PerturbationPolicy next = m;
    for (int p = 0; p < m.memory(); ++p) next.blocks[p] -= eta * g[p];
    return project_policy(std::move(next), kappa, gamma);
}

/// u_t = -K x_t + sum_{i=1..H} M^[i-1] w_{t-i}; window holds the H most
/// recent disturbances, oldest first.
inline Vec act(const PerturbationPolicy& m, const Vec& x, const Mat& k_mat,
               const std::vector<Vec>& window) {
    if (static_cast<int>(window.size()) != m.memory())
        throw ShapeError("act: window must hold H entries");
    Vec u = -k_mat * x;
    const int H = m.memory();
    for (int p = 0; p < H; ++p) u += m.blocks[p] * window[H - 1 - p];
    return u;
}

// ---------------------------------------------------------------------------
// Phase-2 controller loop

inline int default_memory(double kappa, double gamma, std::int64_t T) {
    return std::max(1, static_cast<int>(std::ceil(
                           std::log(kappa * kappa * static_cast<double>(T)) / gamma)));
}

inline double default_learning_rate(double G, double W, std::int64_t T) {
    return 1.0 / (G * std::max(W, 1.0) * std::sqrt(static_cast<double>(T)));
}

// One owner per run; act/observe are called strictly in time order. The
// estimated-disturbance window starts at zero (pre-history) and the OGD
// update for round t runs on the window as it stood before w_hat_t arrives.
class Phase2Controller {
public:
    Phase2Controller(Mat a_hat, Mat b_hat, Mat k_mat, int H, double eta,
                     double kappa, double gamma, const CostGen* costs)
        : A_hat_(std::move(a_hat)),
          B_hat_(std::move(b_hat)),
          K_(std::move(k_mat)),
          H_(H),
          eta_(eta),
          kappa_(kappa),
          gamma_(gamma),
          costs_(costs),
          M_(zero_policy(H, static_cast<int>(B_hat_.cols()),
                         static_cast<int>(A_hat_.rows()))) {
        window_.assign(2 * H_ + 1, Vec::Zero(A_hat_.rows()));
    }

    Vec act(std::int64_t /*t*/, const Vec& x) const {
        Vec u = -K_ * x;
        for (int p = 0; p < H_; ++p) u += M_.blocks[p] * window_[2 * H_ - p];
        return u;
    }

    /// Records w_hat_t = x_next - A_hat x - B_hat u, then performs the OGD step.
    const Vec& observe(std::int64_t t, const Vec& x, const Vec& u, const Vec& x_next) {
        if (!x_next.allFinite())
            throw PreconditionError(
                "phase2: state diverged at t=" + std::to_string(t) +
                " (system estimate too coarse for a stable estimated-disturbance "
                "feedback loop)");
        last_w_hat_ = x_next - A_hat_ * x - B_hat_ * u;
        auto ctx = SurrogateContext::make(A_hat_, B_hat_, K_, H_, window_, costs_, t);
        M_ = ogd_update(M_, ctx, eta_, kappa_, gamma_);
        push_disturbance(last_w_hat_);
        return last_w_hat_;
    }

    void push_disturbance(Vec w_hat) {
        window_.erase(window_.begin());
        window_.push_back(std::move(w_hat));
    }

    const PerturbationPolicy& policy() const { return M_; }
    const std::vector<Vec>& window() const { return window_; }
    int memory() const { return H_; }

private:
    Mat A_hat_, B_hat_, K_;
    int H_;
    double eta_, kappa_, gamma_;
    const CostGen* costs_;
    PerturbationPolicy M_;
    std::vector<Vec> window_;
    Vec last_w_hat_;
};

struct ControlRun {
    Trajectory traj;
    double total_cost = 0.0;
    int H = 0;
    double eta = 0.0;
};

// Runs the perturbation controller with the true system matrices, recovering
// disturbances as w_hat_t = x_{t+1} - A x_t - B u_t (exact up to rounding).
// Defaults: H = ceil(log(kappa^2 T)/gamma), eta = 1/(G W sqrt(T)).
inline ControlRun run_known_system(const LinSystem& sys,
                                   const StabilityCertificate& cert,
                                   const DisturbanceGen& dist, const CostGen& costs,
                                   std::int64_t T, int H = -1, double eta = -1.0) {
    const auto rep = lds::check_strong_stability(sys, cert);
    if (!rep.pass)
        throw PreconditionError("run_known_system: stability certificate check failed");
    if (T < 1) throw InvalidInputError("run_known_system: horizon must be >= 1");
    if (H < 0) H = default_memory(cert.kappa, cert.gamma, T);
    if (eta < 0.0) eta = default_learning_rate(costs.G, dist.bound, T);

    Phase2Controller ctrl(sys.A, sys.B, cert.K, H, eta, cert.kappa, cert.gamma,
                          &costs);
    ControlRun run;
    run.H = H;
    run.eta = eta;
    Trajectory& traj = run.traj;
    Vec x = Vec::Zero(sys.state_dim());
    traj.x.push_back(x);
    for (std::int64_t t = 0; t < T; ++t) {
        Vec u = ctrl.act(t, x);
        const Vec w = dist.at(t);
        traj.cost.push_back(costs.at(t, x, u));
        Vec x_next = lds::step(sys, x, u, w);
        traj.w_hat.push_back(ctrl.observe(t, x, u, x_next));
        traj.u.push_back(std::move(u));
        traj.w.push_back(w);
        traj.x.push_back(x_next);
        x = std::move(x_next);
    }
    run.total_cost = traj.total_cost();
    return run;
}

}  // namespace nsc::gpc
