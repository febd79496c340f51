#pragma once

// Dense real linear-algebra kernel shared by every other header. Thin layer
// over Eigen decompositions plus the project-wide error taxonomy.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Singular values below this are treated as rank deficiency everywhere;
// solves fail loudly instead of regularizing.
inline constexpr double kRankTol = 1e-8;

struct InvalidInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RankError : std::runtime_error {
    double sigma;
    RankError(const std::string& what, double sigma_min_value)
        : std::runtime_error(what + " (sigma_min=" + std::to_string(sigma_min_value) + ")"),
          sigma(sigma_min_value) {}
};

struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string field_name, const std::string& what)
        : std::runtime_error("config field '" + field_name + "': " + what),
          field(std::move(field_name)) {}
};

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SearchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require_nonempty(const Mat& m, const char* what) {
    if (m.rows() == 0 || m.cols() == 0)
        throw InvalidInputError(std::string(what) + ": empty matrix");
}

inline void require_finite(const Mat& m, const char* what) {
    if (!m.allFinite())
        throw InvalidInputError(std::string(what) + ": non-finite entries");
}

/// Largest singular value.
inline double spectral_norm(const Mat& m) {
    require_nonempty(m, "spectral_norm");
    require_finite(m, "spectral_norm");
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

/// Smallest singular value (over min(rows, cols) values).
inline double sigma_min(const Mat& m) {
    require_nonempty(m, "sigma_min");
    require_finite(m, "sigma_min");
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    return sv(sv.size() - 1);
}

// Minimizes ||X A - B||_F over X. For full-row-rank A this is B A^T (A A^T)^-1,
// computed through the SVD pseudo-inverse. Throws RankError when A is within
// kRankTol of row-rank deficiency.
inline Mat solve_least_squares(const Mat& a, const Mat& b) {
    require_nonempty(a, "solve_least_squares");
    require_finite(a, "solve_least_squares");
    require_finite(b, "solve_least_squares");
    if (b.cols() != a.cols())
        throw ShapeError("solve_least_squares: column mismatch between A and B");
    const double smin = (a.rows() <= a.cols()) ? sigma_min(a) : 0.0;
    if (smin < kRankTol)
        throw RankError("solve_least_squares: rank-deficient system", smin);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    // A = U S V^T  =>  A^+ = V S^-1 U^T, X = B A^+
    return b * svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
           svd.matrixU().transpose();
}

/// Nearest matrix in Frobenius distance with spectral norm <= r
/// (singular values clipped at r).
inline Mat project_spectral_ball(const Mat& m, double r) {
    require_nonempty(m, "project_spectral_ball");
    require_finite(m, "project_spectral_ball");
    if (r < 0.0)
        throw InvalidInputError("project_spectral_ball: negative radius");
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(0) <= r)
        return m;
    Vec clipped = svd.singularValues().cwiseMin(r);
    return svd.matrixU() * clipped.asDiagonal() * svd.matrixV().transpose();
}

/// M^p by binary exponentiation; p = 0 gives the identity.
inline Mat mat_power(const Mat& m, long p) {
    if (m.rows() != m.cols())
        throw ShapeError("mat_power: matrix must be square");
    if (p < 0)
        throw InvalidInputError("mat_power: negative exponent");
    Mat result = Mat::Identity(m.rows(), m.cols());
    Mat base = m;
    while (p > 0) {
        if (p & 1) result = result * base;
        base = base * base;
        p >>= 1;
    }
    return result;
}

/// Largest eigenvalue magnitude.
inline double spectral_radius(const Mat& m) {
    if (m.rows() != m.cols())
        throw ShapeError("spectral_radius: matrix must be square");
    require_finite(m, "spectral_radius");
    Eigen::EigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace nsc
