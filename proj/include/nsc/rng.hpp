#pragma once

// Counter-based pseudorandomness. Every draw is a pure function of
// (seed, stream, substream, index): disturbance and exploration sequences can
// be replayed at any index without consuming earlier ones, which is what makes
// them structurally oblivious to the controls.

#include "nsc/numerics.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace nsc {

/// splitmix64 output function (Steele, Lea, Flood 2014).
inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

enum class Stream : std::uint64_t {
    kDisturbance = 1,
    kExploration = 2,
    kInstance = 3,
    kSearch = 4,
    kVerify = 5,
    kPerturb = 6,
};

class CounterRng {
public:
    CounterRng(std::uint64_t seed, Stream stream, std::uint64_t substream = 0)
        : key_(splitmix64(
              splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream)) ^
              substream)) {}

    // splitmix64 stream rooted at key_, evaluated at an arbitrary counter.
    std::uint64_t word(std::uint64_t index) const {
        return splitmix64(key_ + index * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform on [0, 1).
    double uniform01(std::uint64_t index) const {
        return static_cast<double>(word(index) >> 11) * 0x1.0p-53;
    }

    double uniform(std::uint64_t index, double lo, double hi) const {
        return lo + (hi - lo) * uniform01(index);
    }

    /// +1 or -1 with equal probability.
    double rademacher(std::uint64_t index) const {
        return (word(index) & 1ULL) ? 1.0 : -1.0;
    }

    // Box-Muller on counters (2i, 2i+1); rejection-free so the draw stays a
    // pure function of the index.
    double gaussian(std::uint64_t index) const {
        const double u1 =
            (static_cast<double>(word(2 * index) >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01(2 * index + 1);
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    Vec gaussian_vec(int dim, std::uint64_t t) const {
        Vec v(dim);
        for (int c = 0; c < dim; ++c)
            v(c) = gaussian(t * static_cast<std::uint64_t>(dim) + c);
        return v;
    }

    Vec uniform_vec(int dim, std::uint64_t t, double lo, double hi) const {
        Vec v(dim);
        for (int c = 0; c < dim; ++c)
            v(c) = uniform(t * static_cast<std::uint64_t>(dim) + c, lo, hi);
        return v;
    }

    Vec rademacher_vec(int dim, std::uint64_t t) const {
        Vec v(dim);
        for (int c = 0; c < dim; ++c)
            v(c) = rademacher(t * static_cast<std::uint64_t>(dim) + c);
        return v;
    }

    Mat gaussian_mat(int rows, int cols) const {
        Mat m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                m(i, j) = gaussian(static_cast<std::uint64_t>(i) * cols + j);
        return m;
    }

private:
    std::uint64_t key_;
};

/// Haar-ish random orthogonal matrix: QR of a Gaussian matrix with the sign
/// convention diag(R) > 0.
inline Mat random_orthogonal(const CounterRng& rng, int dim) {
    Mat g = rng.gaussian_mat(dim, dim);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < dim; ++i)
        if (r(i, i) < 0) q.col(i) *= -1.0;
    return q;
}

}  // namespace nsc
