#pragma once

#include "nsc/numerics.hpp"
#include "nsc/rng.hpp"

#include <gtest/gtest.h>

namespace nsc::test {

inline Mat random_mat(std::uint64_t seed, int rows, int cols) {
    CounterRng rng(seed, Stream::kVerify, 999);
    return rng.gaussian_mat(rows, cols);
}

inline Vec random_vec(std::uint64_t seed, int dim) {
    CounterRng rng(seed, Stream::kVerify, 998);
    return rng.gaussian_vec(dim, 0);
}

inline void expect_mat_near(const Mat& a, const Mat& b, double tol,
                            const char* what = "") {
    ASSERT_EQ(a.rows(), b.rows()) << what;
    ASSERT_EQ(a.cols(), b.cols()) << what;
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), tol) << what;
}

}  // namespace nsc::test
