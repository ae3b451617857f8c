#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "tvc/error.hpp"

namespace tvc {

// Dense row-major matrix of doubles. All model math runs in float64.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(size_t(r) * size_t(c), fill) {}

    double& operator()(int r, int c) { return a[size_t(r) * cols + c]; }
    double operator()(int r, int c) const { return a[size_t(r) * cols + c]; }

    size_t size() const { return a.size(); }
    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const {
        for (double v : a)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

// C = A * B
Mat matmul(const Mat& A, const Mat& B);
// C = A^T * B
Mat matmul_tn(const Mat& A, const Mat& B);
// C = A * B^T
Mat matmul_nt(const Mat& A, const Mat& B);

Mat transpose(const Mat& A);

void add_inplace(Mat& A, const Mat& B);
void axpy_inplace(Mat& A, double alpha, const Mat& B);  // A += alpha * B

double sumsq_diff(const Mat& A, const Mat& B);
double sumsq(const Mat& A);

}  // namespace tvc
