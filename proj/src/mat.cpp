#include "tvc/mat.hpp"

namespace tvc {

Mat matmul(const Mat& A, const Mat& B) {
    require(A.cols == B.rows, Err::ShapeMismatch, "matmul inner dims");
    Mat C(A.rows, B.cols, 0.0);
    for (int i = 0; i < A.rows; ++i) {
        for (int k = 0; k < A.cols; ++k) {
            const double aik = A(i, k);
            if (aik == 0.0) continue;
            const double* brow = &B.a[size_t(k) * B.cols];
            double* crow = &C.a[size_t(i) * C.cols];
            for (int j = 0; j < B.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return C;
}

Mat matmul_tn(const Mat& A, const Mat& B) {
    require(A.rows == B.rows, Err::ShapeMismatch, "matmul_tn inner dims");
    Mat C(A.cols, B.cols, 0.0);
    for (int k = 0; k < A.rows; ++k) {
        const double* arow = &A.a[size_t(k) * A.cols];
        const double* brow = &B.a[size_t(k) * B.cols];
        for (int i = 0; i < A.cols; ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* crow = &C.a[size_t(i) * C.cols];
            for (int j = 0; j < B.cols; ++j) crow[j] += aki * brow[j];
        }
    }
    return C;
}

Mat matmul_nt(const Mat& A, const Mat& B) {
    require(A.cols == B.cols, Err::ShapeMismatch, "matmul_nt inner dims");
    Mat C(A.rows, B.rows, 0.0);
    for (int i = 0; i < A.rows; ++i) {
        const double* arow = &A.a[size_t(i) * A.cols];
        for (int j = 0; j < B.rows; ++j) {
            const double* brow = &B.a[size_t(j) * B.cols];
            double s = 0.0;
            for (int k = 0; k < A.cols; ++k) s += arow[k] * brow[k];
            C(i, j) = s;
        }
    }
    return C;
}

Mat transpose(const Mat& A) {
    Mat T(A.cols, A.rows);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
    return T;
}

void add_inplace(Mat& A, const Mat& B) {
    require(A.same_shape(B), Err::ShapeMismatch, "add_inplace shapes");
    for (size_t i = 0; i < A.a.size(); ++i) A.a[i] += B.a[i];
}

void axpy_inplace(Mat& A, double alpha, const Mat& B) {
    require(A.same_shape(B), Err::ShapeMismatch, "axpy shapes");
    for (size_t i = 0; i < A.a.size(); ++i) A.a[i] += alpha * B.a[i];
}

double sumsq_diff(const Mat& A, const Mat& B) {
    require(A.same_shape(B), Err::ShapeMismatch, "sumsq_diff shapes");
    double s = 0.0;
    for (size_t i = 0; i < A.a.size(); ++i) {
        const double d = A.a[i] - B.a[i];
        s += d * d;
    }
    return s;
}

double sumsq(const Mat& A) {
    double s = 0.0;
    for (double v : A.a) s += v * v;
    return s;
}

}  // namespace tvc
