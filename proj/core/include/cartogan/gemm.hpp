#ifndef CARTOGAN_GEMM_HPP
#define CARTOGAN_GEMM_HPP

#include <cstddef>

namespace cartogan::ag::detail {

// Row-major C(m x n) = alpha * op(A) * op(B) + beta * C. Backed by a
// single-threaded BLAS so results are bitwise reproducible run to run.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda,
          const float* b, int ldb, float beta, float* c, int ldc);
void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda,
          const double* b, int ldb, double beta, double* c, int ldc);

} // namespace cartogan::ag::detail

#endif
