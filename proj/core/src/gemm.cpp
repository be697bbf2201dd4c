#include "cartogan/gemm.hpp"

#include <cblas-openblas.h>

namespace cartogan::ag::detail {

namespace {

// Training determinism requires a fixed intra-gemm thread count.
struct SingleThreadInit {
    SingleThreadInit() { openblas_set_num_threads(1); }
};
const SingleThreadInit init_once{};

CBLAS_TRANSPOSE op(bool t) { return t ? CblasTrans : CblasNoTrans; }

} // namespace

void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda,
          const float* b, int ldb, float beta, float* c, int ldc) {
    cblas_sgemm(CblasRowMajor, op(trans_a), op(trans_b), m, n, k, alpha, a, lda, b, ldb, beta, c,
                ldc);
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda,
          const double* b, int ldb, double beta, double* c, int ldc) {
    cblas_dgemm(CblasRowMajor, op(trans_a), op(trans_b), m, n, k, alpha, a, lda, b, ldb, beta, c,
                ldc);
}

} // namespace cartogan::ag::detail
