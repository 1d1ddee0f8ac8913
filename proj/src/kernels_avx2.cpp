#include "mixl/kernels.hpp"

// AVX2 variants. One block of 4 rows maps to one 256-bit lane set; columns
// accumulate sequentially in scalar order, with explicit mul then add so the
// result is bit-identical to the scalar backend.

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace mixl {
namespace kern {

namespace {

__attribute__((target("avx2"))) void matvec_blocked_avx2(const double* blocks,
                                                         int n_blocks, int n_cols,
                                                         const double* w, double* out) {
  for (int b = 0; b < n_blocks; ++b) {
    const double* base = blocks + static_cast<std::size_t>(b) * n_cols * 4;
    __m256d acc = _mm256_setzero_pd();
    for (int k = 0; k < n_cols; ++k) {
      const __m256d col = _mm256_loadu_pd(base + k * 4);
      const __m256d wk = _mm256_set1_pd(w[k]);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(col, wk));
    }
    _mm256_storeu_pd(out + b * 4, acc);
  }
}

__attribute__((target("avx2"))) void axpy_avx2(int n, double a, const double* x,
                                               double* y) {
  const __m256d av = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(yv, _mm256_mul_pd(xv, av)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

bool avx2_supported() { return __builtin_cpu_supports("avx2") != 0; }

const Backend& avx2_backend() {
  static const Backend backend{"avx2", &matvec_blocked_avx2, &axpy_avx2};
  return backend;
}

}  // namespace kern
}  // namespace mixl

#else

namespace mixl {
namespace kern {

bool avx2_supported() { return false; }
const Backend& avx2_backend() { return scalar_backend(); }

}  // namespace kern
}  // namespace mixl

#endif
