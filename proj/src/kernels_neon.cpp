#include "mixl/kernels.hpp"

// NEON variants for aarch64. Two 128-bit lanes cover a 4-row block; same
// column order and mul-then-add discipline as the scalar backend.

#if defined(__aarch64__)
#include <arm_neon.h>

namespace mixl {
namespace kern {

namespace {

void matvec_blocked_neon(const double* blocks, int n_blocks, int n_cols,
                         const double* w, double* out) {
  for (int b = 0; b < n_blocks; ++b) {
    const double* base = blocks + static_cast<std::size_t>(b) * n_cols * 4;
    float64x2_t acc_lo = vdupq_n_f64(0.0);
    float64x2_t acc_hi = vdupq_n_f64(0.0);
    for (int k = 0; k < n_cols; ++k) {
      const double* col = base + k * 4;
      const float64x2_t wk = vdupq_n_f64(w[k]);
      acc_lo = vaddq_f64(acc_lo, vmulq_f64(vld1q_f64(col), wk));
      acc_hi = vaddq_f64(acc_hi, vmulq_f64(vld1q_f64(col + 2), wk));
    }
    vst1q_f64(out + b * 4, acc_lo);
    vst1q_f64(out + b * 4 + 2, acc_hi);
  }
}

void axpy_neon(int n, double a, const double* x, double* y) {
  const float64x2_t av = vdupq_n_f64(a);
  int i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    const float64x2_t yv = vld1q_f64(y + i);
    vst1q_f64(y + i, vaddq_f64(yv, vmulq_f64(xv, av)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

bool neon_supported() { return true; }

const Backend& neon_backend() {
  static const Backend backend{"neon", &matvec_blocked_neon, &axpy_neon};
  return backend;
}

}  // namespace kern
}  // namespace mixl

#else

namespace mixl {
namespace kern {

bool neon_supported() { return false; }
const Backend& neon_backend() { return scalar_backend(); }

}  // namespace kern
}  // namespace mixl

#endif
