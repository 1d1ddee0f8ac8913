#include "mixl/kernels.hpp"

// Reference kernels. The SIMD backends must match these bit for bit: same
// accumulation order along the column axis, separate mul and add (this TU is
// compiled with contraction off).

namespace mixl {
namespace kern {

namespace {

void matvec_blocked_scalar(const double* blocks, int n_blocks, int n_cols,
                           const double* w, double* out) {
  for (int b = 0; b < n_blocks; ++b) {
    const double* base = blocks + static_cast<std::size_t>(b) * n_cols * 4;
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    for (int k = 0; k < n_cols; ++k) {
      const double wk = w[k];
      const double* col = base + k * 4;
      acc0 += col[0] * wk;
      acc1 += col[1] * wk;
      acc2 += col[2] * wk;
      acc3 += col[3] * wk;
    }
    double* o = out + b * 4;
    o[0] = acc0;
    o[1] = acc1;
    o[2] = acc2;
    o[3] = acc3;
  }
}

void axpy_scalar(int n, double a, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend backend{"scalar", &matvec_blocked_scalar, &axpy_scalar};
  return backend;
}

}  // namespace kern
}  // namespace mixl
