#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mixl {

// Row-major design rows packed in blocks of 4 for the SIMD kernels: block b
// holds rows 4b..4b+3, stored column-interleaved (4 consecutive doubles are
// the same column of the 4 rows). Padding rows are zero.
class BlockedRowMatrix {
 public:
  BlockedRowMatrix() = default;
  BlockedRowMatrix(int n_rows, int n_cols);

  int rows() const { return n_rows_; }
  int cols() const { return n_cols_; }
  int blocks() const { return (n_rows_ + 3) / 4; }
  int padded_rows() const { return blocks() * 4; }

  void set(int r, int c, double v);
  double at(int r, int c) const;
  const double* data() const { return data_.data(); }

 private:
  int n_rows_ = 0;
  int n_cols_ = 0;
  std::vector<double> data_;
};

namespace kern {

// A kernel backend. All backends produce bit-identical results: the SIMD
// variants assign one row per lane and accumulate columns in the same order
// as the scalar loop, with separate mul and add (no fma).
struct Backend {
  const char* name;
  // out[r] = dot(row r, w) for every padded row; out has padded_rows slots.
  void (*matvec_blocked)(const double* blocks, int n_blocks, int n_cols,
                         const double* w, double* out);
  // y += a * x, n elements.
  void (*axpy)(int n, double a, const double* x, double* y);
};

const Backend& scalar_backend();
bool avx2_supported();
const Backend& avx2_backend();  // falls back to scalar off x86-64
bool neon_supported();
const Backend& neon_backend();  // falls back to scalar off aarch64

// Best supported backend, overridable with MIXL_KERNEL=scalar|avx2|neon.
// Resolved once per process. Throws SpecError for an unknown or unsupported
// override value.
const Backend& active_backend();

}  // namespace kern

// Convenience wrapper: utilities for all rows of a blocked matrix.
void utilities_blocked(const BlockedRowMatrix& m, const double* w, double* out,
                       const kern::Backend& backend);

}  // namespace mixl
