#include "mixl/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "mixl/errors.hpp"

namespace mixl {

BlockedRowMatrix::BlockedRowMatrix(int n_rows, int n_cols)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      data_(static_cast<std::size_t>((n_rows + 3) / 4) * n_cols * 4, 0.0) {}

void BlockedRowMatrix::set(int r, int c, double v) {
  const int b = r / 4;
  const int lane = r % 4;
  data_[(static_cast<std::size_t>(b) * n_cols_ + c) * 4 + lane] = v;
}

double BlockedRowMatrix::at(int r, int c) const {
  const int b = r / 4;
  const int lane = r % 4;
  return data_[(static_cast<std::size_t>(b) * n_cols_ + c) * 4 + lane];
}

namespace kern {

namespace {

const Backend& resolve_backend() {
  const char* env = std::getenv("MIXL_KERNEL");
  if (env != nullptr && *env != '\0') {
    const std::string name(env);
    if (name == "scalar") return scalar_backend();
    if (name == "avx2") {
      if (!avx2_supported()) throw SpecError("MIXL_KERNEL=avx2 but avx2 is unavailable");
      return avx2_backend();
    }
    if (name == "neon") {
      if (!neon_supported()) throw SpecError("MIXL_KERNEL=neon but neon is unavailable");
      return neon_backend();
    }
    throw SpecError("unknown MIXL_KERNEL value: " + name);
  }
  if (avx2_supported()) return avx2_backend();
  if (neon_supported()) return neon_backend();
  return scalar_backend();
}

}  // namespace

const Backend& active_backend() {
  static const Backend& backend = resolve_backend();
  return backend;
}

}  // namespace kern

void utilities_blocked(const BlockedRowMatrix& m, const double* w, double* out,
                       const kern::Backend& backend) {
  backend.matvec_blocked(m.data(), m.blocks(), m.cols(), w, out);
}

}  // namespace mixl
