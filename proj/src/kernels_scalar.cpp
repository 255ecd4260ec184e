#include "medboot/kernels.hpp"

// Scalar reference backend. The four-lane accumulation mirrors the AVX2 lane
// layout exactly; do not collapse it to a single accumulator or the backends
// stop being bitwise comparable.

namespace medboot::kernels::scalar_impl {

double sum(const double* x, std::size_t n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t{3};
  for (; i < n4; i += 4) {
    a0 += x[i];
    a1 += x[i + 1];
    a2 += x[i + 2];
    a3 += x[i + 3];
  }
  double tail = 0;
  for (; i < n; ++i) tail += x[i];
  return ((a0 + a1) + (a2 + a3)) + tail;
}

double dot(const double* x, const double* y, std::size_t n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t{3};
  for (; i < n4; i += 4) {
    a0 += x[i] * y[i];
    a1 += x[i + 1] * y[i + 1];
    a2 += x[i + 2] * y[i + 2];
    a3 += x[i + 3] * y[i + 3];
  }
  double tail = 0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return ((a0 + a1) + (a2 + a3)) + tail;
}

double sumsq(const double* x, std::size_t n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t{3};
  for (; i < n4; i += 4) {
    a0 += x[i] * x[i];
    a1 += x[i + 1] * x[i + 1];
    a2 += x[i + 2] * x[i + 2];
    a3 += x[i + 3] * x[i + 3];
  }
  double tail = 0;
  for (; i < n; ++i) tail += x[i] * x[i];
  return ((a0 + a1) + (a2 + a3)) + tail;
}

void axpy_neg(double* out, const double* x, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] -= c * x[i];
}

void gather(double* out, const double* x, const std::int32_t* idx,
            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[idx[i]];
}

}  // namespace medboot::kernels::scalar_impl
