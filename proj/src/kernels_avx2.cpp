#include "medboot/kernels.hpp"

// AVX2 backend. Each 256-bit accumulator lane holds the partial sum over
// indices 4k+j, matching the scalar reference's four-lane pattern; the
// horizontal reduction ((a0+a1)+(a2+a3))+tail is likewise identical. Only
// plain mul/add/sub are used (no FMA), so with contraction disabled the two
// backends agree bit for bit.

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace medboot::kernels::avx2_impl {

#if defined(__AVX2__)

bool compiled() { return true; }

namespace {
inline double reduce_lanes(__m256d acc, double tail) {
  alignas(32) double l[4];
  _mm256_store_pd(l, acc);
  return ((l[0] + l[1]) + (l[2] + l[3])) + tail;
}
}  // namespace

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t{3};
  for (; i < n4; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double tail = 0;
  for (; i < n; ++i) tail += x[i];
  return reduce_lanes(acc, tail);
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t{3};
  for (; i < n4; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, p);
  }
  double tail = 0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return reduce_lanes(acc, tail);
}

double sumsq(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t{3};
  for (; i < n4; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double tail = 0;
  for (; i < n; ++i) tail += x[i] * x[i];
  return reduce_lanes(acc, tail);
}

void axpy_neg(double* out, const double* x, double c, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t{3};
  for (; i < n4; i += 4) {
    const __m256d o = _mm256_loadu_pd(out + i);
    const __m256d p = _mm256_mul_pd(vc, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(o, p));
  }
  for (; i < n; ++i) out[i] -= c * x[i];
}

void gather(double* out, const double* x, const std::int32_t* idx,
            std::size_t n) {
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t{3};
  for (; i < n4; i += 4) {
    const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    _mm256_storeu_pd(out + i, _mm256_i32gather_pd(x, vi, 8));
  }
  for (; i < n; ++i) out[i] = x[idx[i]];
}

#else  // !defined(__AVX2__)

bool compiled() { return false; }

double sum(const double*, std::size_t) { return 0; }
double dot(const double*, const double*, std::size_t) { return 0; }
double sumsq(const double*, std::size_t) { return 0; }
void axpy_neg(double*, const double*, double, std::size_t) {}
void gather(double*, const double*, const std::int32_t*, std::size_t) {}

#endif

}  // namespace medboot::kernels::avx2_impl
