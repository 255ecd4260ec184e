#include "medboot/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace medboot::kernels {

namespace scalar_impl {
double sum(const double*, std::size_t);
double dot(const double*, const double*, std::size_t);
double sumsq(const double*, std::size_t);
void axpy_neg(double*, const double*, double, std::size_t);
void gather(double*, const double*, const std::int32_t*, std::size_t);
}  // namespace scalar_impl

namespace avx2_impl {
bool compiled();
double sum(const double*, std::size_t);
double dot(const double*, const double*, std::size_t);
double sumsq(const double*, std::size_t);
void axpy_neg(double*, const double*, double, std::size_t);
void gather(double*, const double*, const std::int32_t*, std::size_t);
}  // namespace avx2_impl

namespace {

struct Vtable {
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*sumsq)(const double*, std::size_t);
  void (*axpy_neg)(double*, const double*, double, std::size_t);
  void (*gather)(double*, const double*, const std::int32_t*, std::size_t);
  const char* name;
};

constexpr Vtable kScalar{scalar_impl::sum,   scalar_impl::dot,
                         scalar_impl::sumsq, scalar_impl::axpy_neg,
                         scalar_impl::gather, "scalar"};

constexpr Vtable kAvx2{avx2_impl::sum,   avx2_impl::dot,
                       avx2_impl::sumsq, avx2_impl::axpy_neg,
                       avx2_impl::gather, "avx2"};

const Vtable* pick(Backend b) {
  const bool can_avx2 = avx2_supported() && avx2_impl::compiled();
  switch (b) {
    case Backend::scalar:
      return &kScalar;
    case Backend::avx2:
      return can_avx2 ? &kAvx2 : &kScalar;
    case Backend::automatic:
    default: {
      if (const char* env = std::getenv("MEDBOOT_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return &kScalar;
        if (std::strcmp(env, "avx2") == 0) return can_avx2 ? &kAvx2 : &kScalar;
      }
      return can_avx2 ? &kAvx2 : &kScalar;
    }
  }
}

const Vtable*& active_slot() {
  static const Vtable* v = pick(Backend::automatic);
  return v;
}

}  // namespace

double sum(const double* x, std::size_t n) { return active_slot()->sum(x, n); }

double dot(const double* x, const double* y, std::size_t n) {
  return active_slot()->dot(x, y, n);
}

double sumsq(const double* x, std::size_t n) {
  return active_slot()->sumsq(x, n);
}

void axpy_neg(double* out, const double* x, double c, std::size_t n) {
  active_slot()->axpy_neg(out, x, c, n);
}

void gather(double* out, const double* x, const std::int32_t* idx,
            std::size_t n) {
  active_slot()->gather(out, x, idx, n);
}

bool avx2_supported() { return __builtin_cpu_supports("avx2") != 0; }

const char* active_backend() { return active_slot()->name; }

void set_backend(Backend b) { active_slot() = pick(b); }

}  // namespace medboot::kernels
