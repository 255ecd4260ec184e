#pragma once

#include <cstddef>
#include <cstdint>

// Low-level reduction and gather kernels used by the bootstrap hot paths.
//
// Two backends are compiled: a scalar reference and an AVX2 variant. Both
// use the same four-lane accumulation pattern (four independent partial sums
// over index strides 4k+0..4k+3, combined as ((a0+a1)+(a2+a3))+tail), and
// both translation units are built with -ffp-contract=off, so the backends
// produce bitwise-identical results. The active backend is picked at runtime
// from CPU capabilities and can be overridden with set_backend() or the
// MEDBOOT_KERNELS environment variable ("scalar" or "avx2").

namespace medboot::kernels {

enum class Backend { automatic, scalar, avx2 };

// Sum of x[0..n).
double sum(const double* x, std::size_t n);

// Dot product of x[0..n) and y[0..n).
double dot(const double* x, const double* y, std::size_t n);

// Sum of squares of x[0..n).
double sumsq(const double* x, std::size_t n);

// out[i] -= c * x[i] for i in [0, n).
void axpy_neg(double* out, const double* x, double c, std::size_t n);

// out[i] = x[idx[i]] for i in [0, n). Indices must lie in range.
void gather(double* out, const double* x, const std::int32_t* idx,
            std::size_t n);

// True when the running CPU supports the AVX2 backend.
bool avx2_supported();

// Name of the backend currently in use: "scalar" or "avx2".
const char* active_backend();

// Select a backend. `automatic` honors MEDBOOT_KERNELS and otherwise picks
// AVX2 when supported; an unsupported explicit request falls back to scalar.
// Call at startup or from tests, not concurrently with running kernels.
void set_backend(Backend b);

}  // namespace medboot::kernels
