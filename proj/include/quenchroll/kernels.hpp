#pragma once
// Data-parallel array primitives used by the spectral inner loops.
// Scalar reference implementations plus an AVX2 variant selected once at
// runtime on x86-64 (other targets take the scalar path); equivalence is
// enforced by the kernel test suite.

#include <complex>
#include <cstddef>

namespace quenchroll::kernels {

using cplx = std::complex<double>;

// Name of the backend picked at startup: "scalar", "avx2" or "neon".
const char* active_backend();

// Force a specific backend ("scalar" disables SIMD). Returns false if the
// requested backend is unavailable on this machine. Intended for tests.
bool select_backend(const char* name);

// out[i] = a[i] * b[i]
void vmul(const double* a, const double* b, double* out, std::size_t n);

// out[i] = a[i]^3
void vcube(const double* a, double* out, std::size_t n);

// y[i] += alpha * x[i]
void vaxpy(double alpha, const double* x, double* y, std::size_t n);

// out[i] = a[i] * b[i]   (complex pointwise product)
void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n);

// a[i] *= m[i]           (complex scaled by real multiplier array)
void cscale(cplx* a, const double* m, std::size_t n);

// lo[i] += t[i]; hi[i] = lo_old[i] - t[i]   (FFT butterfly combine)
void butterfly(cplx* lo, cplx* hi, const cplx* t, std::size_t n);

// sum_i w[i] * |a[i]|^2
double weighted_abs2_sum(const cplx* a, const double* w, std::size_t n);

// max_i |a[i]|
double max_abs(const double* a, std::size_t n);

} // namespace quenchroll::kernels
