#include "quenchroll/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstring>

namespace quenchroll::kernels {

namespace scalar {

void vmul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void vcube(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * a[i] * a[i];
}

void vaxpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
  }
}

void cscale(cplx* a, const double* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= m[i];
}

void butterfly(cplx* lo, cplx* hi, const cplx* t, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const cplx u = lo[i];
    lo[i] = u + t[i];
    hi[i] = u - t[i];
  }
}

double weighted_abs2_sum(const cplx* a, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += w[i] * (a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
  return s;
}

double max_abs(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

} // namespace scalar

#if defined(__x86_64__)
namespace avx2 {
void vmul(const double*, const double*, double*, std::size_t);
void vcube(const double*, double*, std::size_t);
void vaxpy(double, const double*, double*, std::size_t);
void cmul(const cplx*, const cplx*, cplx*, std::size_t);
void cscale(cplx*, const double*, std::size_t);
void butterfly(cplx*, cplx*, const cplx*, std::size_t);
double weighted_abs2_sum(const cplx*, const double*, std::size_t);
double max_abs(const double*, std::size_t);
bool available();
} // namespace avx2
#endif

namespace {

struct Backend {
  const char* name;
  void (*vmul)(const double*, const double*, double*, std::size_t);
  void (*vcube)(const double*, double*, std::size_t);
  void (*vaxpy)(double, const double*, double*, std::size_t);
  void (*cmul)(const cplx*, const cplx*, cplx*, std::size_t);
  void (*cscale)(cplx*, const double*, std::size_t);
  void (*butterfly)(cplx*, cplx*, const cplx*, std::size_t);
  double (*weighted_abs2_sum)(const cplx*, const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
};

constexpr Backend kScalar = {
    "scalar",       scalar::vmul,      scalar::vcube,
    scalar::vaxpy,  scalar::cmul,      scalar::cscale,
    scalar::butterfly, scalar::weighted_abs2_sum, scalar::max_abs};

#if defined(__x86_64__)
constexpr Backend kAvx2 = {
    "avx2",       avx2::vmul,      avx2::vcube,
    avx2::vaxpy,  avx2::cmul,      avx2::cscale,
    avx2::butterfly, avx2::weighted_abs2_sum, avx2::max_abs};
#endif

const Backend* detect() {
#if defined(__x86_64__)
  if (avx2::available()) return &kAvx2;
#endif
  return &kScalar;
}

std::atomic<const Backend*> g_backend{nullptr};

const Backend* backend() {
  const Backend* b = g_backend.load(std::memory_order_acquire);
  if (!b) {
    b = detect();
    g_backend.store(b, std::memory_order_release);
  }
  return b;
}

} // namespace

const char* active_backend() { return backend()->name; }

bool select_backend(const char* name) {
  if (std::strcmp(name, "scalar") == 0) {
    g_backend.store(&kScalar, std::memory_order_release);
    return true;
  }
#if defined(__x86_64__)
  if (std::strcmp(name, "avx2") == 0 && avx2::available()) {
    g_backend.store(&kAvx2, std::memory_order_release);
    return true;
  }
#endif
  if (std::strcmp(name, "auto") == 0) {
    g_backend.store(detect(), std::memory_order_release);
    return true;
  }
  return false;
}

void vmul(const double* a, const double* b, double* out, std::size_t n) {
  backend()->vmul(a, b, out, n);
}
void vcube(const double* a, double* out, std::size_t n) {
  backend()->vcube(a, out, n);
}
void vaxpy(double alpha, const double* x, double* y, std::size_t n) {
  backend()->vaxpy(alpha, x, y, n);
}
void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  backend()->cmul(a, b, out, n);
}
void cscale(cplx* a, const double* m, std::size_t n) {
  backend()->cscale(a, m, n);
}
void butterfly(cplx* lo, cplx* hi, const cplx* t, std::size_t n) {
  backend()->butterfly(lo, hi, t, n);
}
double weighted_abs2_sum(const cplx* a, const double* w, std::size_t n) {
  return backend()->weighted_abs2_sum(a, w, n);
}
double max_abs(const double* a, std::size_t n) {
  return backend()->max_abs(a, n);
}

} // namespace quenchroll::kernels
