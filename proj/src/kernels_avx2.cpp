// AVX2 kernel variants. This translation unit is compiled with -mavx2 -mfma;
// nothing here runs unless the cpuid check in available() passes.

#include "quenchroll/kernels.hpp"

#if defined(__x86_64__)

#include <immintrin.h>

namespace quenchroll::kernels::avx2 {

bool available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

void vmul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void vcube(const double* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(a + i);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_mul_pd(x, x), x));
  }
  for (; i < n; ++i) out[i] = a[i] * a[i] * a[i];
}

void vaxpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

namespace {

// Two complex<double> per __m256d lane pair: [re0, im0, re1, im1].
inline __m256d cmul2(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);                    // [br0,br0,br1,br1]
  const __m256d b_im = _mm256_permute_pd(b, 0xF);               // [bi0,bi0,bi1,bi1]
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);               // [ai0,ar0,ai1,ar1]
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

} // namespace

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(po + 2 * i, cmul2(_mm256_loadu_pd(pa + 2 * i),
                                       _mm256_loadu_pd(pb + 2 * i)));
  }
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
  }
}

void cscale(cplx* a, const double* m, std::size_t n) {
  double* pa = reinterpret_cast<double*>(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m128d mm = _mm_loadu_pd(m + i);
    const __m256d mj = _mm256_set_pd(mm[1], mm[1], mm[0], mm[0]);
    _mm256_storeu_pd(pa + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(pa + 2 * i), mj));
  }
  for (; i < n; ++i) a[i] *= m[i];
}

void butterfly(cplx* lo, cplx* hi, const cplx* t, std::size_t n) {
  double* pl = reinterpret_cast<double*>(lo);
  double* ph = reinterpret_cast<double*>(hi);
  const double* pt = reinterpret_cast<const double*>(t);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d u = _mm256_loadu_pd(pl + 2 * i);
    const __m256d v = _mm256_loadu_pd(pt + 2 * i);
    _mm256_storeu_pd(pl + 2 * i, _mm256_add_pd(u, v));
    _mm256_storeu_pd(ph + 2 * i, _mm256_sub_pd(u, v));
  }
  for (; i < n; ++i) {
    const cplx u = lo[i];
    lo[i] = u + t[i];
    hi[i] = u - t[i];
  }
}

double weighted_abs2_sum(const cplx* a, const double* w, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d x = _mm256_loadu_pd(pa + 2 * i);
    const __m128d mm = _mm_loadu_pd(w + i);
    const __m256d wj = _mm256_set_pd(mm[1], mm[1], mm[0], mm[0]);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(x, x), wj, acc);
  }
  double buf[4];
  _mm256_storeu_pd(buf, acc);
  double s = buf[0] + buf[1] + buf[2] + buf[3];
  for (; i < n; ++i)
    s += w[i] * (a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
  return s;
}

double max_abs(const double* a, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(a + i)));
  }
  double buf[4];
  _mm256_storeu_pd(buf, acc);
  double m = std::max(std::max(buf[0], buf[1]), std::max(buf[2], buf[3]));
  for (; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

} // namespace quenchroll::kernels::avx2

#endif // __x86_64__
