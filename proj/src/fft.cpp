#include "quenchroll/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "quenchroll/kernels.hpp"

namespace quenchroll::fft {

bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

namespace {

struct Plan {
  std::vector<std::size_t> bitrev;
  // stage s handles butterflies of half-length 2^s; twiddle[s][j] = e^{-i pi j / 2^s}
  std::vector<std::vector<cplx>> twiddle;
};

const Plan& plan_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, Plan> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Plan p;
  p.bitrev.resize(n);
  std::size_t log2n = 0;
  while ((std::size_t{1} << log2n) < n) ++log2n;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < log2n; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
    p.bitrev[i] = r;
  }
  p.twiddle.resize(log2n);
  for (std::size_t s = 0; s < log2n; ++s) {
    const std::size_t half = std::size_t{1} << s;
    p.twiddle[s].resize(half);
    for (std::size_t j = 0; j < half; ++j) {
      const double ang = -M_PI * static_cast<double>(j) / static_cast<double>(half);
      p.twiddle[s][j] = cplx(std::cos(ang), std::sin(ang));
    }
  }
  return cache.emplace(n, std::move(p)).first->second;
}

void transform(cplx* a, std::size_t n, bool inverse_sign) {
  if (n <= 1) return;
  if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
  const Plan& p = plan_for(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = p.bitrev[i];
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<cplx> scratch(n / 2);
  std::vector<cplx> twl;
  for (std::size_t s = 0; s < p.twiddle.size(); ++s) {
    const std::size_t half = std::size_t{1} << s;
    const std::size_t len = half * 2;
    const cplx* tw = p.twiddle[s].data();
    if (inverse_sign) {
      twl.assign(p.twiddle[s].begin(), p.twiddle[s].end());
      for (auto& w : twl) w = std::conj(w);
      tw = twl.data();
    }
    for (std::size_t b = 0; b < n; b += len) {
      kernels::cmul(tw, a + b + half, scratch.data(), half);
      kernels::butterfly(a + b, a + b + half, scratch.data(), half);
    }
  }
}

} // namespace

void forward(cplx* data, std::size_t n) { transform(data, n, false); }
void inverse(cplx* data, std::size_t n) { transform(data, n, true); }

} // namespace quenchroll::fft
