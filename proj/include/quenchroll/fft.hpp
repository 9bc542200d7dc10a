#pragma once
// In-place radix-2 complex FFT. Sizes must be powers of two. Twiddle tables
// are cached per size; plans are immutable after construction and safe to
// share across threads.

#include <complex>
#include <cstddef>
#include <vector>

namespace quenchroll::fft {

using cplx = std::complex<double>;

// data[k] <- sum_j data[j] e^{-2 pi i j k / n}
void forward(cplx* data, std::size_t n);

// data[j] <- sum_k data[k] e^{+2 pi i j k / n}   (unnormalized)
void inverse(cplx* data, std::size_t n);

inline void forward(std::vector<cplx>& v) { forward(v.data(), v.size()); }
inline void inverse(std::vector<cplx>& v) { inverse(v.data(), v.size()); }

bool is_pow2(std::size_t n);

} // namespace quenchroll::fft
