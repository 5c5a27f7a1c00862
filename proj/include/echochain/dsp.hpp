#pragma once

// FFT and convolution primitives. FFTs are delegated to FFTW; plans are
// cached per (length, direction) and executed with the new-array interface so
// the functions are safe to call from several threads.

#include <span>
#include <vector>

#include "echochain/core.hpp"

namespace echochain::dsp {

/// Forward DFT of `x` zero-padded (or truncated) to `n` points,
/// X(k) = sum x(i) exp(-j 2 pi k i / n). Natural bin order.
std::vector<cplx> fft(std::span<const cplx> x, std::size_t n);

/// DTFT of `x` sampled at `n` equally spaced frequencies, with sample
/// `origin` taken as time zero. Sequences longer than `n` are wrapped
/// (time-aliased), which is exactly what sampling the DTFT requires.
std::vector<cplx> dft_sampled(std::span<const cplx> x, std::size_t n,
                              std::size_t origin = 0);

/// Inverse DFT including the 1/n factor.
std::vector<cplx> ifft(std::span<const cplx> X);

/// Full linear convolution, length a.size() + b.size() - 1. Picks direct or
/// FFT evaluation by size.
std::vector<cplx> convolve(std::span<const cplx> a, std::span<const cplx> b);

/// Direct O(N M) convolution; used as the reference path.
std::vector<cplx> convolve_direct(std::span<const cplx> a,
                                  std::span<const cplx> b);

/// conj(reverse(x)).
std::vector<cplx> conj_reverse(std::span<const cplx> x);

double energy(std::span<const cplx> x);

}  // namespace echochain::dsp
