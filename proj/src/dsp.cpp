#include "echochain/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <utility>

namespace echochain::dsp {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // FFTW planning is not thread-safe; the mutex covers it.
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (plan == nullptr) throw InternalError("FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

std::vector<cplx> transform(std::vector<cplx> buf, int sign) {
  if (buf.empty()) return buf;
  fftw_plan plan = plan_cache().get(buf.size(), sign);
  std::vector<cplx> out(buf.size());
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<cplx> fft(std::span<const cplx> x, std::size_t n) {
  std::vector<cplx> buf(n, cplx{});
  std::copy_n(x.begin(), std::min(n, x.size()), buf.begin());
  return transform(std::move(buf), FFTW_FORWARD);
}

std::vector<cplx> dft_sampled(std::span<const cplx> x, std::size_t n,
                              std::size_t origin) {
  std::vector<cplx> buf(n, cplx{});
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto offset = static_cast<std::int64_t>(i) - static_cast<std::int64_t>(origin);
    auto k = offset % static_cast<std::int64_t>(n);
    if (k < 0) k += static_cast<std::int64_t>(n);
    buf[static_cast<std::size_t>(k)] += x[i];
  }
  return transform(std::move(buf), FFTW_FORWARD);
}

std::vector<cplx> ifft(std::span<const cplx> X) {
  auto out = transform(std::vector<cplx>(X.begin(), X.end()), FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<cplx> convolve_direct(std::span<const cplx> a,
                                  std::span<const cplx> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<cplx> out(a.size() + b.size() - 1, cplx{});
  for (std::size_t i = 0; i < a.size(); ++i) {
    const cplx ai = a[i];
    if (ai == cplx{}) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += ai * b[j];
  }
  return out;
}

std::vector<cplx> convolve(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t shorter = std::min(a.size(), b.size());
  const std::size_t n_out = a.size() + b.size() - 1;
  if (shorter <= 32 || a.size() * b.size() <= (1u << 16)) {
    return convolve_direct(a, b);
  }
  const std::size_t n = next_power_of_two(n_out);
  auto A = fft(a, n);
  const auto B = fft(b, n);
  for (std::size_t k = 0; k < n; ++k) A[k] *= B[k];
  auto out = ifft(A);
  out.resize(n_out);
  return out;
}

std::vector<cplx> conj_reverse(std::span<const cplx> x) {
  std::vector<cplx> out(x.rbegin(), x.rend());
  for (auto& v : out) v = std::conj(v);
  return out;
}

double energy(std::span<const cplx> x) {
  double e = 0.0;
  for (const auto& v : x) e += std::norm(v);
  return e;
}

}  // namespace echochain::dsp
