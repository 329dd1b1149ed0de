#include "spatspec/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace spatspec {

namespace {

std::mutex g_plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> g_plans;

fftw_plan plan_for(int n0, int n1, int sign) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_tuple(n0, n1, sign);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second;
  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n0) * n1);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = n1 == 1 ? fftw_plan_dft_1d(n0, p, p, sign, flags)
                           : fftw_plan_dft_2d(n1, n0, p, p, sign, flags);
  if (!plan) throw std::runtime_error("FFTW planning failed");
  g_plans.emplace(key, plan);
  return plan;
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& data, int n0, int n1, int sign) {
  if (data.size() != static_cast<std::size_t>(n0) * n1)
    throw std::invalid_argument("fft_inplace: size mismatch");
  fftw_plan plan = plan_for(n0, n1, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

int good_fft_size(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

}  // namespace spatspec
