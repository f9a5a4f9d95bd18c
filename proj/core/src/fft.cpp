#include "radarmon/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "radarmon/error.hpp"

namespace radarmon {

namespace {

// FFTW's planner is not thread-safe; executing an existing plan on new
// arrays is. Plans are created once per (size, direction) under a lock and
// live for the life of the process.
class PlanCache {
 public:
  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (plan == nullptr) throw Error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int sign) {
  if (in.size() != out.size()) throw InvalidArgument("fft input and output sizes differ");
  if (in.empty()) return;
  auto plan = cache().get(static_cast<int>(in.size()), sign);
  // The plan is out-of-place; copy when the caller aliases in and out.
  if (in.data() == out.data()) {
    std::vector<std::complex<double>> tmp(in.begin(), in.end());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(tmp.data()), reinterpret_cast<fftw_complex*>(out.data()));
    return;
  }
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  run(in, out, FFTW_FORWARD);
}

void fft_inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  run(in, out, FFTW_BACKWARD);
}

std::vector<std::complex<double>> fft_forward(std::span<const std::complex<double>> in) {
  std::vector<std::complex<double>> out(in.size());
  fft_forward(in, out);
  return out;
}

std::vector<std::complex<double>> fft_inverse(std::span<const std::complex<double>> in) {
  std::vector<std::complex<double>> out(in.size());
  fft_inverse(in, out);
  return out;
}

}  // namespace radarmon
