#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace fbl::detail {
namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, plans] : plans_) {
      fftw_destroy_plan(plans.r2c);
      fftw_destroy_plan(plans.c2r);
    }
  }

  const Plans& get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;

    // FFTW_ESTIMATE keeps the chosen algorithm, and therefore the rounding,
    // independent of timing measurements.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    double* real = fftw_alloc_real(n);
    fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
    Plans plans;
    plans.r2c = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, cplx, flags);
    plans.c2r = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx, real, flags);
    fftw_free(cplx);
    fftw_free(real);
    return plans_.emplace(n, plans).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, Plans> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void forward_real(std::span<const double> in, std::span<Complex> out) {
  const std::size_t n = in.size();
  const Plans& plans = cache().get(n);
  // r2c does not modify its input, the cast only satisfies the C signature.
  fftw_execute_dft_r2c(plans.r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void inverse_real(std::span<const Complex> in, std::span<double> out) {
  const std::size_t n = out.size();
  const Plans& plans = cache().get(n);
  std::vector<Complex> scratch(in.begin(), in.end());  // c2r overwrites its input
  fftw_execute_dft_c2r(plans.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
}

}  // namespace fbl::detail
