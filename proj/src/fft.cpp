#include "gpeduet/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace gpeduet::fft {
namespace {

class PlanPair {
 public:
  explicit PlanPair(int n) {
    // Planning needs a scratch buffer; FFTW_UNALIGNED lets the plans run on
    // any std::complex<double> storage later.
    fftw_complex* scratch = fftw_alloc_complex(static_cast<std::size_t>(n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_1d(n, scratch, scratch, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(n, scratch, scratch, FFTW_BACKWARD, flags);
    fftw_free(scratch);
    if (forward_ == nullptr || backward_ == nullptr) {
      throw std::runtime_error("fft: FFTW failed to create a plan");
    }
  }
  ~PlanPair() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;

  fftw_plan forward() const { return forward_; }
  fftw_plan backward() const { return backward_; }

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

const PlanPair& plans_for(std::size_t n) {
  // FFTW's planner is not thread-safe; execution of an existing plan is.
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<PlanPair>(static_cast<int>(n));
  return *slot;
}

fftw_complex* as_fftw(std::span<std::complex<double>> data) {
  return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

void forward(std::span<std::complex<double>> data) {
  if (data.empty()) return;
  fftw_execute_dft(plans_for(data.size()).forward(), as_fftw(data), as_fftw(data));
}

void backward(std::span<std::complex<double>> data) {
  if (data.empty()) return;
  fftw_execute_dft(plans_for(data.size()).backward(), as_fftw(data), as_fftw(data));
}

}  // namespace gpeduet::fft
