#include "duality/montecarlo.hpp"

#include <omp.h>

#include <exception>
#include <limits>

namespace duality {

std::vector<double> run_paths_omp(std::size_t n, const PathKernel& kernel, bool antithetic) {
  std::vector<double> values(n);
  // A failing path is re-raised after the loop; when several fail, the one
  // with the lowest index wins so the error matches the serial run.
  std::size_t failed_at = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;
  const auto count = static_cast<long long>(n);

#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      values[i] = antithetic ? 0.5 * (kernel(i, false) + kernel(i, true)) : kernel(i, false);
    } catch (...) {
#pragma omp critical(duality_mc_failure)
      {
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return values;
}

}  // namespace duality
