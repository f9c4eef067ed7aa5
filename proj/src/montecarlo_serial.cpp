#include "duality/montecarlo.hpp"

namespace duality {

// Reference kernel; the OpenMP version must reproduce it bit for bit.
std::vector<double> run_paths_serial(std::size_t n, const PathKernel& kernel, bool antithetic) {
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i)
    values[i] = antithetic ? 0.5 * (kernel(i, false) + kernel(i, true)) : kernel(i, false);
  return values;
}

}  // namespace duality
