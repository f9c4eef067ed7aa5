#pragma once

// Monte Carlo estimates of either side of a duality relation
//   E_x D(X_t, xhat) = Ehat_xhat D(x, Xhat_t)
// and their statistical comparison against an exact value or another
// estimate.
//
// Path i always draws from make_stream(seed, i), and the mean is reduced in
// path order with compensated summation, so the serial and OpenMP kernels
// return bit-identical estimates.

#include "duality/dualities.hpp"
#include "duality/exact.hpp"
#include "duality/processes.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace duality {

struct EstimatorConfig {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 0;
  double dt = 1e-3;
  double t = 0.5;
  bool antithetic = false;  // diffusion sides only

  void validate() const;
};

enum class Backend { Serial, OpenMP };

std::string to_string(Backend b);

/// Which argument of D the simulated process fills.
enum class ArgumentPosition { Left, Right };

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Value of one path; the bool asks for the antithetic partner.
using PathKernel = std::function<double(std::size_t path, bool negate)>;

/// Evaluates kernel(i, false) for i < n (or the pair average when
/// antithetic) and returns the values in path order.
std::vector<double> run_paths_serial(std::size_t n, const PathKernel& kernel, bool antithetic);
std::vector<double> run_paths_omp(std::size_t n, const PathKernel& kernel, bool antithetic);
std::vector<double> run_paths(std::size_t n, const PathKernel& kernel, bool antithetic,
                              Backend backend);

/// Mean and standard error reduced in index order (Neumaier summation).
Estimate summarize(const std::vector<double>& values);

/// Sample mean and SE of D(X_t, frozen) (or D(frozen, X_t)) over
/// cfg.n_paths paths started from `start`. For antithetic runs each sample
/// is the average of a path and its mirrored partner, and n counts pairs.
///
/// When the process fills the second argument of a limiting family
/// (limiting-sip, limiting-self-dual), the weight (m/2)^{R(xi) - R(xi_t)}
/// of the m -> 0 limit is replaced by the indicator that no occupied site
/// emptied; SIP(0) is required and a start with an empty site is rejected.
Estimate estimate_duality_side(const ProcessSpec& spec, const DualityFamily& family,
                               const EvalPoint& start, const EvalPoint& frozen,
                               ArgumentPosition position, const EstimatorConfig& cfg,
                               Backend backend = Backend::OpenMP, long bound = -1);

/// Exact counterpart of estimate_duality_side for a jump process, by
/// matrix exponential (SE 0).
Estimate exact_duality_side(const ProcessSpec& spec, const DualityFamily& family,
                            const State& start, const EvalPoint& frozen,
                            ArgumentPosition position, double t, long bound = -1);

struct ComparisonReport {
  Estimate lhs;
  Estimate rhs;
  bool rhs_exact = false;
  double diff = 0.0;
  double combined_se = 0.0;
  double z = 0.0;
  double tolerance_multiplier = 3.0;
  double bias_budget = 0.0;
  bool pass = false;
  std::map<std::string, std::string> metadata;
};

/// pass iff |lhs - rhs| <= k * sqrt(se_l^2 + se_r^2) + bias_budget.
ComparisonReport compare(const Estimate& lhs, const Estimate& rhs,
                         double tolerance_multiplier = 3.0, double bias_budget = 0.0);

nlohmann::ordered_json to_json(const ComparisonReport& r);

// ------------------------------------------------------------ experiments

enum class ExperimentKind {
  WfKingman,       // neutral WF, x^n, vs exact block counting
  WfMoran,         // two-type WF with mutation vs exact Moran side
  Heterozygosity,  // E x(t)(1 - x(t)) vs x(1-x) e^{-t}
  McVsMc,          // WF side and Moran side both simulated
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct Experiment {
  ExperimentKind kind = ExperimentKind::WfMoran;
  double x0 = 0.3;    // frequency of type 1
  double theta = 0.5;
  int N = 3;          // Moran population / Kingman block count
  long k1 = 2;        // Moran type-1 count (WfMoran, McVsMc)
  EstimatorConfig cfg;
  double tolerance_multiplier = 3.0;
  double bias_per_dt = 5.0;  // bias budget = bias_per_dt * dt
};

ComparisonReport run_experiment(const Experiment& e, Backend backend = Backend::OpenMP);

}  // namespace duality
