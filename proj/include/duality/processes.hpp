#pragma once

// Process descriptions, generator matrices for the jump processes and
// drift/diffusion coefficients for the diffusions.

#include "duality/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace duality {

enum class ProcessKind {
  WfGeneral1d,           // alpha(x) d^2/dx^2 + beta(x) d/dx on [0,1]
  WfMultitype,           // d types, parent-independent mutation theta
  MoranMultitype,        // N individuals, d types, mutation theta
  Sip,                   // symmetric inclusion, complete graph on d sites
  Bep,                   // Brownian energy process, complete graph on d sites
  KingmanBlock,          // block counting with mutation and selection
  SteppingStoneForward,  // finite-site stepping stone diffusion
  SteppingStoneDual,     // coalescing random walks dual to the above
};

std::string to_string(ProcessKind kind);

/// Validated description of one process. Construct through the factories.
struct ProcessSpec {
  ProcessKind kind = ProcessKind::WfGeneral1d;

  // WfGeneral1d: alpha[k], beta[k] are the coefficients of x^k.
  std::vector<double> alpha;
  std::vector<double> beta;
  // Positive selection is dual to the selection chain through (1 - x)^n
  // rather than x^n; the coefficients then fall outside the x^n sign rules.
  bool complement_dual = false;

  int d = 0;
  int N = 0;
  double theta = 0.0;
  double m = 0.0;
  double sigma = 0.0;
  long n_max = 200;
  double time_scale = 1.0;  // MoranMultitype rate multiplier
  Matrix kernel;            // stepping stone p(i, j)

  static ProcessSpec wf_general_1d(std::vector<double> alpha, std::vector<double> beta);
  static ProcessSpec wf_neutral();
  static ProcessSpec wf_mutation(double theta);
  static ProcessSpec wf_negative_selection(double sigma);
  static ProcessSpec wf_positive_selection(double sigma);
  static ProcessSpec wf_multitype(int d, double theta);
  static ProcessSpec moran_multitype(int N, int d, double theta, double time_scale = 1.0);
  static ProcessSpec sip(int d, double m);
  static ProcessSpec bep(int d, double m);
  static ProcessSpec kingman_block(double theta, double sigma, long n_max = 200);
  static ProcessSpec stepping_stone_forward(Matrix kernel);
  static ProcessSpec stepping_stone_dual(Matrix kernel);

  bool is_jump() const;
  bool is_diffusion() const;
  /// No mutation/drift toward the interior: boundaries are absorbing.
  bool neutral() const;
  std::string describe() const;
};

using State = std::vector<long>;

enum class EnumerationMode { Conserved, DownClosed };

/// Enumerated occupation vectors with a bijection to row indices.
/// Conserved: {k : sum k_i = N}, lexicographic. DownClosed: {k : sum k_i <= N},
/// grouped by total, each group lexicographic.
class StateIndex {
 public:
  StateIndex() = default;
  StateIndex(int d, int N, EnumerationMode mode, std::vector<State> states);

  int d() const { return d_; }
  int N() const { return N_; }
  EnumerationMode mode() const { return mode_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(states_.size()); }
  const std::vector<State>& states() const { return states_; }
  const State& state(Eigen::Index i) const { return states_.at(static_cast<size_t>(i)); }
  bool contains(const State& s) const { return lookup_.count(s) != 0; }
  Eigen::Index index_of(const State& s) const;

 private:
  int d_ = 0;
  int N_ = 0;
  EnumerationMode mode_ = EnumerationMode::Conserved;
  std::vector<State> states_;
  std::map<State, Eigen::Index> lookup_;
};

StateIndex enumerate_states(int d, int N, EnumerationMode mode);

/// Dense rate matrix over an enumerated state space. Off-diagonals are
/// non-negative and rows sum to zero (checked at construction).
/// dropped(i) is the total rate of transitions out of state i that left the
/// truncated state space.
struct GeneratorMatrix {
  Matrix Q;
  StateIndex index;
  std::string conserved;
  Vector dropped;

  GeneratorMatrix(Matrix rates, StateIndex idx, std::string conserved_label,
                  Vector dropped_rates);
};

/// Generator of a jump process. `bound` is the total number of particles
/// for Sip, the largest total for SteppingStoneDual, and the largest block
/// count for the dual chain of a WfGeneral1d spec; it defaults to N for
/// MoranMultitype and n_max for KingmanBlock and WfGeneral1d.
GeneratorMatrix generator_matrix(const ProcessSpec& spec, long bound = -1);

/// Generator over all states with sum k_i <= max_total. For Sip this is the
/// block-diagonal union of the conserved generators.
GeneratorMatrix generator_matrix_down_closed(const ProcessSpec& spec, long max_total);

struct DriftDiffusion {
  Vector drift;
  Matrix diffusion;  // generator = 1/2 sum a_ij d_i d_j + sum b_i d_i
};

/// Coefficients at x. WfMultitype takes the full d-vector on the simplex and
/// returns coefficients in the first d-1 coordinates; Bep takes and returns
/// full d coordinates. Throws std::domain_error when a is not positive
/// semidefinite at x.
DriftDiffusion drift_diffusion(const ProcessSpec& spec, std::span<const double> x);

/// Leading (d-1)-coordinate block of full-coordinate coefficients.
DriftDiffusion restrict_to_simplex(const DriftDiffusion& full);

// ---------------------------------------------------------------- sampling

using Rng = std::mt19937_64;

/// Independent stream for path `path` of an experiment seeded with `seed`.
Rng make_stream(std::uint64_t seed, std::uint64_t path);

/// Gillespie sampler over a generator's sparse transition structure.
class JumpSampler {
 public:
  explicit JumpSampler(const GeneratorMatrix& generator);

  /// State index at time t starting from index `from`. Throws
  /// std::overflow_error if the path enters a state whose rates were
  /// truncated.
  Eigen::Index sample(Eigen::Index from, double t, Rng& rng) const;
  const StateIndex& index() const { return index_; }

 private:
  struct Row {
    double exit = 0.0;
    double dropped = 0.0;
    std::vector<Eigen::Index> targets;
    std::vector<double> cumulative;
  };
  StateIndex index_;
  std::vector<Row> rows_;
};

/// Euler-Maruyama sampler. Simplex coordinates are clipped to [0,1] and
/// renormalized after each step; in neutral models a coordinate within
/// 1e-12 of {0,1} is snapped and the path freezes once a type fixes.
class DiffusionSampler {
 public:
  explicit DiffusionSampler(ProcessSpec spec);

  /// Full-coordinate state at time t. `negate_noise` flips every Gaussian
  /// increment (antithetic partner path).
  std::vector<double> sample(std::span<const double> x0, double t, double dt, Rng& rng,
                             bool negate_noise = false) const;

 private:
  void step(std::vector<double>& x, double h, Rng& rng,
            std::normal_distribution<double>& normal, double sign,
            std::vector<double>& scratch) const;
  void project(std::vector<double>& x, double total) const;

  ProcessSpec spec_;
};

State sample_jump(const ProcessSpec& spec, const State& k0, double t, Rng& rng,
                  long bound = -1);

std::vector<double> sample_diffusion(const ProcessSpec& spec, std::span<const double> x0,
                                     double t, double dt, Rng& rng);

}  // namespace duality
