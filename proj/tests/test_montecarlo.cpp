#include <doctest.h>

#include "duality/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

using namespace duality;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

EstimatorConfig small_cfg(std::size_t n, std::uint64_t seed) {
  EstimatorConfig c;
  c.n_paths = n;
  c.seed = seed;
  c.dt = 5e-3;
  c.t = 0.5;
  return c;
}

Estimate heterozygosity(std::size_t n, std::uint64_t seed, Backend b = Backend::OpenMP) {
  return estimate_duality_side(ProcessSpec::wf_multitype(2, 0.0), DualityFamily::limiting_sip(),
                               {{0.3, 0.7}, {}}, {{}, {1, 1}}, ArgumentPosition::Left,
                               small_cfg(n, seed), b);
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("comparison rule") {
  const Estimate v{0.4, 0.0, 0};
  const ComparisonReport same = compare(v, v);
  CHECK(same.pass);
  CHECK(same.z == 0.0);
  CHECK(same.rhs_exact);
  const ComparisonReport off = compare({0.50, 0.01, 1000}, {0.56, 0.0, 0}, 3.0, 0.0);
  CHECK_FALSE(off.pass);
  CHECK(off.z == doctest::Approx(6.0));
  CHECK(compare({0.50, 0.01, 1000}, {0.56, 0.0, 0}, 3.0, 0.031).pass);
  const auto j = to_json(off);
  CHECK(j["pass"] == false);
  CHECK(j["rhs"].contains("value"));
}

TEST_CASE("summary statistics") {
  const Estimate e = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(e.mean == doctest::Approx(2.5));
  CHECK(e.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(e.n == 4);
  // Compensated summation keeps small terms next to a large one.
  std::vector<double> v(1001, 1e-16);
  v[0] = 1.0;
  CHECK(summarize(v).mean * 1001 == doctest::Approx(1.0 + 1000e-16).epsilon(1e-16));
}

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
  const Estimate a = heterozygosity(2000, 11, Backend::Serial);
  const Estimate b = heterozygosity(2000, 11, Backend::OpenMP);
  CHECK(same_bits(a.mean, b.mean));
  CHECK(same_bits(a.se, b.se));
  const Estimate c = heterozygosity(2000, 11, Backend::OpenMP);
  CHECK(same_bits(b.mean, c.mean));
  const Estimate d = heterozygosity(2000, 12, Backend::OpenMP);
  CHECK_FALSE(same_bits(b.mean, d.mean));
}

TEST_CASE("path i draws from its own stream") {
  const PathKernel k = [](std::size_t i, bool) {
    Rng r = make_stream(5, i);
    return static_cast<double>(r() >> 11);
  };
  const auto a = run_paths_serial(300, k, false);
  const auto b = run_paths_omp(300, k, false);
  CHECK(a == b);
  Rng r = make_stream(5, 17);
  CHECK(a[17] == static_cast<double>(r() >> 11));
}

TEST_CASE("OpenMP kernel rethrows the lowest failing path") {
  const PathKernel k = [](std::size_t i, bool) -> double {
    if (i == 40 || i == 7) throw std::runtime_error("path " + std::to_string(i));
    return 1.0;
  };
  try {
    run_paths_omp(100, k, false);
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "path 7");
  }
}

TEST_CASE("standard error scales as one over root n") {
  const double s1 = heterozygosity(4000, 3).se;
  const double s4 = heterozygosity(16000, 4).se;
  CHECK(s1 / s4 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("antithetic pairs halve the reported count") {
  EstimatorConfig c = small_cfg(1000, 1);
  c.antithetic = true;
  const Estimate e = estimate_duality_side(ProcessSpec::wf_multitype(2, 0.5),
                                           DualityFamily::product_gamma(0.5, 2), {{0.3, 0.7}, {}},
                                           {{}, {2, 1}}, ArgumentPosition::Left, c);
  CHECK(e.n == 500);
}

TEST_CASE("exact side matches the analytic heterozygosity") {
  const Estimate e = exact_duality_side(ProcessSpec::sip(2, 0.0), DualityFamily::limiting_sip(),
                                        {1, 1}, {{0.3, 0.7}, {}}, ArgumentPosition::Right, 0.5);
  CHECK(e.mean == doctest::Approx(0.21 * std::exp(-0.5)).epsilon(1e-12));
  CHECK(e.se == 0.0);
}

TEST_CASE("limiting dualities reject configurations with an empty site") {
  CHECK_THROWS_AS(estimate_duality_side(ProcessSpec::sip(2, 0.0), DualityFamily::limiting_sip(),
                                        {{}, {2, 0}}, {{0.3, 0.7}, {}}, ArgumentPosition::Right,
                                        small_cfg(200, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_duality_side(ProcessSpec::sip(2, 0.5), DualityFamily::limiting_sip(),
                                        {{}, {1, 1}}, {{0.3, 0.7}, {}}, ArgumentPosition::Right,
                                        small_cfg(200, 0)),
                  std::invalid_argument);
}

TEST_CASE("jump-side Monte Carlo with the limiting indicator") {
  const Estimate mc = estimate_duality_side(ProcessSpec::sip(2, 0.0), DualityFamily::limiting_sip(),
                                            {{}, {1, 1}}, {{0.3, 0.7}, {}},
                                            ArgumentPosition::Right, small_cfg(20000, 9));
  const double exact = 0.21 * std::exp(-0.5);
  CHECK(std::fabs(mc.mean - exact) <= 4 * mc.se);
}

TEST_CASE("config validation") {
  EstimatorConfig c;
  c.n_paths = 99;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.n_paths = 100;
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(experiment_kind_from_string("wf"), std::invalid_argument);
}

TEST_CASE("both sides simulated agree in most replications") {
  // Statistical property at reduced replication count.
  int passes = 0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    Experiment e;
    e.kind = ExperimentKind::McVsMc;
    e.cfg = small_cfg(4000, 1000 + r);
    e.bias_per_dt = 0.5;
    passes += run_experiment(e).pass;
  }
  CHECK(passes >= 19);
}

}  // TEST_SUITE
