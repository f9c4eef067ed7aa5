#include <doctest.h>

#include "duality/exact.hpp"

#include <cmath>

using namespace duality;

TEST_SUITE("exact") {

TEST_CASE("two-state chain exponential") {
  const double a = 1.3, b = 0.4, t = 0.8;
  Matrix Q(2, 2);
  Q << -a, a, b, -b;
  const Matrix P = matrix_exponential(Q, t);
  const double p00 = b / (a + b) + a / (a + b) * std::exp(-(a + b) * t);
  CHECK(P(0, 0) == doctest::Approx(p00).epsilon(1e-13));
  CHECK(P(0, 1) == doctest::Approx(1 - p00).epsilon(1e-13));
  Vector v(2);
  v << 1.0, 0.0;
  const Vector law = matrix_exponential_apply(Q, v, t, ExpDirection::Distribution);
  CHECK(law(0) == doctest::Approx(p00).epsilon(1e-13));
  CHECK(matrix_exponential(Q, 0.0).isIdentity());
}

TEST_CASE("closed-form transition probabilities") {
  const GeneratorMatrix k = generator_matrix(ProcessSpec::kingman_block(0, 0, 2));
  const auto e = exact_expectation(k, Vector::Unit(3, 2), {2}, 0.5);
  CHECK(e.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
  CHECK(e.state_space_size == 3);
  // Kingman with mutation from 1 lineage: exit at rate theta.
  const GeneratorMatrix km = generator_matrix(ProcessSpec::kingman_block(0.6, 0, 4));
  const auto e1 = exact_expectation(km, Vector::Unit(5, 1), {1}, 2.0);
  CHECK(e1.value == doctest::Approx(std::exp(-1.2)).epsilon(1e-13));
}

TEST_CASE("Moran and Kingman are dual at generator and semigroup level") {
  for (int N : {2, 6, 15}) {
    const Matrix D =
        duality_matrix(DualityFamily::hypergeometric(N), Basis::finite(N), Basis::discrete(N));
    const Matrix K = generator_matrix(ProcessSpec::moran_multitype(N, 2, 0.0, 2.0)).Q;
    const Matrix Kh = generator_matrix(ProcessSpec::kingman_block(0, 0, N)).Q;
    CHECK(check_generator_duality(K, Kh, D, "moran", "kingman").max_abs_residual <= 1e-10);
    for (double t : {0.1, 1.0, 5.0})
      CHECK(check_semigroup_duality(K, Kh, D, t).max_abs_residual <= 1e-8);
  }
}

TEST_CASE("exact rational Moran-Kingman residual") {
  for (int N = 2; N <= 10; ++N) {
    double r = -1.0;
    CHECK(moran_kingman_exact(N, &r));
    CHECK(r == 0.0);
  }
}

TEST_CASE("state-indexed duality matrix concatenates row and column states") {
  const StateIndex rows = enumerate_states(2, 2, EnumerationMode::Conserved);
  const StateIndex cols = enumerate_states(2, 2, EnumerationMode::DownClosed);
  const Matrix D = duality_matrix(DualityFamily::moran_self_dual(2, 0.25, 2), rows, cols);
  CHECK(D.rows() == 3);
  CHECK(D.cols() == 6);
  CHECK(D(rows.index_of({1, 1}), cols.index_of({0, 0})) == doctest::Approx(1.0));
  CHECK(D(rows.index_of({0, 2}), cols.index_of({1, 0})) == 0.0);
}

TEST_CASE("truncation leak") {
  const GeneratorMatrix tight = generator_matrix(ProcessSpec::kingman_block(0, 50.0, 2));
  CHECK(truncation_leak(tight, {2}, 1.0) > 0.9);
  const GeneratorMatrix roomy = generator_matrix(ProcessSpec::kingman_block(0, 1.0, 200));
  CHECK(truncation_leak(roomy, {10}, 1.0) < 1e-12);
}

TEST_CASE("killed generator") {
  const GeneratorMatrix g = generator_matrix(ProcessSpec::sip(2, 0.0), 3);
  const KilledGenerator k = killed_generator(g, [](const State& s) { return s[0] >= 1 && s[1] >= 1; });
  CHECK(k.index.size() == 2);
  // From (2,1): rate 1 to (1,2) is kept, rate 1 to (3,0) is killing.
  const Eigen::Index i = k.index.index_of({2, 1});
  CHECK(k.Q.row(i).sum() == doctest::Approx(-1.0));
}

TEST_CASE("pointwise dualities hold analytically and by finite differences") {
  std::vector<EvalPoint> pts;
  for (double x : {0.2, 0.5, 0.8})
    for (long n = 0; n <= 5; ++n) pts.push_back({{x}, {n}});
  const auto left = ContinuousSide::from_process(ProcessSpec::wf_mutation(0.6));
  const auto right =
      DiscreteSide::from_generator("kingman", generator_matrix(ProcessSpec::kingman_block(0.6, 0, 6)));
  PointwiseOptions opt;
  CHECK(check_pointwise_duality(left, right, DualityFamily::monomial(), pts, opt).max_abs_residual <=
        1e-9);
  opt.analytic = false;
  CHECK(check_pointwise_duality(left, right, DualityFamily::monomial(), pts, opt).max_abs_residual <=
        1e-5);
  // Wrong dual: dropping mutation must be detected.
  const auto wrong =
      DiscreteSide::from_generator("kingman", generator_matrix(ProcessSpec::kingman_block(0, 0, 6)));
  CHECK(check_pointwise_duality(left, wrong, DualityFamily::monomial(), pts).max_abs_residual > 0.01);
}

TEST_CASE("positive selection needs the complement monomial") {
  std::vector<EvalPoint> pts;
  for (double x : {0.1, 0.4, 0.9})
    for (long n = 0; n <= 4; ++n) pts.push_back({{x}, {n}});
  const auto left = ContinuousSide::from_process(ProcessSpec::wf_positive_selection(1.0));
  const auto right =
      DiscreteSide::from_generator("kingman", generator_matrix(ProcessSpec::kingman_block(0, 1.0, 5)));
  CHECK(check_pointwise_duality(left, right, DualityFamily::complement_monomial(), pts)
            .max_abs_residual <= 1e-9);
  CHECK(check_pointwise_duality(left, right, DualityFamily::monomial(), pts).max_abs_residual > 1e-3);
}

TEST_CASE("worked examples against the killed SIP(0) oracle") {
  const ExampleParams p;
  const ExampleRecord het = reproduce_example(ExampleId::Heterozygosity, p);
  CHECK(het.oracle_value == doctest::Approx(0.21 * std::exp(-0.5)).epsilon(1e-12));
  CHECK(het.abs_diff <= 1e-10);

  // Independent value: E[x^2 y] = e^{-2t}(cosh t x^2 y + sinh t x y^2).
  const double x = 0.3, y = 0.7, t = 0.5;
  const ExampleRecord x2y = reproduce_example(ExampleId::X2yTwoType, p);
  CHECK(x2y.oracle_value ==
        doctest::Approx(std::exp(-2 * t) * (std::cosh(t) * x * x * y + std::sinh(t) * x * y * y))
            .epsilon(1e-12));

  for (int d : {2, 3, 4}) {
    ExampleParams q;
    q.d = d;
    q.t = 0.2;
    const ExampleRecord r = reproduce_example(ExampleId::DTypeProduct, q);
    // Product of d coordinates decays at d(d-1)/2.
    CHECK(r.oracle_value ==
          doctest::Approx(std::pow(1.0 / d, d) * std::exp(-d * (d - 1) / 2.0 * 0.2)).epsilon(1e-12));
  }
  // x_1^2 x_2...x_d: killing at rate d(d-1)/2 while the doubled site walks
  // at rate 1 per edge of the complete graph.
  for (int d : {2, 3, 4}) {
    ExampleParams q;
    q.d = d;
    q.t = 0.3;
    q.xs.resize(static_cast<size_t>(d));
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += (q.xs[static_cast<size_t>(i)] = 1.0 + i);
    for (double& v : q.xs) v /= s;
    double prod = 1.0;
    for (double v : q.xs) prod *= v;
    const double walk = std::exp(-d * q.t);
    double expected = 0.0;
    for (int i = 0; i < d; ++i) {
      const double p_i = i == 0 ? 1.0 / d + (1.0 - 1.0 / d) * walk : (1.0 - walk) / d;
      expected += prod * q.xs[static_cast<size_t>(i)] * p_i;
    }
    expected *= std::exp(-d * (d - 1) / 2.0 * q.t);
    CHECK(reproduce_example(ExampleId::X2ProductDType, q).oracle_value ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS_AS(example_id_from_string("x3"), std::invalid_argument);
}

}  // TEST_SUITE
