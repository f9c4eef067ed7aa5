#include <doctest.h>

#include "duality/dualities.hpp"

#include <cmath>

using namespace duality;

TEST_SUITE("dualities") {

TEST_CASE("closed-form values of the catalog") {
  CHECK(evaluate(DualityFamily::monomial(), {{0.5, 0.2}, {2, 1}}) == doctest::Approx(0.05));
  CHECK(evaluate(DualityFamily::complement_monomial(), {{0.25}, {2}}) == doctest::Approx(0.5625));
  CHECK(evaluate(DualityFamily::exponential(), {{0.5, 2.0}, {}}) == doctest::Approx(std::exp(1.0)));
  CHECK(evaluate(DualityFamily::hypergeometric(3), {{}, {2, 1}}) == doctest::Approx(2.0 / 3.0));
  // z^n / n! when m = 2.
  CHECK(evaluate(DualityFamily::gamma_weighted(2.0), {{2.0}, {3}}) == doctest::Approx(8.0 / 6.0));
  // theta = 0.5, d = 2: shape 1, so x1^2/2! * x2^1/1!.
  CHECK(evaluate(DualityFamily::product_gamma(0.5, 2), {{0.3, 0.7}, {2, 1}}) ==
        doctest::Approx(0.0315));
  // 2!/1! * Gamma(1)/Gamma(2) * 1!/0! * Gamma(1)/Gamma(2).
  CHECK(evaluate(DualityFamily::moran_self_dual(3, 0.5, 2), {{}, {2, 1, 1, 1}}) ==
        doctest::Approx(2.0));
  CHECK(evaluate(DualityFamily::moran_self_dual(3, 0.5, 2), {{}, {0, 3, 1, 0}}) == 0.0);
  CHECK(evaluate(DualityFamily::limiting_sip(), {{0.3, 0.7}, {2, 1}}) == doctest::Approx(0.063));
  CHECK(evaluate(DualityFamily::limiting_sip(), {{0.3, 0.7}, {0, 1}}) == doctest::Approx(0.7));
  // 3!/(3-2)!/(2-1)! * 1!/(1-1)!/(1-1)!.
  CHECK(evaluate(DualityFamily::limiting_self_dual(), {{}, {3, 1, 2, 1}}) == doctest::Approx(6.0));
}

TEST_CASE("physicists' Hermite polynomials") {
  const auto h = hermite_polynomials(4, 0.5);
  REQUIRE(h.size() == 5);
  CHECK(h[0] == doctest::Approx(1.0));
  CHECK(h[1] == doctest::Approx(1.0));
  CHECK(h[2] == doctest::Approx(-1.0));
  CHECK(h[3] == doctest::Approx(-5.0));
  CHECK(h[4] == doctest::Approx(1.0));  // 16x^4 - 48x^2 + 12
  CHECK(evaluate(DualityFamily::hermite_weighted(), {{0.5}, {3}}) ==
        doctest::Approx(-5.0 * std::exp(-0.125)));
}

TEST_CASE("log-space evaluation survives overflowing partial products") {
  const DualityFamily g = DualityFamily::gamma_weighted(2.0);
  const EvalPoint p{{1000.0}, {200}};
  const double expected_log = 200 * std::log(1000.0) - std::lgamma(201.0);
  const SignedLog sl = evaluate_log(g, p);
  CHECK(sl.sign == 1);
  CHECK(sl.log_abs == doctest::Approx(expected_log).epsilon(1e-12));
  const double v = evaluate(g, p);
  REQUIRE(std::isfinite(v));
  CHECK(std::log(v) == doctest::Approx(expected_log).epsilon(1e-12));
}

TEST_CASE("log and direct evaluation agree with sign") {
  const EvalPoint p{{-0.7}, {3}};
  const double direct = evaluate_direct(DualityFamily::hermite_weighted(), p);
  const SignedLog sl = evaluate_log(DualityFamily::hermite_weighted(), p);
  CHECK(sl.value() == doctest::Approx(direct));
  CHECK(evaluate_log(DualityFamily::monomial(), {{0.0}, {2}}).sign == 0);
}

TEST_CASE("analytic derivatives of the exponential kernel") {
  const double x = 0.5, y = 2.0, e = std::exp(x * y);
  const ValueDerivatives vd = continuous_derivatives(DualityFamily::exponential(), {{x, y}, {}});
  CHECK(vd.value == doctest::Approx(e));
  CHECK(vd.gradient(0) == doctest::Approx(y * e));
  CHECK(vd.gradient(1) == doctest::Approx(x * e));
  CHECK(vd.hessian(0, 0) == doctest::Approx(y * y * e));
  CHECK(vd.hessian(0, 1) == doctest::Approx((1 + x * y) * e));
  CHECK(vd.hessian(1, 1) == doctest::Approx(x * x * e));
}

TEST_CASE("analytic derivatives match central differences") {
  const DualityFamily f = DualityFamily::product_gamma(0.7, 3);
  const EvalPoint p{{0.2, 0.3, 0.5}, {2, 1, 3}};
  const ValueDerivatives vd = continuous_derivatives(f, p);
  const double h = 1e-6;
  // Move along e_i - e_3 so both points stay on the simplex.
  for (int i = 0; i < 2; ++i) {
    EvalPoint a = p, b = p;
    a.continuous[i] += h;
    a.continuous[2] -= h;
    b.continuous[i] -= h;
    b.continuous[2] += h;
    const double fd = (evaluate(f, a) - evaluate(f, b)) / (2 * h);
    CHECK(vd.gradient(i) - vd.gradient(2) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(evaluate(DualityFamily::monomial(), {{0.5}, {-1}}), std::domain_error);
  CHECK_THROWS_AS(evaluate(DualityFamily::product_gamma(0.5, 2), {{0.3, 0.6}, {1, 1}}),
                  std::domain_error);
  CHECK_THROWS_AS(evaluate(DualityFamily::hypergeometric(3), {{}, {4, 1}}), std::domain_error);
  CHECK_THROWS(DualityFamily::product_gamma(0.0, 2));
  CHECK_THROWS_AS(duality_kind_from_string("nope"), std::invalid_argument);
}

TEST_CASE("cheap self-duality and symmetry transform") {
  Vector mu(3);
  mu << 0.2, 0.3, 0.5;
  const Matrix D = cheap_self_duality(mu);
  CHECK(D(1, 1) == doctest::Approx(1.0 / 0.3));
  CHECK(D(0, 1) == 0.0);
  const Matrix S = Matrix::Constant(3, 3, 2.0);
  CHECK((transform_by_symmetry(S, D) - S * D).isZero());
}

}  // TEST_SUITE
