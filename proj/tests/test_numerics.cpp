#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "warpcap/numerics.hpp"

using namespace warpcap;

TEST_CASE("closed-form integrals") {
  QuadratureConfig cfg;

  SUBCASE("constant") {
    auto r = integrate([](double) { return 1.0; }, 0.0, 1.0, cfg);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("inverse square") {
    auto r = integrate([](double t) { return 1.0 / (t * t); }, 1.0, 2.0, cfg);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("exponential") {
    auto r = integrate([](double t) { return std::exp(t); }, 1.0, 2.0, cfg);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::exp(2.0) - std::exp(1.0)).epsilon(1e-13));
  }
  SUBCASE("sine over half period") {
    auto r = integrate([](double t) { return std::sin(t); }, 0.0,
                       3.14159265358979323846, cfg);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
  }
  SUBCASE("degree-10 monomial") {
    auto r = integrate([](double t) { return std::pow(t, 10); }, 0.0, 2.0, cfg);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2048.0 / 11.0).epsilon(1e-13));
  }
  SUBCASE("integrable endpoint singularity") {
    // integral of t^{-1/2} over (0, 1] = 2; nodes never touch t = 0.
    // Plain adaptive refinement (no extrapolation) certifies ~1e-6 here.
    auto r = integrate([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0,
                       {.abs_tol = 1e-6, .rel_tol = 1e-12, .max_subdivisions = 10000});
    CHECK(r.converged);
    CHECK(std::fabs(r.value - 2.0) <= r.err_estimate);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-6));
  }
}

TEST_CASE("breakpoint hints") {
  QuadratureConfig cfg;
  const double k = 0.31830988618367;  // kink position, not dyadic

  SUBCASE("kink") {
    auto f = [=](double t) { return std::fabs(t - k); };
    const double exact = 0.5 * (k * k + (1.0 - k) * (1.0 - k));
    const std::vector<double> hints{k};
    auto r = integrate(f, 0.0, 1.0, cfg, hints);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-13));
  }
  SUBCASE("jump") {
    auto f = [=](double t) { return t < k ? 2.0 : -1.0; };
    const double exact = 2.0 * k - (1.0 - k);
    const std::vector<double> hints{k};
    auto r = integrate(f, 0.0, 1.0, cfg, hints);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-12));
  }
  SUBCASE("hints outside the interval are ignored") {
    const std::vector<double> hints{-3.0, 0.0, 1.0, 7.0};
    auto r = integrate([](double t) { return t; }, 0.0, 1.0, cfg, hints);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("additivity and determinism") {
  QuadratureConfig cfg;
  auto f = [](double t) { return std::cos(3.0 * t) + t * t; };
  const double whole = integrate(f, 0.0, 2.0, cfg).value;
  const double split =
      integrate(f, 0.0, 0.7, cfg).value + integrate(f, 0.7, 2.0, cfg).value;
  CHECK(whole == doctest::Approx(split).epsilon(1e-12));

  const double again = integrate(f, 0.0, 2.0, cfg).value;
  CHECK(whole == again);  // bitwise deterministic
}

TEST_CASE("subdivision budget exhaustion is reported") {
  QuadratureConfig tight{.abs_tol = 1e-12, .rel_tol = 1e-12, .max_subdivisions = 3};
  auto wiggly = [](double t) { return std::sin(1000.0 * t); };
  auto r = integrate(wiggly, 0.0, 50.0, tight);
  CHECK_FALSE(r.converged);
  CHECK(r.subdivisions == 3);
  CHECK_THROWS_AS(integrate_strict(wiggly, 0.0, 50.0, tight), QuadratureError);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 0.0, {}), DomainError);
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 0.0, {}), DomainError);
  QuadratureConfig bad;
  bad.abs_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = QuadratureConfig{};
  bad.max_subdivisions = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  // NaN from the integrand is loud, not silent
  CHECK_THROWS_AS(integrate([](double t) { return std::sqrt(t - 0.5); }, 0.0, 1.0, {}),
                  QuadratureError);
}

TEST_CASE("cumulative integration") {
  const std::vector<double> pts{0.0, 1.0, 2.0, 4.0};
  auto cum = integrate_cumulative([](double t) { return t; }, pts);
  REQUIRE(cum.size() == 4);
  CHECK(cum[0] == 0.0);
  CHECK(cum[1] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(cum[2] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(cum[3] == doctest::Approx(8.0).epsilon(1e-13));

  CHECK_THROWS_AS(integrate_cumulative([](double) { return 1.0; },
                                       std::vector<double>{1.0, 0.5}),
                  DomainError);
}

TEST_CASE("tail classification") {
  CHECK(classify_tail_integral(TailModel::power_decay(2.0)) == TailVerdict::converges);
  CHECK(classify_tail_integral(TailModel::power_decay(1.0)) == TailVerdict::diverges);
  CHECK(classify_tail_integral(TailModel::power_decay(0.5)) == TailVerdict::diverges);
  CHECK(classify_tail_integral(TailModel::power_growth(1.0)) == TailVerdict::diverges);
  CHECK(classify_tail_integral(TailModel::exponential_rate(-1.0)) == TailVerdict::converges);
  CHECK(classify_tail_integral(TailModel::exponential_rate(1.0)) == TailVerdict::diverges);

  // envelope pairs: integrable upper -> converges; positive non-integrable
  // lower -> diverges; mixed -> undetermined
  auto conv = TailModel::oscillating({0.5, -2.0}, {1.5, -2.0}, 1.0);
  CHECK(classify_tail_integral(conv) == TailVerdict::converges);
  auto div = TailModel::oscillating({1.0, -0.5}, {2.0, 1.0}, 1.0);
  CHECK(classify_tail_integral(div) == TailVerdict::diverges);
  auto und = TailModel::oscillating({1.0, -2.0}, {1.0, -0.5}, 1.0);
  CHECK(classify_tail_integral(und) == TailVerdict::undetermined);

  // invalid envelope ordering is rejected
  CHECK_THROWS_AS(TailModel::oscillating({2.0, -0.5}, {1.0, -2.0}, 1.0), DomainError);
}

TEST_CASE("improper integrals with analytic tail remainder") {
  QuadratureConfig cfg;

  SUBCASE("power decay alpha = 2") {
    auto r = integrate_improper([](double t) { return 1.0 / (t * t); }, 1.0,
                                TailModel::power_decay(2.0), cfg);
    REQUIRE(r.converges());
    CHECK(*r.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.quadrature_ok);
  }
  SUBCASE("power decay alpha = 1.5") {
    auto r = integrate_improper([](double t) { return std::pow(t, -1.5); }, 1.0,
                                TailModel::power_decay(1.5), cfg);
    REQUIRE(r.converges());
    CHECK(*r.value == doctest::Approx(2.0).epsilon(1e-10));
  }
  SUBCASE("power decay alpha = 3, lower limit 2") {
    auto r = integrate_improper([](double t) { return std::pow(t, -3.0); }, 2.0,
                                TailModel::power_decay(3.0), cfg);
    REQUIRE(r.converges());
    CHECK(*r.value == doctest::Approx(1.0 / 8.0).epsilon(1e-10));
  }
  SUBCASE("exponential decay") {
    auto r = integrate_improper([](double t) { return std::exp(-t); }, 0.0,
                                TailModel::exponential_rate(-1.0), cfg);
    REQUIRE(r.converges());
    CHECK(*r.value == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("divergent tails short-circuit") {
    int calls = 0;
    auto f = [&](double t) {
      ++calls;
      return 1.0 / t;
    };
    auto r = integrate_improper(f, 1.0, TailModel::power_decay(1.0), cfg);
    CHECK(r.diverges());
    CHECK_FALSE(r.value.has_value());
    CHECK(calls == 0);

    auto g = integrate_improper(f, 1.0, TailModel::exponential_rate(2.0), cfg);
    CHECK(g.diverges());
  }
  SUBCASE("oscillating envelope carries its half-width as uncertainty") {
    // integrand is exactly t^{-2}; declared envelopes [0.5, 1.5] * t^{-2}
    auto tail = TailModel::oscillating({0.5, -2.0}, {1.5, -2.0}, 1.0);
    auto r = integrate_improper([](double t) { return 1.0 / (t * t); }, 1.0, tail, cfg);
    REQUIRE(r.converges());
    CHECK(std::fabs(*r.value - 1.0) <= r.err_estimate);
    CHECK(r.err_estimate < 1e-4);
  }
  SUBCASE("undetermined tail gives no value") {
    auto und = TailModel::oscillating({1.0, -2.0}, {1.0, -0.5}, 1.0);
    auto r = integrate_improper([](double t) { return 1.0 / (t * t); }, 1.0, und, cfg);
    CHECK(r.verdict == TailVerdict::undetermined);
    CHECK_FALSE(r.value.has_value());
  }
}
