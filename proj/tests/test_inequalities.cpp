#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "warpcap/errors.hpp"
#include "warpcap/inequalities.hpp"
#include "warpcap/random.hpp"

using namespace warpcap;

namespace {

std::vector<double> gaussian_vector(std::mt19937_64& gen, int n) {
  std::vector<double> v(n);
  for (double& c : v) c = standard_normal(gen);
  return v;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

std::vector<double> scaled(const std::vector<double>& v, double lambda) {
  std::vector<double> out = v;
  for (double& c : out) c *= lambda;
  return out;
}

}  // namespace

TEST_CASE("psi matches its closed forms") {
  // p = 2: both branches collapse to the squared distance
  std::vector<double> x = {3.0, -1.0}, y = {1.0, 2.0};
  CHECK(psi(x, y, 2.0) == doctest::Approx(13.0).epsilon(1e-14));

  // p >= 2 branch
  std::vector<double> e1 = {1.0, 0.0}, zero = {0.0, 0.0}, me1 = {-1.0, 0.0};
  CHECK(psi(e1, zero, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(psi(e1, me1, 3.0) == doctest::Approx(8.0).epsilon(1e-14));

  // p < 2 branch: |x - y|^2 / (|x| + |y|)^(2-p)
  CHECK(psi(e1, me1, 1.5) == doctest::Approx(4.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(psi(e1, zero, 1.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(psi(zero, zero, 1.5) == 0.0);  // limiting value at the origin pair
  CHECK(psi(zero, zero, 3.0) == 0.0);

  // symmetry and positivity apart from x = y
  std::mt19937_64 gen(11);
  for (int i = 0; i < 200; ++i) {
    auto a = gaussian_vector(gen, 3), b = gaussian_vector(gen, 3);
    const double p = i % 2 ? 1.5 : 3.0;
    CHECK(psi(a, b, p) == psi(b, a, p));
    CHECK(psi(a, b, p) > 0.0);
    CHECK(psi(a, a, p) == 0.0);
  }
}

TEST_CASE("psi is p-homogeneous in both branches") {
  std::mt19937_64 gen(12);
  const double lambda = 2.7;
  for (double p : {1.5, 3.0}) {
    for (int i = 0; i < 100; ++i) {
      auto a = gaussian_vector(gen, 4), b = gaussian_vector(gen, 4);
      const double base = psi(a, b, p);
      const double blown = psi(scaled(a, lambda), scaled(b, lambda), p);
      CHECK(blown == doctest::Approx(std::pow(lambda, p) * base).epsilon(1e-12));
    }
  }
}

TEST_CASE("lindqvist_lhs closed forms, symmetry, homogeneity") {
  std::vector<double> x = {3.0, -1.0}, y = {1.0, 2.0};
  // p = 2: plain squared distance
  CHECK(lindqvist_lhs(x, y, 2.0) == doctest::Approx(13.0).epsilon(1e-14));
  CHECK(lindqvist_lhs(x, x, 3.0) == 0.0);

  std::vector<double> e1 = {1.0, 0.0}, zero = {0.0, 0.0};
  // |0|^(p-2) 0 is taken as 0, so the pair (e1, 0) gives |e1|^p = 1
  CHECK(lindqvist_lhs(e1, zero, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lindqvist_lhs(e1, zero, 1.5) == doctest::Approx(1.0).epsilon(1e-14));

  std::mt19937_64 gen(13);
  const double lambda = 2.7;
  for (double p : {1.5, 2.0, 3.0}) {
    for (int n : {1, 2, 5}) {
      for (int i = 0; i < 60; ++i) {
        auto a = gaussian_vector(gen, n), b = gaussian_vector(gen, n);
        const double lhs = lindqvist_lhs(a, b, p);
        CHECK(lhs == lindqvist_lhs(b, a, p));
        CHECK(lhs >= 0.0);  // monotonicity of v -> |v|^(p-2) v
        const double blown = lindqvist_lhs(scaled(a, lambda), scaled(b, lambda), p);
        CHECK(blown == doctest::Approx(std::pow(lambda, p) * lhs).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("estimate_cp pins the sharp constants") {
  // p = 2: the ratio is identically 1/2
  const CpEstimate two = estimate_cp(2.0, 3, 2000, 42);
  CHECK(two.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(two.p == 2.0);
  CHECK(two.dimension == 3);
  CHECK(two.sample_count == 2000);
  CHECK(two.seed == 42);

  // p >= 2: infimum 2^(1-p), attained by antipodal pairs
  const CpEstimate three = estimate_cp(3.0, 2, 5000, 7);
  CHECK(three.value == doctest::Approx(0.25).epsilon(1e-9));

  // 1 < p < 2: infimum (p-1) 2^(1-p), approached by near-equal parallel pairs
  const double limit = 0.5 / std::sqrt(2.0);  // = (p-1) 2^(1-p) at p = 3/2
  const CpEstimate half = estimate_cp(1.5, 2, 5000, 7);
  CHECK(half.value == doctest::Approx(0.3535533905932738).epsilon(1e-4));
  CHECK(half.value >= limit * (1.0 - 1e-9));

  // determinism: the same seed reproduces the estimate bit for bit
  const CpEstimate again = estimate_cp(1.5, 2, 5000, 7);
  CHECK(again.value == half.value);
  const CpEstimate other_dim = estimate_cp(3.0, 5, 2000, 99);
  CHECK(other_dim.value == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("estimated constant certifies the inequality on fresh samples") {
  for (double p : {1.5, 3.0}) {
    const CpEstimate est = estimate_cp(p, 3, 2000, 2024);
    std::mt19937_64 gen(640209);  // unrelated to the estimation seed
    int violations = 0;
    for (int i = 0; i < 20000; ++i) {
      auto a = gaussian_vector(gen, 3), b = gaussian_vector(gen, 3);
      if (lindqvist_lhs(a, b, p) < 2.0 * (0.99 * est.value) * psi(a, b, p)) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("negative part weight bound holds across the quadrant") {
  // t = 0 kills the weight entirely
  CHECK(negative_part_bound(1.0, 1.0, 0.0, 2.0));
  CHECK(negative_part_bound(0.0, 0.0, 0.0, 2.0));
  // t = 2A sits at the maximum of the weight, still below 2/sqrt(A)
  for (double A : {1.5, 4.0, 100.0}) {
    CHECK(negative_part_bound(2.0, 3.0, 2.0 * A, A));
  }
  std::mt19937_64 gen(31);
  for (int i = 0; i < 10000; ++i) {
    const double A = 1.0 + uniform(gen, 1e-6, 1e6);
    const double t = uniform(gen, 0.0, 1e6);
    const double du = uniform(gen, 0.0, 1e3);
    const double dv = uniform(gen, 0.0, 1e3);
    CHECK(negative_part_bound(du, dv, t, A));
  }
}

TEST_CASE("weight maximum location and value") {
  for (double A : {1.0, 4.0, 100.0}) {
    const WeightMaximum wm = weight_maximum(A);
    CHECK(std::abs(wm.argmax - 2.0 * A) <= 1e-9);
    const double expect = 4.0 / (3.0 * std::sqrt(3.0) * std::sqrt(A));
    CHECK(wm.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(wm.increasing_below);
  }
  // the scaled peak value is independent of A
  const double v1 = weight_maximum(1.0).value * std::sqrt(1.0);
  const double v10 = weight_maximum(10.0).value * std::sqrt(10.0);
  const double v100 = weight_maximum(100.0).value * std::sqrt(100.0);
  CHECK(v10 == doctest::Approx(v1).epsilon(1e-10));
  CHECK(v100 == doctest::Approx(v1).epsilon(1e-10));
}

TEST_CASE("inequality helpers validate their arguments") {
  std::vector<double> a = {1.0, 2.0}, b = {0.0, 1.0}, c = {1.0}, empty;
  CHECK_THROWS_AS(psi(a, b, 1.0), DomainError);
  CHECK_THROWS_AS(psi(a, b, 0.5), DomainError);
  CHECK_THROWS_AS(psi(a, c, 2.0), DomainError);
  CHECK_THROWS_AS(psi(empty, empty, 2.0), DomainError);
  CHECK_THROWS_AS(lindqvist_lhs(a, b, 1.0), DomainError);
  CHECK_THROWS_AS(lindqvist_lhs(a, c, 3.0), DomainError);

  CHECK_THROWS_AS(estimate_cp(1.0, 2, 2000, 1), DomainError);
  CHECK_THROWS_AS(estimate_cp(2.0, 0, 2000, 1), DomainError);
  CHECK_THROWS_AS(estimate_cp(2.0, 2, 999, 1), DomainError);

  CHECK_THROWS_AS(negative_part_bound(-1.0, 0.0, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(negative_part_bound(0.0, -1.0, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(negative_part_bound(0.0, 0.0, -1.0, 2.0), DomainError);
  CHECK_THROWS_AS(negative_part_bound(0.0, 0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(negative_part_bound(0.0, 0.0, 1.0, 0.5), DomainError);

  CHECK_THROWS_AS(weight_maximum(0.0), DomainError);
  CHECK_THROWS_AS(weight_maximum(-3.0), DomainError);
}
