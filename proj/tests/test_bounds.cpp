#include "infokm/bounds.hpp"

#include <cmath>

#include "doctest.h"
#include "infokm/numeric.hpp"

using namespace ikm;

namespace {

double term(const BoundReport& r, const std::string& label) {
  for (const auto& t : r.terms) {
    if (t.label == label) return t.value;
  }
  FAIL("missing term ", label);
  return 0.0;
}

double sum_terms(const BoundReport& r) {
  double acc = 0.0;
  for (const auto& t : r.terms) acc += t.value;
  return acc;
}

// Independent longhand transcription of the observable linear bound.
struct LinearOracle {
  double chaining;
  double variance;
  double deviation_uniform;
  double deviation_excess;
};

LinearOracle linear_oracle(double n, double k, double tn, double wn, double a,
                           double b, double delta) {
  LinearOracle o{};
  o.chaining = std::log(n / k) / std::log(2.0) *
                   std::sqrt(8.0 * std::log(k) / n) * tn * wn +
               2.0 * std::sqrt(std::log(k) / n) * tn * wn;
  o.variance = std::sqrt(
      (std::sqrt(2.0) + 1.0) *
      (k * (b - a) * (b - a) +
       2.0 * std::log(std::exp(1.0) * k) * wn * wn * tn * tn) /
      n);
  o.deviation_uniform = std::sqrt(std::log(1.0 / delta) / (2.0 * n)) * (b - a);
  o.deviation_excess = std::sqrt(2.0 * std::log(1.0 / delta) / n) * (b - a);
  return o;
}

}  // namespace

TEST_CASE("linear_bound") {
  SUBCASE("term-by-term transcription oracle at the reference inputs") {
    LinearBoundInputs in;
    in.n = 1000;
    in.k = 2;
    in.theta_norm = 1.0;
    in.w_norm = 1.0;
    in.a = 0.0;
    in.b = 1.0;
    in.delta = 0.1;
    const LinearOracle o = linear_oracle(1000, 2, 1, 1, 0, 1, 0.1);

    in.mode = DeviationMode::uniform;
    BoundReport r = linear_bound(in);
    CHECK(std::abs(term(r, "chaining") - o.chaining) <= 1e-12);
    CHECK(std::abs(term(r, "variance") - o.variance) <= 1e-12);
    CHECK(std::abs(term(r, "deviation") - o.deviation_uniform) <= 1e-12);
    CHECK(std::abs(r.total - (o.chaining + o.variance + o.deviation_uniform)) <=
          1e-12);

    in.mode = DeviationMode::excess;
    r = linear_bound(in);
    CHECK(std::abs(term(r, "deviation") - o.deviation_excess) <= 1e-12);

    in.mode = DeviationMode::expectation;
    in.epsilon = 0.25;
    r = linear_bound(in);
    CHECK(term(r, "deviation") == 0.0);
    CHECK(term(r, "epsilon") == doctest::Approx(0.25));
  }

  SUBCASE("delta near 1 kills the deviation term") {
    LinearBoundInputs in;
    in.n = 1000;
    in.k = 2;
    in.theta_norm = 1.0;
    in.w_norm = 1.0;
    in.a = 0.0;
    in.b = 1.0;
    in.delta = 1.0 - 1e-12;
    CHECK(term(linear_bound(in), "deviation") <= 1e-6);
  }

  SUBCASE("zero norms and an empty range vanish entirely") {
    LinearBoundInputs in;
    in.n = 100;
    in.k = 2;
    in.theta_norm = 0.0;
    in.w_norm = 0.0;
    in.a = 0.5;
    in.b = 0.5;
    in.delta = 0.1;
    CHECK(linear_bound(in).total == doctest::Approx(0.0));
  }

  SUBCASE("constraint violations name the constraint") {
    LinearBoundInputs in;
    in.n = 3;
    in.k = 2;
    in.delta = 0.1;
    in.b = 1.0;
    try {
      linear_bound(in);
      FAIL("expected invalid_input");
    } catch (const invalid_input& e) {
      CHECK(std::string(e.what()).find("n >= 2k") != std::string::npos);
    }
    in.n = 100;
    in.k = 1;
    CHECK_THROWS_AS(linear_bound(in), invalid_input);
    in.k = 2;
    in.delta = 1.0;
    CHECK_THROWS_AS(linear_bound(in), invalid_input);
    in.delta = 0.1;
    in.a = 2.0;
    CHECK_THROWS_AS(linear_bound(in), invalid_input);
  }
}

TEST_CASE("quadratic_bound") {
  SUBCASE("main term at the reference point") {
    const BoundReport r =
        quadratic_bound(1000, 2, 1.0, 0.1, DeviationMode::uniform);
    const double main =
        16.0 * std::log(500.0) * std::sqrt(2.0 * std::log(2.0) / 1000.0);
    CHECK(std::abs(term(r, "main") - main) <= 1e-12);
    CHECK(term(r, "main") == doctest::Approx(3.7022134789762968).epsilon(1e-12));
    const double dev = 2.0 * std::sqrt(2.0 * std::log(10.0) / 1000.0);
    CHECK(std::abs(term(r, "deviation") - dev) <= 1e-12);
  }

  SUBCASE("excess mode doubles the deviation constant") {
    const BoundReport u =
        quadratic_bound(1000, 2, 1.0, 0.1, DeviationMode::uniform);
    const BoundReport e =
        quadratic_bound(1000, 2, 1.0, 0.1, DeviationMode::excess);
    CHECK(term(e, "deviation") ==
          doctest::Approx(2.0 * term(u, "deviation")).epsilon(1e-14));
    const BoundReport x =
        quadratic_bound(1000, 2, 1.0, 0.1, DeviationMode::expectation);
    CHECK(term(x, "deviation") == 0.0);
  }

  SUBCASE("B = 0 gives a zero bound") {
    CHECK(quadratic_bound(1000, 2, 0.0, 0.1, DeviationMode::uniform).total ==
          doctest::Approx(0.0));
  }

  SUBCASE("the simplification covers the unsimplified form under 4 B^2") {
    // Endpoint sweep: wherever the three-term form is within the trivial
    // range, the 16 log(n/k) sqrt(k log k / n) form dominates it.
    const double B = 1.0;
    for (int k : {2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64}) {
      for (double ratio = 2.0; ratio * k <= 1e6; ratio *= 1.45) {
        const auto n = static_cast<std::int64_t>(ratio * k);
        if (n < 2 * k) continue;
        const double unsimpl =
            quadratic_bound_unsimplified(n, k, B, 0.5,
                                         DeviationMode::expectation)
                .total;
        const double simpl =
            quadratic_bound(n, k, B, 0.5, DeviationMode::expectation).total;
        if (unsimpl <= 4.0 * B * B) {
          CHECK(unsimpl <= simpl + 1e-12);
        }
      }
    }
  }

  SUBCASE("unsimplified form exposes eta_k and matches its own transcription") {
    const BoundReport r =
        quadratic_bound_unsimplified(1000, 2, 1.0, 0.1, DeviationMode::uniform);
    double eta = 0.0;
    for (const auto& x : r.extras) {
      if (x.label == "eta_k") eta = x.value;
    }
    CHECK(eta == doctest::Approx(simple_eta(2)).epsilon(1e-14));
    const LinearOracle o =
        linear_oracle(1000, 2, 3.0 * std::sqrt(2.0), 1.0, -1.0, 3.0, 0.1);
    CHECK(std::abs(term(r, "chaining") - o.chaining) <= 1e-12);
    CHECK(std::abs(term(r, "variance") - o.variance) <= 1e-12);
    CHECK(std::abs(term(r, "deviation") - o.deviation_uniform) <= 1e-12);
  }
}

TEST_CASE("robust_bound") {
  SUBCASE("transcription oracle") {
    const double n = 1000, k = 2, sigma = 1.0, delta = 0.1;
    const double scale = 2.0 * sigma * sigma;
    const double chain =
        scale * (std::log(n / k) / std::log(2.0) *
                     std::sqrt(8.0 * k * std::log(k) / n) +
                 2.0 * std::sqrt(k * std::log(k) / n));
    const double variance =
        scale * std::sqrt((std::sqrt(2.0) + 1.0) * k *
                          (3.0 + 2.0 * std::log(k)) / n);
    const double dev = scale * std::sqrt(std::log(1.0 / delta) / (2.0 * n));
    const BoundReport r =
        robust_bound(1000, 2, 1.0, 0.1, DeviationMode::uniform);
    CHECK(std::abs(term(r, "chaining") - chain) <= 1e-12);
    CHECK(std::abs(term(r, "variance") - variance) <= 1e-12);
    CHECK(std::abs(term(r, "deviation") - dev) <= 1e-12);
  }

  SUBCASE("doubling sigma quadruples everything") {
    const BoundReport a =
        robust_bound(1000, 4, 1.0, 0.1, DeviationMode::uniform);
    const BoundReport b =
        robust_bound(1000, 4, 2.0, 0.1, DeviationMode::uniform);
    CHECK(b.total == doctest::Approx(4.0 * a.total).epsilon(1e-14));
  }

  SUBCASE("quadrupling n halves the pure root terms") {
    const BoundReport a =
        robust_bound(10000, 4, 1.0, 0.1, DeviationMode::uniform);
    const BoundReport b =
        robust_bound(40000, 4, 1.0, 0.1, DeviationMode::uniform);
    CHECK(term(b, "variance") ==
          doctest::Approx(term(a, "variance") / 2.0).epsilon(1e-12));
    CHECK(term(b, "deviation") ==
          doctest::Approx(term(a, "deviation") / 2.0).epsilon(1e-12));
    // Chaining splits into a log-carrying root and a pure root; each root
    // factor halves on its own.
    const double t1a = std::log(10000.0 / 4.0) / std::log(2.0) *
                       std::sqrt(8.0 * 4.0 * std::log(4.0) / 10000.0);
    const double t1b = std::log(40000.0 / 4.0) / std::log(2.0) *
                       std::sqrt(8.0 * 4.0 * std::log(4.0) / 40000.0);
    const double t2a = 2.0 * std::sqrt(4.0 * std::log(4.0) / 10000.0);
    const double t2b = 2.0 * std::sqrt(4.0 * std::log(4.0) / 40000.0);
    CHECK(term(a, "chaining") ==
          doctest::Approx(2.0 * (t1a + t2a)).epsilon(1e-12));
    CHECK(term(b, "chaining") ==
          doctest::Approx(2.0 * (t1b + t2b)).epsilon(1e-12));
    CHECK(t1b == doctest::Approx(t1a / 2.0 * std::log(1e4) / std::log(2.5e3))
                     .epsilon(1e-12));
    CHECK(t2b == doctest::Approx(t2a / 2.0).epsilon(1e-12));
  }

  SUBCASE("sigma = 0 is rejected") {
    CHECK_THROWS_AS(robust_bound(1000, 2, 0.0, 0.1, DeviationMode::uniform),
                    invalid_input);
  }
}

TEST_CASE("info_bound") {
  SUBCASE("B = 1 reduces the factor to C") {
    const BoundReport r =
        info_bound(1000, 2, 1.0, 3.0, 0.1, DeviationMode::uniform);
    const BoundReport rb =
        robust_bound(1000, 2, 1.0, 0.1, DeviationMode::uniform);
    // Same bracket; the robust report scales it by 2 sigma^2 = 2.
    CHECK(r.total == doctest::Approx(rb.total / 2.0 * 3.0).epsilon(1e-12));
  }

  SUBCASE("transcription oracle at (n=1000, k=2, B=2, C=1)") {
    const double n = 1000, k = 2, B = 2.0, C = 1.0, delta = 0.1;
    const double factor = B * C + 2.0 * std::log(B);
    const double bracket = std::log(n / k) / std::log(2.0) *
                               std::sqrt(8.0 * k * std::log(k) / n) +
                           2.0 * std::sqrt(k * std::log(k) / n) +
                           std::sqrt((std::sqrt(2.0) + 1.0) * k *
                                     (3.0 + 2.0 * std::log(k)) / n) +
                           std::sqrt(std::log(1.0 / delta) / (2.0 * n));
    const BoundReport r =
        info_bound(1000, 2, 2.0, 1.0, 0.1, DeviationMode::uniform);
    CHECK(std::abs(r.total - bracket * factor) <= 1e-12);
  }

  SUBCASE("B below 1 is rejected, delta near 1 removes the deviation") {
    CHECK_THROWS_AS(info_bound(1000, 2, 0.5, 1.0, 0.1, DeviationMode::uniform),
                    invalid_input);
    const BoundReport r =
        info_bound(1000, 2, 2.0, 1.0, 1.0 - 1e-12, DeviationMode::uniform);
    CHECK(term(r, "deviation") <= 1e-6);
  }
}

TEST_CASE("info_constants_from_data") {
  auto nu = ReferenceMeasure::uniform(2);

  SUBCASE("uniform densities give (B, C, R) = (1, 0, 0)") {
    Eigen::ArrayXd w(2);
    w << 1.0, 1.0;
    const std::vector<Density> data{make_density(w, nu), make_density(w, nu)};
    const InfoConstants c = info_constants_from_data(data);
    CHECK_FALSE(c.zero_atom);
    CHECK(c.C_hat == doctest::Approx(0.0));
    CHECK(c.R_hat_upper == doctest::Approx(0.0));
    CHECK(c.B_hat == doctest::Approx(1.0));
  }

  SUBCASE("two-atom density against the longhand values") {
    Eigen::ArrayXd w(2);
    w << 3.0, 1.0;  // density values 1.5 and 0.5
    const std::vector<Density> data{make_density(w, nu)};
    const InfoConstants c = info_constants_from_data(data);
    const double sq_mass = (1.5 * 1.5 + 0.5 * 0.5) / 2.0;
    CHECK(sq_mass == doctest::Approx(1.25));
    const double kl_one = (std::log(1.0 / 1.5) + std::log(1.0 / 0.5)) / 2.0;
    CHECK(c.R_hat_upper == doctest::Approx(kl_one).epsilon(1e-14));
    CHECK(c.R_hat_upper == doctest::Approx(0.143841).epsilon(1e-5));
    const double log_sq =
        (std::log(1.5) * std::log(1.5) + std::log(0.5) * std::log(0.5)) / 2.0;
    CHECK(c.C_hat == doctest::Approx(std::sqrt(log_sq)).epsilon(1e-14));
    CHECK(c.B_hat ==
          doctest::Approx(std::sqrt(1.25) * std::exp(kl_one)).epsilon(1e-14));
  }

  SUBCASE("a zero atom collapses all constants to +inf") {
    Eigen::ArrayXd w(2);
    w << 1.0, 0.0;
    const std::vector<Density> data{make_density(w, nu)};
    const InfoConstants c = info_constants_from_data(data);
    CHECK(c.zero_atom);
    CHECK(std::isinf(c.C_hat));
    CHECK(std::isinf(c.B_hat));
  }
}

TEST_CASE("psi") {
  SUBCASE("fixed values and oddness") {
    CHECK(psi(0.0) == doctest::Approx(0.0));
    CHECK(psi(1.0) == doctest::Approx(std::log(2.5)).epsilon(1e-15));
    CHECK(psi(1.0) == doctest::Approx(0.916291).epsilon(1e-5));
    CHECK(psi(-1.0) == doctest::Approx(-psi(1.0)).epsilon(1e-15));
    auto rng = make_rng(51, 0);
    for (int t = 0; t < 1000; ++t) {
      const double x = 20.0 * uniform01(rng) - 10.0;
      CHECK(psi(-x) == doctest::Approx(-psi(x)).epsilon(1e-15));
    }
  }

  SUBCASE("remainder and domination inequalities on a coarse grid") {
    const double c = 1.0 / (4.0 * (1.0 + std::sqrt(2.0)));
    for (int i = -1000; i <= 1000; ++i) {
      const double x = i * 0.01;
      CHECK(std::abs(x - psi(x)) <= c * x * x);
      CHECK(psi(x) <= std::log1p(x + 0.5 * x * x));
    }
  }

  SUBCASE("small-x evaluation keeps the cubic remainder") {
    // x - psi(x) ~ x^3/6 near zero; a naive log would lose it entirely.
    const double x = 1e-3;
    CHECK(x - psi(x) == doctest::Approx(x * x * x / 6.0).epsilon(1e-3));
  }
}

TEST_CASE("max_sq_gaussian_bound") {
  CHECK(max_sq_gaussian_bound(1, 1.0) == doctest::Approx(2.0));
  CHECK(max_sq_gaussian_bound(4, 1.0) ==
        doctest::Approx(2.0 * (1.0 + std::log(4.0))).epsilon(1e-15));
  CHECK(max_sq_gaussian_bound(4, 1.0) ==
        doctest::Approx(4.772589).epsilon(1e-5));
  CHECK(max_sq_gaussian_bound(1, 2.0) == doctest::Approx(8.0));
  CHECK_THROWS_AS(max_sq_gaussian_bound(0, 1.0), invalid_input);
}

TEST_CASE("simple_inequality_slacks") {
  const auto [left, right] = simple_inequality_slacks();

  // Independent transcription of the endpoint expression.
  const double log2 = std::log(2.0);
  const double a = 6.0 * std::sqrt(2.0) / log2;
  const double b = 16.0;
  const double eta2 = 6.0 + std::sqrt(2.0 * (std::sqrt(2.0) + 1.0) *
                                      (17.0 + 9.0 * log2) / log2);
  const double constant = 2.0 * std::log(b / 4.0) + std::log(log2);
  const double oracle_left = constant - (log2 - 2.0 * std::log(log2));
  const double xi = eta2 / (b - a);
  const double oracle_right = constant - (xi - 2.0 * std::log(xi));

  CHECK(left == doctest::Approx(oracle_left).epsilon(1e-14));
  CHECK(right == doctest::Approx(oracle_right).epsilon(1e-14));
  CHECK(left == doctest::Approx(0.97990277993484284).epsilon(1e-10));
  CHECK(right == doctest::Approx(0.63588128826456638).epsilon(1e-10));
  CHECK(left >= 0.9);
  CHECK(right >= 0.6);
}

TEST_CASE("bound reports account for their terms and echo inputs") {
  auto rng = make_rng(246, 0);
  for (int t = 0; t < 50; ++t) {
    const std::int32_t k = 2 + static_cast<std::int32_t>(uniform_index(rng, 30));
    const std::int64_t n =
        2 * k + static_cast<std::int64_t>(uniform01(rng) * 100000.0);
    const double delta = 0.01 + 0.9 * uniform01(rng);
    const double B = 0.5 + 2.0 * uniform01(rng);
    const double sigma = 0.1 + 2.0 * uniform01(rng);

    for (const BoundReport& r :
         {quadratic_bound(n, k, B, delta, DeviationMode::uniform),
          quadratic_bound_unsimplified(n, k, B, delta, DeviationMode::excess),
          robust_bound(n, k, sigma, delta, DeviationMode::uniform),
          info_bound(n, k, 1.0 + B, B, delta, DeviationMode::excess)}) {
      CHECK(std::abs(r.total - sum_terms(r)) <= 1e-12);
      CHECK(r.total >= 0.0);
      CHECK_FALSE(r.inputs.empty());
    }
  }
}

TEST_CASE("bound monotonicity on a sampled grid") {
  // k well below n so the root factor dominates the shrinking log(n/k).
  const std::int64_t n = 1000000;
  double prev = 0.0;
  for (std::int32_t k : {2, 4, 8, 16, 32}) {
    const double v =
        quadratic_bound(n, k, 1.0, 0.1, DeviationMode::uniform).total;
    CHECK(v >= prev);
    prev = v;
  }
  prev = 0.0;
  for (std::int32_t k : {2, 4, 8, 16, 32}) {
    const double v = robust_bound(n, k, 1.0, 0.1, DeviationMode::uniform).total;
    CHECK(v >= prev);
    prev = v;
  }

  double prev_n = std::numeric_limits<double>::infinity();
  for (std::int64_t nn : {1000, 4000, 16000, 64000, 256000}) {
    const double v =
        quadratic_bound(nn, 4, 1.0, 0.1, DeviationMode::uniform).total;
    CHECK(v <= prev_n);
    prev_n = v;
  }

  double prev_d = std::numeric_limits<double>::infinity();
  for (double delta : {0.01, 0.05, 0.2, 0.5, 0.9}) {
    const double v =
        quadratic_bound(1000, 4, 1.0, delta, DeviationMode::uniform).total;
    CHECK(v <= prev_d);
    prev_d = v;
  }
}
