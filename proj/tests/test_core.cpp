#include "infokm/core.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "infokm/numeric.hpp"

using namespace ikm;

TEST_CASE("make_density normalizes against the reference measure") {
  auto nu = ReferenceMeasure::uniform(2);

  SUBCASE("uniform weights give the unit density") {
    Eigen::ArrayXd w(2);
    w << 1.0, 1.0;
    const Density d = make_density(w, nu);
    CHECK(d.log_value(0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(d.log_value(1) == doctest::Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("3:1 weights give density values 1.5 and 0.5") {
    Eigen::ArrayXd w(2);
    w << 3.0, 1.0;
    const Density d = make_density(w, nu);
    CHECK(d.value(0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(d.value(1) == doctest::Approx(0.5).epsilon(1e-14));
  }

  SUBCASE("all-zero weights are rejected") {
    Eigen::ArrayXd w = Eigen::ArrayXd::Zero(2);
    CHECK_THROWS_AS(make_density(w, nu), invalid_input);
  }

  SUBCASE("zero atoms become -inf with a consistent support mask") {
    Eigen::ArrayXd w(2);
    w << 1.0, 0.0;
    const Density d = make_density(w, nu);
    CHECK(d.has_support(0));
    CHECK_FALSE(d.has_support(1));
    CHECK(std::isinf(d.log_value(1)));
  }
}

TEST_CASE("density mass round-trips to 1 for random weights") {
  auto rng = make_rng(2024, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(uniform_index(rng, 30));
    auto nu = ReferenceMeasure::uniform(m);
    Eigen::ArrayXd w(m);
    bool any = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      w[i] = uniform01(rng) < 0.2 ? 0.0 : uniform01(rng) * 10.0;
      any = any || w[i] > 0.0;
    }
    if (!any) w[0] = 1.0;
    const Density d = make_density(w, nu);
    double mass = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (d.has_support(i)) mass += std::exp(d.log_value(i)) * nu->weight(i);
    }
    CHECK(std::abs(mass - 1.0) <= 1e-9);
  }
}

TEST_CASE("validate_pointset") {
  SUBCASE("derives the bound from the max norm") {
    Eigen::MatrixXd pts(2, 2);
    pts << 0.0, 0.0, 3.0, 4.0;
    const PointSet ps = validate_pointset(pts);
    CHECK(ps.bound() == doctest::Approx(5.0));
  }

  SUBCASE("rejects a violated claim and names the point") {
    Eigen::MatrixXd pts(1, 2);
    pts << 1.0, 0.0;
    try {
      validate_pointset(pts, 0.5);
      FAIL("expected invalid_input");
    } catch (const invalid_input& e) {
      CHECK(std::string(e.what()).find("point 0") != std::string::npos);
    }
  }

  SUBCASE("accepts a slack claim and keeps it") {
    Eigen::MatrixXd pts(1, 2);
    pts << 0.3, 0.4;
    const PointSet ps = validate_pointset(pts, 1.0);
    CHECK(ps.bound() == doctest::Approx(1.0));
  }

  SUBCASE("rejects non-finite entries") {
    Eigen::MatrixXd pts(1, 1);
    pts << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(validate_pointset(pts), invalid_input);
  }

  SUBCASE("is idempotent") {
    Eigen::MatrixXd pts(3, 2);
    pts << 0.1, 0.2, -0.5, 0.4, 0.9, -0.1;
    const PointSet once = validate_pointset(pts);
    const PointSet twice = validate_pointset(once.points(), once.bound());
    CHECK(twice.bound() == once.bound());
    CHECK(twice.points() == once.points());
  }
}

TEST_CASE("labeling validation") {
  Labeling l;
  l.k = 2;
  l.labels = {0, 1, 1, 0};
  CHECK_NOTHROW(l.validate(4));
  l.labels[2] = 2;
  CHECK_THROWS_AS(l.validate(4), invalid_input);
  l.labels[2] = -1;
  CHECK_THROWS_AS(l.validate(4), invalid_input);
}

TEST_CASE("reference measure invariants") {
  Eigen::ArrayXd w(3);
  w << 0.2, 0.3, 0.5;
  CHECK_NOTHROW(ReferenceMeasure::make(w));
  w << 0.2, 0.3, 0.6;
  CHECK_THROWS_AS(ReferenceMeasure::make(w), invalid_input);
  w << 0.5, 0.5, 0.0;
  CHECK_THROWS_AS(ReferenceMeasure::make(w), invalid_input);
}
