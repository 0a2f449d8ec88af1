#include <doctest.h>

#include <cmath>
#include <tuple>

#include "drnv/model.hpp"

using namespace drnv;

namespace {

ProblemInstance base() {
  ProblemInstance p;
  p.samples = {3, 1, 2};
  p.delta = 1.0;
  p.costs = {20, 10};
  p.moments = {2, 1};
  return p;
}

ErrorKind kind_of(const ProblemInstance& p) {
  try {
    validate_instance(p);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected validation to fail");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("validation sorts samples decreasing") {
    const auto v = validate_instance(base());
    REQUIRE(v.size() == 3);
    CHECK(v.samples()[0] == 3);
    CHECK(v.samples()[1] == 2);
    CHECK(v.samples()[2] == 1);
    CHECK(v.max_sample() == 3);
    CHECK(v.min_sample() == 1);
  }

  TEST_CASE("each violated invariant has its own error") {
    auto p = base();
    p.samples = {-1};
    CHECK(kind_of(p) == ErrorKind::NegativeSample);
    p = base();
    p.samples.clear();
    CHECK(kind_of(p) == ErrorKind::EmptySamples);
    p = base();
    p.costs.c1 = 0;
    CHECK(kind_of(p) == ErrorKind::NonpositiveCost);
    p = base();
    p.costs.c2 = -3;
    CHECK(kind_of(p) == ErrorKind::NonpositiveCost);
    p = base();
    p.delta = -0.1;
    CHECK(kind_of(p) == ErrorKind::NegativeDelta);
    p = base();
    p.moments.sigma = -1;
    CHECK(kind_of(p) == ErrorKind::NegativeSigma);
  }

  TEST_CASE("error messages name the violated invariant") {
    auto p = base();
    p.delta = -1;
    try {
      validate_instance(p);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("NegativeDelta") != std::string::npos);
      CHECK(std::string(e.what()).find("delta") != std::string::npos);
    }
  }

  TEST_CASE("single sample point mass is valid") {
    ProblemInstance p;
    p.samples = {5};
    p.delta = 0;
    p.costs = {1, 1};
    p.moments = {5, 0};
    const auto v = validate_instance(p);
    CHECK(v.size() == 1);
    CHECK(v.sample_weight() == 1.0);
  }

  TEST_CASE("validation is idempotent") {
    const auto v = validate_instance(base());
    const auto again = validate_instance(v.instance());
    CHECK(again == v);
  }

  TEST_CASE("empirical moments") {
    const std::vector<double> two{2, 4};
    auto [m, s] = empirical_moments(two);
    CHECK(m == doctest::Approx(3.0));
    CHECK(s == doctest::Approx(1.0));

    const std::vector<double> one{5};
    std::tie(m, s) = empirical_moments(one);
    CHECK(m == 5.0);
    CHECK(s == 0.0);

    const std::vector<double> four{1, 2, 3, 4};
    std::tie(m, s) = empirical_moments(four);
    CHECK(m == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(s == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
  }

  TEST_CASE("point mass moments are exact") {
    for (double x : {0.1, 1.0 / 3.0, 7.77, 123456.789}) {
      const std::vector<double> xs(9, x);
      const auto [m, s] = empirical_moments(xs);
      CHECK(m == x);
      CHECK(s == 0.0);
    }
  }

  TEST_CASE("moments default to the data") {
    const auto v = make_instance({2, 4}, 0.0, {1, 1});
    CHECK(v.moments().mu == doctest::Approx(3.0));
    CHECK(v.moments().sigma == doctest::Approx(1.0));
    const auto w = make_instance({2, 4}, 0.0, {1, 1}, MomentSpec{7, 2});
    CHECK(w.moments().mu == 7.0);
    CHECK(w.moments().sigma == 2.0);
  }

  TEST_CASE("weights") {
    const auto v = make_instance({1, 2, 3, 4}, 0.0, {1, 1});
    CHECK(v.sample_weight() * 4.0 == 1.0);
    const auto u = make_instance({1, 2, 3, 4}, 0.0, {1, 1}, std::nullopt, Weighting::Unweighted);
    CHECK(u.sample_weight() == 1.0);
    CHECK(u.weighting() == Weighting::Unweighted);
  }

  TEST_CASE("derived quantities") {
    const CostParams c{20, 10};
    CHECK(c.c_tilde() == 30.0);
    const MomentSpec m{10, 2};
    CHECK(m.m2() == 104.0);
    const DualPoint d{1.5, 4.0, 2.0};
    CHECK(d.a() == 3.5);
    CHECK(d.xi() == d.a());
    CHECK(d.b(2.0) == 1.5 * 2.0 - 2.0);
  }

  TEST_CASE("with_delta revalidates") {
    const auto v = validate_instance(base());
    CHECK(v.with_delta(4.0).delta() == 4.0);
    CHECK_THROWS_AS(v.with_delta(-1.0), Error);
  }
}
