#include <doctest.h>

#include <cstring>
#include <random>

#include "drnv/inner_eval.hpp"
#include "drnv/kernels.hpp"
#include "fixtures.hpp"

using namespace drnv;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("evaluator matches eval_F") {
    const auto inst = make_instance(fixtures::monthly_sales_48(), 2.5, {20, 10});
    const FEvaluator f(inst, 3.0, 11.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u1(0, 3), u2(-100, 100);
    for (int k = 0; k < 100; ++k) {
      const double l1 = u1(rng), l2 = u2(rng);
      CHECK(f(l1, l2) == doctest::Approx(*eval_F({l1, l2, 3.0 - l1}, 11.0, inst)).epsilon(1e-14));
    }
  }

  TEST_CASE("serial and parallel kernels agree bit for bit") {
    const auto inst = make_instance(fixtures::monthly_sales_48(), 2.5, {20, 10});
    const FEvaluator f(inst, 3.0, 11.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u1(0, 40), u2(-600, 600);
    std::vector<Point2> pts(3000);
    for (auto& p : pts) p = {u1(rng), u2(rng)};

    std::vector<double> a(pts.size()), b(pts.size());
    evaluate_points(f, pts, a, Exec::Serial);
    evaluate_points(f, pts, b, Exec::Parallel);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(same_bits(a[k], b[k]));

    const ArgMin s = argmin_points(f, pts, Exec::Serial);
    const ArgMin p = argmin_points(f, pts, Exec::Parallel);
    CHECK(s.index == p.index);
    CHECK(same_bits(s.value, p.value));

    const GridScan gs = grid_scan(f, 0, 40, 120, -600, 600, 130, Exec::Serial);
    const GridScan gp = grid_scan(f, 0, 40, 120, -600, 600, 130, Exec::Parallel);
    CHECK(gs.i == gp.i);
    CHECK(gs.j == gp.j);
    CHECK(same_bits(gs.value, gp.value));

    const ProfileScan ps = profile_scan(f, 0, 40, 64, -600, 600, Exec::Serial);
    const ProfileScan pp = profile_scan(f, 0, 40, 64, -600, 600, Exec::Parallel);
    CHECK(ps.i == pp.i);
    CHECK(same_bits(ps.lambda2, pp.lambda2));
    CHECK(same_bits(ps.value, pp.value));

    const DenseMax ds = dense_argmax_g(0.5, 3, 5, {20, 10}, 60, 1e-3, Exec::Serial);
    const DenseMax dp = dense_argmax_g(0.5, 3, 5, {20, 10}, 60, 1e-3, Exec::Parallel);
    CHECK(same_bits(ds.x, dp.x));
    CHECK(same_bits(ds.value, dp.value));
  }

  TEST_CASE("argmin ties go to the lowest index") {
    const auto inst = make_instance({1, 2}, 1.0, {1, 1});
    const FEvaluator f(inst, 1.0, 1.0);
    const std::vector<Point2> pts{{1, 1}, {0, 0}, {1, 1}, {0, 0}, {0, 0}};
    for (Exec e : {Exec::Serial, Exec::Parallel}) {
      const ArgMin m = argmin_points(f, pts, e);
      CHECK(m.value == f(pts[m.index].x, pts[m.index].y));
      CHECK(m.index == (f(0, 0) < f(1, 1) ? 1u : 0u));
    }
  }

  TEST_CASE("grid scan covers both corners") {
    const auto inst = make_instance({1, 2}, 1.0, {1, 1});
    const FEvaluator f(inst, 1.0, 1.0);
    const GridScan g = grid_scan(f, 0, 1, 2, -1, 1, 2);
    CHECK((g.lambda1 == 0.0 || g.lambda1 == 1.0));
    CHECK((g.lambda2 == -1.0 || g.lambda2 == 1.0));
  }

  TEST_CASE("line minimum over lambda_2 beats any sampled point on the line") {
    const auto inst = make_instance({3, 7, 12}, 1.0, {5, 2});
    const FEvaluator f(inst, 0.7, 6.0);
    const auto [y, v] = min_over_lambda2(f, 0.4, -200, 200);
    for (double t = -200; t <= 200; t += 0.37) CHECK(v <= f(0.4, t) + 1e-9);
    CHECK(v == f(0.4, y));
  }

  TEST_CASE("dense argmax finds the lattice maximum") {
    const DenseMax d = dense_argmax_g(1, 0, 0, {1, 1}, 2, 0.25);
    CHECK(d.x == 0.5);
    CHECK(d.value == doctest::Approx(0.25));
  }
}
