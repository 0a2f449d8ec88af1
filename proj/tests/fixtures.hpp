#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "drnv/model.hpp"

namespace fixtures {

// Four years of monthly demand in thousands: upward trend, quarter-end
// spikes, a little multiplicative noise. Right-skewed like real sales data.
inline std::vector<double> monthly_sales_48() {
  std::mt19937_64 rng(48);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  std::vector<double> xs;
  for (int k = 0; k < 48; ++k) {
    double base = 6.0 + 0.12 * k;
    if (k % 3 == 2) base *= 1.6;
    xs.push_back(base * (1.0 + 0.06 * noise(rng)));
  }
  return xs;
}

struct RandomInstance {
  std::vector<double> samples;
  double delta;
  drnv::CostParams costs;
};

inline RandomInstance random_instance(std::mt19937_64& rng, int max_n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomInstance r;
  const int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_n));
  r.samples.resize(n);
  for (auto& x : r.samples) x = 20.0 * u(rng);
  r.delta = 0.5 + 5.0 * u(rng);
  r.costs = {1.0 + 30.0 * u(rng), 1.0 + 30.0 * u(rng)};
  return r;
}

// Small instances (2 to 5 samples) with room inside the ball, for the primal
// transport LP.
inline std::vector<drnv::ValidatedInstance> duality_suite() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<drnv::ValidatedInstance> out;
  for (int k = 0; k < 5; ++k) {
    std::vector<double> xs(2 + k % 4);
    for (auto& x : xs) x = 2.0 + 10.0 * u(rng);
    const double delta = 0.5 + 3.0 * u(rng);
    out.push_back(drnv::make_instance(xs, delta, {5.0 + 20.0 * u(rng), 5.0 + 20.0 * u(rng)}));
  }
  return out;
}

// Uniform support grid reaching a quarter beyond the largest sample.
inline double support_max(const drnv::ValidatedInstance& inst) { return 1.25 * inst.max_sample() + 1.0; }

}  // namespace fixtures
