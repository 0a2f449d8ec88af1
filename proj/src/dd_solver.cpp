#include "drnv/dd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

namespace drnv {

std::vector<int> active_intercepts(CaseId id) {
  switch (id) {
    case CaseId::Case1: return {4};
    case CaseId::Case2: return {4, 2, 3};
    case CaseId::Case3: return {2, 3};
    case CaseId::Case4: return {1};
  }
  return {};
}

namespace {

double intercept_value(const Intercepts& beta, int j) {
  switch (j) {
    case 1: return beta.beta1;
    case 2: return beta.beta2;
    case 3: return beta.beta3;
    default: return beta.beta4;
  }
}

}  // namespace

PlaneGeometry build_geometry(const ValidatedInstance& inst, double xi, double q) {
  if (!(xi > 0.0)) {
    throw Error(ErrorKind::NonpositiveXi, "xi = " + std::to_string(xi) + " must be > 0");
  }
  PlaneGeometry geo;
  geo.cls = classify_case(inst.costs(), xi, q);
  const auto intercepts = active_intercepts(geo.cls.id);
  const auto samples = inst.samples();

  // Samples are sorted decreasing; equal values give coincident lines.
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i > 0 && samples[i] == samples[i - 1]) continue;
    for (int j : intercepts) {
      geo.lines.push_back({i, j, 2.0 * samples[i], intercept_value(geo.cls.beta, j)});
    }
  }

  auto& vs = geo.vertices;
  for (int j : intercepts) vs.push_back({0.0, intercept_value(geo.cls.beta, j)});
  for (std::size_t a = 0; a < geo.lines.size(); ++a) {
    for (std::size_t b = a + 1; b < geo.lines.size(); ++b) {
      const auto& la = geo.lines[a];
      const auto& lb = geo.lines[b];
      if (la.slope == lb.slope) continue;
      double l1 = (lb.intercept - la.intercept) / (la.slope - lb.slope);
      if (l1 < -1e-12) continue;
      l1 = std::max(l1, 0.0);
      vs.push_back({l1, la.slope * l1 + la.intercept});
    }
  }
  std::sort(vs.begin(), vs.end(),
            [](const Point2& p, const Point2& r) { return p.x < r.x || (p.x == r.x && p.y < r.y); });
  vs.erase(std::unique(vs.begin(), vs.end(),
                       [](const Point2& p, const Point2& r) {
                         return std::abs(p.x - r.x) <= 1e-12 && std::abs(p.y - r.y) <= 1e-12;
                       }),
           vs.end());
  return geo;
}

namespace {

// Lines closer than this (relative to 1 + |lambda|) count as passing through
// the current point; probes step kProbeEps off it.
constexpr double kIncidentTol = 1e-9;
constexpr double kProbeEps = 1e-7;
constexpr int kMaxBoxExpansions = 30;

using Polygon = std::vector<Point2>;

struct Box {
  double hi1 = 0.0;
  double lo2 = 0.0;
  double hi2 = 0.0;

  bool contains(Point2 p) const { return p.x >= 0.0 && p.x <= hi1 && p.y >= lo2 && p.y <= hi2; }
  Polygon rect() const { return {{0.0, lo2}, {hi1, lo2}, {hi1, hi2}, {0.0, hi2}}; }
};

// F restricted to a region where every sample keeps one maximiser:
// 0.5 l'Hl + g'l + c.
struct Quadratic {
  double h11 = 0.0, h12 = 0.0, h22 = 0.0;
  double g1 = 0.0, g2 = 0.0;
  double c = 0.0;

  double at(Point2 p) const {
    return 0.5 * (h11 * p.x * p.x + 2.0 * h12 * p.x * p.y + h22 * p.y * p.y) + g1 * p.x +
           g2 * p.y + c;
  }
};

Polygon clip(const Polygon& poly, const CutLine& line, double sign) {
  Polygon out;
  out.reserve(poly.size() + 1);
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point2 p = poly[k];
    const Point2 r = poly[(k + 1) % poly.size()];
    const double fp = sign * line.offset(p.x, p.y);
    const double fr = sign * line.offset(r.x, r.y);
    if (fp >= 0.0) out.push_back(p);
    if ((fp >= 0.0) != (fr >= 0.0)) {
      const double t = fp / (fp - fr);
      out.push_back({p.x + t * (r.x - p.x), p.y + t * (r.y - p.y)});
    }
  }
  return out;
}

double signed_area(const Polygon& poly) {
  double s = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const auto& p = poly[k];
    const auto& r = poly[(k + 1) % poly.size()];
    s += p.x * r.y - r.x * p.y;
  }
  return 0.5 * s;
}

// Drops vertices that coincide with their predecessor; clipping through a
// point where several lines meet leaves such slivers behind.
void prune(Polygon& poly, double tol) {
  Polygon out;
  out.reserve(poly.size());
  for (const auto& p : poly) {
    if (!out.empty() && std::abs(p.x - out.back().x) <= tol && std::abs(p.y - out.back().y) <= tol) continue;
    out.push_back(p);
  }
  while (out.size() > 1 && std::abs(out.front().x - out.back().x) <= tol &&
         std::abs(out.front().y - out.back().y) <= tol) {
    out.pop_back();
  }
  poly = std::move(out);
}

bool inside_convex(const Polygon& poly, Point2 s, double orient) {
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const auto& p = poly[k];
    const auto& r = poly[(k + 1) % poly.size()];
    if (p.x == r.x && p.y == r.y) continue;
    const double cross = (r.x - p.x) * (s.y - p.y) - (r.y - p.y) * (s.x - p.x);
    if (orient * cross < 0.0) return false;
  }
  return true;
}

// Minimiser of a convex quadratic over a convex polygon: the interior
// stationary point when it lies inside, otherwise the best edge point.
Point2 minimize_on_polygon(const Quadratic& qd, const Polygon& poly) {
  Point2 best = poly.front();
  double best_v = qd.at(best);
  auto offer = [&](Point2 p) {
    const double v = qd.at(p);
    if (v < best_v) {
      best_v = v;
      best = p;
    }
  };
  const double det = qd.h11 * qd.h22 - qd.h12 * qd.h12;
  const double tr = qd.h11 + qd.h22;
  if (qd.h11 > 0.0 && det > 1e-14 * tr * tr) {
    const Point2 s{(-qd.g1 * qd.h22 + qd.g2 * qd.h12) / det, (qd.g1 * qd.h12 - qd.g2 * qd.h11) / det};
    if (inside_convex(poly, s, signed_area(poly) >= 0.0 ? 1.0 : -1.0)) offer(s);
  }
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point2 p = poly[k];
    const Point2 r = poly[(k + 1) % poly.size()];
    const Point2 d{r.x - p.x, r.y - p.y};
    const double a = 0.5 * (qd.h11 * d.x * d.x + 2.0 * qd.h12 * d.x * d.y + qd.h22 * d.y * d.y);
    const double b = (qd.h11 * p.x + qd.h12 * p.y + qd.g1) * d.x +
                     (qd.h12 * p.x + qd.h22 * p.y + qd.g2) * d.y;
    double t = 0.0;
    if (a > 0.0) {
      t = std::clamp(-b / (2.0 * a), 0.0, 1.0);
    } else {
      t = b < 0.0 ? 1.0 : 0.0;
    }
    offer({p.x + t * d.x, p.y + t * d.y});
  }
  return best;
}

class Descent {
 public:
  Descent(const FEvaluator& f, const PlaneGeometry& geo, Box box)
      : f_(f), geo_(geo), box_(box), inst_(f.instance()) {}

  void set_box(Box box) {
    box_ = box;
    visited_.clear();
  }
  const Box& box() const { return box_; }
  int regions_entered() const { return regions_; }
  int rays_taken() const { return rays_; }

  /// One descent move from `cur`; false when neither a region nor a ray lowers F.
  bool step(Point2& cur, double& fc) {
    collect_directions(cur);
    if (region_step(cur, fc)) {
      ++regions_;
      return true;
    }
    if (ray_step(cur, fc)) {
      ++rays_;
      return true;
    }
    return false;
  }

  bool on_outer_boundary(Point2 p) const {
    const double tol2 = 1e-9 * (std::abs(box_.lo2) + std::abs(box_.hi2));
    return p.x >= box_.hi1 * (1.0 - 1e-9) || p.y <= box_.lo2 + tol2 || p.y >= box_.hi2 - tol2;
  }

 private:
  double scale(Point2 p) const { return 1.0 + std::abs(p.x) + std::abs(p.y); }

  // Below this, a change in F is treated as round-off.
  double noise(Point2 p, double fc) const {
    const auto& m = inst_.moments();
    const double x = inst_.max_sample();
    return 1e-12 * (1.0 + std::abs(fc) + std::abs(p.x) * (inst_.delta() + m.m2() + x * x) +
                    std::abs(p.y) * (std::abs(m.mu) + x) + std::abs(f_.xi()) * m.m2());
  }

  // Unit directions of the incident cut lines, the axis and the box edges
  // through `cur`, sorted by angle.
  void collect_directions(Point2 cur) {
    dirs_.clear();
    const double tol = kIncidentTol * scale(cur);
    auto add_line = [&](double dx, double dy) {
      const double norm = std::hypot(dx, dy);
      dirs_.push_back(std::atan2(dy / norm, dx / norm));
      dirs_.push_back(std::atan2(-dy / norm, -dx / norm));
    };
    for (const auto& line : geo_.lines) {
      if (std::abs(line.offset(cur.x, cur.y)) / std::hypot(1.0, line.slope) <= tol) {
        add_line(1.0, line.slope);
      }
    }
    if (cur.x <= tol || cur.x >= box_.hi1 - tol) add_line(0.0, 1.0);
    if (cur.y <= box_.lo2 + tol || cur.y >= box_.hi2 - tol) add_line(1.0, 0.0);
    for (auto& a : dirs_) {
      if (a < 0.0) a += 2.0 * std::numbers::pi;
    }
    std::sort(dirs_.begin(), dirs_.end());
    dirs_.erase(std::unique(dirs_.begin(), dirs_.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                dirs_.end());
  }

  std::vector<Point2> probes(Point2 cur) const {
    std::vector<Point2> out;
    if (dirs_.empty()) {
      out.push_back(cur);
      return out;
    }
    const double eps = kProbeEps * scale(cur);
    for (std::size_t k = 0; k < dirs_.size(); ++k) {
      const double a0 = dirs_[k];
      const double a1 = k + 1 < dirs_.size() ? dirs_[k + 1] : dirs_.front() + 2.0 * std::numbers::pi;
      const double mid = 0.5 * (a0 + a1);
      const Point2 p{cur.x + eps * std::cos(mid), cur.y + eps * std::sin(mid)};
      if (p.x > 0.0 && box_.contains(p)) out.push_back(p);
    }
    return out;
  }

  Quadratic region_quadratic(Point2 inner) const {
    const auto& m = inst_.moments();
    const auto& costs = inst_.costs();
    const double w = inst_.sample_weight();
    const double xi = f_.xi();
    const double q = f_.q();
    const auto samples = inst_.samples();
    Quadratic qd;
    double sum_x2 = 0.0;
    double constants = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double x = samples[i];
      sum_x2 += x * x;
      const Region r = f_.outcome(i, inner.x, inner.y).region;
      if (r == Region::R0) {
        constants += costs.c2 * q;
        continue;
      }
      // (t + s)^2 / (4 xi) with t = lambda_2 - 2 x lambda_1.
      const double s = r == Region::R1 ? costs.c2 : -costs.c1;
      constants += r == Region::R1 ? costs.c2 * q : -costs.c1 * q;
      const double u1 = -2.0 * x;
      const double k = w / (2.0 * xi);
      qd.h11 += k * u1 * u1;
      qd.h12 += k * u1;
      qd.h22 += k;
      qd.g1 += k * s * u1;
      qd.g2 += k * s;
      qd.c += w * s * s / (4.0 * xi);
    }
    qd.g1 += inst_.delta() - m.m2() - w * sum_x2;
    qd.g2 += m.mu;
    qd.c += xi * m.m2() + w * constants;
    return qd;
  }

  std::vector<int8_t> signature(Point2 p) const {
    std::vector<int8_t> key(geo_.lines.size());
    for (std::size_t l = 0; l < geo_.lines.size(); ++l) {
      key[l] = geo_.lines[l].offset(p.x, p.y) >= 0.0 ? 1 : -1;
    }
    return key;
  }

  bool region_step(Point2& cur, double& fc) {
    const double tol = noise(cur, fc);
    std::optional<Point2> best;
    double best_f = fc - tol;
    std::vector<int8_t> best_key;
    for (const Point2 probe : probes(cur)) {
      auto key = signature(probe);
      if (visited_.count(key)) continue;
      Polygon poly = box_.rect();
      for (std::size_t l = 0; l < geo_.lines.size() && poly.size() >= 3; ++l) {
        poly = clip(poly, geo_.lines[l], key[l]);
      }
      prune(poly, 1e-12 * (box_.hi1 + std::abs(box_.lo2) + std::abs(box_.hi2)));
      if (poly.size() < 3) continue;
      Point2 centroid{0.0, 0.0};
      for (const auto& v : poly) {
        centroid.x += v.x / static_cast<double>(poly.size());
        centroid.y += v.y / static_cast<double>(poly.size());
      }
      const Point2 cand = minimize_on_polygon(region_quadratic(centroid), poly);
      if (!box_.contains(cand)) continue;
      const double fv = f_(cand.x, cand.y);
      if (fv < best_f) {
        best_f = fv;
        best = cand;
        best_key = std::move(key);
      }
    }
    if (!best) return false;
    visited_.insert(std::move(best_key));
    cur = *best;
    fc = best_f;
    return true;
  }

  // Exact 1-D minimisation along every ray leaving `cur`: F is quadratic
  // between consecutive line crossings, so three samples per piece pin it.
  bool ray_step(Point2& cur, double& fc) {
    const double tol = noise(cur, fc);
    std::optional<Point2> best;
    double best_dist = 0.0;
    for (double angle : dirs_) {
      const Point2 d{std::cos(angle), std::sin(angle)};
      double s_max = std::numeric_limits<double>::infinity();
      if (d.x > 1e-15) s_max = std::min(s_max, (box_.hi1 - cur.x) / d.x);
      if (d.x < -1e-15) s_max = std::min(s_max, cur.x / -d.x);
      if (d.y > 1e-15) s_max = std::min(s_max, (box_.hi2 - cur.y) / d.y);
      if (d.y < -1e-15) s_max = std::min(s_max, (cur.y - box_.lo2) / -d.y);
      if (!(s_max > kProbeEps * scale(cur))) continue;

      std::vector<double> cuts{0.0, s_max};
      for (const auto& line : geo_.lines) {
        const double rate = d.y - line.slope * d.x;
        if (std::abs(rate) < 1e-14) continue;
        const double s = -line.offset(cur.x, cur.y) / rate;
        if (s > 0.0 && s < s_max) cuts.push_back(s);
      }
      std::sort(cuts.begin(), cuts.end());
      auto at = [&](double s) { return f_(cur.x + s * d.x, cur.y + s * d.y); };
      double ray_best_s = 0.0;
      double ray_best_f = fc;
      double f_lo = fc;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double s0 = cuts[k];
        const double s1 = cuts[k + 1];
        if (s1 - s0 <= 0.0) continue;
        const double f_hi = at(s1);
        const double f_mid = at(0.5 * (s0 + s1));
        // phi(u) on u in [0, 1]: f_lo + (4 f_mid - 3 f_lo - f_hi) u + 2 (f_lo + f_hi - 2 f_mid) u^2.
        const double qa = 2.0 * (f_lo + f_hi - 2.0 * f_mid);
        const double qb = 4.0 * f_mid - 3.0 * f_lo - f_hi;
        double u = f_hi < f_lo ? 1.0 : 0.0;
        if (qa > 0.0) u = std::clamp(-qb / (2.0 * qa), 0.0, 1.0);
        const double s = s0 + u * (s1 - s0);
        const double fv = u == 1.0 ? f_hi : (u == 0.0 ? f_lo : at(s));
        if (fv < ray_best_f) {
          ray_best_f = fv;
          ray_best_s = s;
        }
        f_lo = f_hi;
      }
      if (ray_best_f < fc - tol && (!best || ray_best_s < best_dist)) {
        best = Point2{cur.x + ray_best_s * d.x, cur.y + ray_best_s * d.y};
        best_dist = ray_best_s;
      }
    }
    if (!best) return false;
    const Point2 next{std::max(best->x, 0.0), best->y};
    const double fn = f_(next.x, next.y);
    if (!(fn < fc - tol)) return false;
    cur = next;
    fc = fn;
    return true;
  }

  const FEvaluator& f_;
  const PlaneGeometry& geo_;
  Box box_;
  const ValidatedInstance& inst_;
  std::vector<double> dirs_;
  std::set<std::vector<int8_t>> visited_;
  int regions_ = 0;
  int rays_ = 0;
};

Box initial_box(const ValidatedInstance& inst, const PlaneGeometry& geo, double xi, double q) {
  const double ct = inst.costs().c_tilde();
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  for (const auto& line : geo.lines) {
    beta_lo = std::min(beta_lo, line.intercept);
    beta_hi = std::max(beta_hi, line.intercept);
  }
  Box box;
  box.hi1 = 16.0 * (1.0 + xi + ct);
  const double pad = 16.0 * (1.0 + ct + xi * (1.0 + q));
  box.lo2 = beta_lo - pad;
  box.hi2 = 2.0 * inst.max_sample() * box.hi1 + beta_hi + pad;
  return box;
}

Box expand(const Box& box, const ValidatedInstance& inst, const PlaneGeometry& geo) {
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  for (const auto& line : geo.lines) {
    beta_lo = std::min(beta_lo, line.intercept);
    beta_hi = std::max(beta_hi, line.intercept);
  }
  Box out;
  out.hi1 = 2.0 * box.hi1;
  out.lo2 = beta_lo - 2.0 * (beta_lo - box.lo2);
  out.hi2 = 2.0 * inst.max_sample() * out.hi1 + beta_hi +
            2.0 * (box.hi2 - 2.0 * inst.max_sample() * box.hi1 - beta_hi);
  return out;
}

std::size_t arrangement_bound(std::size_t lines) {
  const std::size_t m = lines + 4;  // axis and three box edges
  return 1 + m + m * (m - 1) / 2 + 2 * m * m;
}

}  // namespace

DdResult dd_minimize(const ValidatedInstance& inst, double xi, double q, const DdOptions& opts) {
  const PlaneGeometry geo = build_geometry(inst, xi, q);
  const FEvaluator f(inst, xi, q);
  const std::size_t n = inst.size();
  const std::size_t max_steps = opts.max_steps ? opts.max_steps : 10 * (n * n + n);

  DdResult res;
  res.region_bound = arrangement_bound(geo.lines.size());
  Box box = initial_box(inst, geo, xi, q);

  std::vector<Point2> start;
  for (const auto& v : geo.vertices) {
    if (box.contains(v)) start.push_back(v);
  }
  if (start.empty()) start.push_back({0.0, std::clamp(0.0, box.lo2, box.hi2)});
  const ArgMin am = argmin_points(f, start, opts.exec);
  Point2 cur = start[am.index];
  double fc = am.value;
  if (opts.record_path) {
    res.path.push_back(cur);
    res.path_values.push_back(fc);
  }

  Descent descent(f, geo, box);
  for (int expansion = 0;; ++expansion) {
    std::size_t steps = 0;
    while (descent.step(cur, fc)) {
      ++res.steps;
      if (opts.record_path) {
        res.path.push_back(cur);
        res.path_values.push_back(fc);
      }
      if (++steps > max_steps) {
        throw Error(ErrorKind::IterationBudgetExceeded,
                    "directional descent exceeded " + std::to_string(max_steps) + " steps");
      }
    }
    if (!descent.on_outer_boundary(cur)) break;
    if (expansion == kMaxBoxExpansions) {
      throw Error(ErrorKind::Infeasible,
                  "dual objective unbounded below at xi = " + std::to_string(xi) +
                      ": the moment targets are unreachable within the Wasserstein ball");
    }
    descent.set_box(expand(descent.box(), inst, geo));
    ++res.box_expansions;
  }

  res.lambda1_star = cur.x;
  res.lambda2_star = cur.y;
  res.visited_regions = descent.regions_entered();
  res.visited_rays = descent.rays_taken();
  res.f_value = *eval_F(res.dual(xi), q, inst);
  return res;
}

bool dd_is_stationary(const ValidatedInstance& inst, double xi, double q, Point2 at) {
  const PlaneGeometry geo = build_geometry(inst, xi, q);
  const FEvaluator f(inst, xi, q);
  Box box = initial_box(inst, geo, xi, q);
  while (!box.contains(at) || Descent(f, geo, box).on_outer_boundary(at)) box = expand(box, inst, geo);
  Descent descent(f, geo, box);
  double fc = f(at.x, at.y);
  return !descent.step(at, fc);
}

std::string geometry_json(const PlaneGeometry& geo, const DdResult* result) {
  nlohmann::json j;
  j["case"] = to_string(geo.cls.id);
  j["intercepts"] = {{"beta1", geo.cls.beta.beta1},
                     {"beta2", geo.cls.beta.beta2},
                     {"beta3", geo.cls.beta.beta3},
                     {"beta4", geo.cls.beta.beta4}};
  auto& lines = j["lines"] = nlohmann::json::array();
  for (const auto& l : geo.lines) {
    lines.push_back({{"sample", l.sample},
                     {"intercept_index", l.intercept_index},
                     {"slope", l.slope},
                     {"intercept", l.intercept}});
  }
  auto& vertices = j["vertices"] = nlohmann::json::array();
  for (const auto& v : geo.vertices) vertices.push_back({v.x, v.y});
  if (result) {
    auto& path = j["path"] = nlohmann::json::array();
    for (std::size_t k = 0; k < result->path.size(); ++k) {
      path.push_back({result->path[k].x, result->path[k].y, result->path_values[k]});
    }
    j["minimum"] = {{"lambda1", result->lambda1_star},
                    {"lambda2", result->lambda2_star},
                    {"f", result->f_value}};
  }
  return j.dump(2);
}

}  // namespace drnv
