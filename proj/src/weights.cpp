#include "weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mslab {

namespace {

constexpr int kScanRadii = 64;

struct CubeSums {
  double sum = 0.0;
  double power_sum = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

}  // namespace

Weight::Weight(RealField field, double floor) : field_(std::move(field)), floor_(floor) {
  require(floor >= 0.0, "weight floor must be nonnegative");
  bool any_positive = false;
  for (double& v : field_.raw()) {
    if (floor_ > 0.0) v = std::max(v, floor_);
    require(v >= 0.0 && std::isfinite(v), "weight must be nonnegative and finite");
    any_positive = any_positive || v > 0.0;
  }
  require(any_positive, "weight is identically zero");
}

RHReport rh_constant(const Weight& w, double q, const std::vector<Cube>& cubes) {
  require(q > 1.0, "reverse Hoelder exponent must exceed 1");
  const RealField& f = w.field();
  const GridSpec& g = f.grid();
  const bool sup = std::isinf(q);
  RealField powered(g);
  if (!sup)
    for (std::size_t i = 0; i < f.size(); ++i) powered[i] = std::pow(f[i], q);

  RHReport report;
  report.q = q;
  report.constant = 0.0;
  report.family_size = cubes.size();
  for (const Cube& cube : cubes) {
    const IndexBox box = cube.clip(g);
    if (box.empty()) continue;
    CubeSums s;
    box.for_each(g, [&](std::size_t idx) {
      s.sum += f[idx];
      s.max = std::max(s.max, f[idx]);
      if (!sup) s.power_sum += powered[idx];
      ++s.count;
    });
    const double avg = s.sum / s.count;
    if (!(avg > 0.0)) throw Error(ErrorCode::kDegenerate, "weight vanishes on cube");
    const double lhs = sup ? s.max : std::pow(s.power_sum / s.count, 1.0 / q);
    const double ratio = lhs / avg;
    if (ratio > report.constant) {
      report.constant = ratio;
      report.worst_cube = cube;
    }
  }
  return report;
}

double doubling_constant(const Weight& w, const std::vector<Cube>& cubes) {
  const RealField& f = w.field();
  const GridSpec& g = f.grid();
  auto integral = [&](const Cube& q) {
    double acc = 0.0;
    q.clip(g).for_each(g, [&](std::size_t idx) { acc += f[idx]; });
    return acc;
  };
  double worst = 0.0;
  for (const Cube& q : cubes) {
    if (q.clip(g).empty()) continue;
    const double inner = integral(q);
    if (!(inner > 0.0)) throw Error(ErrorCode::kDegenerate, "weight vanishes on cube");
    worst = std::max(worst, integral(q.dilate(2.0)) / inner);
  }
  return worst;
}

AuxEvaluator::AuxEvaluator(const Weight& w, double rel_tol)
    : weight_(w), sums_(w.field()), rel_tol_(rel_tol) {}

double AuxEvaluator::nearest_value(const Point& x) const {
  const GridSpec& g = weight_.grid();
  Index ix{0, 0, 0};
  for (int a = 0; a < g.n; ++a)
    ix[a] = std::clamp(static_cast<int>(std::floor(x[a] / g.h())), 0, g.N - 1);
  return weight_.field()[g.ravel(ix)];
}

std::optional<double> AuxEvaluator::critical_ratio(const Point& x, double r) const {
  const IndexBox box = Cube{x, r}.clip(weight_.grid());
  const std::size_t count = box.count(weight_.grid().n);
  if (count == 0) return std::nullopt;
  return r * r * sums_.sum(box) / static_cast<double>(count);
}

AuxValue AuxEvaluator::at(const Point& x) const {
  const GridSpec& g = weight_.grid();
  const double r_min = g.h();
  const double r_max = g.L;
  auto admissible = [&](double r) {
    const auto ratio = critical_ratio(x, r);
    const double value = ratio ? *ratio : r * r * nearest_value(x);
    return value <= 1.0;
  };
  auto radius = [&](int i) {
    return r_min * std::pow(r_max / r_min, static_cast<double>(i) / (kScanRadii - 1));
  };

  int last = -1;
  for (int i = 0; i < kScanRadii; ++i)
    if (admissible(radius(i))) last = i;

  if (last < 0) {
    // Below one cell the cube holds only the nearest grid point.
    return AuxValue{std::sqrt(nearest_value(x)), AuxFlag::kSubCell};
  }
  if (last == kScanRadii - 1) return AuxValue{1.0 / r_max, AuxFlag::kClampedLarge};

  double lo = radius(last);
  double hi = radius(last + 1);
  while (hi - lo > rel_tol_ * lo) {
    const double mid = 0.5 * (lo + hi);
    if (admissible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return AuxValue{1.0 / lo, AuxFlag::kInterior};
}

AuxField AuxEvaluator::field() const {
  const GridSpec& g = weight_.grid();
  AuxField out;
  out.values = RealField(g);
  out.flags.resize(g.size());
  out.r_max = g.L;
  out.tolerance = rel_tol_;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const AuxValue v = at(g.position(i));
    out.values[i] = v.m;
    out.flags[i] = v.flag;
  }
  return out;
}

AuxValue aux_m(const Weight& w, const Point& x) { return AuxEvaluator(w).at(x); }
AuxField aux_field(const Weight& w) { return AuxEvaluator(w).field(); }

MPropertiesReport check_m_properties(const Weight& w, const std::vector<PointPair>& pairs,
                                     double near_radius) {
  const AuxEvaluator eval(w);
  MPropertiesReport report;
  report.pairs = pairs.size();

  struct Sample {
    double t;  // log(1 + |x-y| m(x))
    double r;  // log(m(y)/m(x))
    bool near;
  };
  std::vector<Sample> samples;
  samples.reserve(pairs.size());
  for (const auto& [x, y] : pairs) {
    const double mx = eval.at(x).m;
    const double my = eval.at(y).m;
    double d2 = 0.0;
    for (int a = 0; a < w.grid().n; ++a) d2 += (x[a] - y[a]) * (x[a] - y[a]);
    const double d = std::sqrt(d2);
    samples.push_back({std::log1p(d * mx), std::log(my / mx), d < near_radius / mx});
  }

  double log_comp = 0.0;
  double num = 0.0, den = 0.0;
  for (const Sample& s : samples) {
    if (s.near) {
      ++report.near_pairs;
      log_comp = std::max(log_comp, std::abs(s.r));
    }
    if (s.r > 0.0) {
      num += s.r * s.t;
      den += s.t * s.t;
    }
  }
  report.comparability = std::exp(log_comp);
  report.k0 = den > 0.0 ? num / den : 0.0;

  double log_upper = -std::numeric_limits<double>::infinity();
  double log_lower = std::numeric_limits<double>::infinity();
  const double lower_exp = report.k0 / (report.k0 + 1.0);
  for (const Sample& s : samples) {
    log_upper = std::max(log_upper, s.r - report.k0 * s.t);
    log_lower = std::min(log_lower, s.r + lower_exp * s.t);
  }
  if (!samples.empty()) {
    report.upper_constant = std::exp(log_upper);
    report.lower_constant = std::exp(log_lower);
  }
  return report;
}

std::vector<PointPair> sample_pairs(const Weight& w, std::size_t count, std::uint64_t seed) {
  const GridSpec& g = w.grid();
  const AuxEvaluator eval(w);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double lo = 0.5 * g.h();
  const double hi = g.L - 0.5 * g.h();

  std::vector<PointPair> pairs;
  pairs.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < g.n; ++a) x[a] = lo + (hi - lo) * unit(rng);
    const double mx = eval.at(x).m;
    const double dist = std::exp(std::log(0.05) + unit(rng) * std::log(100.0)) / mx;
    Point dir{0.0, 0.0, 0.0};
    double norm = 0.0;
    for (int a = 0; a < g.n; ++a) {
      dir[a] = normal(rng);
      norm += dir[a] * dir[a];
    }
    norm = std::sqrt(norm);
    Point y{0.0, 0.0, 0.0};
    for (int a = 0; a < g.n; ++a) y[a] = std::clamp(x[a] + dist * dir[a] / norm, lo, hi);
    pairs.emplace_back(x, y);
  }
  return pairs;
}

}  // namespace mslab
