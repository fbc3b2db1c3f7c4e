#include "riesz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mslab {

namespace {

double density_norm(const RealField& density_sq, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double d : density_sq.values()) m = std::max(m, d);
    return std::sqrt(m);
  }
  double acc = 0.0;
  for (double d : density_sq.values()) acc += std::pow(d, 0.5 * p);
  return std::pow(acc * density_sq.grid().cell_volume(), 1.0 / p);
}

ComplexField multiply(const RealField& w, const ComplexField& f, double power = 1.0) {
  ComplexField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i)
    out[i] = (power == 1.0 ? w[i] : std::pow(w[i], power)) * f[i];
  return out;
}

const RealField& require_aux(const std::optional<RealField>& aux) {
  if (!aux) throw Error(ErrorCode::kInvalidArgument, "m(., |B|) is undefined for a vanishing field");
  return *aux;
}

std::optional<double> spectral_power(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::kRieszComponent:
    case OperatorKind::kRieszVector:
    case OperatorKind::kAuxHalf:
    case OperatorKind::kPotentialHalf:
      return -0.5;
    case OperatorKind::kAuxInverse:
    case OperatorKind::kPotentialInverse:
    case OperatorKind::kFreeRatio:
    case OperatorKind::kSecondOrder:
      return -1.0;
    default:
      return std::nullopt;
  }
}

}  // namespace

std::string OperatorSpec::id() const {
  switch (kind) {
    case OperatorKind::kIdentity: return "I";
    case OperatorKind::kZero: return "0";
    case OperatorKind::kRieszComponent: return "L" + std::to_string(j + 1) + "H^-1/2";
    case OperatorKind::kRieszVector: return "LH^-1/2";
    case OperatorKind::kAuxHalf: return "mH^-1/2";
    case OperatorKind::kAuxInverse: return "m2H^-1";
    case OperatorKind::kPotentialInverse: return "VH^-1";
    case OperatorKind::kFreeRatio: return "H0H^-1";
    case OperatorKind::kSecondOrder:
      return "L" + std::to_string(j + 1) + "L" + std::to_string(k + 1) + "H^-1";
    case OperatorKind::kPotentialHalf: return "V1/2H^-1/2";
  }
  return "?";
}

OperatorSpec OperatorSpec::parse(const std::string& text) {
  static const std::pair<const char*, OperatorKind> fixed[] = {
      {"I", OperatorKind::kIdentity},          {"0", OperatorKind::kZero},
      {"LH^-1/2", OperatorKind::kRieszVector}, {"mH^-1/2", OperatorKind::kAuxHalf},
      {"m2H^-1", OperatorKind::kAuxInverse},   {"VH^-1", OperatorKind::kPotentialInverse},
      {"H0H^-1", OperatorKind::kFreeRatio},    {"V1/2H^-1/2", OperatorKind::kPotentialHalf},
  };
  for (const auto& [name, kind] : fixed)
    if (text == name) return OperatorSpec{kind, 0, 0};
  auto digit = [&](std::size_t pos) {
    if (pos >= text.size() || text[pos] < '1' || text[pos] > '3')
      throw Error(ErrorCode::kParse, "unknown operator '" + text + "'");
    return text[pos] - '1';
  };
  if (text.size() == 8 && text[0] == 'L' && text.substr(2) == "H^-1/2")
    return OperatorSpec{OperatorKind::kRieszComponent, digit(1), 0};
  if (text.size() == 8 && text[0] == 'L' && text[2] == 'L' && text.substr(4) == "H^-1")
    return OperatorSpec{OperatorKind::kSecondOrder, digit(1), digit(3)};
  throw Error(ErrorCode::kParse, "unknown operator '" + text + "'");
}

RieszEngine::RieszEngine(const MagneticOperator& H, const SpectralDecomposition& dec,
                         std::optional<RealField> aux_m)
    : H_(H), dec_(dec), aux_m_(std::move(aux_m)) {
  require(dec.grid == H.grid(), "decomposition and operator differ");
}

EdgeField RieszEngine::riesz_apply(int j, const ComplexField& f) const {
  require(j >= 0 && j < H_.grid().n, "Riesz component out of range");
  return H_.covariant(j, power_apply(dec_, -0.5, f));
}

double RieszEngine::gradient_norm(const ComplexField& u, double p) const {
  return density_norm(H_.covariant_density(u), p);
}

std::vector<std::vector<double>> RieszEngine::output_norms(const OperatorSpec& T,
                                                           const std::vector<ComplexField>& probes,
                                                           const std::vector<double>& ps) const {
  const int n = H_.grid().n;
  if (T.kind == OperatorKind::kRieszComponent || T.kind == OperatorKind::kSecondOrder)
    require(T.j >= 0 && T.j < n && T.k >= 0 && T.k < n, "operator component out of range");
  std::vector<ComplexField> w;
  if (const auto s = spectral_power(T.kind)) w = power_apply(dec_, *s, probes);
  const RealField& V = H_.potential();

  std::vector<std::vector<double>> out(probes.size(), std::vector<double>(ps.size(), 0.0));
  for (std::size_t i = 0; i < probes.size(); ++i) {
    for (std::size_t c = 0; c < ps.size(); ++c) {
      const double p = ps[c];
      double value = 0.0;
      switch (T.kind) {
        case OperatorKind::kIdentity: value = lp_norm(probes[i], p); break;
        case OperatorKind::kZero: value = 0.0; break;
        case OperatorKind::kRieszComponent: value = H_.covariant(T.j, w[i]).lp_norm(p); break;
        case OperatorKind::kRieszVector: value = gradient_norm(w[i], p); break;
        case OperatorKind::kAuxHalf: value = lp_norm(multiply(require_aux(aux_m_), w[i]), p); break;
        case OperatorKind::kAuxInverse:
          value = lp_norm(multiply(require_aux(aux_m_), w[i], 2.0), p);
          break;
        case OperatorKind::kPotentialInverse: value = lp_norm(multiply(V, w[i]), p); break;
        case OperatorKind::kFreeRatio: {
          ComplexField r = probes[i];
          for (std::size_t x = 0; x < r.size(); ++x) r[x] -= V[x] * w[i][x];
          value = lp_norm(r, p);
          break;
        }
        case OperatorKind::kSecondOrder:
          value = H_.covariant(T.j, H_.covariant_centered(T.k, w[i])).lp_norm(p);
          break;
        case OperatorKind::kPotentialHalf: value = lp_norm(multiply(V, w[i], 0.5), p); break;
      }
      out[i][c] = value;
    }
  }
  return out;
}

std::vector<NormEstimate> norm_curve(const OperatorSpec& T, const std::vector<double>& ps,
                                     const ProbeFamily& probes, const RieszEngine& engine) {
  const std::vector<ComplexField> fields = probes.fields();
  const auto norms = engine.output_norms(T, fields, ps);
  std::vector<NormEstimate> out;
  for (std::size_t c = 0; c < ps.size(); ++c) {
    NormEstimate est;
    est.op = T.id();
    est.p = ps[c];
    est.N = engine.op().grid().N;
    est.seed = probes.seed;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const double fnorm = lp_norm(fields[i], ps[c]);
      if (fnorm == 0.0) continue;
      const double ratio = norms[i][c] / fnorm;
      if (ratio > est.lower_bound || est.probe_id.empty()) {
        est.lower_bound = std::max(est.lower_bound, ratio);
        est.probe_id = probes.members[i].id;
      }
    }
    out.push_back(est);
  }
  return out;
}

ReverseReport reverse_constant(double p, const ProbeFamily& probes, const RieszEngine& engine,
                               const RealField& abs_b) {
  const std::vector<ComplexField> fields = probes.fields();
  const std::vector<ComplexField> half = power_apply(engine.decomposition(), 0.5, fields);
  const RealField& V = engine.op().potential();
  ReverseReport rep;
  if (engine.aux()) rep.aux_constant = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const ComplexField& f = fields[i];
    const double grad = engine.gradient_norm(f, p);
    const double pot = lp_norm(multiply(V, f, 0.5), p);
    const double num = lp_norm(half[i], p);
    const double den = grad + lp_norm(multiply(abs_b, f, 0.5), p) + pot;
    if (den == 0.0) {
      ++rep.skipped;
      continue;
    }
    if (num / den > rep.constant) {
      rep.constant = num / den;
      rep.probe_id = probes.members[i].id;
    }
    if (engine.aux()) {
      const double den_m = grad + lp_norm(multiply(*engine.aux(), f), p) + pot;
      if (den_m > 0.0 && num / den_m > *rep.aux_constant) {
        rep.aux_constant = num / den_m;
        rep.aux_probe_id = probes.members[i].id;
      }
    }
  }
  return rep;
}

LocalCriterionReport local_criterion_check(CriterionOperator T, const std::vector<Cube>& cubes,
                                           double p0, double q0, const ProbeFamily& probes,
                                           const RieszEngine& engine) {
  require(p0 >= 1.0 && q0 >= 1.0, "criterion exponents must be at least 1");
  const MagneticOperator& H = engine.op();
  const GridSpec& g = H.grid();
  LocalCriterionReport rep;

  for (const Probe& probe : probes.members) {
    const ComplexField& f = probe.field;
    std::vector<const Cube*> admissible;
    for (const Cube& Q : cubes) {
      bool meets = false;
      Q.dilate(4.0).clip(g).for_each(g, [&](std::size_t idx) {
        if (f[idx] != complex(0.0)) meets = true;
      });
      if (meets) {
        ++rep.rejected;
      } else {
        admissible.push_back(&Q);
      }
    }
    if (admissible.empty()) {
      rep.diagnostics.push_back("probe " + probe.id + " meets 4Q for every cube");
      continue;
    }
    if (T == CriterionOperator::kZero) {
      rep.evaluated += admissible.size();
      continue;
    }

    const RealField& m = require_aux(engine.aux());
    const ComplexField w = power_apply(engine.decomposition(), -1.0, H.covariant_centered_adjoint(0, f));
    RealField Tf(g);
    for (int j = 0; j < g.n; ++j) {
      const ComplexField c = H.covariant_centered(j, w);
      for (std::size_t i = 0; i < g.size(); ++i) Tf[i] += std::norm(c[i]);
    }
    for (double& v : Tf.raw()) v = std::sqrt(v);
    RealField sq(g);
    for (std::size_t i = 0; i < g.size(); ++i) sq[i] = m[i] * m[i] * std::norm(w[i]);
    const RealField S = maximal_function(sq);

    for (const Cube* Q : admissible) {
      ++rep.evaluated;
      double lhs = 0.0, rhs_avg = 0.0;
      std::size_t count = 0, count2 = 0;
      Q->clip(g).for_each(g, [&](std::size_t idx) {
        lhs += std::pow(Tf[idx], q0);
        ++count;
      });
      Q->dilate(2.0).clip(g).for_each(g, [&](std::size_t idx) {
        rhs_avg += std::pow(Tf[idx], p0);
        ++count2;
      });
      Index ix{0, 0, 0};
      for (int a = 0; a < g.n; ++a)
        ix[a] = std::clamp(static_cast<int>(std::floor(Q->center[a] / g.h())), 0, g.N - 1);
      const double s_center = std::sqrt(S[g.ravel(ix)]);
      const double left = std::pow(lhs / count, 1.0 / q0);
      const double right = std::pow(rhs_avg / count2, 1.0 / p0) + s_center;
      if (left == 0.0) continue;
      const double ratio = right > 0.0 ? left / right : std::numeric_limits<double>::infinity();
      if (ratio > rep.constant) {
        rep.constant = ratio;
        rep.worst_cube = *Q;
        rep.worst_probe = probe.id;
      }
    }
  }
  return rep;
}

}  // namespace mslab
