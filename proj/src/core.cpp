#include "hippa/core.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hippa {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::MissingSubgradient: return "MissingSubgradient";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::MissingMinimizer: return "MissingMinimizer";
    case ErrorCode::InvalidCertificate: return "InvalidCertificate";
    case ErrorCode::GammaZeroForGrowth: return "GammaZeroForGrowth";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::CenterMismatch: return "CenterMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InnerBudgetExhausted: return "InnerBudgetExhausted";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::UnsupportedAtom: return "UnsupportedAtom";
    case ErrorCode::RankDeficientData: return "RankDeficientData";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::InsufficientTrace: return "InsufficientTrace";
    case ErrorCode::RadiusRequired: return "RadiusRequired";
    case ErrorCode::UnknownEntry: return "UnknownEntry";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

void require_finite(const Vector& x, const char* where) {
  if (!x.allFinite()) fail(ErrorCode::NonFiniteInput, std::string(where) + ": non-finite coordinate");
}

std::mt19937_64 SeedStream::engine() const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(offset), static_cast<std::uint32_t>(offset >> 32)};
  return std::mt19937_64(seq);
}

double ObjectiveOracle::value(const Vector& x) const {
  require_finite(x, "value");
  return value_fn(x);
}

Vector subgradient_select(const ObjectiveOracle& oracle, const Vector& x) {
  if (!oracle.subgrad_fn) fail(ErrorCode::MissingSubgradient, "oracle has no subgradient selection");
  require_finite(x, "subgradient_select");
  return oracle.subgrad_fn(x);
}

namespace {

// Carries minimizer metadata through a transformation whose minimizer is known.
void attach_minimizer(ObjectiveOracle& g, std::optional<Vector> xbar) {
  g.minimizer = std::move(xbar);
  if (g.minimizer) g.min_value = g.value_fn(*g.minimizer);
}

}  // namespace

ObjectiveOracle scale_oracle(const ObjectiveOracle& h, double alpha) {
  if (!(alpha > 0.0)) fail(ErrorCode::BadParameter, "scale factor must be positive");
  ObjectiveOracle g;
  g.dim = h.dim;
  auto hv = h.value_fn;
  g.value_fn = [hv, alpha](const Vector& x) { return alpha * hv(x); };
  if (h.subgrad_fn) {
    auto hs = h.subgrad_fn;
    g.subgrad_fn = [hs, alpha](const Vector& x) -> Vector { return alpha * hs(x); };
  }
  attach_minimizer(g, h.minimizer);
  return g;
}

ObjectiveOracle translate_oracle(const ObjectiveOracle& h, const Vector& z) {
  ObjectiveOracle g;
  g.dim = h.dim;
  auto hv = h.value_fn;
  g.value_fn = [hv, z](const Vector& y) { return hv(z + y); };
  if (h.subgrad_fn) {
    auto hs = h.subgrad_fn;
    g.subgrad_fn = [hs, z](const Vector& y) -> Vector { return hs(z + y); };
  }
  if (h.minimizer) attach_minimizer(g, Vector(*h.minimizer - z));
  return g;
}

ObjectiveOracle sum_oracles(const std::vector<std::pair<double, ObjectiveOracle>>& terms) {
  if (terms.empty()) fail(ErrorCode::BadParameter, "empty sum");
  ObjectiveOracle g;
  g.dim = terms.front().second.dim;
  bool all_subgrad = true;
  for (const auto& [a, h] : terms) {
    if (!(a > 0.0)) fail(ErrorCode::BadParameter, "sum weights must be positive");
    all_subgrad = all_subgrad && h.has_subgradient();
  }
  g.value_fn = [terms](const Vector& x) {
    double s = 0.0;
    for (const auto& [a, h] : terms) s += a * h.value_fn(x);
    return s;
  };
  if (all_subgrad) {
    g.subgrad_fn = [terms](const Vector& x) -> Vector {
      Vector s = Vector::Zero(x.size());
      for (const auto& [a, h] : terms) s += a * h.subgrad_fn(x);
      return s;
    };
  }
  attach_minimizer(g, terms.front().second.minimizer);
  return g;
}

ObjectiveOracle compose_linear_oracle(const ObjectiveOracle& h, const Matrix& A) {
  ObjectiveOracle g;
  g.dim = A.cols();
  auto hv = h.value_fn;
  g.value_fn = [hv, A](const Vector& x) { return hv(A * x); };
  if (h.subgrad_fn) {
    auto hs = h.subgrad_fn;
    g.subgrad_fn = [hs, A](const Vector& x) -> Vector { return A.transpose() * hs(A * x); };
  }
  if (h.minimizer) {
    Vector xg = A.colPivHouseholderQr().solve(*h.minimizer);
    attach_minimizer(g, xg);
  }
  return g;
}

ObjectiveOracle compose_monotone_oracle(const ObjectiveOracle& h, std::function<double(double)> phi,
                                        std::function<double(double)> dphi) {
  ObjectiveOracle g;
  g.dim = h.dim;
  auto hv = h.value_fn;
  g.value_fn = [hv, phi](const Vector& x) { return phi(hv(x)); };
  if (h.subgrad_fn && dphi) {
    auto hs = h.subgrad_fn;
    g.subgrad_fn = [hv, hs, dphi](const Vector& x) -> Vector { return dphi(hv(x)) * hs(x); };
  }
  attach_minimizer(g, h.minimizer);
  return g;
}

namespace {

struct AtomTotals {
  double inner = 0.0;
  Vector grad_inner;
};

// inner(y) = Σ weight·s_μ(‖r_i‖) + Σ w_j·m_μ(g_j), with s_μ, m_μ the smoothed norm and positive part.
AtomTotals atom_inner(const AtomDeclaration& atoms, const Vector& y, double mu, bool want_grad) {
  AtomTotals t;
  if (want_grad) t.grad_inner = Vector::Zero(y.size());
  for (const auto& block : atoms.norms) {
    Matrix r = block.residuals(y);
    Matrix g;
    if (want_grad) g.resize(r.rows(), r.cols());
    for (Eigen::Index i = 0; i < r.cols(); ++i) {
      double n = r.col(i).norm();
      if (mu > 0.0) {
        double s = std::sqrt(n * n + mu * mu);
        t.inner += block.weight * (s - mu);
        if (want_grad) g.col(i) = r.col(i) / s;
      } else {
        t.inner += block.weight * n;
        if (want_grad) {
          if (n > 0.0) g.col(i) = r.col(i) / n;
          else g.col(i).setZero();
        }
      }
    }
    if (want_grad) t.grad_inner += block.weight * block.adjoint(g);
  }
  for (const auto& pp : atoms.positive_parts) {
    double z = pp.fn(y);
    double slope;
    if (mu > 0.0) {
      double s = std::sqrt(z * z + mu * mu);
      t.inner += pp.weight * ((z + s) / 2.0 - mu / 2.0);
      slope = 0.5 * (1.0 + z / s);
    } else {
      t.inner += pp.weight * std::max(0.0, z);
      slope = z > 0.0 ? 1.0 : 0.0;
    }
    if (want_grad && slope != 0.0) t.grad_inner += pp.weight * slope * pp.grad(y);
  }
  return t;
}

// Outer power t ↦ t^q; smoothed as (t+μ)^q − μ^q when q < 1 so the composite stays differentiable at 0.
double outer_value(double t, double q, double mu) {
  if (q == 1.0) return t;
  if (mu > 0.0 && q < 1.0) return std::pow(t + mu, q) - std::pow(mu, q);
  return std::pow(t, q);
}

double outer_slope(double t, double q, double mu) {
  if (q == 1.0) return 1.0;
  if (mu > 0.0 && q < 1.0) return q * std::pow(t + mu, q - 1.0);
  if (t <= 0.0) return 0.0;
  return q * std::pow(t, q - 1.0);
}

}  // namespace

ObjectiveOracle make_atomic_oracle(std::shared_ptr<const AtomDeclaration> atoms, double mu) {
  if (!atoms) fail(ErrorCode::UnsupportedAtom, "no atom declaration");
  ObjectiveOracle g;
  g.dim = atoms->dim;
  g.atoms = atoms;
  g.value_fn = [atoms, mu](const Vector& y) {
    return outer_value(atom_inner(*atoms, y, mu, false).inner, atoms->outer_power, mu);
  };
  g.subgrad_fn = [atoms, mu](const Vector& y) -> Vector {
    AtomTotals t = atom_inner(*atoms, y, mu, true);
    return outer_slope(t.inner, atoms->outer_power, mu) * t.grad_inner;
  };
  return g;
}

bool region_contains(const RegionDescriptor& region, const Vector& x, double tol) {
  return region_violation(region, x) <= tol;
}

double region_violation(const RegionDescriptor& region, const Vector& x) {
  auto ball = [&](const RegionBall& b) { return std::max(0.0, (x - b.center).norm() - b.radius); };
  if (std::holds_alternative<RegionWhole>(region)) return 0.0;
  if (const auto* b = std::get_if<RegionBall>(&region)) return ball(*b);
  const auto& bi = std::get<RegionBallIntersection>(region);
  return std::max(ball(bi.first), ball(bi.second));
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::StepTol: return "step_tol";
    case Termination::RelErrTol: return "rel_err_tol";
    case Termination::MaxIters: return "max_iters";
  }
  return "unknown";
}

std::vector<DistanceRow> distance_metrics(const RunTrace& trace, const ObjectiveOracle& oracle) {
  if (!oracle.minimizer || !oracle.min_value)
    fail(ErrorCode::MissingMinimizer, "distance metrics need minimizer and minimal value");
  std::vector<DistanceRow> rows;
  rows.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    rows.push_back({r.k, (r.x - *oracle.minimizer).norm(), oracle.value(r.x) - *oracle.min_value});
  }
  return rows;
}

std::string digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hippa
