#include "hippa/quasar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hippa {

void validate_certificate(const QuasarCertificate& cert) {
  if (!(cert.kappa > 0.0 && cert.kappa <= 1.0))
    fail(ErrorCode::InvalidCertificate, "kappa must lie in (0,1]");
  if (!(cert.gamma >= 0.0) || !std::isfinite(cert.gamma))
    fail(ErrorCode::InvalidCertificate, "gamma must be finite and nonnegative");
  if (cert.center.size() == 0) fail(ErrorCode::InvalidCertificate, "certificate has no center");
  require_finite(cert.center, "certificate center");
}

const char* property_name(Property p) {
  switch (p) {
    case Property::Definition: return "definition";
    case Property::FirstOrder: return "first_order";
    case Property::QuadraticGrowth: return "quadratic_growth";
    case Property::Pl: return "pl";
    case Property::ErrorBoundValue: return "error_bound_value";
    case Property::ErrorBoundSubgrad: return "error_bound_subgrad";
  }
  return "unknown";
}

Property parse_property(const std::string& name) {
  for (Property p : {Property::Definition, Property::FirstOrder, Property::QuadraticGrowth, Property::Pl,
                     Property::ErrorBoundValue, Property::ErrorBoundSubgrad}) {
    if (name == property_name(p)) return p;
  }
  fail(ErrorCode::BadParameter, "unknown property '" + name + "'");
}

namespace {

Vector random_direction(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> gauss;
  Vector d(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) d[i] = gauss(rng);
  } while (d.norm() == 0.0);
  return d / d.norm();
}

Vector draw_in_ball(std::mt19937_64& rng, const Vector& center, double radius, bool log_radius) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto n = center.size();
  double r = log_radius ? radius * std::pow(10.0, -6.0 * unif(rng))
                        : radius * std::pow(unif(rng), 1.0 / static_cast<double>(n));
  return center + r * random_direction(rng, n);
}

}  // namespace

std::vector<Vector> sample_region(const QuasarCertificate& cert, const SamplerConfig& sampler) {
  std::mt19937_64 rng = SeedStream{sampler.seed, 0}.engine();
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(sampler.samples));
  if (sampler.box) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto& [lo, hi] = *sampler.box;
    while (static_cast<int>(pts.size()) < sampler.samples) {
      Vector x(lo.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unif(rng);
      if (region_contains(cert.region, x)) pts.push_back(x);
    }
    return pts;
  }
  Vector c = cert.center;
  double radius = sampler.radius;
  if (const auto* b = std::get_if<RegionBall>(&cert.region)) {
    c = b->center;
    radius = b->radius;
  } else if (const auto* bi = std::get_if<RegionBallIntersection>(&cert.region)) {
    c = bi->first.center;
    radius = bi->first.radius;
  }
  // Log-uniform draws are taken around the certificate center, where small-radius violations live.
  int attempts = 0;
  while (static_cast<int>(pts.size()) < sampler.samples) {
    bool log_radius = (pts.size() % 2) == 1;
    Vector x = log_radius ? draw_in_ball(rng, cert.center, radius, true) : draw_in_ball(rng, c, radius, false);
    if (region_contains(cert.region, x)) pts.push_back(x);
    if (++attempts > 1000 * std::max(1, sampler.samples))
      fail(ErrorCode::EmptyRegion, "sampler cannot find points inside the region");
  }
  return pts;
}

double definition_residual(const ObjectiveOracle& oracle, const QuasarCertificate& cert, const Vector& x,
                           double lambda) {
  const double k = cert.kappa;
  const Vector& xbar = cert.center;
  double hx = oracle.value_fn(x);
  double hbar = oracle.value_fn(xbar);
  double lhs = oracle.value_fn(lambda * xbar + (1.0 - lambda) * x);
  double rhs = k * lambda * hbar + (1.0 - k * lambda) * hx -
               lambda * (1.0 - lambda / (2.0 - k)) * (k * cert.gamma / 2.0) * (x - xbar).squaredNorm();
  return lhs - rhs;
}

double first_order_residual(const ObjectiveOracle& oracle, const QuasarCertificate& cert, const Vector& x) {
  const Vector v = subgradient_select(oracle, x);
  const Vector diff = x - cert.center;
  return oracle.value_fn(x) - oracle.value_fn(cert.center) - v.dot(diff) / cert.kappa +
         0.5 * cert.gamma * diff.squaredNorm();
}

double witness_residual(const ObjectiveOracle& oracle, const QuasarCertificate& cert, const Witness& w) {
  switch (w.property) {
    case Property::Definition: return definition_residual(oracle, cert, w.x, w.lambda);
    case Property::FirstOrder: return first_order_residual(oracle, cert, w.x);
    default: fail(ErrorCode::BadParameter, "stored witnesses cover the definition and first-order inequalities only");
  }
}

CheckReport verify_certificate(const ObjectiveOracle& oracle, const QuasarCertificate& cert, Property property,
                               const SamplerConfig& sampler) {
  validate_certificate(cert);
  const bool needs_growth = property == Property::QuadraticGrowth || property == Property::Pl ||
                            property == Property::ErrorBoundValue || property == Property::ErrorBoundSubgrad;
  if (needs_growth && !(cert.gamma > 0.0))
    fail(ErrorCode::GammaZeroForGrowth, std::string(property_name(property)) + " requires gamma > 0");
  const bool needs_subgrad =
      property == Property::FirstOrder || property == Property::Pl || property == Property::ErrorBoundSubgrad;
  if (needs_subgrad && !oracle.has_subgradient())
    fail(ErrorCode::MissingSubgradient, std::string(property_name(property)) + " needs a subgradient selection");
  if (property == Property::Definition && sampler.lambda_grid < 33)
    fail(ErrorCode::BadParameter, "definition check needs a lambda grid of at least 33 points");

  const double k = cert.kappa;
  const double g = cert.gamma;
  const Vector& xbar = cert.center;
  const double hstar = oracle.value_fn(xbar);

  CheckReport report;
  report.property = property;
  report.tolerance = sampler.tolerance;
  report.worst_violation = -std::numeric_limits<double>::infinity();

  auto consider = [&](double residual, const Vector& x, double lambda) {
    if (residual > report.worst_violation) {
      report.worst_violation = residual;
      if (residual > sampler.tolerance) report.witness = Witness{x, lambda, property};
    }
  };

  for (const Vector& x : sample_region(cert, sampler)) {
    ++report.samples_tested;
    const double dist = (x - xbar).norm();
    switch (property) {
      case Property::Definition: {
        const int m = sampler.lambda_grid;
        for (int j = 0; j < m; ++j) {
          double lambda = static_cast<double>(j) / (m - 1);
          consider(definition_residual(oracle, cert, x, lambda), x, lambda);
        }
        break;
      }
      case Property::FirstOrder:
        consider(first_order_residual(oracle, cert, x), x, 0.0);
        break;
      case Property::QuadraticGrowth:
        consider(k * g / (2.0 * (2.0 - k)) * dist * dist - (oracle.value_fn(x) - hstar), x, 0.0);
        break;
      case Property::Pl: {
        Vector v = oracle.subgrad_fn(x);
        consider(g * k * k * (oracle.value_fn(x) - hstar) - 0.5 * v.squaredNorm(), x, 0.0);
        break;
      }
      case Property::ErrorBoundValue: {
        double gap = std::max(0.0, oracle.value_fn(x) - hstar);
        consider(dist - std::sqrt(2.0 * (2.0 - k) / (k * g)) * std::sqrt(gap), x, 0.0);
        break;
      }
      case Property::ErrorBoundSubgrad: {
        Vector v = oracle.subgrad_fn(x);
        consider(dist - 2.0 / (k * g) * v.norm(), x, 0.0);
        break;
      }
    }
  }
  return report;
}

CheckReport check_directional_decrease(const ObjectiveOracle& oracle, const QuasarCertificate& cert,
                                       const SamplerConfig& sampler) {
  validate_certificate(cert);
  const Vector& xbar = cert.center;
  const double hstar = oracle.value_fn(xbar);
  CheckReport report;
  report.tolerance = sampler.tolerance;
  report.worst_violation = -std::numeric_limits<double>::infinity();
  for (const Vector& x : sample_region(cert, sampler)) {
    ++report.samples_tested;
    const double hx = oracle.value_fn(x);
    const Vector d = xbar - x;
    for (double t : {1e-3, 1e-4, 1e-5, 1e-6}) {
      double r = oracle.value_fn(x + t * d) - (hx - cert.kappa * t * (hx - hstar));
      if (r > report.worst_violation) {
        report.worst_violation = r;
        if (r > sampler.tolerance) report.witness = Witness{x, t, Property::Definition};
      }
    }
  }
  return report;
}

QuasarCertificate parameter_transform(const QuasarCertificate& cert, const Transform& t) {
  validate_certificate(cert);
  QuasarCertificate out = cert;
  switch (t.kind) {
    case TransformKind::Scale:
      if (!(t.amount > 0.0)) fail(ErrorCode::BadParameter, "scale factor must be positive");
      out.gamma = t.amount * cert.gamma;
      break;
    case TransformKind::Translate: {
      if (t.shift.size() != cert.center.size()) fail(ErrorCode::BadParameter, "shift dimension mismatch");
      out.center = cert.center - t.shift;
      if (auto* b = std::get_if<RegionBall>(&out.region)) b->center -= t.shift;
      if (auto* bi = std::get_if<RegionBallIntersection>(&out.region)) {
        bi->first.center -= t.shift;
        bi->second.center -= t.shift;
      }
      break;
    }
    case TransformKind::ReduceKappa:
      if (!(t.amount > 0.0 && t.amount <= 1.0)) fail(ErrorCode::BadParameter, "theta must lie in (0,1]");
      out.kappa = t.amount * cert.kappa;
      out.gamma = cert.gamma / t.amount;
      break;
  }
  return out;
}

namespace {

bool same_region(const RegionDescriptor& a, const RegionDescriptor& b) {
  if (a.index() != b.index()) return false;
  auto ball_eq = [](const RegionBall& x, const RegionBall& y) {
    return x.center.size() == y.center.size() && (x.center - y.center).norm() <= 1e-12 &&
           std::abs(x.radius - y.radius) <= 1e-12;
  };
  if (const auto* x = std::get_if<RegionBall>(&a)) return ball_eq(*x, std::get<RegionBall>(b));
  if (const auto* x = std::get_if<RegionBallIntersection>(&a)) {
    const auto& y = std::get<RegionBallIntersection>(b);
    return ball_eq(x->first, y.first) && ball_eq(x->second, y.second);
  }
  return true;
}

}  // namespace

QuasarCertificate sum_certificates(const std::vector<std::pair<double, QuasarCertificate>>& terms) {
  if (terms.empty()) fail(ErrorCode::BadParameter, "empty sum");
  const QuasarCertificate& first = terms.front().second;
  double kappa = 1.0;
  for (const auto& [alpha, c] : terms) {
    validate_certificate(c);
    if (!(alpha > 0.0)) fail(ErrorCode::BadParameter, "sum weights must be positive");
    if (c.center.size() != first.center.size() || (c.center - first.center).norm() > 1e-12)
      fail(ErrorCode::CenterMismatch, "summands certify different centers");
    kappa = std::min(kappa, c.kappa);
  }
  RegionDescriptor region = RegionWhole{};
  for (const auto& [alpha, c] : terms) {
    if (std::holds_alternative<RegionWhole>(c.region)) continue;
    if (std::holds_alternative<RegionWhole>(region)) region = c.region;
    else if (!same_region(region, c.region))
      fail(ErrorCode::BadParameter, "summands certify different regions");
  }
  double weighted = 0.0;
  for (const auto& [alpha, c] : terms) weighted += alpha * c.kappa * c.gamma;
  return {kappa, weighted / kappa, first.center, region};
}

QuasarCertificate compose_linear(const QuasarCertificate& cert, const Matrix& A) {
  validate_certificate(cert);
  if (A.rows() != cert.center.size()) fail(ErrorCode::BadParameter, "matrix rows must match the center dimension");
  if (!std::holds_alternative<RegionWhole>(cert.region))
    fail(ErrorCode::BadParameter, "linear composition is supported for whole-space certificates only");
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (A.cols() > A.rows() || s.size() < A.cols() || s.minCoeff() <= 1e-12 * std::max(1.0, s.maxCoeff()))
    fail(ErrorCode::RankDeficient, "matrix lacks full column rank");
  Vector xg = svd.solve(cert.center);
  if ((A * xg - cert.center).norm() > 1e-8)
    fail(ErrorCode::RangeViolation, "center is not in the range of the matrix");
  double smin = s.minCoeff();
  return {cert.kappa, cert.gamma * smin * smin, xg, RegionWhole{}};
}

QuasarCertificate compose_monotone(const QuasarCertificate& cert, double kappa2, double slope_lower) {
  validate_certificate(cert);
  if (!(cert.kappa < 1.0)) fail(ErrorCode::BadParameter, "inner kappa must be < 1; apply reduce_kappa first");
  if (!(kappa2 > 0.0 && kappa2 <= 1.0)) fail(ErrorCode::BadParameter, "outer kappa must lie in (0,1]");
  if (!(slope_lower >= 0.0)) fail(ErrorCode::BadParameter, "slope lower bound must be nonnegative");
  double c = aux_constant_C(cert.kappa, kappa2);
  return {cert.kappa * kappa2, c * slope_lower * cert.gamma / kappa2, cert.center, cert.region};
}

double aux_constant_C(double k1, double k2) {
  if (!(k1 > 0.0 && k1 < 1.0) || !(k2 > 0.0 && k2 <= 1.0))
    fail(ErrorCode::BadParameter, "aux constant needs k1 in (0,1) and k2 in (0,1]");
  return (1.0 - k1) * (2.0 - k1 * k2) / ((2.0 - k1) * (1.0 - k1 * k2));
}

namespace {

double threshold_equation(double t) {
  const double s3 = std::sqrt(3.0);
  return t * (t - 1.0) / 2.0 - 1.0 + std::pow(1.0 + (2.0 - s3) * t / (t - 1.0), 1.0 - t);
}

double compute_threshold() {
  double lo = 1.0001, hi = 2.0;
  double flo = threshold_equation(lo);
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    double fm = threshold_equation(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double kappa_p_threshold() {
  static const double t_hat = compute_threshold();
  return t_hat;
}

double kappa_p(double t) {
  if (!(t > 1.0 && t < 2.0)) fail(ErrorCode::OutOfDomain, "kappa_p needs t in (1,2)");
  const double s3 = std::sqrt(3.0);
  if (t <= kappa_p_threshold()) return (2.0 + s3) * (t - 1.0) / 16.0;
  return (2.0 + s3) / 16.0 * (1.0 - std::pow(3.0 - s3, 1.0 - t));
}

double sigma_hat(double q) {
  if (!(q > 2.0)) fail(ErrorCode::OutOfDomain, "sigma_hat needs q > 2");
  return std::pow(0.5, (3.0 * q - 2.0) / 2.0);
}

}  // namespace hippa
