#include "hippa/functions.hpp"

#include "hippa/baselines.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace hippa {

namespace {

const double kPi = std::acos(-1.0);

double option(const ZooOptions& o, const std::string& key, double fallback) {
  auto it = o.find(key);
  return it == o.end() ? fallback : it->second;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

std::vector<std::string> zoo_ids() {
  return {"spiky", "dist_disk", "dist_cross", "star_flower", "relu_glm", "rmtr", "oscillatory"};
}

ZooEntry make_zoo_entry(const std::string& id, const ZooOptions& o) {
  if (id == "spiky") return make_spiky_norm();
  if (id == "dist_disk") return make_dist_power(DistShape::Disk, option(o, "alpha", 0.5));
  if (id == "dist_cross") return make_dist_power(DistShape::Cross, option(o, "alpha", 0.5));
  if (id == "star_flower") return make_star_flower();
  if (id == "relu_glm") {
    GlmConfig c;
    c.n = static_cast<int>(option(o, "n", c.n));
    c.c = option(o, "c", c.c);
    c.density_radius = option(o, "density_radius", c.density_radius);
    c.batch_eval = static_cast<int>(option(o, "batch_eval", c.batch_eval));
    c.batch_full = static_cast<int>(option(o, "batch_full", c.batch_full));
    c.batch_sgd = static_cast<int>(option(o, "batch_sgd", c.batch_sgd));
    c.seed = static_cast<std::uint64_t>(option(o, "seed", 0));
    return make_relu_glm(c);
  }
  if (id == "rmtr") {
    RmtrConfig c;
    c.d = static_cast<int>(option(o, "d", c.d));
    c.m = static_cast<int>(option(o, "m", c.m));
    c.N = static_cast<int>(option(o, "N", c.N));
    c.q = option(o, "q", c.q);
    if (o.count("kappa")) c.kappa = o.at("kappa");
    c.radius = option(o, "radius", c.radius);
    c.seed = static_cast<std::uint64_t>(option(o, "seed", 0));
    c.init_scale = option(o, "init_scale", c.init_scale);
    c.cx_starts = static_cast<int>(option(o, "cx_starts", c.cx_starts));
    c.with_certificate = option(o, "with_certificate", 1.0) != 0.0;
    return make_rmtr(c);
  }
  if (id == "oscillatory") return make_oscillatory_counterexample(static_cast<int>(option(o, "k", 1)));
  if (id == "abs") return make_abs_value();
  if (id == "square") return make_square();
  if (id == "spiky_slice") return make_spiky_slice();
  fail(ErrorCode::UnknownEntry, "no zoo entry named '" + id + "'");
}

// ---------------------------------------------------------------- spiky norm

double spiky_value(const Vector& x) {
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  const double theta = std::atan2(x[1], x[0]);
  return std::sqrt(r) + (2.0 + std::sin(3.0 * theta)) * r * r;
}

Vector spiky_subgradient(const Vector& x) {
  const double r = x.norm();
  if (r == 0.0) return Vector::Zero(2);
  const double theta = std::atan2(x[1], x[0]);
  const double radial = 1.0 / (2.0 * r * std::sqrt(r)) + 2.0 * (2.0 + std::sin(3.0 * theta));
  return radial * x + 3.0 * std::cos(3.0 * theta) * vec2(-x[1], x[0]);
}

ZooEntry make_spiky_norm() {
  ZooEntry e;
  e.id = "spiky";
  e.provenance = "spiky norm: sqrt(|x|) + (2 + sin(3 arg x))|x|^2 on R^2; strongly quasar-convex, not star-convex";
  e.oracle.dim = 2;
  e.oracle.value_fn = spiky_value;
  e.oracle.subgrad_fn = spiky_subgradient;
  e.oracle.minimizer = Vector::Zero(2);
  e.oracle.min_value = 0.0;
  e.certificate = QuasarCertificate{0.5, 1.0, Vector::Zero(2), RegionWhole{}};
  QuasarCertificate star{1.0, 0.0, Vector::Zero(2), RegionWhole{}};
  e.negative_certificates.push_back(star);
  // Refutation lives at small radii and λ = 1/2.
  Witness w{Vector::Zero(2), 0.5, Property::Definition};
  double best = 0.0;
  for (int j = 1; j <= 6; ++j) {
    for (int a = 0; a < 24; ++a) {
      Vector x = std::pow(10.0, -j) * vec2(std::cos(2 * kPi * a / 24), std::sin(2 * kPi * a / 24));
      double r = definition_residual(e.oracle, star, x, 0.5);
      if (r > best) {
        best = r;
        w.x = x;
      }
    }
  }
  e.negative_witnesses.push_back(w);
  e.start = [](std::uint64_t) { return vec2(0.5, 0.0); };
  e.in_minimizer_set = [](const Vector& x) { return x.norm() == 0.0; };
  return e;
}

ZooEntry make_spiky_slice() {
  ZooEntry e;
  e.id = "spiky_slice";
  e.provenance = "spiky norm restricted to the first coordinate axis";
  e.oracle.dim = 1;
  e.oracle.value_fn = [](const Vector& t) { return spiky_value(vec2(t[0], 0.0)); };
  e.oracle.subgrad_fn = [](const Vector& t) -> Vector {
    Vector g(1);
    g[0] = spiky_subgradient(vec2(t[0], 0.0))[0];
    return g;
  };
  e.oracle.minimizer = Vector::Zero(1);
  e.oracle.min_value = 0.0;
  e.certificate = QuasarCertificate{0.5, 1.0, Vector::Zero(1), RegionWhole{}};
  e.start = [](std::uint64_t) { return Vector::Constant(1, 0.5); };
  e.in_minimizer_set = [](const Vector& x) { return x[0] == 0.0; };
  return e;
}

ZooEntry make_abs_value() {
  auto atoms = std::make_shared<AtomDeclaration>();
  atoms->dim = 1;
  NormBlock block;
  block.count = 1;
  block.weight = 1.0;
  block.residuals = [](const Vector& y) -> Matrix { return Matrix::Constant(1, 1, y[0]); };
  block.adjoint = [](const Matrix& g) -> Vector { return Vector::Constant(1, g(0, 0)); };
  atoms->norms.push_back(block);
  ZooEntry e;
  e.id = "abs";
  e.provenance = "absolute value on R";
  e.oracle = make_atomic_oracle(atoms);
  e.oracle.minimizer = Vector::Zero(1);
  e.oracle.min_value = 0.0;
  e.certificate = QuasarCertificate{1.0, 0.0, Vector::Zero(1), RegionWhole{}};
  e.start = [](std::uint64_t) { return Vector::Constant(1, 3.0); };
  e.in_minimizer_set = [](const Vector& x) { return x[0] == 0.0; };
  return e;
}

ZooEntry make_square() {
  ZooEntry e;
  e.id = "square";
  e.provenance = "squared norm";
  e.oracle.dim = 1;
  e.oracle.value_fn = [](const Vector& y) { return y.squaredNorm(); };
  e.oracle.subgrad_fn = [](const Vector& y) -> Vector { return 2.0 * y; };
  e.oracle.minimizer = Vector::Zero(1);
  e.oracle.min_value = 0.0;
  e.certificate = QuasarCertificate{1.0, 2.0, Vector::Zero(1), RegionWhole{}};
  e.start = [](std::uint64_t) { return Vector::Constant(1, 2.0); };
  e.in_minimizer_set = [](const Vector& x) { return x[0] == 0.0; };
  return e;
}

// ---------------------------------------------------------------- distance powers

namespace {

struct Projection {
  Vector point;
  double dist = 0.0;
};

Projection project_box(const Vector& x, double hx, double hy) {
  Projection p;
  p.point = vec2(std::clamp(x[0], -hx, hx), std::clamp(x[1], -hy, hy));
  p.dist = (x - p.point).norm();
  return p;
}

Projection project_shape(DistShape shape, const Vector& x) {
  if (shape == DistShape::Disk) {
    const double r = x.norm();
    if (r <= 1.0) return {x, 0.0};
    return {x / r, r - 1.0};
  }
  Projection a = project_box(x, 2.0, 1.0);
  Projection b = project_box(x, 1.0, 2.0);
  return a.dist <= b.dist ? a : b;
}

}  // namespace

double cross_distance(const Vector& x) { return project_shape(DistShape::Cross, x).dist; }

ZooEntry make_dist_power(DistShape shape, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::BadParameter, "alpha must lie in (0,1)");
  ZooEntry e;
  e.id = shape == DistShape::Disk ? "dist_disk" : "dist_cross";
  e.provenance = shape == DistShape::Disk ? "dist(x, unit disk)^alpha"
                                          : "dist(x, C)^alpha with C the union of [-2,2]x[-1,1] and [-1,1]x[-2,2]";
  e.parameters["alpha"] = alpha;
  e.oracle.dim = 2;
  e.oracle.value_fn = [shape, alpha](const Vector& x) {
    return std::pow(project_shape(shape, x).dist, alpha);
  };
  e.oracle.subgrad_fn = [shape, alpha](const Vector& x) -> Vector {
    Projection p = project_shape(shape, x);
    if (p.dist <= 0.0) return Vector::Zero(2);
    return alpha * std::pow(p.dist, alpha - 2.0) * (x - p.point);
  };
  e.oracle.minimizer = Vector::Zero(2);
  e.oracle.min_value = 0.0;
  e.certificate = QuasarCertificate{alpha, 0.0, Vector::Zero(2), RegionWhole{}};
  e.in_minimizer_set = [shape](const Vector& x) { return project_shape(shape, x).dist == 0.0; };
  if (shape == DistShape::Disk) {
    e.start = [](std::uint64_t) { return vec2(3.0, 0.0); };
  } else {
    e.start = [](std::uint64_t) { return vec2(3.0, 3.0); };
    QuasarCertificate bad{alpha, 0.0, vec2(2.0, 1.0), RegionWhole{}};
    e.negative_certificates.push_back(bad);
    Witness w{vec2(0.0, 0.0), 0.5};
    double best = 0.0;
    for (int i = -12; i <= 12; ++i) {
      for (int j = -12; j <= 12; ++j) {
        Vector x = vec2(0.25 * i, 0.25 * j);
        for (int l = 1; l < 32; ++l) {
          double lambda = l / 32.0;
          double r = definition_residual(e.oracle, bad, x, lambda);
          if (r > best) {
            best = r;
            w = Witness{x, lambda, Property::Definition};
          }
        }
      }
    }
    e.negative_witnesses.push_back(w);
  }
  return e;
}

// ---------------------------------------------------------------- star flower

double star_flower_radius(double theta) { return 1.0 + 0.35 * std::cos(4.0 * theta); }

ZooEntry make_star_flower() {
  auto atoms = std::make_shared<AtomDeclaration>();
  atoms->dim = 2;
  PositivePart pp;
  pp.fn = [](const Vector& x) {
    const double r = x.norm();
    if (r == 0.0) return -1.0;
    return r / star_flower_radius(std::atan2(x[1], x[0])) - 1.0;
  };
  pp.grad = [](const Vector& x) -> Vector {
    const double r = x.norm();
    if (r == 0.0) return Vector::Zero(2);
    const double theta = std::atan2(x[1], x[0]);
    const double R = star_flower_radius(theta);
    const double dR = -1.4 * std::sin(4.0 * theta);
    return x / (r * R) - dR / (r * R * R) * vec2(-x[1], x[0]);
  };
  atoms->positive_parts.push_back(pp);
  ZooEntry e;
  e.id = "star_flower";
  e.provenance = "max{0, rho(x) - 1} with rho = |x| / (1 + 0.35 cos 4 theta); star-convex with a nonisolated minimizer set";
  e.oracle = make_atomic_oracle(atoms);
  e.oracle.minimizer = Vector::Zero(2);
  e.oracle.min_value = 0.0;
  e.certificate = QuasarCertificate{1.0, 0.0, Vector::Zero(2), RegionWhole{}};
  e.start = [](std::uint64_t) { return vec2(2.7, 0.0); };
  e.in_minimizer_set = [](const Vector& x) {
    const double r = x.norm();
    return r == 0.0 || r / star_flower_radius(std::atan2(x[1], x[0])) <= 1.0;
  };
  return e;
}

// ---------------------------------------------------------------- ReLU GLM

double glm_rho(double density_radius, double c) {
  const double s = std::sin(kPi / 8.0);
  return std::pow(density_radius, 4) * s * s * s / (8.0 * std::sqrt(2.0) * c);
}

namespace {

void fill_uniform_ball(std::mt19937_64& rng, double c, Eigen::Ref<Matrix> out) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto n = out.rows();
  const double root_c = std::sqrt(c);
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    double nrm = 0.0;
    do {
      for (Eigen::Index i = 0; i < n; ++i) out(i, j) = gauss(rng);
      nrm = out.col(j).norm();
    } while (nrm == 0.0);
    const double radius = root_c * std::pow(unif(rng), 1.0 / static_cast<double>(n));
    out.col(j) *= radius / nrm;
  }
}

ObjectiveOracle glm_sample_average(const Matrix& X, const Vector& w_star) {
  auto data = std::make_shared<const Matrix>(X);
  auto target = std::make_shared<const Vector>((X.transpose() * w_star).cwiseMax(0.0));
  ObjectiveOracle o;
  o.dim = X.rows();
  const double M = static_cast<double>(X.cols());
  o.value_fn = [data, target, M](const Vector& w) {
    Vector diff = (data->transpose() * w).cwiseMax(0.0) - *target;
    return 0.5 * diff.squaredNorm() / M;
  };
  o.subgrad_fn = [data, target, M](const Vector& w) -> Vector {
    Vector z = data->transpose() * w;
    Vector weight = (z.array() > 0.0).select(z - *target, 0.0);
    return (*data) * weight / M;
  };
  o.minimizer = w_star;
  o.min_value = 0.0;
  return o;
}

}  // namespace

Matrix sample_uniform_ball(int n, double c, int count, const SeedStream& stream) {
  std::mt19937_64 rng = stream.engine();
  Matrix X(n, count);
  fill_uniform_ball(rng, c, X);
  return X;
}

ZooEntry make_relu_glm(const GlmConfig& cfg) {
  if (cfg.n < 1 || !(cfg.c >= 0.5) || !(cfg.density_radius > 0.0) || cfg.batch_eval < 1 || cfg.batch_full < 1 ||
      cfg.batch_sgd < 1)
    fail(ErrorCode::BadParameter, "invalid GLM configuration");
  Vector w_star;
  if (cfg.w_star) {
    w_star = *cfg.w_star;
    if (w_star.size() != cfg.n || std::abs(w_star.norm() - 2.0) > 1e-12)
      fail(ErrorCode::BadParameter, "w_star must have dimension n and norm 2");
  } else {
    std::mt19937_64 rng = SeedStream{cfg.seed, 11}.engine();
    std::normal_distribution<double> gauss;
    w_star.resize(cfg.n);
    for (int i = 0; i < cfg.n; ++i) w_star[i] = gauss(rng);
    w_star *= 2.0 / w_star.norm();
  }
  const double c = cfg.c;
  const int n = cfg.n;

  auto model = std::make_shared<StochasticModel>();
  model->batch_eval = cfg.batch_eval;
  model->batch_full = cfg.batch_full;
  model->batch_sgd = cfg.batch_sgd;
  model->seed = cfg.seed;
  model->realize = [n, c, w_star](const SeedStream& s, int batch) {
    return glm_sample_average(sample_uniform_ball(n, c, batch, s), w_star);
  };
  model->estimate = [n, c, w_star](const Vector& w, const SeedStream& s, int batch) {
    std::mt19937_64 rng = s.engine();
    constexpr int kChunk = 4096;
    Matrix X(n, kChunk);
    double sum = 0.0, sumsq = 0.0;
    for (int done = 0; done < batch; done += kChunk) {
      const int cnt = std::min(kChunk, batch - done);
      auto block = X.leftCols(cnt);
      fill_uniform_ball(rng, c, block);
      Vector diff = (block.transpose() * w).cwiseMax(0.0) - (block.transpose() * w_star).cwiseMax(0.0);
      Vector loss = 0.5 * diff.array().square();
      sum += loss.sum();
      sumsq += loss.squaredNorm();
    }
    const double mean = sum / batch;
    const double var = batch > 1 ? std::max(0.0, (sumsq - batch * mean * mean) / (batch - 1)) : 0.0;
    return Estimate{mean, std::sqrt(var / batch)};
  };

  ZooEntry e;
  e.id = "relu_glm";
  e.provenance = "population risk of a noiseless ReLU regression, x uniform on the ball of radius sqrt(c)";
  // Deterministic face of the oracle: one fixed evaluation batch.
  e.oracle = glm_sample_average(sample_uniform_ball(n, c, cfg.batch_eval, SeedStream{cfg.seed, 0}), w_star);
  e.oracle.stochastic = model;
  const double rho = glm_rho(cfg.density_radius, c);
  RegionBallIntersection region{RegionBall{w_star, w_star.norm()}, RegionBall{Vector::Zero(n), 2.0 * w_star.norm()}};
  e.certificate = QuasarCertificate{rho, c, w_star, region};
  e.parameters["rho"] = rho;
  e.parameters["mu"] = c;
  e.parameters["density_radius"] = cfg.density_radius;
  e.notes.push_back("rho depends on the assumed density lower-bound radius (density_radius)");
  e.start = [w_star, region](std::uint64_t seed) {
    std::mt19937_64 rng = SeedStream{seed, 21}.engine();
    std::normal_distribution<double> gauss;
    Vector d(w_star.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = gauss(rng);
    Vector w0 = w_star + 0.3 * w_star.norm() * d / d.norm();
    return project_region(w0, region);
  };
  e.in_minimizer_set = [w_star](const Vector& w) { return (w - w_star).norm() == 0.0; };
  return e;
}

// ---------------------------------------------------------------- robust multi-task regression

namespace {

std::shared_ptr<const AtomDeclaration> rmtr_atoms(const Matrix& X, const Matrix& Y, int m, int d, double q) {
  auto atoms = std::make_shared<AtomDeclaration>();
  atoms->dim = static_cast<Eigen::Index>(m) * d;
  atoms->outer_power = q;
  auto Xp = std::make_shared<const Matrix>(X);
  auto Yp = std::make_shared<const Matrix>(Y);
  NormBlock block;
  block.count = X.cols();
  block.weight = 1.0 / static_cast<double>(X.cols());
  block.residuals = [Xp, Yp, m, d](const Vector& w) -> Matrix {
    Eigen::Map<const Matrix> W(w.data(), m, d);
    return W * (*Xp) - *Yp;
  };
  block.adjoint = [Xp, m, d](const Matrix& G) -> Vector {
    Matrix J = G * Xp->transpose();
    return Eigen::Map<const Vector>(J.data(), static_cast<Eigen::Index>(m) * d);
  };
  atoms->norms.push_back(block);
  return atoms;
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, const SeedStream& s) {
  std::mt19937_64 rng = s.engine();
  std::normal_distribution<double> gauss;
  Matrix A(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = gauss(rng);
  return A;
}

bool full_row_rank(const Matrix& X) {
  if (X.rows() > X.cols()) return false;
  Eigen::JacobiSVD<Matrix> svd(X);
  const auto& s = svd.singularValues();
  return s.size() == X.rows() && s.minCoeff() > 1e-10 * std::max(1.0, s.maxCoeff());
}

}  // namespace

double rmtr_gamma(double q, double kappa, double cX, double radius) {
  if (!(q > 0.0 && q < 1.0) || !(kappa > 0.0 && kappa < q) || !(cX > 0.0) || !(radius > 0.0))
    fail(ErrorCode::BadParameter, "gamma formula needs q in (0,1), kappa in (0,q), cX > 0, R > 0");
  return 2.0 * (q - kappa) / kappa * std::pow(cX, q) * std::pow(radius, q - 2.0);
}

double compute_cX(const Matrix& X, Eigen::Index m, int starts, std::uint64_t seed) {
  if (m < 1 || starts < 1) fail(ErrorCode::BadParameter, "compute_cX needs m >= 1 and at least one start");
  if (!full_row_rank(X)) fail(ErrorCode::RankDeficientData, "data matrix lacks full row rank");
  const Eigen::Index d = X.rows();
  const double N = static_cast<double>(X.cols());
  Eigen::JacobiSVD<Matrix> svd(X);
  const double lower = svd.singularValues().minCoeff() / N;

  auto exact = [&](const Matrix& U) { return (U * X).colwise().norm().sum() / N; };
  auto smoothed = [&](const Matrix& U, double mu, Matrix* grad) {
    Matrix R = U * X;
    Eigen::RowVectorXd s = (R.colwise().squaredNorm().array() + mu * mu).sqrt();
    if (grad) *grad = (R.array().rowwise() / s.array()).matrix() * X.transpose() / N;
    return s.sum() / N;
  };

  std::mt19937_64 rng = SeedStream{seed, 51}.engine();
  std::normal_distribution<double> gauss;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    Matrix U(m, d);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < m; ++i) U(i, j) = gauss(rng);
    U /= U.norm();
    for (double mu = 0.1 * exact(U); mu > 1e-10 * std::max(lower, 1e-300); mu *= 0.01) {
      Matrix G;
      double f = smoothed(U, mu, &G);
      double step = 1.0;
      for (int it = 0; it < 200; ++it) {
        // Riemannian gradient on the Frobenius sphere.
        Matrix T = G - (G.cwiseProduct(U).sum()) * U;
        if (T.norm() <= 1e-12) break;
        bool moved = false;
        for (int bt = 0; bt < 50; ++bt) {
          Matrix V = U - step * T;
          V /= V.norm();
          Matrix Gv;
          double fv = smoothed(V, mu, &Gv);
          if (fv <= f - 1e-4 * step * T.squaredNorm()) {
            U = std::move(V);
            G = std::move(Gv);
            f = fv;
            moved = true;
            step *= 2.0;
            break;
          }
          step *= 0.5;
        }
        if (!moved) break;
      }
    }
    best = std::min(best, exact(U));
  }
  if (!(best > 0.0) || best < lower * (1.0 - 1e-9))
    fail(ErrorCode::Internal, "compute_cX result violates the analytic lower bound");
  return best;
}

ZooEntry make_rmtr(const RmtrConfig& cfg) {
  if (cfg.d < 1 || cfg.m < 1 || cfg.N < 1 || !(cfg.q > 0.0 && cfg.q < 1.0) || !(cfg.radius > 0.0))
    fail(ErrorCode::BadParameter, "invalid RMTR configuration");
  const int m = cfg.m, d = cfg.d;
  Matrix X;
  if (cfg.X) {
    X = *cfg.X;
    if (X.rows() != d) fail(ErrorCode::BadParameter, "X must have d rows");
    if (!full_row_rank(X)) fail(ErrorCode::RankDeficientData, "data matrix lacks full row rank");
  } else {
    for (std::uint64_t attempt = 0;; ++attempt) {
      X = gaussian_matrix(d, cfg.N, SeedStream{cfg.seed, 32 + 1000 * attempt});
      if (full_row_rank(X)) break;
      if (attempt >= 9) fail(ErrorCode::RankDeficientData, "could not draw a full-row-rank data matrix");
    }
  }
  Matrix W_star;
  if (cfg.W_star) {
    W_star = *cfg.W_star;
  } else {
    W_star = gaussian_matrix(m, d, SeedStream{cfg.seed, 31});
    W_star *= 2.0 / W_star.norm();
  }
  if (W_star.rows() != m || W_star.cols() != d || std::abs(W_star.norm() - 2.0) > 1e-12)
    fail(ErrorCode::BadParameter, "W_star must be m x d with Frobenius norm 2");
  const Matrix Y = W_star * X;
  const Vector w_star = Eigen::Map<const Vector>(W_star.data(), static_cast<Eigen::Index>(m) * d);

  ZooEntry e;
  e.id = "rmtr";
  e.provenance = "robust multi-task regression ((1/N) sum |W x_i - y_i|)^q with realizable data";
  e.oracle = make_atomic_oracle(rmtr_atoms(X, Y, m, d, cfg.q));
  e.oracle.minimizer = w_star;
  e.oracle.min_value = 0.0;
  const double q = cfg.q;
  e.oracle.minibatch = [X, Y, m, d, q](const SeedStream& s, int batch) {
    const int N = static_cast<int>(X.cols());
    const int b = std::clamp(batch, 1, N);
    std::vector<int> idx(N);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng = s.engine();
    for (int i = 0; i < b; ++i) {
      std::uniform_int_distribution<int> pick(i, N - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    Matrix Xb(X.rows(), b), Yb(Y.rows(), b);
    for (int i = 0; i < b; ++i) {
      Xb.col(i) = X.col(idx[i]);
      Yb.col(i) = Y.col(idx[i]);
    }
    return make_atomic_oracle(rmtr_atoms(Xb, Yb, m, d, q));
  };
  const RegionBall region{w_star, cfg.radius};
  e.parameters["q"] = q;
  e.parameters["radius"] = cfg.radius;
  if (cfg.with_certificate) {
    const double kappa = cfg.kappa.value_or(q / 2.0);
    const double cX = compute_cX(X, m, cfg.cx_starts, cfg.seed);
    e.parameters["cX"] = cX;
    e.parameters["kappa"] = kappa;
    e.certificate = QuasarCertificate{kappa, rmtr_gamma(q, kappa, cX, cfg.radius), w_star, region};
  }
  const double scale = cfg.init_scale;
  e.start = [m, d, scale, region](std::uint64_t seed) {
    Matrix W0 = scale * gaussian_matrix(m, d, SeedStream{seed, 41});
    Vector w0 = Eigen::Map<const Vector>(W0.data(), static_cast<Eigen::Index>(m) * d);
    return project_region(w0, region);
  };
  e.in_minimizer_set = [w_star](const Vector& w) { return (w - w_star).norm() == 0.0; };
  e.notes.push_back("start points are sigma*Gaussian draws projected onto K_R");
  return e;
}

// ---------------------------------------------------------------- oscillatory counterexample

double oscillatory_density(int k, double t) {
  if (t == 0.0) return 0.0;
  const double s = std::sin(1.0 / t);
  return std::pow(t, 2 * k - 1) * s * s + std::pow(t, 2 * k + 1);
}

namespace {

struct GslWorkspace {
  gsl_integration_workspace* ws;
  GslWorkspace() : ws(gsl_integration_workspace_alloc(200)) {}
  ~GslWorkspace() { gsl_integration_workspace_free(ws); }
};

double substituted_integrand(double u, void* params) {
  const int a = *static_cast<int*>(params);
  const double s = std::sin(u);
  return s * s / std::pow(u, a);
}

// ∫_U^∞ sin²(u) u^{-a} du by repeated integration by parts; relative truncation error O(U^{-4}).
double oscillatory_asymptotic_tail(int a, double U) {
  const double s = std::sin(2.0 * U), c = std::cos(2.0 * U);
  const double mean_part = 1.0 / (2.0 * (a - 1) * std::pow(U, a - 1));
  const double cos_part = -s / (2.0 * std::pow(U, a)) + a * c / (4.0 * std::pow(U, a + 1)) +
                          a * (a + 1.0) * s / (8.0 * std::pow(U, a + 2)) -
                          a * (a + 1.0) * (a + 2.0) * c / (16.0 * std::pow(U, a + 3));
  return mean_part - 0.5 * cos_part;
}

// ∫_{1/x}^∞ sin²(u) u^{-(2k+1)} du: adaptive quadrature per π-length piece below 200π, asymptotic tail beyond.
double oscillatory_tail_integral(int k, double x) {
  thread_local GslWorkspace w;
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;
  int a = 2 * k + 1;
  const double lo = 1.0 / x;
  const double cutoff = 200.0 * kPi;
  if (lo >= cutoff) return oscillatory_asymptotic_tail(a, lo);
  gsl_function F{&substituted_integrand, &a};
  const long first = static_cast<long>(std::floor(lo / kPi));
  double total = 0.0;
  for (long j = first; j < 200; ++j) {
    const double left = std::max(lo, static_cast<double>(j) * kPi);
    const double right = static_cast<double>(j + 1) * kPi;
    if (right <= left) continue;
    // Absolute floor scaled to the whole tail, so sliver pieces do not chase roundoff.
    const double abs_tol = 1e-15 * std::pow(lo, 1 - a);
    double piece = 0.0, err = 0.0;
    int status = gsl_integration_qag(&F, left, right, abs_tol, 1e-12, 200, GSL_INTEG_GAUSS21, w.ws, &piece, &err);
    if (status != GSL_SUCCESS && err > 10 * abs_tol + 1e-13 * std::abs(total + piece))
      fail(ErrorCode::Internal, "quadrature failed to converge");
    total += piece;
  }
  return total + oscillatory_asymptotic_tail(a, cutoff);
}

}  // namespace

double oscillatory_value(int k, double x) {
  const double t = std::abs(x);
  if (t == 0.0) return 0.0;
  return oscillatory_tail_integral(k, t) + std::pow(t, 2 * k + 2) / (2.0 * k + 2.0);
}

double oscillatory_ratio(int k, double x) { return x * oscillatory_density(k, x) / oscillatory_value(k, x); }

ZooEntry make_oscillatory_counterexample(int k) {
  if (k < 1) fail(ErrorCode::BadParameter, "k must be at least 1");
  ZooEntry e;
  e.id = "oscillatory";
  e.provenance = "f(x) = integral_0^x t^(2k-1) sin^2(1/t) + t^(2k+1) dt; smooth, unimodal, not quasar-convex";
  e.parameters["k"] = k;
  e.oracle.dim = 1;
  e.oracle.value_fn = [k](const Vector& x) { return oscillatory_value(k, x[0]); };
  e.oracle.subgrad_fn = [k](const Vector& x) -> Vector {
    return Vector::Constant(1, oscillatory_density(k, x[0]));
  };
  e.oracle.minimizer = Vector::Zero(1);
  e.oracle.min_value = 0.0;
  const RegionBall domain{Vector::Zero(1), 1.0};
  for (double kappa : {0.5, 0.1, 0.01}) {
    QuasarCertificate claim{kappa, 0.0, Vector::Zero(1), domain};
    e.negative_certificates.push_back(claim);
    // First point of the sequence 1/(nπ) whose ratio x·f'(x)/f(x) drops below κ violates the first-order condition.
    Witness w{Vector::Zero(1), 0.0, Property::FirstOrder};
    for (int n = 1; n <= 100000; ++n) {
      const double xn = 1.0 / (n * kPi);
      if (oscillatory_ratio(k, xn) < kappa) {
        w.x = Vector::Constant(1, xn);
        break;
      }
    }
    e.negative_witnesses.push_back(w);
  }
  e.start = [](std::uint64_t) { return Vector::Constant(1, 0.8); };
  e.in_minimizer_set = [](const Vector& x) { return x[0] == 0.0; };
  return e;
}

}  // namespace hippa
