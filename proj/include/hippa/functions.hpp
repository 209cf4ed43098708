#pragma once

#include "hippa/core.hpp"
#include "hippa/quasar.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hippa {

struct ZooEntry {
  std::string id;
  ObjectiveOracle oracle;
  std::optional<QuasarCertificate> certificate;
  std::vector<QuasarCertificate> negative_certificates;
  std::vector<Witness> negative_witnesses;  // aligned with negative_certificates
  std::string provenance;
  std::function<Vector(std::uint64_t seed)> start;
  std::function<bool(const Vector&)> in_minimizer_set;
  std::map<std::string, double> parameters;
  std::vector<std::string> notes;
};

std::vector<std::string> zoo_ids();
using ZooOptions = std::map<std::string, double>;
ZooEntry make_zoo_entry(const std::string& id, const ZooOptions& options = {});

double spiky_value(const Vector& x);
Vector spiky_subgradient(const Vector& x);
ZooEntry make_spiky_norm();

// One-dimensional entries used for brute-force prox comparisons.
ZooEntry make_abs_value();
ZooEntry make_square();
ZooEntry make_spiky_slice();

enum class DistShape { Disk, Cross };
ZooEntry make_dist_power(DistShape shape, double alpha);
double cross_distance(const Vector& x);

ZooEntry make_star_flower();
double star_flower_radius(double theta);

struct GlmConfig {
  int n = 100;
  double c = 4.0;
  double density_radius = 1.0;
  int batch_eval = 50000;
  int batch_full = 12000;
  int batch_sgd = 256;
  std::uint64_t seed = 0;
  std::optional<Vector> w_star;
};

ZooEntry make_relu_glm(const GlmConfig& cfg);
double glm_rho(double density_radius, double c);
// Draws M points uniformly from the ball of radius √c; columns are samples.
Matrix sample_uniform_ball(int n, double c, int count, const SeedStream& stream);

struct RmtrConfig {
  int d = 100;
  int m = 5;
  int N = 400;
  double q = 0.5;
  std::optional<double> kappa;  // defaults to q/2
  double radius = 2.0;
  std::uint64_t seed = 0;
  double init_scale = 20.0;
  int cx_starts = 32;
  bool with_certificate = true;
  std::optional<Matrix> X;
  std::optional<Matrix> W_star;
};

ZooEntry make_rmtr(const RmtrConfig& cfg);
double compute_cX(const Matrix& X, Eigen::Index m, int starts = 32, std::uint64_t seed = 0);
double rmtr_gamma(double q, double kappa, double cX, double radius);

ZooEntry make_oscillatory_counterexample(int k);
double oscillatory_density(int k, double t);
double oscillatory_value(int k, double x);
double oscillatory_ratio(int k, double x);

}  // namespace hippa
