#include "wuigraph/ensemble.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "wuigraph/error.hpp"

namespace wuigraph {
namespace {

constexpr int kMaxIterations = 100;
constexpr double kGradTol = 1e-8;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

struct NewtonResult {
  Eigen::VectorXd beta;
  int iterations = 0;
  double grad_norm = 0.0;
  double loss = 0.0;
  bool converged = false;
  bool growing = false;
};

// Newton's method with step halving on the mean negative log-likelihood.
// Column 0 of X is the intercept.
NewtonResult newton_logistic(const Eigen::MatrixXd& X, std::span<const int> y) {
  const auto n = X.rows();
  const auto k = X.cols();
  auto loss_at = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd eta = X * b;
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += softplus(eta[i]) - y[static_cast<std::size_t>(i)] * eta[i];
    return s / static_cast<double>(n);
  };
  NewtonResult r;
  r.beta = Eigen::VectorXd::Zero(k);
  r.loss = loss_at(r.beta);
  double prev_norm = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Eigen::VectorXd eta = X * r.beta;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(eta[i]);
      grad += (p - y[static_cast<std::size_t>(i)]) * X.row(i).transpose();
      hess += std::max(p * (1.0 - p), 1e-300) * X.row(i).transpose() * X.row(i);
    }
    grad /= static_cast<double>(n);
    hess /= static_cast<double>(n);
    r.grad_norm = grad.norm();
    if (r.grad_norm <= kGradTol) {
      r.converged = true;
      break;
    }
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    double t = 1.0;
    Eigen::VectorXd next = r.beta - step;
    double next_loss = loss_at(next);
    while (!(next_loss <= r.loss) && t > 1e-10) {
      t *= 0.5;
      next = r.beta - t * step;
      next_loss = loss_at(next);
    }
    r.beta = next;
    r.loss = next_loss;
    r.iterations = it + 1;
    prev_norm = r.beta.norm();
  }
  if (!r.converged) {
    const Eigen::VectorXd eta = X * r.beta;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      grad += (sigmoid(eta[i]) - y[static_cast<std::size_t>(i)]) * X.row(i).transpose();
    }
    r.grad_norm = grad.norm() / static_cast<double>(n);
    r.converged = r.grad_norm <= kGradTol;
    r.growing = !r.converged && prev_norm > 10.0;
  }
  // A finite maximum-likelihood fit never classifies every row strictly
  // correctly (scaling beta up would lower the loss further), so that
  // outcome means the data are completely separated and the tolerance was
  // reached only by driving the coefficients toward infinity.
  const Eigen::VectorXd eta = X * r.beta;
  bool separated = true;
  for (Eigen::Index i = 0; i < n && separated; ++i) {
    separated = y[static_cast<std::size_t>(i)] ? eta[i] > 0.0 : eta[i] < 0.0;
  }
  if (separated) {
    r.converged = false;
    r.growing = true;
  }
  return r;
}

void check_labels(std::span<const int> labels) {
  bool has0 = false, has1 = false;
  for (int y : labels) {
    if (y != 0 && y != 1) throw ValidationError("stacker: labels must be 0 or 1");
    has0 |= y == 0;
    has1 |= y == 1;
  }
  if (!has0 || !has1) throw ValidationError("stacker: both label classes must be present");
}

void check_probs(std::span<const double> p, const char* name) {
  for (double v : p) {
    if (!(v > 0.0 && v < 1.0)) {
      throw ValidationError(std::string("stacker: ") + name + " probabilities must lie in (0, 1)");
    }
  }
}

}  // namespace

nlohmann::json StackerCoefficients::to_json() const {
  return {{"beta0", beta0}, {"beta_gnn", beta_gnn}, {"beta_xgb", beta_xgb}};
}

StackerCoefficients StackerCoefficients::from_json(const nlohmann::json& j) {
  StackerCoefficients c{j.at("beta0").get<double>(), j.at("beta_gnn").get<double>(),
                        j.at("beta_xgb").get<double>()};
  if (!std::isfinite(c.beta0) || !std::isfinite(c.beta_gnn) || !std::isfinite(c.beta_xgb)) {
    throw ValidationError("stacker coefficients must be finite");
  }
  return c;
}

StackerFit fit_stacker(std::span<const double> p_gnn, std::span<const double> p_xgb,
                       std::span<const int> labels) {
  if (p_gnn.size() != p_xgb.size() || p_gnn.size() != labels.size()) {
    throw ValidationError("stacker: input lengths differ");
  }
  if (labels.size() < 10) throw ValidationError("stacker: at least 10 rows are required");
  check_labels(labels);
  check_probs(p_gnn, "GNN");
  check_probs(p_xgb, "GBDT");

  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd X(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = p_gnn[static_cast<std::size_t>(i)];
    X(i, 2) = p_xgb[static_cast<std::size_t>(i)];
  }
  const NewtonResult r = newton_logistic(X, labels);
  StackerFit fit;
  fit.coefficients = {r.beta[0], r.beta[1], r.beta[2]};
  fit.iterations = r.iterations;
  fit.gradient_norm = r.grad_norm;
  fit.log_loss = r.loss;
  fit.converged = r.converged;
  fit.separation_warning = r.growing;
  if (fit.separation_warning) warn("stacker: iteration cap reached; data look perfectly separable");
  return fit;
}

SingleFit fit_single_logistic(std::span<const double> x, std::span<const int> labels) {
  if (x.size() != labels.size() || x.empty()) throw ValidationError("logistic: input lengths differ");
  check_labels(labels);
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd X(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = x[static_cast<std::size_t>(i)];
  }
  const NewtonResult r = newton_logistic(X, labels);
  return {r.beta[0], r.beta[1], r.loss};
}

double stack_predict(const StackerCoefficients& c, double p_gnn, double p_xgb) {
  return sigmoid(c.beta0 + c.beta_gnn * p_gnn + c.beta_xgb * p_xgb);
}

std::string_view to_string(TriageQuadrant q) {
  switch (q) {
    case TriageQuadrant::EnvironmentalRisk: return "EnvironmentalRisk";
    case TriageQuadrant::StructuralRisk: return "StructuralRisk";
    case TriageQuadrant::CompoundRisk: return "CompoundRisk";
    case TriageQuadrant::Safe: return "Safe";
  }
  return "Safe";
}

TriageQuadrant triage(double p_gnn, double p_xgb, double threshold) {
  const bool env = p_gnn >= threshold;
  const bool str = p_xgb >= threshold;
  if (env && str) return TriageQuadrant::CompoundRisk;
  if (env) return TriageQuadrant::EnvironmentalRisk;
  if (str) return TriageQuadrant::StructuralRisk;
  return TriageQuadrant::Safe;
}

}  // namespace wuigraph
