#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace wuigraph {

struct StackerCoefficients {
  double beta0 = 0.0;
  double beta_gnn = 0.0;
  double beta_xgb = 0.0;

  nlohmann::json to_json() const;
  static StackerCoefficients from_json(const nlohmann::json& j);
};

struct StackerFit {
  StackerCoefficients coefficients;
  int iterations = 0;
  double gradient_norm = 0.0;
  double log_loss = 0.0;
  bool converged = false;
  /// Set when the fit classifies every row strictly correctly (complete
  /// separation, no finite optimum; converged is then false) or when
  /// iterations ran out with coefficients still growing.
  bool separation_warning = false;
};

/// Maximum-likelihood logistic regression on the two specialist
/// probabilities by Newton's method, stopping at gradient norm <= 1e-8 or
/// 100 iterations. Throws ValidationError for mismatched lengths, fewer than
/// 10 rows, a missing class, or probabilities outside (0, 1).
StackerFit fit_stacker(std::span<const double> p_gnn, std::span<const double> p_xgb,
                       std::span<const int> labels);

/// sigmoid(beta0 + beta_gnn * p_gnn + beta_xgb * p_xgb).
double stack_predict(const StackerCoefficients& c, double p_gnn, double p_xgb);

/// One-input logistic fit (intercept + slope), same Newton scheme. Used as
/// the nested baseline for the stacker.
struct SingleFit {
  double intercept = 0.0;
  double slope = 0.0;
  double log_loss = 0.0;
};
SingleFit fit_single_logistic(std::span<const double> x, std::span<const int> labels);

enum class TriageQuadrant { EnvironmentalRisk, StructuralRisk, CompoundRisk, Safe };

inline constexpr std::array<TriageQuadrant, 4> kAllQuadrants = {
    TriageQuadrant::EnvironmentalRisk, TriageQuadrant::StructuralRisk,
    TriageQuadrant::CompoundRisk, TriageQuadrant::Safe};

std::string_view to_string(TriageQuadrant q);

/// GNN flag only -> EnvironmentalRisk; GBDT flag only -> StructuralRisk;
/// both -> CompoundRisk; neither -> Safe. Flags are inclusive (>= threshold).
TriageQuadrant triage(double p_gnn, double p_xgb, double threshold = 0.5);

}  // namespace wuigraph
