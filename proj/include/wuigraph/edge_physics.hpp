#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "wuigraph/catalogs.hpp"
#include "wuigraph/node.hpp"

namespace wuigraph {

/// How a sampled residence/ignition time gap becomes a radiation probability.
/// PaperLiteral evaluates 1 - F(t_r - t_ig); Monotone evaluates F(t_r - t_ig).
enum class RadiationMode { PaperLiteral, Monotone };

/// Which node's area scales the incident radiant flux.
enum class RadiationArea { Target, Source };

struct EmberParams {
  double v_ref = 10.0;                   // m/s
  double lambda0 = 75.0;                 // m
  double volume_ref = 500.0;             // m^3
  double volume_exponent = 0.25;
  double radiation_timing_sigma = 60.0;  // s
  RadiationMode radiation_mode = RadiationMode::PaperLiteral;
};

struct Environment {
  double wind_speed = 22.2;       // m/s
  double wind_direction = 225.0;  // degrees, direction the flow points toward
  Range ambient_temperature{298.15, 303.15};  // K
  double gravity = 9.81;                      // m/s^2
  double stefan_boltzmann = 5.67e-8;          // W/(m^2 K^4)
  double emissivity = 0.95;
  double d_th_radiation = 60.0;  // m
  RadiationArea radiation_area = RadiationArea::Target;
  EmberParams ember;

  /// Throws ValidationError when any field is outside its domain.
  void validate() const;
};

struct EdgeWeights {
  double p_conv = 0.0;
  double p_rad = 0.0;
  double p_ember = 0.0;
  double p_total = 0.0;

  friend bool operator==(const EdgeWeights&, const EdgeWeights&) = default;
};

/// Sampled target-material parameters for one Monte Carlo draw.
struct MaterialSample {
  double q_critical;  // kW/m^2
  double ftp;         // kW*s/m^2
  double n;
};

/// cos of the wrapped angle between edge and wind when below 90 degrees,
/// else 0.
double wind_correlation(double edge_bearing_deg, double wind_direction_deg);

/// Albini flame tilt, radians. Requires flame height > 0.
double flame_angle(double flame_height, double wind_speed, double gravity);

/// Flame reach f_cc * h_f * tan(theta). Zero for a zero-height flame.
double convection_distance(double flame_height, double f_cc, const Environment& env);

/// 1 when d is within the flame reach (inclusive), else 0.
double convection_probability(double d, double flame_height, double f_cc,
                              const Environment& env);

/// Radiant flux at the target in kW/m^2, clamped at zero.
double incident_flux(double target_area, double d_min, double t_flame, double t_ambient,
                     const Environment& env);

/// Flux-time-product ignition delay FTP / (q - q_cr)^n, or nullopt when the
/// flux never exceeds the critical value.
std::optional<double> ignition_time(double flux, const MaterialSample& mat);

double radiation_probability(double d_min, double residence_time,
                             std::optional<double> ignition_time, const Environment& env);

/// Ember landing likelihood: volume-scaled exponential decay with a
/// wind-stretched length scale.
double ember_distribution(double volume, double d, double wind_speed, const EmberParams& p);

/// Ember access for a target: 1 for vegetation; for buildings the mean of the
/// applicable feature scores divided by the table maximum, clamped to [0, 1].
double access_probability(std::span<const double> applicable_scores, double max_score);
double access_probability(const Node& target, const Catalog& catalog);

double ember_probability(double g, double p_access, double f_cc);

/// Noisy-OR union 1 - (1 - a)(1 - b)(1 - c).
double total_probability(double p_conv, double p_rad, double p_ember);

/// Seed of the sample stream for one ordered pair. Depends only on the global
/// seed and the two node ids, so results do not depend on evaluation order.
std::uint64_t edge_seed(std::uint64_t global_seed, const Node& source, const Node& target);

/// Mean of `n_samples` joint draws of all three mechanisms and their union.
/// `d` is the source-target distance; callers that already know it avoid the
/// recomputation. Throws ValidationError for NonBurnable sources, identical
/// nodes, or n_samples < 1.
EdgeWeights monte_carlo_edge(const Node& source, const Node& target, const Environment& env,
                             const Catalog& catalog, int n_samples, std::uint64_t global_seed);

}  // namespace wuigraph
