#include "wuigraph/edge_physics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wuigraph/error.hpp"
#include "wuigraph/rng.hpp"

namespace wuigraph {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

double normal_cdf(double x, double sigma) {
  return 0.5 * std::erfc(-x / (sigma * std::numbers::sqrt2));
}

}  // namespace

void Environment::validate() const {
  auto fail = [](const char* what) { throw ValidationError(std::string("environment: ") + what); };
  if (!(wind_speed >= 0.0) || !std::isfinite(wind_speed)) fail("wind_speed must be >= 0");
  if (!(wind_direction >= 0.0 && wind_direction < 360.0)) fail("wind_direction must be in [0, 360)");
  if (!(ambient_temperature.lo > 0.0 && ambient_temperature.lo <= ambient_temperature.hi)) {
    fail("ambient_temperature must be a positive [lo, hi] range");
  }
  if (!(gravity > 0.0)) fail("gravity must be > 0");
  if (!(stefan_boltzmann > 0.0)) fail("stefan_boltzmann must be > 0");
  if (!(emissivity > 0.0 && emissivity <= 1.0)) fail("emissivity must be in (0, 1]");
  if (!(d_th_radiation > 0.0)) fail("d_th_radiation must be > 0");
  if (!(ember.v_ref > 0.0 && ember.lambda0 > 0.0 && ember.volume_ref > 0.0 &&
        ember.volume_exponent > 0.0 && ember.radiation_timing_sigma > 0.0)) {
    fail("ember parameters must all be > 0");
  }
}

double wind_correlation(double edge_bearing_deg, double wind_direction_deg) {
  const double delta = angular_difference(edge_bearing_deg, wind_direction_deg);
  if (delta >= 90.0) return 0.0;
  // Exact values at the common table angles keep the boundary cases crisp.
  if (delta == 0.0) return 1.0;
  if (delta == 60.0) return 0.5;
  return std::cos(delta * kDeg);
}

double flame_angle(double flame_height, double wind_speed, double gravity) {
  if (!(flame_height > 0.0)) throw ValidationError("flame_angle: flame height must be > 0");
  return std::atan(std::sqrt(1.5 * wind_speed * wind_speed / (gravity * flame_height)));
}

double convection_distance(double flame_height, double f_cc, const Environment& env) {
  if (!(flame_height > 0.0) || f_cc <= 0.0) return 0.0;
  return f_cc * flame_height * std::tan(flame_angle(flame_height, env.wind_speed, env.gravity));
}

double convection_probability(double d, double flame_height, double f_cc,
                              const Environment& env) {
  if (d < 0.0) throw ValidationError("convection_probability: negative distance");
  return d <= convection_distance(flame_height, f_cc, env) ? 1.0 : 0.0;
}

double incident_flux(double target_area, double d_min, double t_flame, double t_ambient,
                     const Environment& env) {
  if (!(d_min > 0.0)) throw ValidationError("incident_flux: degenerate distance");
  if (!(target_area > 0.0)) throw ValidationError("incident_flux: area must be > 0");
  const double view = target_area / (std::numbers::pi * d_min * d_min);
  const double net = std::pow(t_flame, 4) - std::pow(t_ambient, 4);
  const double watts = view * env.stefan_boltzmann * env.emissivity * net;
  return std::max(0.0, watts / 1000.0);
}

std::optional<double> ignition_time(double flux, const MaterialSample& mat) {
  if (!(flux > mat.q_critical)) return std::nullopt;
  return mat.ftp / std::pow(flux - mat.q_critical, mat.n);
}

double radiation_probability(double d_min, double residence_time,
                             std::optional<double> t_ig, const Environment& env) {
  if (!(d_min > 0.0)) throw ValidationError("radiation_probability: degenerate distance");
  if (d_min > env.d_th_radiation || !t_ig || residence_time < *t_ig) return 0.0;
  const double cdf = normal_cdf(residence_time - *t_ig, env.ember.radiation_timing_sigma);
  return clamp01(env.ember.radiation_mode == RadiationMode::PaperLiteral ? 1.0 - cdf : cdf);
}

double ember_distribution(double volume, double d, double wind_speed, const EmberParams& p) {
  if (volume < 0.0 || d < 0.0) throw ValidationError("ember_distribution: negative input");
  if (volume == 0.0 || wind_speed <= 0.0) return 0.0;
  const double mass = std::min(1.0, std::pow(volume / p.volume_ref, p.volume_exponent));
  const double length = p.lambda0 * wind_speed / p.v_ref;
  return clamp01(mass * std::exp(-d / length));
}

double access_probability(std::span<const double> applicable_scores, double max_score) {
  if (applicable_scores.empty() || !(max_score > 0.0)) return 0.0;
  double sum = 0.0;
  for (double s : applicable_scores) sum += s;
  return clamp01(sum / static_cast<double>(applicable_scores.size()) / max_score);
}

double access_probability(const Node& target, const Catalog& catalog) {
  if (!target.is_building()) return 1.0;
  const std::array<double, 6> scores = {
      target.structural_at(StructuralSlot::DeckPorch),
      target.structural_at(StructuralSlot::Eaves),
      target.structural_at(StructuralSlot::Roof),
      target.structural_at(StructuralSlot::VentScreen),
      target.structural_at(StructuralSlot::Fence),
      target.structural_at(StructuralSlot::Window)};
  return access_probability(scores, catalog.max_feature_score());
}

double ember_probability(double g, double p_access, double f_cc) {
  return clamp01(g * p_access * f_cc);
}

double total_probability(double p_conv, double p_rad, double p_ember) {
  // 1 - (1 - p) can round below p; the max keeps the union >= every term.
  const double u = 1.0 - (1.0 - p_conv) * (1.0 - p_rad) * (1.0 - p_ember);
  return clamp01(std::max({u, p_conv, p_rad, p_ember}));
}

std::uint64_t edge_seed(std::uint64_t global_seed, const Node& source, const Node& target) {
  return mix_seed(mix_seed(global_seed, fnv1a64(source.id)), fnv1a64(target.id));
}

EdgeWeights monte_carlo_edge(const Node& source, const Node& target, const Environment& env,
                             const Catalog& catalog, int n_samples, std::uint64_t global_seed) {
  if (!source.burnable()) {
    throw ValidationError("monte_carlo_edge: NonBurnable source '" + source.id + "'");
  }
  if (source.id == target.id) throw ValidationError("monte_carlo_edge: self edge '" + source.id + "'");
  if (n_samples < 1) throw ValidationError("monte_carlo_edge: n_samples must be >= 1");

  const double d = distance(source.location, target.location);
  if (d == 0.0) {
    throw ValidationError("degenerate edge: '" + source.id + "' and '" + target.id + "' coincide");
  }
  const double f_cc = wind_correlation(bearing(source.location, target.location), env.wind_direction);
  const FlameParamRanges& flame = catalog.fuel_class_params(source.fuel_class);
  const MaterialProps& mat = catalog.material_props(target.material);
  const double rad_area = env.radiation_area == RadiationArea::Target ? target.area : source.area;

  // Ember spotting depends on no sampled quantity.
  const double p_ember = ember_probability(
      ember_distribution(source.volume, d, env.wind_speed, env.ember),
      access_probability(target, catalog), f_cc);

  Rng rng(edge_seed(global_seed, source, target));
  double sum_conv = 0.0, sum_rad = 0.0, sum_total = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const double h_f = flame.flame_length.sample(rng);
    const double t_r = flame.residence_time.sample(rng);
    const double t_f = flame.flame_temperature.sample(rng);
    const MaterialSample m{mat.q_critical.sample(rng), mat.ftp.sample(rng), mat.ftp_index_n.sample(rng)};
    const double t_a = env.ambient_temperature.sample(rng);

    const double p_conv = convection_probability(d, h_f, f_cc, env);
    double p_rad = 0.0;
    if (d <= env.d_th_radiation && rad_area > 0.0) {
      const double flux = incident_flux(rad_area, d, t_f, t_a, env);
      p_rad = radiation_probability(d, t_r, ignition_time(flux, m), env);
    }
    sum_conv += p_conv;
    sum_rad += p_rad;
    sum_total += total_probability(p_conv, p_rad, p_ember);
  }
  const double n = static_cast<double>(n_samples);
  EdgeWeights w;
  w.p_conv = sum_conv / n;
  w.p_rad = sum_rad / n;
  w.p_ember = p_ember;
  // Each sampled union dominates its terms; the max keeps that true after
  // the averages round.
  w.p_total = clamp01(std::max({sum_total / n, w.p_conv, w.p_rad, w.p_ember}));
  return w;
}

}  // namespace wuigraph
