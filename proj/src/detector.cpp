#include "fsoacq/detector.hpp"

#include <cmath>
#include <stdexcept>

#include "fsoacq/numeric.hpp"

namespace fsoacq {

std::vector<double> detector_weights(const ArrayGeometry& geom,
                                     const BeamParams& assumed_beam,
                                     const ChannelParams& chan) {
  validate(assumed_beam);
  validate(chan);
  if (!(chan.noise_intensity_W_m2 > 0.0))
    throw std::invalid_argument(
        "detector_weights: noise intensity must be > 0 (SNR undefined)");
  const double noise_per_cell = chan.noise_intensity_W_m2 * cell_area(geom);
  std::vector<double> weights = cell_signal_fluxes(geom, assumed_beam);
  for (double& w : weights) w = std::log1p(w / noise_per_cell);
  return weights;
}

DetectorModel build_detector(const ArrayGeometry& geom,
                             const BeamParams& assumed_beam,
                             const ChannelParams& chan, double gamma) {
  DetectorModel model;
  model.weights = detector_weights(geom, assumed_beam, chan);
  model.gamma0 = gamma + photon_count_factor(chan) * assumed_beam.power_W;
  return model;
}

DetectorModel build_detector_gamma0(const ArrayGeometry& geom,
                                    const BeamParams& assumed_beam,
                                    const ChannelParams& chan,
                                    double gamma0) {
  DetectorModel model;
  model.weights = detector_weights(geom, assumed_beam, chan);
  model.gamma0 = gamma0;
  return model;
}

double detection_statistic(const DetectorModel& model,
                           std::span<const std::int64_t> counts) {
  if (counts.size() != model.weights.size())
    throw std::invalid_argument("detection_statistic: count/weight size mismatch");
  std::vector<double> terms(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    terms[i] = model.weights[i] * static_cast<double>(counts[i]);
  return neumaier_sum(terms);
}

bool decide(const DetectorModel& model, std::span<const std::int64_t> counts) {
  return detection_statistic(model, counts) >= model.gamma0;
}

MomentSummary compute_moments(const ArrayGeometry& geom,
                              const BeamParams& true_beam,
                              const ChannelParams& chan,
                              std::span<const double> weights) {
  if (static_cast<int>(weights.size()) != cell_count(geom))
    throw std::invalid_argument("compute_moments: weight count mismatch");
  validate(true_beam);
  validate(chan);
  const double k = photon_count_factor(chan);
  const double noise_counts = k * chan.noise_intensity_W_m2 * cell_area(geom);

  const std::size_t m_count = weights.size();
  const std::vector<double> flux = cell_signal_fluxes(geom, true_beam);
  std::vector<double> t_mu_s(m_count), t_var_s(m_count), t_mu_n(m_count),
      t_var_n(m_count), t_w(m_count), t_w2(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    const double w = weights[m];
    const double mean_h1 = k * flux[m] + noise_counts;
    t_mu_s[m] = w * mean_h1;
    t_var_s[m] = w * w * mean_h1;
    t_mu_n[m] = w * noise_counts;
    t_var_n[m] = w * w * noise_counts;
    t_w[m] = w;
    t_w2[m] = w * w;
  }
  MomentSummary mom;
  mom.mu_s = neumaier_sum(t_mu_s);
  mom.var_s = neumaier_sum(t_var_s);
  mom.mu_n = neumaier_sum(t_mu_n);
  mom.var_n = neumaier_sum(t_var_n);
  const double sum_w = neumaier_sum(t_w);
  const double sum_w2 = neumaier_sum(t_w2);
  if (!(sum_w2 > 0.0))
    throw std::domain_error("compute_moments: all detector weights are zero");
  mom.k_s = mom.var_s > 0.0 ? mom.mu_s / mom.var_s : 0.0;
  mom.k_n = sum_w / sum_w2;
  return mom;
}

}  // namespace fsoacq
