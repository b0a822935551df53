#pragma once

// Two-parameter binomial GLM (intercept + slope) with logistic or probit
// link, fitted by iteratively reweighted least squares on a raw or
// log-transformed process-parameter axis. The axis is centered and scaled
// internally for conditioning; coefficients are reported on the original
// scale.

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "podeval/errors.hpp"
#include "podeval/specfun.hpp"

namespace podeval {

enum class link_function { logit, probit };
enum class axis_transform { cartesian, logarithmic };

inline const char* to_string(link_function l) {
  return l == link_function::logit ? "logit" : "probit";
}
inline const char* to_string(axis_transform a) {
  return a == axis_transform::cartesian ? "cartesian" : "logarithmic";
}

struct trial_point {
  double a = 0.0;  // process-parameter value, task units
  int hits = 0;
  int trials = 0;
};

// Grouped binomial observations keyed by process-parameter value.
struct trial_set {
  std::vector<trial_point> points;

  void validate() const {
    if (points.size() < 2) throw bad_domain("trial_set: needs at least 2 points");
    std::set<double> distinct;
    for (const auto& p : points) {
      if (!std::isfinite(p.a)) throw bad_domain("trial_set: a must be finite");
      if (p.trials < 1) throw bad_domain("trial_set: trials must be >= 1");
      if (p.hits < 0 || p.hits > p.trials)
        throw bad_domain("trial_set: hits must lie in [0, trials]");
      distinct.insert(p.a);
    }
    if (distinct.size() < 2) throw bad_domain("trial_set: needs at least 2 distinct a values");
  }
};

struct fitted_glm {
  double b0 = 0.0;
  double b1 = 0.0;
  link_function link = link_function::logit;
  axis_transform axis = axis_transform::cartesian;
  double log_likelihood = 0.0;  // binomial kernel, no C(t,h) terms
  double deviance = 0.0;
  bool converged = false;
  bool separation_flag = false;
  int iterations = 0;
};

inline double transform_axis(axis_transform axis, double a) {
  if (axis == axis_transform::cartesian) return a;
  if (!(a > 0.0)) throw non_positive_axis("logarithmic axis requires a > 0");
  return std::log(a);
}

inline double inverse_axis(axis_transform axis, double x) {
  return axis == axis_transform::cartesian ? x : std::exp(x);
}

inline double link_inverse(link_function link, double eta) {
  if (link == link_function::logit) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
  }
  return specfun::normal_cdf(eta);
}

inline double link_forward(link_function link, double p) {
  if (!(p > 0.0 && p < 1.0)) throw bad_domain("link_forward: requires p in (0,1)");
  if (link == link_function::logit) return std::log(p / (1.0 - p));
  return specfun::normal_quantile(p);
}

// derivative of the inverse link (density of the link distribution)
inline double link_density(link_function link, double eta) {
  if (link == link_function::logit) {
    const double mu = link_inverse(link_function::logit, eta);
    return mu * (1.0 - mu);
  }
  return specfun::normal_pdf(eta);
}

namespace detail {

// log mu and log(1-mu) evaluated without forming mu first
inline double log_mu(link_function link, double eta) {
  if (link == link_function::logit)
    return eta >= 0.0 ? -std::log1p(std::exp(-eta)) : eta - std::log1p(std::exp(eta));
  const double phi = specfun::normal_cdf(eta);
  return phi > 0.0 ? std::log(phi) : -std::numeric_limits<double>::infinity();
}

inline double log_1m_mu(link_function link, double eta) { return log_mu(link, -eta); }

// Transformed design kept alongside the responses; built once per fit or
// bound computation.
struct glm_design {
  std::vector<double> x;  // transformed axis values
  std::vector<double> hits;
  std::vector<double> trials;
  link_function link = link_function::logit;

  static glm_design build(const trial_set& data, link_function link, axis_transform axis) {
    data.validate();
    glm_design d;
    d.link = link;
    d.x.reserve(data.points.size());
    d.hits.reserve(data.points.size());
    d.trials.reserve(data.points.size());
    for (const auto& p : data.points) {
      d.x.push_back(transform_axis(axis, p.a));
      d.hits.push_back(static_cast<double>(p.hits));
      d.trials.push_back(static_cast<double>(p.trials));
    }
    return d;
  }

  // binomial kernel log-likelihood at linear predictor eta_i = b0 + b1 x_i
  double log_likelihood(double b0, double b1) const {
    double ll = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double eta = b0 + b1 * x[i];
      if (hits[i] > 0.0) ll += hits[i] * log_mu(link, eta);
      const double misses = trials[i] - hits[i];
      if (misses > 0.0) ll += misses * log_1m_mu(link, eta);
    }
    return ll;
  }

  double saturated_log_likelihood() const {
    double ll = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double rate = hits[i] / trials[i];
      if (hits[i] > 0.0) ll += hits[i] * std::log(rate);
      const double misses = trials[i] - hits[i];
      if (misses > 0.0) ll += misses * std::log1p(-rate);
    }
    return ll;
  }
};

// Complete separation: some threshold in x splits hit-carrying points from
// miss-carrying points perfectly. Mixed points (0 < h < t) rule it out.
// Returns 0 for no separation, +1/-1 for the trend direction.
inline int separation_direction(const glm_design& d) {
  double max_miss = -std::numeric_limits<double>::infinity();
  double min_miss = std::numeric_limits<double>::infinity();
  double max_hit = -std::numeric_limits<double>::infinity();
  double min_hit = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    if (d.hits[i] > 0.0) {
      max_hit = std::max(max_hit, d.x[i]);
      min_hit = std::min(min_hit, d.x[i]);
    }
    if (d.hits[i] < d.trials[i]) {
      max_miss = std::max(max_miss, d.x[i]);
      min_miss = std::min(min_miss, d.x[i]);
    }
  }
  if (min_hit > max_miss) return +1;
  if (max_hit < min_miss) return -1;
  return 0;
}

}  // namespace detail

// Maximum-likelihood fit. Degenerate inputs (all hits, all misses, complete
// separation, or a diverging slope) are reported through separation_flag
// with converged = false and non-finite parameter estimates carrying the
// trend direction; they are never returned silently as numbers.
inline fitted_glm fit(const trial_set& data, link_function link, axis_transform axis) {
  const auto d = detail::glm_design::build(data, link, axis);
  fitted_glm out;
  out.link = link;
  out.axis = axis;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();

  double total_hits = 0.0, total_trials = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    total_hits += d.hits[i];
    total_trials += d.trials[i];
  }
  if (total_hits == 0.0 || total_hits == total_trials) {
    out.separation_flag = true;
    out.b0 = total_hits == 0.0 ? -inf : inf;
    out.b1 = nan;
    out.log_likelihood = 0.0;  // the limiting fit is perfect
    out.deviance = nan;
    return out;
  }
  if (const int dir = detail::separation_direction(d); dir != 0) {
    out.separation_flag = true;
    out.b0 = nan;
    out.b1 = dir > 0 ? inf : -inf;
    out.log_likelihood = 0.0;
    out.deviance = nan;
    return out;
  }

  // standardize the transformed axis (trial-weighted)
  double mean = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) mean += d.trials[i] * d.x[i];
  mean /= total_trials;
  double var = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i)
    var += d.trials[i] * (d.x[i] - mean) * (d.x[i] - mean);
  const double scale = std::sqrt(var / total_trials);
  std::vector<double> u(d.x.size());
  for (std::size_t i = 0; i < d.x.size(); ++i) u[i] = (d.x[i] - mean) / scale;

  auto ll_at = [&](double g0, double g1) {
    double ll = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double eta = g0 + g1 * u[i];
      if (d.hits[i] > 0.0) ll += d.hits[i] * detail::log_mu(link, eta);
      const double misses = d.trials[i] - d.hits[i];
      if (misses > 0.0) ll += misses * detail::log_1m_mu(link, eta);
    }
    return ll;
  };

  double g0 = link_forward(link, std::clamp(total_hits / total_trials, 0.01, 0.99));
  double g1 = 0.0;
  double ll = ll_at(g0, g1);

  const double mu_floor = 1e-10;
  bool converged = false;
  int iter = 0;
  for (; iter < 100; ++iter) {
    // weighted least squares on the working response
    double sw = 0.0, swu = 0.0, swuu = 0.0, swz = 0.0, swuz = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double eta = g0 + g1 * u[i];
      const double mu = std::clamp(link_inverse(link, eta), mu_floor, 1.0 - mu_floor);
      const double dmu = std::max(link_density(link, eta), 1e-300);
      const double w = d.trials[i] * dmu * dmu / (mu * (1.0 - mu));
      const double z = eta + (d.hits[i] / d.trials[i] - mu) / dmu;
      sw += w;
      swu += w * u[i];
      swuu += w * u[i] * u[i];
      swz += w * z;
      swuz += w * u[i] * z;
    }
    const double det = sw * swuu - swu * swu;
    if (!(std::fabs(det) > 0.0)) break;
    const double t1 = (sw * swuz - swu * swz) / det;
    const double t0 = (swz - t1 * swu) / sw;

    // step-halving keeps the log-likelihood non-decreasing per iteration
    double lambda = 1.0;
    double n0 = t0, n1 = t1, ll_new = ll_at(n0, n1);
    int halvings = 0;
    while (ll_new < ll && halvings < 50) {
      lambda *= 0.5;
      n0 = g0 + lambda * (t0 - g0);
      n1 = g1 + lambda * (t1 - g1);
      ll_new = ll_at(n0, n1);
      ++halvings;
    }
    if (ll_new < ll) break;  // no ascent direction left: already at the optimum

    const double step = std::hypot(n0 - g0, n1 - g1);
    const double gain = ll_new - ll;
    g0 = n0;
    g1 = n1;
    ll = ll_new;
    if (gain < 1e-10 && step < 1e-8) {
      converged = true;
      ++iter;
      break;
    }
  }
  out.iterations = iter;

  if (std::fabs(g1) > 1e4) {
    // quasi-separation: the slope diverges on the standardized axis
    out.separation_flag = true;
    out.b0 = nan;
    out.b1 = g1 > 0.0 ? inf : -inf;
    out.log_likelihood = ll;
    out.deviance = nan;
    return out;
  }

  out.converged = converged;
  out.b1 = g1 / scale;
  out.b0 = g0 - g1 * mean / scale;
  out.log_likelihood = d.log_likelihood(out.b0, out.b1);
  out.deviance = std::max(0.0, 2.0 * (d.saturated_log_likelihood() - out.log_likelihood));
  return out;
}

// Binomial deviance of a fitted model against the data that produced it,
// with the 0 * ln 0 = 0 convention.
inline double deviance_of(const trial_set& data, const fitted_glm& model) {
  const auto d = detail::glm_design::build(data, model.link, model.axis);
  double dev = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double mu = link_inverse(model.link, model.b0 + model.b1 * d.x[i]);
    const double t = d.trials[i], h = d.hits[i];
    if (h > 0.0) dev += h * std::log(h / (t * mu));
    if (t - h > 0.0) dev += (t - h) * std::log((t - h) / (t * (1.0 - mu)));
  }
  return std::max(0.0, 2.0 * dev);
}

// Exact binomial kernel log-likelihood at arbitrary coefficients; the
// likelihood-ratio machinery sweeps this.
inline double profile_log_likelihood(const trial_set& data, double b0, double b1,
                                     link_function link, axis_transform axis) {
  return detail::glm_design::build(data, link, axis).log_likelihood(b0, b1);
}

}  // namespace podeval
