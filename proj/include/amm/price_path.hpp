#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <variant>
#include <vector>

#include "amm/rng.hpp"

namespace amm {

// A price series on a uniform grid.  values[0] is the initial price and the
// grid spacing dt is measured in days.
struct PricePath {
  double dt = 0.0;
  std::vector<double> values;
  int64_t t0_ms = 0;  // wall-clock anchor when loaded from data, else 0

  int steps() const { return int(values.size()) - 1; }
};

// Geometric Brownian motion: log increments (mu - sigma^2/2) dt + sigma sqrt(dt) Z.
struct GbmParams {
  double sigma = 0.0;  // volatility per sqrt(day)
  double mu = 0.0;     // drift per day
};

// Exponential Ornstein-Uhlenbeck: the log price mean-reverts to theta at
// rate kappa, discretized with an Euler step.
struct ExpOuParams {
  double kappa = 0.0;  // reversion rate per day
  double theta = 0.0;  // long-run log price
  double sigma = 0.0;
};

// A fixed observed series; every simulated path reuses it and paths differ
// only through their trade-order coin flips.
struct HistoricalSeries {
  std::shared_ptr<const PricePath> path;
};

using PriceModel = std::variant<GbmParams, ExpOuParams, HistoricalSeries>;

namespace detail {

inline void check_path_args(double s0, double sigma, int n_steps, double dt) {
  if (!(s0 > 0.0) || !std::isfinite(s0))
    throw std::invalid_argument("initial price must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("sigma must be non-negative");
  if (n_steps < 1) throw std::invalid_argument("need at least one step");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("dt must be positive");
}

}  // namespace detail

inline PricePath sample_gbm(double s0, const GbmParams& g, int n_steps,
                            double dt, uint64_t seed, uint64_t path_index) {
  detail::check_path_args(s0, g.sigma, n_steps, dt);
  if (!std::isfinite(g.mu)) throw std::invalid_argument("mu must be finite");
  PricePath out;
  out.dt = dt;
  out.values.resize(n_steps + 1);
  out.values[0] = s0;
  double drift = (g.mu - 0.5 * g.sigma * g.sigma) * dt;
  double vol = g.sigma * std::sqrt(dt);
  for (int i = 1; i <= n_steps; ++i) {
    double z = rng::normal(seed, path_index, uint32_t(i), rng::kPriceStream);
    out.values[i] = out.values[i - 1] * std::exp(drift + vol * z);
  }
  return out;
}

inline PricePath sample_exp_ou(double s0, const ExpOuParams& p, int n_steps,
                               double dt, uint64_t seed, uint64_t path_index) {
  detail::check_path_args(s0, p.sigma, n_steps, dt);
  if (!(p.kappa >= 0.0) || !std::isfinite(p.kappa) || !std::isfinite(p.theta))
    throw std::invalid_argument("bad mean-reversion parameters");
  if (p.kappa * dt >= 1.0)
    throw std::invalid_argument("kappa*dt >= 1: Euler step unstable, reduce dt");
  PricePath out;
  out.dt = dt;
  out.values.resize(n_steps + 1);
  out.values[0] = s0;
  double vol = p.sigma * std::sqrt(dt);
  double log_price = std::log(s0);
  for (int i = 1; i <= n_steps; ++i) {
    double z = rng::normal(seed, path_index, uint32_t(i), rng::kPriceStream);
    log_price += p.kappa * (p.theta - log_price) * dt + vol * z;
    out.values[i] = std::exp(log_price);
  }
  return out;
}

inline PricePath make_path(const PriceModel& model, double s0, int n_steps,
                           double dt, uint64_t seed, uint64_t path_index) {
  if (const auto* g = std::get_if<GbmParams>(&model))
    return sample_gbm(s0, *g, n_steps, dt, seed, path_index);
  if (const auto* p = std::get_if<ExpOuParams>(&model))
    return sample_exp_ou(s0, *p, n_steps, dt, seed, path_index);
  const auto& h = std::get<HistoricalSeries>(model);
  if (!h.path) throw std::invalid_argument("historical series not set");
  return *h.path;
}

}  // namespace amm
