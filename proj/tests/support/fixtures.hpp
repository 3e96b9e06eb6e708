#pragma once

// Shared synthetic fixtures: a desk-scale integrated energy system with two
// representative days, eight hours and two wind plants, plus smaller
// variants for unit tests.

#include <Eigen/Dense>
#include <vector>

#include "flexplan/ies_model.hpp"
#include "flexplan/rng.hpp"

namespace flexplan::testing {

struct DeskData {
  IesInstance instance;
  ScenarioSet training;  // scenarios the moments were estimated from
};

/// AR(1)-correlated wind scenarios around the given hourly means.
inline ScenarioSet synthetic_wind(const std::vector<std::vector<double>>& mean_by_plant,
                                  int days, int hours, int scenarios,
                                  const Eigen::MatrixXd& cov, double lag_corr,
                                  std::uint64_t seed) {
  const int plants = static_cast<int>(mean_by_plant.size());
  ScenarioSet s;
  s.scenarios = scenarios;
  s.days = days;
  s.hours = hours;
  s.plants = plants;
  s.resize();
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  Rng rng(seed);
  for (int i = 0; i < scenarios; ++i) {
    for (int r = 0; r < days; ++r) {
      Eigen::VectorXd err = Eigen::VectorXd::Zero(plants);
      for (int t = 0; t < hours; ++t) {
        Eigen::VectorXd u(plants);
        for (int z = 0; z < plants; ++z) u(z) = rng.normal();
        if (t == 0) {
          err = chol * u;
        } else {
          err = lag_corr * err + std::sqrt(1.0 - lag_corr * lag_corr) * (chol * u);
        }
        for (int z = 0; z < plants; ++z) {
          s.at(i, r, t, z) = std::max(0.0, mean_by_plant[z][r * hours + t] + err(z));
        }
      }
    }
  }
  return s;
}

inline RepresentativeDaySet desk_days() {
  RepresentativeDaySet d;
  d.days = 2;
  d.hours = 8;
  d.electric_mw = {0.060, 0.055, 0.050, 0.050, 0.055, 0.065, 0.075, 0.070,
                   0.070, 0.065, 0.060, 0.060, 0.065, 0.075, 0.085, 0.080};
  d.heat_mw = {0.110, 0.115, 0.120, 0.125, 0.120, 0.115, 0.110, 0.105,
               0.050, 0.050, 0.045, 0.045, 0.050, 0.055, 0.060, 0.055};
  d.weight = {180.0, 185.0};
  return d;
}

inline std::vector<std::vector<double>> desk_wind_means() {
  return {{0.050, 0.055, 0.060, 0.065, 0.060, 0.050, 0.045, 0.040,
           0.030, 0.032, 0.035, 0.040, 0.038, 0.033, 0.030, 0.028},
          {0.040, 0.045, 0.050, 0.055, 0.050, 0.045, 0.040, 0.035,
           0.025, 0.027, 0.030, 0.032, 0.030, 0.027, 0.025, 0.022}};
}

inline Eigen::MatrixXd desk_wind_cov() {
  Eigen::MatrixXd cov(2, 2);
  const double s0 = 0.004, s1 = 0.003, rho = 0.3;
  cov << s0 * s0, rho * s0 * s1, rho * s0 * s1, s1 * s1;
  return cov;
}

/// The documented desk instance: 2 representative days x 8 hours x 2 plants.
inline DeskData desk_instance(double epsilon = 0.05, int scenarios = 300,
                              std::uint64_t seed = 2024) {
  DeskData d;
  CellParameters cell;  // defaults
  const auto region = build_cell_region(cell);
  IesParameters params;
  params.epsilon = epsilon;
  params.bits = 5;
  ChpRegion chp;
  const auto days = desk_days();
  d.training = synthetic_wind(desk_wind_means(), days.days, days.hours, scenarios,
                              desk_wind_cov(), 0.5, seed);
  const auto moments = estimate_moments(d.training);
  d.instance = build_instance(params, chp, cell, region, days, moments, 70.0);
  return d;
}

/// Compiler fixture: 1 day x 4 hours x 2 plants with a 4-bit stack.
inline DeskData tiny_instance(double epsilon = 0.05) {
  DeskData d;
  CellParameters cell;
  const auto region = build_cell_region(cell);
  IesParameters params;
  params.epsilon = epsilon;
  params.bits = 4;
  ChpRegion chp;
  RepresentativeDaySet days;
  days.days = 1;
  days.hours = 4;
  days.electric_mw = {0.060, 0.055, 0.050, 0.055};
  days.heat_mw = {0.110, 0.115, 0.120, 0.115};
  days.weight = {365.0};
  std::vector<std::vector<double>> means = {{0.050, 0.055, 0.060, 0.055},
                                            {0.040, 0.045, 0.050, 0.045}};
  d.training = synthetic_wind(means, 1, 4, 200, desk_wind_cov(), 0.5, 7);
  const auto moments = estimate_moments(d.training);
  d.instance = build_instance(params, chp, cell, region, days, moments, 70.0);
  return d;
}

}  // namespace flexplan::testing
