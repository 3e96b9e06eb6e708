#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "flexplan/common.hpp"

namespace flexplan {

/// Wind power samples, MW, indexed [scenario][day r][hour t][plant z].
struct ScenarioSet {
  int scenarios = 0;
  int days = 0;
  int hours = 0;
  int plants = 0;
  std::vector<double> values;  // row-major over (s, r, t, z)

  double& at(int s, int r, int t, int z) {
    return values[((static_cast<std::size_t>(s) * days + r) * hours + t) * plants + z];
  }
  double at(int s, int r, int t, int z) const {
    return values[((static_cast<std::size_t>(s) * days + r) * hours + t) * plants + z];
  }
  void resize() {
    values.assign(static_cast<std::size_t>(scenarios) * days * hours * plants, 0.0);
  }
};

/// Clustered daily demand profiles with their annual weights.
struct RepresentativeDaySet {
  int days = 0;
  int hours = 0;
  std::vector<double> electric_mw;  // [r][t]
  std::vector<double> heat_mw;      // [r][t]
  std::vector<double> weight;       // k_r, days represented
  double wcss = 0.0;                // within-cluster sum of squares of the clustering

  double electric(int r, int t) const { return electric_mw[static_cast<std::size_t>(r) * hours + t]; }
  double heat(int r, int t) const { return heat_mw[static_cast<std::size_t>(r) * hours + t]; }
};

/// First and second moments of the wind forecast errors, plus the lag-1
/// cross-covariance blocks used by the inter-temporal constraints.
struct WindMoments {
  int days = 0;
  int hours = 0;
  int plants = 0;
  std::vector<Eigen::VectorXd> mean;        // [r*hours+t], size Z
  std::vector<Eigen::MatrixXd> cov;         // [r*hours+t], Z x Z
  std::vector<Eigen::MatrixXd> lag_cov;     // [r*hours+t], t>=1: E[w_{t-1} w_t^T]; t=0 unused
  std::vector<Eigen::MatrixXd> cov_sqrt;    // symmetric PSD square roots of cov
  int joint_repairs = 0;                    // joint blocks that needed eigenvalue clamping

  int index(int r, int t) const { return r * hours + t; }
  /// sqrt(1' Sigma 1), the aggregated error standard deviation.
  double aggregate_sigma(int r, int t) const;
};

/// Wind scenario CSV layout: columns scenario, day, hour, plant, mw. Indices
/// are zero-based and the index space must be rectangular.
ScenarioSet ingest_scenarios(const std::string& path);

/// Daily profiles for clustering: one row per day, columns are the
/// concatenated (and caller-normalized) hourly features.
struct DailyProfiles {
  int days = 0;
  int features = 0;  // per-day feature count
  std::vector<double> values;  // [day][feature]
};

struct KmeansResult {
  Eigen::MatrixXd centroids;       // k x features
  std::vector<int> assignment;     // per day
  std::vector<double> weight;      // cluster cardinalities
  double wcss = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding and restarts; deterministic under
/// the seed, best restart chosen by within-cluster sum of squares.
KmeansResult kmeans(const DailyProfiles& profiles, int k, std::uint64_t seed, int restarts = 50);

/// Clusters (electric, heat) day profiles into representative days. Each
/// feature column is max-normalized before clustering and centroids are
/// mapped back to MW.
RepresentativeDaySet cluster_representative_days(const std::vector<double>& electric,
                                                 const std::vector<double>& heat, int source_days,
                                                 int hours, int k, std::uint64_t seed);

/// Sample mean / unbiased covariance / lag-1 cross-covariance per (r, t).
WindMoments estimate_moments(const ScenarioSet& scenarios);

/// Joint covariance of (w_{r,t-1}, w_{r,t}), symmetrized and eigenvalue
/// clamped at zero. t is zero-based here: requires t >= 1.
Eigen::MatrixXd joint_covariance(const WindMoments& m, int r, int t, bool* repaired = nullptr);

/// Symmetric PSD square root with eigenvalue clamp at zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

/// Draws n scenarios with replacement.
ScenarioSet bootstrap_resample(const ScenarioSet& source, int n, std::uint64_t seed);

}  // namespace flexplan
