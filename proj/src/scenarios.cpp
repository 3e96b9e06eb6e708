#include "flexplan/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flexplan/csv.hpp"
#include "flexplan/rng.hpp"

namespace flexplan {

double WindMoments::aggregate_sigma(int r, int t) const {
  const Eigen::MatrixXd& s = cov[index(r, t)];
  return std::sqrt(std::max(0.0, s.sum()));
}

ScenarioSet ingest_scenarios(const std::string& path) {
  const auto table = csv::read_numeric(path);
  const int cs = table.require_column("scenario", path);
  const int cr = table.require_column("day", path);
  const int ct = table.require_column("hour", path);
  const int cz = table.require_column("plant", path);
  const int cv = table.require_column("mw", path);
  if (table.rows.empty()) throw ingest_error(path + ": no scenarios");

  ScenarioSet set;
  for (const auto& row : table.rows) {
    set.scenarios = std::max(set.scenarios, static_cast<int>(row[cs]) + 1);
    set.days = std::max(set.days, static_cast<int>(row[cr]) + 1);
    set.hours = std::max(set.hours, static_cast<int>(row[ct]) + 1);
    set.plants = std::max(set.plants, static_cast<int>(row[cz]) + 1);
  }
  set.resize();
  std::vector<char> seen(set.values.size(), 0);
  int lineno = 1;
  for (const auto& row : table.rows) {
    ++lineno;
    const int s = static_cast<int>(row[cs]);
    const int r = static_cast<int>(row[cr]);
    const int t = static_cast<int>(row[ct]);
    const int z = static_cast<int>(row[cz]);
    if (s < 0 || r < 0 || t < 0 || z < 0) {
      throw ingest_error(path + ": negative index at row " + std::to_string(lineno));
    }
    if (row[cv] < 0.0) {
      throw ingest_error(path + ": negative power at scenario " + std::to_string(s) + ", day " +
                         std::to_string(r) + ", hour " + std::to_string(t) + ", plant " +
                         std::to_string(z));
    }
    set.at(s, r, t, z) = row[cv];
    seen[((static_cast<std::size_t>(s) * set.days + r) * set.hours + t) * set.plants + z] = 1;
  }
  for (std::size_t idx = 0; idx < seen.size(); ++idx) {
    if (!seen[idx]) {
      throw ingest_error(path + ": missing entry, index space is not rectangular (flat index " +
                         std::to_string(idx) + ")");
    }
  }
  return set;
}

namespace {

double sq_dist(const double* a, const double* b, int n) {
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

KmeansResult lloyd_once(const DailyProfiles& p, int k, Rng& rng) {
  const int n = p.days, f = p.features;
  std::vector<double> centroids(static_cast<std::size_t>(k) * f);

  // k-means++ seeding
  std::vector<double> d2(n, std::numeric_limits<double>::max());
  int first = static_cast<int>(rng.uniform_index(n));
  for (int j = 0; j < f; ++j) centroids[j] = p.values[first * f + j];
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(&p.values[i * f], &centroids[(c - 1) * f], f));
      total += d2[i];
    }
    int pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rng.uniform_index(n));
    }
    for (int j = 0; j < f; ++j) centroids[c * f + j] = p.values[pick * f + j];
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 500; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(&p.values[i * f], &centroids[c * f], f);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    std::fill(centroids.begin(), centroids.end(), 0.0);
    std::vector<int> count(k, 0);
    for (int i = 0; i < n; ++i) {
      ++count[assign[i]];
      for (int j = 0; j < f; ++j) centroids[assign[i] * f + j] += p.values[i * f + j];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) {
        for (int j = 0; j < f; ++j) centroids[c * f + j] /= count[c];
      } else {
        // reassign the farthest point to the empty cluster
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d = sq_dist(&p.values[i * f], &centroids[assign[i] * f], f);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        for (int j = 0; j < f; ++j) centroids[c * f + j] = p.values[far * f + j];
        assign[far] = c;
      }
    }
  }

  KmeansResult res;
  res.centroids.resize(k, f);
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < f; ++j) res.centroids(c, j) = centroids[c * f + j];
  }
  res.assignment = assign;
  res.weight.assign(k, 0.0);
  res.wcss = 0.0;
  for (int i = 0; i < n; ++i) {
    res.weight[assign[i]] += 1.0;
    res.wcss += sq_dist(&p.values[i * f], &centroids[assign[i] * f], f);
  }
  return res;
}

}  // namespace

KmeansResult kmeans(const DailyProfiles& profiles, int k, std::uint64_t seed, int restarts) {
  if (k < 1) throw config_error("kmeans: k must be >= 1");
  if (k > profiles.days) throw config_error("kmeans: k exceeds number of profiles");
  Rng rng(seed);
  KmeansResult best;
  best.wcss = std::numeric_limits<double>::max();
  for (int r = 0; r < restarts; ++r) {
    auto candidate = lloyd_once(profiles, k, rng);
    if (candidate.wcss < best.wcss) best = std::move(candidate);
  }
  return best;
}

RepresentativeDaySet cluster_representative_days(const std::vector<double>& electric,
                                                 const std::vector<double>& heat, int source_days,
                                                 int hours, int k, std::uint64_t seed) {
  if (static_cast<int>(electric.size()) != source_days * hours ||
      static_cast<int>(heat.size()) != source_days * hours) {
    throw dimension_error("cluster_representative_days: profile size mismatch");
  }
  if (hours < 2) throw config_error("cluster_representative_days: need at least 2 hours");

  // normalize each series by its max so that electric and heat weigh equally
  double emax = 0.0, hmax = 0.0;
  for (double v : electric) emax = std::max(emax, std::abs(v));
  for (double v : heat) hmax = std::max(hmax, std::abs(v));
  if (emax == 0.0) emax = 1.0;
  if (hmax == 0.0) hmax = 1.0;

  DailyProfiles p;
  p.days = source_days;
  p.features = 2 * hours;
  p.values.resize(static_cast<std::size_t>(source_days) * p.features);
  for (int d = 0; d < source_days; ++d) {
    for (int t = 0; t < hours; ++t) {
      p.values[d * p.features + t] = electric[d * hours + t] / emax;
      p.values[d * p.features + hours + t] = heat[d * hours + t] / hmax;
    }
  }

  const auto res = kmeans(p, k, seed);

  RepresentativeDaySet days;
  days.days = k;
  days.hours = hours;
  days.wcss = res.wcss;
  days.weight = res.weight;
  days.electric_mw.resize(static_cast<std::size_t>(k) * hours);
  days.heat_mw.resize(static_cast<std::size_t>(k) * hours);
  for (int r = 0; r < k; ++r) {
    for (int t = 0; t < hours; ++t) {
      days.electric_mw[r * hours + t] = res.centroids(r, t) * emax;
      days.heat_mw[r * hours + t] = res.centroids(r, hours + t) * hmax;
    }
  }
  return days;
}

WindMoments estimate_moments(const ScenarioSet& sc) {
  if (sc.scenarios < 2) {
    throw config_error("estimate_moments: need at least 2 scenarios for the unbiased estimator");
  }
  WindMoments m;
  m.days = sc.days;
  m.hours = sc.hours;
  m.plants = sc.plants;
  const int cells = sc.days * sc.hours;
  m.mean.resize(cells);
  m.cov.resize(cells);
  m.lag_cov.resize(cells);
  m.cov_sqrt.resize(cells);

  const int S = sc.scenarios;
  const int Z = sc.plants;
  for (int r = 0; r < sc.days; ++r) {
    for (int t = 0; t < sc.hours; ++t) {
      const int idx = m.index(r, t);
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(Z);
      for (int s = 0; s < S; ++s) {
        for (int z = 0; z < Z; ++z) mean(z) += sc.at(s, r, t, z);
      }
      mean /= S;
      m.mean[idx] = mean;

      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(Z, Z);
      for (int s = 0; s < S; ++s) {
        Eigen::VectorXd e(Z);
        for (int z = 0; z < Z; ++z) e(z) = sc.at(s, r, t, z) - mean(z);
        cov += e * e.transpose();
      }
      cov /= (S - 1);
      m.cov[idx] = 0.5 * (cov + cov.transpose());
      m.cov_sqrt[idx] = psd_sqrt(m.cov[idx]);

      if (t >= 1) {
        Eigen::MatrixXd lag = Eigen::MatrixXd::Zero(Z, Z);
        for (int s = 0; s < S; ++s) {
          Eigen::VectorXd prev(Z), cur(Z);
          for (int z = 0; z < Z; ++z) {
            prev(z) = sc.at(s, r, t - 1, z) - m.mean[m.index(r, t - 1)](z);
            cur(z) = sc.at(s, r, t, z) - mean(z);
          }
          lag += prev * cur.transpose();
        }
        m.lag_cov[idx] = lag / (S - 1);
      } else {
        m.lag_cov[idx] = Eigen::MatrixXd::Zero(Z, Z);
      }
    }
  }

  // count joint blocks that need repair, for the audit report
  for (int r = 0; r < m.days; ++r) {
    for (int t = 1; t < m.hours; ++t) {
      bool repaired = false;
      joint_covariance(m, r, t, &repaired);
      if (repaired) ++m.joint_repairs;
    }
  }
  return m;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::MatrixXd joint_covariance(const WindMoments& m, int r, int t, bool* repaired) {
  if (t < 1) throw dimension_error("joint_covariance: requires t >= 1 (zero-based)");
  const int Z = m.plants;
  Eigen::MatrixXd joint(2 * Z, 2 * Z);
  const Eigen::MatrixXd& lag = m.lag_cov[m.index(r, t)];
  joint.topLeftCorner(Z, Z) = m.cov[m.index(r, t - 1)];
  joint.bottomRightCorner(Z, Z) = m.cov[m.index(r, t)];
  joint.topRightCorner(Z, Z) = lag;
  joint.bottomLeftCorner(Z, Z) = lag.transpose();
  joint = 0.5 * (joint + joint.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(joint);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (repaired) *repaired = false;
  if (min_eig < 0.0) {
    if (repaired) *repaired = true;
    Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0);
    joint = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
    joint = 0.5 * (joint + joint.transpose()).eval();
  }
  return joint;
}

ScenarioSet bootstrap_resample(const ScenarioSet& source, int n, std::uint64_t seed) {
  if (source.scenarios == 0) throw config_error("bootstrap_resample: empty source set");
  if (n <= 0) throw config_error("bootstrap_resample: sample count must be positive");
  Rng rng(seed);
  ScenarioSet out;
  out.scenarios = n;
  out.days = source.days;
  out.hours = source.hours;
  out.plants = source.plants;
  out.resize();
  const std::size_t block =
      static_cast<std::size_t>(source.days) * source.hours * source.plants;
  for (int s = 0; s < n; ++s) {
    const auto pick = rng.uniform_index(source.scenarios);
    std::copy_n(source.values.begin() + pick * block, block, out.values.begin() + s * block);
  }
  return out;
}

}  // namespace flexplan
