#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "ennreg/errors.hpp"
#include "ennreg/train.hpp"

namespace ennreg {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += (a[k] - b[k]) * (a[k] - b[k]);
  return d;
}

std::size_t nearest(const Matrix& centers, std::span<const double> x, double* dist = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.rows(); ++c) {
    const double d = sq_dist(centers.row(c), x);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

Matrix seed_plus_plus(const Matrix& x, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = x.rows();
  Matrix centers(0, x.cols());
  std::vector<bool> chosen(n, false);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t first = pick(rng);
  centers.append_row(x.row(first));
  chosen[first] = true;

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(x.row(i), x.row(first));

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (centers.rows() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t next = n;
    if (total > 0.0) {
      double target = unit(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        next = i;
        target -= d2[i];
        if (target < 0.0) break;
      }
    } else {
      // Remaining points all coincide with chosen centers.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) free.push_back(i);
      next = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    }
    chosen[next] = true;
    centers.append_row(x.row(next));
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(x.row(i), x.row(next)));
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(const Matrix& x, std::size_t clusters, std::uint64_t seed) {
  const std::size_t n = x.rows();
  if (clusters == 0) throw InputError("k-means needs at least one cluster");
  if (n < clusters) {
    std::ostringstream msg;
    msg << "k-means needs at least as many rows (" << n << ") as clusters (" << clusters << ")";
    throw InputError(msg.str());
  }
  const std::size_t p = x.cols();
  std::mt19937_64 rng(seed);

  KMeansResult res;
  res.centers = seed_plus_plus(x, clusters, rng);
  res.assignment.assign(n, 0);
  std::vector<double> dist(n);

  for (std::size_t iter = 0; iter < 100; ++iter) {
    res.iterations = iter + 1;
    for (std::size_t i = 0; i < n; ++i) res.assignment[i] = nearest(res.centers, x.row(i), &dist[i]);

    std::vector<std::size_t> counts(clusters, 0);
    for (const auto a : res.assignment) ++counts[a];
    // Repair empty clusters with the point farthest from its own center.
    for (std::size_t c = 0; c < clusters; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[res.assignment[i]] < 2) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      if (far == n) break;
      --counts[res.assignment[far]];
      res.assignment[far] = c;
      dist[far] = 0.0;
      ++counts[c];
    }

    Matrix updated(clusters, p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = updated.row(res.assignment[i]);
      const auto xi = x.row(i);
      for (std::size_t k = 0; k < p; ++k) row[k] += xi[k];
    }
    double moved = 0.0;
    for (std::size_t c = 0; c < clusters; ++c) {
      auto row = updated.row(c);
      if (counts[c] == 0) {
        std::copy(res.centers.row(c).begin(), res.centers.row(c).end(), row.begin());
        continue;
      }
      for (std::size_t k = 0; k < p; ++k) row[k] /= static_cast<double>(counts[c]);
      moved = std::max(moved, std::sqrt(sq_dist(row, res.centers.row(c))));
    }
    res.centers = std::move(updated);
    if (moved < 1e-6) break;
  }
  for (std::size_t i = 0; i < n; ++i) res.assignment[i] = nearest(res.centers, x.row(i));
  return res;
}

Model init_params(const Dataset& standardized, const Matrix& centers, const TrainConfig& cfg) {
  const std::size_t J = centers.rows();
  const std::size_t p = standardized.dim();
  if (J == 0) throw InputError("no centers to initialize from");
  if (centers.cols() != p) throw InputError("center dimension does not match the data");
  if (standardized.size() == 0) throw InputError("cannot initialize from an empty dataset");

  const double y_var = variance(standardized.response);
  const double y_mean = mean(standardized.response);
  // Positive floor for data with constant response.
  const double var_floor = std::max(1e-4 * y_var, 1e-8);

  std::vector<std::vector<double>> member_y(J);
  std::vector<double> dist_sum(J, 0.0);
  for (std::size_t i = 0; i < standardized.size(); ++i) {
    const auto x = standardized.features.row(i);
    double d2 = 0.0;
    const std::size_t c = nearest(centers, x, &d2);
    member_y[c].push_back(standardized.response[i]);
    dist_sum[c] += std::sqrt(d2);
  }

  std::vector<double> mean_dist(J, 0.0);
  double pooled = 0.0;
  std::size_t pooled_n = 0;
  for (std::size_t j = 0; j < J; ++j) {
    if (member_y[j].empty()) continue;
    mean_dist[j] = dist_sum[j] / static_cast<double>(member_y[j].size());
    if (mean_dist[j] > 0.0) {
      pooled += mean_dist[j];
      ++pooled_n;
    }
  }
  // Clusters with zero spread borrow the average spread of the others.
  const double fallback_dist = pooled_n > 0 ? pooled / static_cast<double>(pooled_n) : 1.0 / std::sqrt(2.0);

  Model m;
  m.scaling = FeatureScaling::identity(p);
  m.hyper = {cfg.lambda, cfg.epsilon, cfg.xi};
  m.feature_names = standardized.feature_names;
  m.response_name = standardized.response_name;
  for (std::size_t j = 0; j < J; ++j) {
    Prototype pr;
    const auto c = centers.row(j);
    pr.center.assign(c.begin(), c.end());
    pr.slope.assign(p, 0.0);
    pr.intercept = member_y[j].empty() ? y_mean : mean(member_y[j]);
    pr.variance = std::max(member_y[j].empty() ? y_var : variance(member_y[j]), var_floor);
    pr.precision = 1.0;
    if (cfg.fixed_scale) {
      pr.scale = *cfg.fixed_scale;
    } else {
      const double d = mean_dist[j] > 0.0 ? mean_dist[j] : fallback_dist;
      pr.scale = std::max(1.0 / (std::sqrt(2.0) * d), 1e-3);
    }
    m.prototypes.push_back(std::move(pr));
  }
  return m;
}

}  // namespace ennreg
