#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "ennreg/errors.hpp"
#include "ennreg/kernels.hpp"
#include "ennreg/train.hpp"

namespace ennreg {

CvResult cross_validate_xi(const Dataset& data, std::span<const double> grid, std::size_t folds,
                           const TrainConfig& cfg) {
  if (grid.empty()) throw InputError("xi grid is empty");
  if (folds < 2) throw InputError("cross-validation needs at least two folds");
  if (data.size() < folds) {
    std::ostringstream msg;
    msg << "cannot split " << data.size() << " rows into " << folds << " nonempty folds";
    throw InputError(msg.str());
  }
  for (const double xi : grid)
    if (!(xi >= 0.0)) throw InputError("xi grid values must be nonnegative");

  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> fold_of(n);
  for (std::size_t r = 0; r < n; ++r) fold_of[order[r]] = r % folds;

  std::vector<Dataset> train_sets, test_sets;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? te : tr).push_back(i);
    train_sets.push_back(data.subset(tr));
    test_sets.push_back(data.subset(te));
  }

  const std::size_t tasks = grid.size() * folds;
  std::vector<double> mse(tasks, 0.0);
  std::vector<std::string> errors(tasks);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(tasks); ++t) {
    const auto task = static_cast<std::size_t>(t);
    const std::size_t g = task / folds;
    const std::size_t f = task % folds;
    try {
      TrainConfig c = cfg;
      c.xi = grid[g];
      const FitResult fitted = fit(train_sets[f], c);
      const Dataset scaled = apply_scaling(fitted.model.scaling, test_sets[f]);
      const auto out = kernels::forward_batch_serial(fitted.model.prototypes, scaled.features);
      double s = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double e = out[i].mean - scaled.response[i];
        s += e * e;
      }
      mse[task] = s / static_cast<double>(out.size());
    } catch (const std::exception& e) {
      errors[task] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw NumericError("cross-validation fit failed: " + e);

  CvResult res;
  res.fits = tasks;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CvRow row;
    row.xi = grid[g];
    row.fold_mse.assign(mse.begin() + static_cast<std::ptrdiff_t>(g * folds),
                        mse.begin() + static_cast<std::ptrdiff_t>((g + 1) * folds));
    row.mean_mse = mean(row.fold_mse);
    res.table.push_back(std::move(row));
  }
  const CvRow* best = &res.table.front();
  for (const auto& row : res.table) {
    if (row.mean_mse < best->mean_mse || (row.mean_mse == best->mean_mse && row.xi > best->xi)) best = &row;
  }
  res.best_xi = best->xi;
  return res;
}

}  // namespace ennreg
