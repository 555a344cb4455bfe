#include <omp.h>

#include "ennreg/kernels.hpp"
#include "kernels_common.hpp"

namespace ennreg::kernels {

namespace {

std::size_t chunk_count(std::size_t rows) { return (rows + kChunkRows - 1) / kChunkRows; }

}  // namespace

std::vector<Grfn> forward_batch(std::span<const Prototype> prototypes, const Matrix& x) {
  if (prototypes.empty()) throw InputError("no prototypes");
  if (x.cols() != prototypes.front().dim()) throw InputError("feature dimension does not match prototypes");
  std::vector<Grfn> out(x.rows());
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = forward_standardized(prototypes, x.row(static_cast<std::size_t>(i)));
  }
  return out;
}

double cost(std::span<const Prototype> prototypes, const Matrix& x, std::span<const double> y,
            std::span<const std::size_t> rows, const CostSettings& settings) {
  detail::check_rows(prototypes, x, y, rows);
  const std::size_t chunks = chunk_count(rows.size());
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunkRows;
    const std::size_t end = std::min(begin + kChunkRows, rows.size());
    double s = 0.0;
    for (std::size_t r = begin; r < end; ++r) {
      const std::size_t i = rows[r];
      s += loss(y[i], forward_standardized(prototypes, x.row(i)), settings.lambda, settings.epsilon);
    }
    partial[static_cast<std::size_t>(c)] = s;
  }
  double sum = 0.0;
  for (const double s : partial) sum += s;
  return sum / static_cast<double>(rows.size()) + detail::regularizer(prototypes, settings.xi);
}

CostGradient cost_gradient(std::span<const Prototype> prototypes, const Matrix& x,
                           std::span<const double> y, std::span<const std::size_t> rows,
                           const CostSettings& settings) {
  detail::check_rows(prototypes, x, y, rows);
  const std::size_t n_params = parameter_count(prototypes.size(), x.cols());
  const std::size_t chunks = chunk_count(rows.size());
  std::vector<double> partial_loss(chunks, 0.0);
  std::vector<double> partial_grad(chunks * n_params, 0.0);

#pragma omp parallel if (chunks > 1)
  {
    detail::SampleWorkspace ws(prototypes.size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
      const auto cu = static_cast<std::size_t>(c);
      const std::size_t begin = cu * kChunkRows;
      const std::size_t end = std::min(begin + kChunkRows, rows.size());
      std::span<double> grad(partial_grad.data() + cu * n_params, n_params);
      double s = 0.0;
      for (std::size_t r = begin; r < end; ++r) {
        const std::size_t i = rows[r];
        s += detail::accumulate_sample(prototypes, x.row(i), y[i], settings, grad, ws);
      }
      partial_loss[cu] = s;
    }
  }

  CostGradient out;
  out.gradient.assign(n_params, 0.0);
  double sum = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    sum += partial_loss[c];
    const double* g = partial_grad.data() + c * n_params;
    for (std::size_t k = 0; k < n_params; ++k) out.gradient[k] += g[k];
  }
  detail::finish_gradient(prototypes, x.cols(), settings.xi, rows.size(), out.gradient);
  out.cost = sum / static_cast<double>(rows.size()) + detail::regularizer(prototypes, settings.xi);
  return out;
}

}  // namespace ennreg::kernels
