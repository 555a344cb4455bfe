#include <cmath>

#include "ennreg/kernels.hpp"
#include "kernels_common.hpp"

namespace ennreg::kernels {

BlockOffsets block_offsets(std::size_t dim) {
  BlockOffsets o{};
  o.center = 0;
  o.scale = dim;
  o.slope = dim + 1;
  o.intercept = 2 * dim + 1;
  o.log_variance = 2 * dim + 2;
  o.sqrt_precision = 2 * dim + 3;
  o.size = 2 * dim + 4;
  return o;
}

std::size_t parameter_count(std::size_t prototypes, std::size_t dim) {
  return prototypes * block_offsets(dim).size;
}

std::vector<double> pack_parameters(std::span<const Prototype> prototypes) {
  if (prototypes.empty()) return {};
  const std::size_t p = prototypes.front().dim();
  const BlockOffsets off = block_offsets(p);
  std::vector<double> params(parameter_count(prototypes.size(), p));
  for (std::size_t j = 0; j < prototypes.size(); ++j) {
    const auto& pr = prototypes[j];
    double* b = params.data() + j * off.size;
    for (std::size_t k = 0; k < p; ++k) {
      b[off.center + k] = pr.center[k];
      b[off.slope + k] = pr.slope[k];
    }
    b[off.scale] = pr.scale;
    b[off.intercept] = pr.intercept;
    b[off.log_variance] = std::log(pr.variance);
    b[off.sqrt_precision] = std::sqrt(pr.precision);
  }
  return params;
}

void unpack_parameters(std::span<const double> params, std::span<Prototype> prototypes) {
  if (prototypes.empty()) return;
  const std::size_t p = prototypes.front().dim();
  const BlockOffsets off = block_offsets(p);
  if (params.size() != parameter_count(prototypes.size(), p))
    throw InputError("parameter vector length does not match the model");
  for (std::size_t j = 0; j < prototypes.size(); ++j) {
    auto& pr = prototypes[j];
    const double* b = params.data() + j * off.size;
    for (std::size_t k = 0; k < p; ++k) {
      pr.center[k] = b[off.center + k];
      pr.slope[k] = b[off.slope + k];
    }
    pr.scale = b[off.scale];
    pr.intercept = b[off.intercept];
    pr.variance = std::exp(b[off.log_variance]);
    pr.precision = b[off.sqrt_precision] * b[off.sqrt_precision];
  }
}

std::vector<Grfn> forward_batch_serial(std::span<const Prototype> prototypes, const Matrix& x) {
  std::vector<Grfn> out;
  out.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(forward_standardized(prototypes, x.row(i)));
  return out;
}

double cost_serial(std::span<const Prototype> prototypes, const Matrix& x, std::span<const double> y,
                   std::span<const std::size_t> rows, const CostSettings& settings) {
  detail::check_rows(prototypes, x, y, rows);
  double sum = 0.0;
  for (const auto i : rows)
    sum += loss(y[i], forward_standardized(prototypes, x.row(i)), settings.lambda, settings.epsilon);
  return sum / static_cast<double>(rows.size()) + detail::regularizer(prototypes, settings.xi);
}

CostGradient cost_gradient_serial(std::span<const Prototype> prototypes, const Matrix& x,
                                  std::span<const double> y, std::span<const std::size_t> rows,
                                  const CostSettings& settings) {
  detail::check_rows(prototypes, x, y, rows);
  CostGradient out;
  out.gradient.assign(parameter_count(prototypes.size(), x.cols()), 0.0);
  detail::SampleWorkspace ws(prototypes.size());
  double sum = 0.0;
  for (const auto i : rows) sum += detail::accumulate_sample(prototypes, x.row(i), y[i], settings, out.gradient, ws);
  detail::finish_gradient(prototypes, x.cols(), settings.xi, rows.size(), out.gradient);
  out.cost = sum / static_cast<double>(rows.size()) + detail::regularizer(prototypes, settings.xi);
  return out;
}

}  // namespace ennreg::kernels
