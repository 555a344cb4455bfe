#pragma once

// Data-parallel kernels over samples. Every kernel has a plain serial
// reference (`*_serial`) and an OpenMP version. The OpenMP versions split the
// rows into fixed-size chunks and reduce the chunk partials in chunk order, so
// their results do not depend on the number of threads.

#include <cstddef>
#include <span>
#include <vector>

#include "ennreg/data.hpp"
#include "ennreg/grfn.hpp"
#include "ennreg/model.hpp"

namespace ennreg::kernels {

inline constexpr std::size_t kChunkRows = 64;

struct CostSettings {
  double lambda = 0.9;
  double epsilon = 0.01;
  double xi = 1e-3;
};

// Unconstrained parameterization, one block of 2p + 4 values per prototype:
//   center (p) | scale | slope (p) | intercept | log variance | sqrt precision
std::size_t parameter_count(std::size_t prototypes, std::size_t dim);
std::vector<double> pack_parameters(std::span<const Prototype> prototypes);
void unpack_parameters(std::span<const double> params, std::span<Prototype> prototypes);

struct BlockOffsets {
  std::size_t center, scale, slope, intercept, log_variance, sqrt_precision, size;
};
BlockOffsets block_offsets(std::size_t dim);

std::vector<Grfn> forward_batch_serial(std::span<const Prototype> prototypes, const Matrix& x);
std::vector<Grfn> forward_batch(std::span<const Prototype> prototypes, const Matrix& x);

/// Mean loss over `rows` plus (xi / J) sum_j h_j. Features must already be
/// standardized.
double cost_serial(std::span<const Prototype> prototypes, const Matrix& x, std::span<const double> y,
                   std::span<const std::size_t> rows, const CostSettings& settings);
double cost(std::span<const Prototype> prototypes, const Matrix& x, std::span<const double> y,
            std::span<const std::size_t> rows, const CostSettings& settings);

struct CostGradient {
  double cost = 0.0;
  std::vector<double> gradient;
};

/// Cost and its gradient with respect to the packed parameters. Only the
/// squared root of the precision is stored in a Prototype, so the
/// sqrt-precision coordinates are differentiated at the nonnegative root;
/// callers holding a negative root must flip those signs. Throws NumericError
/// naming the first non-finite coordinate.
CostGradient cost_gradient_serial(std::span<const Prototype> prototypes, const Matrix& x,
                                  std::span<const double> y, std::span<const std::size_t> rows,
                                  const CostSettings& settings);
CostGradient cost_gradient(std::span<const Prototype> prototypes, const Matrix& x,
                           std::span<const double> y, std::span<const std::size_t> rows,
                           const CostSettings& settings);

}  // namespace ennreg::kernels
