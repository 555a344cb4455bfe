#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "ennreg/errors.hpp"
#include "ennreg/kernels.hpp"
#include "ennreg/train.hpp"

namespace ennreg {

namespace {

kernels::CostSettings settings_of(const TrainConfig& cfg) { return {cfg.lambda, cfg.epsilon, cfg.xi}; }

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

// Per-parameter step size scaled by the accumulated squared gradient.
class AdaGrad {
 public:
  AdaGrad(std::size_t n, const OptimizerSettings& s) : s_(s), g2_(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    for (std::size_t k = 0; k < params.size(); ++k) {
      g2_[k] += grad[k] * grad[k];
      params[k] -= s_.step_size * grad[k] / (std::sqrt(g2_[k]) + 1e-8);
    }
  }

 private:
  OptimizerSettings s_;
  std::vector<double> g2_;
};

// Adam with bias correction.
class Adam {
 public:
  Adam(std::size_t n, const OptimizerSettings& s) : s_(s), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(s_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(s_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      m_[k] = s_.beta1 * m_[k] + (1.0 - s_.beta1) * grad[k];
      v_[k] = s_.beta2 * v_[k] + (1.0 - s_.beta2) * grad[k] * grad[k];
      params[k] -= s_.step_size * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + 1e-8);
    }
  }

 private:
  OptimizerSettings s_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

class Optimizer {
 public:
  Optimizer(std::size_t n, const OptimizerSettings& s) : kind_(s.kind), adagrad_(n, s), adam_(n, s) {}
  void step(std::vector<double>& params, const std::vector<double>& grad) {
    if (kind_ == OptimizerKind::Adam)
      adam_.step(params, grad);
    else
      adagrad_.step(params, grad);
  }

 private:
  OptimizerKind kind_;
  AdaGrad adagrad_;
  Adam adam_;
};

}  // namespace

void TrainConfig::validate() const {
  if (prototypes == 0) throw InputError("number of prototypes must be positive");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("lambda must lie in [0, 1]");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be positive");
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw InputError("xi must be nonnegative");
  if (!(optimizer.step_size > 0.0)) throw InputError("step size must be positive");
  if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0) || !(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0))
    throw InputError("moment decay rates must lie in [0, 1)");
  if (optimizer.batch_size == 0) throw InputError("batch size must be positive");
  if (!(optimizer.validation_fraction >= 0.0 && optimizer.validation_fraction < 1.0))
    throw InputError("validation fraction must lie in [0, 1)");
}

double resolve_epsilon(const Dataset& data, double relative) {
  if (!(relative > 0.0)) throw InputError("relative epsilon must be positive");
  const double sd = sample_stddev(data.response);
  if (!(sd > 0.0)) throw InputError("response is constant; give an absolute epsilon instead");
  return relative * sd;
}

const char* to_string(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "adagrad"; }

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "adagrad") return OptimizerKind::AdaGrad;
  if (name == "adam") return OptimizerKind::Adam;
  throw InputError("unknown optimizer '" + name + "' (expected adagrad or adam)");
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::MaxEpochs:
      return "max_epochs";
    case StopReason::Patience:
      return "patience";
  }
  return "unknown";
}

void TrainTrace::write_csv(std::ostream& out) const {
  const auto old = out.precision(17);
  out << "epoch,train_cost,val_cost\n";
  for (std::size_t e = 0; e < train_cost.size(); ++e)
    out << (e + 1) << ',' << train_cost[e] << ',' << validation_cost[e] << '\n';
  out.precision(old);
}

double cost(const Model& model, const Dataset& data, const TrainConfig& cfg) {
  if (data.size() == 0) throw InputError("cost needs a nonempty dataset");
  const Dataset scaled = apply_scaling(model.scaling, data);
  return kernels::cost(model.prototypes, scaled.features, scaled.response, all_rows(scaled.size()),
                       settings_of(cfg));
}

std::vector<double> gradient(const Model& model, const Dataset& batch, const TrainConfig& cfg) {
  if (batch.size() == 0) throw InputError("gradient needs a nonempty batch");
  const Dataset scaled = apply_scaling(model.scaling, batch);
  return kernels::cost_gradient(model.prototypes, scaled.features, scaled.response, all_rows(scaled.size()),
                                settings_of(cfg))
      .gradient;
}

FitResult fit(const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  const std::size_t n = data.size();
  if (n < cfg.prototypes) {
    std::ostringstream msg;
    msg << "need at least " << cfg.prototypes << " rows to fit " << cfg.prototypes << " prototypes, got " << n;
    throw InputError(msg.str());
  }

  auto [scaled, scaling] = standardize(data);
  const auto settings = settings_of(cfg);
  const auto& opt = cfg.optimizer;

  // Internal validation split; the training part keeps at least J rows.
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order = all_rows(n);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * opt.validation_fraction));
  n_val = std::min(n_val, n - cfg.prototypes);
  std::vector<std::size_t> val_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_rows(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(val_rows.begin(), val_rows.end());

  const Dataset train_part = scaled.subset(train_rows);
  const KMeansResult km = kmeans(train_part.features, cfg.prototypes, rng());
  Model model = init_params(train_part, km.centers, cfg);
  model.scaling = scaling;
  model.feature_names = data.feature_names;
  model.response_name = data.response_name;

  std::vector<Prototype> protos = model.prototypes;
  std::vector<double> params = kernels::pack_parameters(protos);
  std::vector<double> best_params = params;
  const kernels::BlockOffsets off = kernels::block_offsets(scaled.dim());

  auto selection_cost = [&]() {
    return val_rows.empty() ? kernels::cost(protos, scaled.features, scaled.response, train_rows, settings)
                            : kernels::cost(protos, scaled.features, scaled.response, val_rows, settings);
  };

  TrainTrace trace;
  trace.initial_train_cost = kernels::cost(protos, scaled.features, scaled.response, train_rows, settings);
  double best = selection_cost();
  std::size_t since_best = 0;

  Optimizer optimizer(params.size(), opt);
  std::vector<std::size_t> shuffled = train_rows;
  for (std::size_t epoch = 1; epoch <= opt.max_epochs; ++epoch) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t start = 0; start < shuffled.size(); start += opt.batch_size) {
      const std::size_t end = std::min(start + opt.batch_size, shuffled.size());
      const std::span<const std::size_t> batch(shuffled.data() + start, end - start);
      auto cg = kernels::cost_gradient(protos, scaled.features, scaled.response, batch, settings);
      for (std::size_t j = 0; j < protos.size(); ++j) {
        const std::size_t base = j * off.size;
        if (params[base + off.sqrt_precision] < 0.0) cg.gradient[base + off.sqrt_precision] *= -1.0;
        if (cfg.fixed_scale) cg.gradient[base + off.scale] = 0.0;
      }
      optimizer.step(params, cg.gradient);
      kernels::unpack_parameters(params, protos);
    }

    const double train_cost = kernels::cost(protos, scaled.features, scaled.response, train_rows, settings);
    const double val_cost = val_rows.empty() ? train_cost : selection_cost();
    if (!std::isfinite(train_cost) || !std::isfinite(val_cost)) {
      std::ostringstream msg;
      msg << "non-finite cost at epoch " << epoch;
      throw NumericError(msg.str());
    }
    trace.train_cost.push_back(train_cost);
    trace.validation_cost.push_back(val_cost);
    if (epoch == 1 && !(train_cost < trace.initial_train_cost)) {
      trace.warnings.push_back("training cost did not decrease over the first epoch; check the step size");
    }
    if (val_cost < best) {
      best = val_cost;
      best_params = params;
      trace.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= opt.patience) {
      trace.stop = StopReason::Patience;
      break;
    }
  }

  kernels::unpack_parameters(best_params, model.prototypes);
  // Fixed scales must come back exactly as configured.
  if (cfg.fixed_scale)
    for (auto& pr : model.prototypes) pr.scale = *cfg.fixed_scale;
  return {std::move(model), std::move(trace)};
}

}  // namespace ennreg
