#include "commands.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ennreg/data.hpp"
#include "ennreg/errors.hpp"
#include "ennreg/model.hpp"
#include "ennreg/prediction.hpp"
#include "ennreg/train.hpp"

namespace ennreg::cli {

namespace {

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(std::string("malformed ") + what + " list element '" + item + "'");
    }
  }
  if (out.empty()) throw InputError(std::string("empty ") + what + " list");
  return out;
}

// Writes to a file, or to `fallback` when the path is empty or "-".
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InputError("cannot write " + path);
      stream_ = file_.get();
    }
    *stream_ << std::setprecision(17);
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::string format_level(double level) {
  std::ostringstream s;
  s << std::setprecision(6) << level;
  return s.str();
}

void write_interval_header(std::ostream& out, const std::vector<double>& levels) {
  for (const double l : levels) out << ",lo_" << format_level(l) << ",hi_" << format_level(l);
}

struct TrainOptions {
  std::string data;
  std::string response = "y";
  double epsilon_rel = 0.01;
  std::string optimizer = "adam";
  std::optional<double> epsilon;
  std::optional<double> fixed_scale;
  TrainConfig cfg;
};

void add_train_options(CLI::App* cmd, TrainOptions& o) {
  cmd->add_option("--data", o.data, "training CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--response", o.response, "response column name")->capture_default_str();
  cmd->add_option("--J", o.cfg.prototypes, "number of prototypes")->capture_default_str();
  cmd->add_option("--lambda", o.cfg.lambda, "belief/plausibility trade-off in [0,1]")->capture_default_str();
  cmd->add_option("--epsilon-rel", o.epsilon_rel, "epsilon as a fraction of stddev(y)")->capture_default_str();
  cmd->add_option("--epsilon", o.epsilon, "absolute epsilon (overrides --epsilon-rel)");
  cmd->add_option("--seed", o.cfg.seed, "random seed")->capture_default_str();
  cmd->add_option("--optimizer", o.optimizer, "adam or adagrad")->capture_default_str();
  cmd->add_option("--step-size", o.cfg.optimizer.step_size, "base step size")->capture_default_str();
  cmd->add_option("--beta1", o.cfg.optimizer.beta1, "first-moment decay (adam)")->capture_default_str();
  cmd->add_option("--beta2", o.cfg.optimizer.beta2, "second-moment decay (adam)")->capture_default_str();
  cmd->add_option("--batch-size", o.cfg.optimizer.batch_size, "mini-batch size")->capture_default_str();
  cmd->add_option("--max-epochs", o.cfg.optimizer.max_epochs, "epoch budget")->capture_default_str();
  cmd->add_option("--patience", o.cfg.optimizer.patience, "early-stopping patience")->capture_default_str();
  cmd->add_option("--val-fraction", o.cfg.optimizer.validation_fraction, "internal validation fraction")
      ->capture_default_str();
  cmd->add_option("--fixed-scale", o.fixed_scale, "freeze every prototype scale at this value");
}

TrainConfig resolve(const TrainOptions& o, const Dataset& data) {
  TrainConfig cfg = o.cfg;
  cfg.epsilon = o.epsilon ? *o.epsilon : resolve_epsilon(data, o.epsilon_rel);
  cfg.fixed_scale = o.fixed_scale;
  cfg.optimizer.kind = parse_optimizer(o.optimizer);
  return cfg;
}

void cmd_train(const TrainOptions& o, const std::string& out_model, std::string trace_path, std::ostream& out,
               std::ostream& err) {
  const Dataset data = load_csv(o.data, o.response);
  const TrainConfig cfg = resolve(o, data);
  const FitResult res = fit(data, cfg);
  for (const auto& w : res.trace.warnings) err << "warning: " << w << '\n';
  save_model(res.model, out_model);
  if (trace_path.empty()) trace_path = out_model + ".trace.csv";
  Output trace(trace_path, out);
  res.trace.write_csv(*trace);
  const double final_cost = cost(res.model, data, cfg);
  out << std::setprecision(10) << "final train cost: " << final_cost << " (epochs " << res.trace.epochs()
      << ", best epoch " << res.trace.best_epoch << ", stop " << to_string(res.trace.stop) << ")\n";
}

void cmd_predict(const std::string& model_path, const std::string& data_path, const std::string& levels_text,
                 const std::string& out_path, std::ostream& out) {
  const Model model = load_model(model_path);
  const auto levels = normalize_levels(parse_list(levels_text, "level"));
  const Dataset data = load_features_csv(data_path);
  const auto rows = predict(model, select_features(model, data), levels);
  Output o(out_path, out);
  *o << "mu,sigma2,h,lower_expectation,upper_expectation";
  write_interval_header(*o, levels);
  *o << '\n';
  for (const auto& s : rows) {
    *o << s.mean << ',' << s.variance << ',' << s.precision << ',' << s.lower_expectation << ','
       << s.upper_expectation;
    for (const auto& [level, iv] : s.intervals) *o << ',' << iv.lo << ',' << iv.hi;
    *o << '\n';
  }
}

void cmd_eval(const std::string& model_path, const std::vector<std::string>& data_paths,
              const std::string& levels_text, const std::string& out_path, std::ostream& out) {
  const Model model = load_model(model_path);
  const auto levels = normalize_levels(parse_list(levels_text, "level"));
  Output o(out_path, out);
  *o << "dataset,metric,level,value\n";
  for (const auto& path : data_paths) {
    const Dataset data = load_csv(path, model.response_name);
    const Evaluation ev = evaluate(model, data, levels);
    const std::string name = std::filesystem::path(path).stem().string();
    *o << name << ",rows,," << ev.rows << '\n';
    *o << name << ",mse,," << ev.mse << '\n';
    for (const auto& m : ev.levels) {
      *o << name << ",coverage," << format_level(m.level) << ',' << m.coverage << '\n';
      *o << name << ",mean_width," << format_level(m.level) << ',' << m.mean_width << '\n';
    }
  }
}

void cmd_cv(const TrainOptions& o, const std::string& grid_text, std::size_t folds, const std::string& out_path,
            std::ostream& out, std::ostream& err) {
  const Dataset data = load_csv(o.data, o.response);
  const TrainConfig cfg = resolve(o, data);
  const auto grid = parse_list(grid_text, "xi");
  const CvResult res = cross_validate_xi(data, grid, folds, cfg);
  Output table(out_path, out);
  *table << "xi,cv_mse,best\n";
  for (const auto& row : res.table) *table << row.xi << ',' << row.mean_mse << ',' << (row.xi == res.best_xi) << '\n';
  err << "best xi: " << res.best_xi << " (" << res.fits << " fits)\n";
}

void cmd_simulate(std::size_t n, std::uint64_t seed, const std::string& out_path, std::ostream& out) {
  const Dataset data = synthetic(n, seed);
  if (out_path.empty() || out_path == "-") {
    out << std::setprecision(17) << "x,y\n";
    for (std::size_t i = 0; i < data.size(); ++i) out << data.features(i, 0) << ',' << data.response[i] << '\n';
  } else {
    write_csv(out_path, data);
  }
}

void cmd_plotdata(const std::string& model_path, double xmin, double xmax, std::size_t steps,
                  const std::string& levels_text, const std::string& out_path, std::ostream& out) {
  const Model model = load_model(model_path);
  if (model.input_dim() != 1) throw InputError("plotdata needs a model with exactly one feature");
  if (steps < 1) throw InputError("steps must be positive");
  if (!(xmin <= xmax)) throw InputError("xmin must not exceed xmax");
  const auto levels = normalize_levels(parse_list(levels_text, "level"));
  Matrix grid(steps, 1);
  for (std::size_t i = 0; i < steps; ++i)
    grid(i, 0) = steps == 1 ? xmin : xmin + (xmax - xmin) * static_cast<double>(i) / static_cast<double>(steps - 1);
  const auto rows = predict(model, grid, levels);
  Output o(out_path, out);
  *o << "x,mu,lower_expectation,upper_expectation";
  write_interval_header(*o, levels);
  *o << '\n';
  for (std::size_t i = 0; i < steps; ++i) {
    const auto& s = rows[i];
    *o << grid(i, 0) << ',' << s.mean << ',' << s.lower_expectation << ',' << s.upper_expectation;
    for (const auto& [level, iv] : s.intervals) *o << ',' << iv.lo << ',' << iv.hi;
    *o << '\n';
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evidential regression with Gaussian random fuzzy numbers"};
  app.require_subcommand(1);

  TrainOptions train_opts;
  std::string out_model, trace_path;
  auto* train = app.add_subcommand("train", "fit a model and write it with its training trace");
  add_train_options(train, train_opts);
  train->add_option("--out-model", out_model, "model file to write")->required();
  train->add_option("--trace", trace_path, "trace CSV (default: <out-model>.trace.csv)");

  std::string model_path, data_path, levels = "0.5,0.9,0.99", out_path;
  auto* predict_cmd = app.add_subcommand("predict", "per-row mu, sigma2, h, expectations and intervals");
  predict_cmd->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", data_path)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--levels", levels)->capture_default_str();
  predict_cmd->add_option("--out", out_path, "output CSV (default stdout)");

  std::vector<std::string> eval_paths;
  auto* eval = app.add_subcommand("eval", "MSE, interval coverage and mean width on labeled data");
  eval->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--data", eval_paths, "labeled CSV, repeatable")->required()->check(CLI::ExistingFile);
  eval->add_option("--levels", levels)->capture_default_str();
  eval->add_option("--out", out_path, "output CSV (default stdout)");

  TrainOptions cv_opts;
  std::string grid = "0.0001,0.001,0.01,0.1,1";
  std::size_t folds = 10;
  auto* cv = app.add_subcommand("cv", "choose xi by k-fold cross-validation");
  add_train_options(cv, cv_opts);
  cv->add_option("--xi-grid", grid, "comma-separated xi values")->capture_default_str();
  cv->add_option("--folds", folds)->capture_default_str();
  cv->add_option("--out", out_path, "table CSV (default stdout)");

  std::size_t n = 200;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "sample the two-interval synthetic regression problem");
  simulate->add_option("--n", n)->capture_default_str();
  simulate->add_option("--seed", sim_seed)->capture_default_str();
  simulate->add_option("--out", out_path, "output CSV (default stdout)");

  double xmin = -4.0, xmax = 5.0;
  std::size_t steps = 200;
  auto* plot = app.add_subcommand("plotdata", "grid evaluation of a one-feature model for plotting");
  plot->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  plot->add_option("--xmin", xmin)->capture_default_str();
  plot->add_option("--xmax", xmax)->capture_default_str();
  plot->add_option("--steps", steps)->capture_default_str();
  plot->add_option("--levels", levels)->capture_default_str();
  plot->add_option("--out", out_path, "output CSV (default stdout)");

  // --xi is shared by train and cv; the grid replaces it for cv.
  train->add_option("--xi", train_opts.cfg.xi, "regularization coefficient")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (*train) {
      cmd_train(train_opts, out_model, trace_path, out, err);
    } else if (*predict_cmd) {
      cmd_predict(model_path, data_path, levels, out_path, out);
    } else if (*eval) {
      cmd_eval(model_path, eval_paths, levels, out_path, out);
    } else if (*cv) {
      cmd_cv(cv_opts, grid, folds, out_path, out, err);
    } else if (*simulate) {
      cmd_simulate(n, sim_seed, out_path, out);
    } else if (*plot) {
      cmd_plotdata(model_path, xmin, xmax, steps, levels, out_path, out);
    }
  } catch (const NumericError& e) {
    err << "numeric fault: " << e.what() << '\n';
    return kExitNumericFault;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}

}  // namespace ennreg::cli
