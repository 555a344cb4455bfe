#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "ennreg/errors.hpp"
#include "ennreg/model.hpp"

namespace ennreg {

namespace {

void write_values(std::ostream& out, const char* key, std::span<const double> values) {
  out << key;
  for (const double v : values) out << ' ' << v;
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next non-empty line split into key and remainder.
  std::pair<std::string, std::string> next(const std::string& expected_key) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      const auto space = line.find(' ');
      std::string key = line.substr(0, space);
      std::string rest = space == std::string::npos ? "" : line.substr(space + 1);
      if (key != expected_key) fail("expected '" + expected_key + "', found '" + key + "'");
      return {std::move(key), std::move(rest)};
    }
    fail("unexpected end of file, expected '" + expected_key + "'");
  }

  std::vector<double> values(const std::string& key, std::size_t count) {
    const auto rest = next(key).second;
    std::vector<double> out;
    const char* p = rest.data();
    const char* end = rest.data() + rest.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) fail("malformed number in '" + key + "'");
      out.push_back(v);
      p = ptr;
    }
    if (out.size() != count) {
      std::ostringstream msg;
      msg << "'" << key << "' has " << out.size() << " values, expected " << count;
      fail(msg.str());
    }
    return out;
  }

  double value(const std::string& key) { return values(key, 1).front(); }

  std::size_t count(const std::string& key) {
    const double v = value(key);
    if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
      fail("'" + key + "' must be a nonnegative integer");
    return static_cast<std::size_t>(v);
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << "corrupt model file (line " << line_no_ << "): " << what;
    throw InputError(msg.str());
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

void save_model(const Model& model, std::ostream& out) {
  model.validate();
  out << std::setprecision(17);
  out << kModelFormatId << ' ' << kModelFormatVersion << '\n';
  out << "input_dim " << model.input_dim() << '\n';
  out << "prototypes " << model.size() << '\n';
  out << "lambda " << model.hyper.lambda << '\n';
  out << "epsilon " << model.hyper.epsilon << '\n';
  out << "xi " << model.hyper.xi << '\n';
  out << "response " << model.response_name << '\n';
  for (std::size_t k = 0; k < model.input_dim(); ++k) {
    out << "feature "
        << (k < model.feature_names.size() ? model.feature_names[k] : "x" + std::to_string(k + 1))
        << '\n';
  }
  write_values(out, "feature_mean", model.scaling.mean);
  write_values(out, "feature_std", model.scaling.stddev);
  for (std::size_t j = 0; j < model.size(); ++j) {
    const auto& pr = model.prototypes[j];
    out << "prototype " << j << '\n';
    write_values(out, "center", pr.center);
    out << "scale " << pr.scale << '\n';
    write_values(out, "slope", pr.slope);
    out << "intercept " << pr.intercept << '\n';
    out << "variance " << pr.variance << '\n';
    out << "precision " << pr.precision << '\n';
  }
  out << "end\n";
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  save_model(model, out);
}

Model load_model(std::istream& in) {
  Reader r(in);
  const auto version = r.next(kModelFormatId).second;
  if (version != std::to_string(kModelFormatVersion)) r.fail("unsupported format version '" + version + "'");

  Model m;
  const std::size_t p = r.count("input_dim");
  const std::size_t J = r.count("prototypes");
  m.hyper.lambda = r.value("lambda");
  m.hyper.epsilon = r.value("epsilon");
  m.hyper.xi = r.value("xi");
  m.response_name = r.next("response").second;
  for (std::size_t k = 0; k < p; ++k) m.feature_names.push_back(r.next("feature").second);
  m.scaling.mean = r.values("feature_mean", p);
  m.scaling.stddev = r.values("feature_std", p);
  for (std::size_t j = 0; j < J; ++j) {
    if (r.count("prototype") != j) r.fail("prototypes out of order");
    Prototype pr;
    pr.center = r.values("center", p);
    pr.scale = r.value("scale");
    pr.slope = r.values("slope", p);
    pr.intercept = r.value("intercept");
    pr.variance = r.value("variance");
    pr.precision = r.value("precision");
    m.prototypes.push_back(std::move(pr));
  }
  r.next("end");
  m.validate();
  return m;
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file " + path.string());
  return load_model(in);
}

}  // namespace ennreg
