#include "hinv/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hinv/error.hpp"

namespace hinv {

namespace field {

namespace {
std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}
[[noreturn]] void fail(const std::string& path, const std::string& key, const std::string& what) {
  throw ConfigError("config field '" + join(path, key) + "': " + what);
}
}  // namespace

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ConfigError("config field '" + path + "': expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, key, "missing");
  return *it;
}

double number(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number()) fail(path, key, "expected a number");
  return v.get<double>();
}

long long integer(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_integer()) fail(path, key, "expected an integer");
  return v.get<long long>();
}

std::uint64_t u64(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  fail(path, key, "expected a non-negative integer");
}

std::vector<double> numbers(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_array()) fail(path, key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(path, key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::string text(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) fail(path, key, "expected a string");
  return v.get<std::string>();
}

}  // namespace field

namespace {

// Rethrows model/grid validation errors with the config path attached.
template <typename F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind("config field", 0) == 0) throw;
    throw ConfigError("config field '" + path + "': " + msg);
  }
}

}  // namespace

FrequencyModel parse_model(const json& doc) {
  const bool nested = doc.is_object() && doc.contains("model");
  const json& m = nested ? doc.at("model") : doc;
  const std::string path = nested ? "model" : "";
  auto omegas = field::numbers(m, "omegas", path);
  auto amps = field::numbers(m, "amps", path);
  auto norm = FrequencyModel::Normalization::kFree;
  if (m.contains("normalized")) {
    if (!m.at("normalized").is_boolean()) throw ConfigError("config field '" + (path.empty() ? std::string("normalized") : path + ".normalized") + "': expected a boolean");
    if (m.at("normalized").get<bool>()) norm = FrequencyModel::Normalization::kAsserted;
  }
  return at_path(path.empty() ? "omegas" : path, [&] { return FrequencyModel(std::move(omegas), std::move(amps), norm); });
}

SamplingGrid parse_grid(const json& doc) {
  const bool nested = doc.is_object() && doc.contains("grid");
  const json& g = nested ? doc.at("grid") : doc;
  const std::string path = nested ? "grid" : "";
  const double dt = field::number(g, "delta_t", path);
  const long long n = field::integer(g, "n_steps", path);
  if (n < 1 || n > std::numeric_limits<int>::max())
    throw ConfigError("config field '" + (path.empty() ? std::string("n_steps") : path + ".n_steps") + "': must be >= 1");
  return at_path(path.empty() ? "delta_t" : path, [&] { return SamplingGrid(dt, static_cast<int>(n)); });
}

std::optional<NoiseSpec> parse_noise(const json& doc) {
  if (!doc.is_object() || !doc.contains("noise") || doc.at("noise").is_null()) return std::nullopt;
  const json& n = doc.at("noise");
  NoiseSpec spec;
  spec.eta_max = field::number(n, "eta_max", "noise");
  if (!(spec.eta_max >= 0.0)) throw ConfigError("config field 'noise.eta_max': must be >= 0");
  if (n.contains("kind")) spec.kind = at_path("noise.kind", [&] { return parse_noise_kind(field::text(n, "kind", "noise")); });
  if (n.contains("seed")) spec.seed = field::u64(n, "seed", "noise");
  if (n.contains("copies") && !n.at("copies").is_null()) {
    const long long m = field::integer(n, "copies", "noise");
    if (m < 1) throw ConfigError("config field 'noise.copies': must be >= 1");
    spec.copies = static_cast<int>(m);
  }
  return spec;
}

SignalConfig parse_signal_config(const json& doc) {
  return {parse_model(doc), parse_grid(doc), parse_noise(doc)};
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "uniform-disk") return NoiseKind::kUniformDisk;
  if (name == "truncated-gaussian") return NoiseKind::kTruncatedGaussian;
  throw ConfigError("unknown noise kind '" + name + "'");
}

std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::kUniformDisk ? "uniform-disk" : "truncated-gaussian";
}

std::string to_string(LambdaSource source) {
  return source == LambdaSource::kExact ? "exact" : "analytic";
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

void write_series_csv(std::ostream& os, const AutocorrSeries& series) {
  const auto old_precision = os.precision(17);
  os << "n,t,re_c,im_c\n";
  const double dt = series.grid().delta_t;
  for (int n = 0; n < series.grid().sample_count(); ++n) {
    const auto c = series.values()[n];
    os << n << ',' << n * dt << ',' << c.real() << ',' << c.imag() << '\n';
  }
  os.precision(old_precision);
}

AutocorrSeries read_series_csv(std::istream& is, double eta_max) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("series CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "n,t,re_c,im_c") throw ConfigError("series CSV: expected header 'n,t,re_c,im_c'");

  std::vector<Complex> values;
  std::vector<double> times;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    long long n;
    double t, re, im;
    char c1, c2, c3;
    if (!(ls >> n >> c1 >> t >> c2 >> re >> c3 >> im) || c1 != ',' || c2 != ',' || c3 != ',')
      throw ConfigError("series CSV: malformed row " + std::to_string(row));
    if (n != static_cast<long long>(values.size()))
      throw ConfigError("series CSV: row " + std::to_string(row) + " has index " + std::to_string(n) +
                        ", expected " + std::to_string(values.size()));
    values.emplace_back(re, im);
    times.push_back(t);
  }
  if (values.size() < 2) throw ConfigError("series CSV: need at least two samples (N >= 1)");
  const SamplingGrid grid(times[1] - times[0], static_cast<int>(values.size()) - 1);
  return AutocorrSeries(std::move(values), grid, eta_max);
}

void to_json(json& j, const InversionResult& r) {
  j = json{{"k_detected", r.detected_rank},
           {"omegas", r.omegas},
           {"amps", r.amps},
           {"eigen_moduli", r.eigen_moduli},
           {"residual", r.residual},
           {"amps_clamped", r.amps_clamped}};
}

void to_json(json& j, const CertaintyBound& b) {
  auto opt = [](const auto& v) -> json { return v ? json(*v) : json(nullptr); };
  j = json{{"k", b.k},
           {"n_steps", b.n_steps},
           {"lambda_min_exact", b.lambda_min_exact},
           {"lambda_min_analytic", opt(b.lambda_min_analytic)},
           {"lambda_1", b.lambda_1},
           {"trace_s", b.trace_s},
           {"kappa", b.kappa},
           {"kappa_upper", b.kappa_upper},
           {"delta_eff", opt(b.delta_eff)},
           {"delta_in_gap_range", opt(b.delta_in_gap_range)},
           {"bound_per_step", b.bound_per_step},
           {"bound_total", b.bound_total},
           {"eta_max", b.eta_max},
           {"admissible", b.admissible},
           {"lambda_source", to_string(b.lambda_source)}};
}

}  // namespace hinv
