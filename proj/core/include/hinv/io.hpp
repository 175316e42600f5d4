#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hinv/certainty.hpp"
#include "hinv/inversion.hpp"
#include "hinv/signal_model.hpp"

namespace hinv {

using json = nlohmann::json;

/// Checked accessors for config documents. Every failure is a ConfigError
/// that names the offending field by its dotted path.
namespace field {
const json& require(const json& obj, const std::string& key, const std::string& path);
double number(const json& obj, const std::string& key, const std::string& path);
long long integer(const json& obj, const std::string& key, const std::string& path);
std::uint64_t u64(const json& obj, const std::string& key, const std::string& path);
std::vector<double> numbers(const json& obj, const std::string& key, const std::string& path);
std::string text(const json& obj, const std::string& key, const std::string& path);
}  // namespace field

struct SignalConfig {
  FrequencyModel model;
  SamplingGrid grid;
  std::optional<NoiseSpec> noise;
};

// {"omegas", "amps", "normalized"?} under "model" or at top level.
FrequencyModel parse_model(const json& doc);
// {"delta_t", "n_steps"} under "grid" or at top level.
SamplingGrid parse_grid(const json& doc);
std::optional<NoiseSpec> parse_noise(const json& doc);
SignalConfig parse_signal_config(const json& doc);

NoiseKind parse_noise_kind(const std::string& name);
std::string to_string(NoiseKind kind);
std::string to_string(LambdaSource source);

json load_json_file(const std::string& path);

// `n,t,re_c,im_c`, 17 significant digits.
void write_series_csv(std::ostream& os, const AutocorrSeries& series);
// delta_t is recovered from the t column; eta_max is not stored in the file.
AutocorrSeries read_series_csv(std::istream& is, double eta_max = 0.0);

void to_json(json& j, const InversionResult& r);
void to_json(json& j, const CertaintyBound& b);

}  // namespace hinv
