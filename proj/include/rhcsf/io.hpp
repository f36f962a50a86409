#pragma once

#include "rhcsf/core.hpp"
#include "rhcsf/sampling.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace rhcsf {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// CSV

/// One row per time step. Empty optional columns are written as empty fields.
struct SignalTable {
  Matrix inputs;      // N x n_u, required
  Matrix predicted;   // N x n_y or empty
  Matrix measured;    // N x n_y or empty
  std::vector<double> criterion;  // N or empty
  std::vector<std::string> comments;  // written as leading "# " lines
};

/// Columns: k,u_1..u_nu,yhat_1..yhat_ny,y_1..y_ny,J
void write_signal_csv(const std::filesystem::path& path, const SignalTable& table, int n_y);

/// Reads the u_* (and, when present, yhat_*, y_*, J) columns back; '#' lines are skipped.
[[nodiscard]] SignalTable read_signal_csv(const std::filesystem::path& path);

/// Dataset as CSV with columns u_1..u_nu,y_1..y_ny.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);
[[nodiscard]] Dataset read_dataset_csv(const std::filesystem::path& path);

/// Dataset provenance record: NARX structure, initial state, origin and samples.
[[nodiscard]] nlohmann::json dataset_json(const NarxConfig& config, const InitialState& init, const Dataset& dataset);

/// Plain matrix with a header row; used for supporting sets and evaluation sets.
void write_points_csv(const std::filesystem::path& path, const Matrix& points, const std::string& prefix,
                      const std::vector<std::string>& comments = {});

void write_json(const std::filesystem::path& path, const nlohmann::json& value);
[[nodiscard]] nlohmann::json read_json(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json to_json(const Matrix& m);
[[nodiscard]] nlohmann::json to_json(const Vector& v);
[[nodiscard]] nlohmann::json to_json(const Region& r);
[[nodiscard]] Matrix matrix_from_json(const nlohmann::json& value);

/// 64-bit FNV-1a, hex encoded. Stable across platforms.
[[nodiscard]] std::string fnv1a_hex(const std::string& text);

// ---------------------------------------------------------------------------
// Key-value config text: [section] headers, key = value lines, '#' comments.
// Values are numbers, quoted strings, true/false, or flat [arrays] of those.

using ConfigValue = std::variant<double, bool, std::string, std::vector<double>, std::vector<std::string>>;

class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string& text);
  static ConfigDocument load(const std::filesystem::path& path);

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// Keys are "section.key" (or just "key" before the first section).
  [[nodiscard]] const std::map<std::string, ConfigValue>& values() const noexcept { return values_; }

  [[nodiscard]] double number(const std::string& key, double fallback) const;
  [[nodiscard]] long long integer(const std::string& key, long long fallback) const;
  [[nodiscard]] bool boolean(const std::string& key, bool fallback) const;
  [[nodiscard]] std::string string(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  [[nodiscard]] std::vector<std::string> strings(const std::string& key, const std::vector<std::string>& fallback) const;

 private:
  std::map<std::string, ConfigValue> values_;
};

}  // namespace rhcsf
