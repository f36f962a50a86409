#include "rhcsf/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace rhcsf {
namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

// round-trip exact doubles
std::string format(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("cannot parse number '" + s + "' in " + where);
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

struct CsvContent {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;
};

CsvContent read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path.string());
  CsvContent csv;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      csv.comments.push_back(trim(t.substr(1)));
      continue;
    }
    if (csv.header.empty()) {
      csv.header = split(t, ',');
    } else {
      auto cells = split(t, ',');
      if (cells.size() != csv.header.size())
        throw FormatError(path.string() + ": row has " + std::to_string(cells.size()) + " fields, header has " +
                          std::to_string(csv.header.size()));
      csv.rows.push_back(std::move(cells));
    }
  }
  if (csv.header.empty()) throw FormatError(path.string() + ": missing header");
  return csv;
}

std::vector<std::size_t> columns_with_prefix(const std::vector<std::string>& header, const std::string& prefix) {
  std::vector<std::size_t> cols;
  for (int i = 1;; ++i) {
    const std::string name = prefix + std::to_string(i);
    std::size_t found = header.size();
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) found = c;
    if (found == header.size()) break;
    cols.push_back(found);
  }
  return cols;
}

Matrix gather(const CsvContent& csv, const std::vector<std::size_t>& cols, const std::string& where, bool& empty) {
  empty = false;
  Matrix m(static_cast<Eigen::Index>(csv.rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < csv.rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::string& cell = csv.rows[r][cols[c]];
      if (cell.empty()) {
        empty = true;
        return {};
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_double(cell, where);
    }
  return m;
}

}  // namespace

void write_signal_csv(const fs::path& path, const SignalTable& table, int n_y) {
  const Eigen::Index n = table.inputs.rows();
  require(table.predicted.size() == 0 || table.predicted.rows() == n, "predicted outputs length mismatch");
  require(table.measured.size() == 0 || table.measured.rows() == n, "measured outputs length mismatch");
  require(table.criterion.empty() || static_cast<Eigen::Index>(table.criterion.size()) == n, "criterion length mismatch");
  auto out = open_out(path);
  for (const auto& c : table.comments) out << "# " << c << '\n';
  out << 'k';
  for (Eigen::Index c = 1; c <= table.inputs.cols(); ++c) out << ",u_" << c;
  for (int c = 1; c <= n_y; ++c) out << ",yhat_" << c;
  for (int c = 1; c <= n_y; ++c) out << ",y_" << c;
  out << ",J\n";
  for (Eigen::Index k = 0; k < n; ++k) {
    out << k + 1;
    for (Eigen::Index c = 0; c < table.inputs.cols(); ++c) out << ',' << format(table.inputs(k, c));
    for (int c = 0; c < n_y; ++c) out << ',' << (table.predicted.size() ? format(table.predicted(k, c)) : "");
    for (int c = 0; c < n_y; ++c) out << ',' << (table.measured.size() ? format(table.measured(k, c)) : "");
    out << ',' << (table.criterion.empty() ? "" : format(table.criterion[static_cast<std::size_t>(k)])) << '\n';
  }
}

SignalTable read_signal_csv(const fs::path& path) {
  const CsvContent csv = read_csv(path);
  SignalTable table;
  table.comments = csv.comments;
  const auto u_cols = columns_with_prefix(csv.header, "u_");
  if (u_cols.empty()) throw FormatError(path.string() + ": no u_1 column");
  bool empty = false;
  table.inputs = gather(csv, u_cols, path.string(), empty);
  if (empty) throw FormatError(path.string() + ": empty input field");
  if (auto c = columns_with_prefix(csv.header, "yhat_"); !c.empty()) table.predicted = gather(csv, c, path.string(), empty);
  if (auto c = columns_with_prefix(csv.header, "y_"); !c.empty()) table.measured = gather(csv, c, path.string(), empty);
  for (std::size_t c = 0; c < csv.header.size(); ++c)
    if (csv.header[c] == "J") {
      Matrix j = gather(csv, {c}, path.string(), empty);
      if (!empty) table.criterion.assign(j.data(), j.data() + j.size());
    }
  return table;
}

void write_dataset_csv(const fs::path& path, const Dataset& dataset) {
  require(dataset.inputs.rows() == dataset.outputs.rows(), "dataset inputs and outputs differ in row count");
  auto out = open_out(path);
  out << "# origin=" << to_string(dataset.origin) << '\n';
  for (Eigen::Index c = 1; c <= dataset.inputs.cols(); ++c) out << (c > 1 ? "," : "") << "u_" << c;
  for (Eigen::Index c = 1; c <= dataset.outputs.cols(); ++c) out << ",y_" << c;
  out << '\n';
  for (Eigen::Index k = 0; k < dataset.rows(); ++k) {
    for (Eigen::Index c = 0; c < dataset.inputs.cols(); ++c) out << (c > 0 ? "," : "") << format(dataset.inputs(k, c));
    for (Eigen::Index c = 0; c < dataset.outputs.cols(); ++c) out << ',' << format(dataset.outputs(k, c));
    out << '\n';
  }
}

Dataset read_dataset_csv(const fs::path& path) {
  const CsvContent csv = read_csv(path);
  Dataset d;
  bool empty = false;
  d.inputs = gather(csv, columns_with_prefix(csv.header, "u_"), path.string(), empty);
  d.outputs = gather(csv, columns_with_prefix(csv.header, "y_"), path.string(), empty);
  if (empty) throw FormatError(path.string() + ": empty field");
  d.origin = Origin::measured;
  for (const auto& c : csv.comments)
    if (c == "origin=predicted") d.origin = Origin::predicted;
  return d;
}

nlohmann::json to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json to_json(const Region& r) { return {{"lower", to_json(r.lower())}, {"upper", to_json(r.upper())}}; }

Matrix matrix_from_json(const nlohmann::json& value) {
  if (!value.is_array()) throw FormatError("matrix must be a JSON array of rows");
  if (value.empty()) return {};
  const auto cols = value.front().size();
  Matrix m(static_cast<Eigen::Index>(value.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < value.size(); ++r) {
    if (value[r].size() != cols) throw FormatError("ragged matrix in JSON");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = value[r][c].get<double>();
  }
  return m;
}

nlohmann::json dataset_json(const NarxConfig& config, const InitialState& init, const Dataset& dataset) {
  return {{"narx",
           {{"n_u", config.n_u}, {"n_y", config.n_y}, {"order", config.order}, {"sample_time", config.sample_time}}},
          {"initial_state", to_json(init.x0)},
          {"origin", to_string(dataset.origin)},
          {"inputs", to_json(dataset.inputs)},
          {"outputs", to_json(dataset.outputs)}};
}

void write_points_csv(const fs::path& path, const Matrix& points, const std::string& prefix,
                      const std::vector<std::string>& comments) {
  auto out = open_out(path);
  for (const auto& c : comments) out << "# " << c << '\n';
  for (Eigen::Index c = 1; c <= points.cols(); ++c) out << (c > 1 ? "," : "") << prefix << c;
  out << '\n';
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) out << (c > 0 ? "," : "") << format(points(r, c));
    out << '\n';
  }
}

void write_json(const fs::path& path, const nlohmann::json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

ConfigValue parse_scalar_or_array(const std::string& raw, const std::string& where) {
  const std::string v = trim(raw);
  if (v.empty()) throw FormatError(where + ": missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw FormatError(where + ": unterminated string");
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '[') {
    if (v.back() != ']') throw FormatError(where + ": unterminated array");
    const std::string body = trim(v.substr(1, v.size() - 2));
    if (body.empty()) return std::vector<double>{};
    auto items = split(body, ',');
    if (!items.empty() && items.back().empty()) items.pop_back();  // trailing comma
    if (!items.empty() && !items.front().empty() && items.front().front() == '"') {
      std::vector<std::string> out;
      for (const auto& item : items) {
        if (item.size() < 2 || item.front() != '"' || item.back() != '"')
          throw FormatError(where + ": mixed array element '" + item + "'");
        out.push_back(item.substr(1, item.size() - 2));
      }
      return out;
    }
    std::vector<double> out;
    for (const auto& item : items) out.push_back(parse_double(item, where));
    return out;
  }
  return parse_double(v, where);
}

template <typename T>
const T* get_if_key(const std::map<std::string, ConfigValue>& values, const std::string& key) {
  const auto it = values.find(key);
  if (it == values.end()) return nullptr;
  const T* v = std::get_if<T>(&it->second);
  if (v == nullptr) throw ConfigError("config key '" + key + "' has the wrong type");
  return v;
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(strip_comment(line));
    if (t.empty()) continue;
    const std::string where = "line " + std::to_string(number);
    if (t.front() == '[') {
      if (t.back() != ']') throw FormatError(where + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw FormatError(where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw FormatError(where + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (doc.values_.count(full)) throw FormatError(where + ": duplicate key '" + full + "'");
    doc.values_[full] = parse_scalar_or_array(t.substr(eq + 1), where);
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

double ConfigDocument::number(const std::string& key, double fallback) const {
  const double* v = get_if_key<double>(values_, key);
  return v ? *v : fallback;
}

long long ConfigDocument::integer(const std::string& key, long long fallback) const {
  const double* v = get_if_key<double>(values_, key);
  if (!v) return fallback;
  if (std::floor(*v) != *v) throw ConfigError("config key '" + key + "' must be an integer");
  return static_cast<long long>(*v);
}

bool ConfigDocument::boolean(const std::string& key, bool fallback) const {
  const bool* v = get_if_key<bool>(values_, key);
  return v ? *v : fallback;
}

std::string ConfigDocument::string(const std::string& key, const std::string& fallback) const {
  const std::string* v = get_if_key<std::string>(values_, key);
  return v ? *v : fallback;
}

std::vector<double> ConfigDocument::numbers(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const double* d = std::get_if<double>(&it->second)) return {*d};
  const auto* v = std::get_if<std::vector<double>>(&it->second);
  if (v == nullptr) throw ConfigError("config key '" + key + "' must be a number array");
  return *v;
}

std::vector<std::string> ConfigDocument::strings(const std::string& key,
                                                 const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* s = std::get_if<std::string>(&it->second)) return {*s};
  const auto* v = std::get_if<std::vector<std::string>>(&it->second);
  if (v == nullptr) throw ConfigError("config key '" + key + "' must be a string array");
  return *v;
}

}  // namespace rhcsf
