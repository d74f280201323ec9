#include "table.hpp"

#include "esurf/version.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace esurf::cli {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

// Numbers stay numbers in JSON; anything that does not parse completely is a string.
nlohmann::ordered_json json_value(const std::string& s) {
  if (s.empty()) return s;
  if (s == "nan" || s == "inf" || s == "-inf") return s;
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (end != nullptr && *end == '\0') return d;
  return s;
}

}  // namespace

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width mismatch in table " + name);
  rows.push_back(std::move(row));
}

std::string version_line() { return std::string("esurf ") + kVersion; }

std::string to_csv(const Table& t) {
  std::ostringstream os;
  os << "# " << version_line() << " " << t.name << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << "\n";
  }
  return os.str();
}

std::string to_json(const Table& t) {
  nlohmann::ordered_json j;
  j["version"] = version_line();
  j["table"] = t.name;
  j["columns"] = t.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& v : row) r.push_back(json_value(v));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(1) + "\n";
}

std::filesystem::path write_table(const Table& t, const std::filesystem::path& dir, Format f) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (t.name + (f == Format::csv ? ".csv" : ".json"));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << (f == Format::csv ? to_csv(t) : to_json(t));
  if (!out) throw std::runtime_error("write failed for " + path.string());
  return path;
}

}  // namespace esurf::cli
