// Long-form output tables written as CSV (with a version comment line) or
// as a JSON mirror.
#pragma once

#include "config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace esurf::cli {

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
};

/// "esurf <version>"
std::string version_line();

std::string to_csv(const Table& t);
std::string to_json(const Table& t);

/// Writes dir/name.csv or dir/name.json; returns the path.
std::filesystem::path write_table(const Table& t, const std::filesystem::path& dir, Format f);

}  // namespace esurf::cli
