#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "smoothcontact/geometry.hpp"

namespace smoothcontact {

// Minimal OBJ subset: "v x y" (2 coordinates) and "f i j k" (1-based).
TriMesh2D load_obj(const std::filesystem::path& path);

// Plain text polyline: first line "closed" or "open", then one "x y" per line.
Polyline load_polyline(const std::filesystem::path& path);

// Writes content to a temp file in the target directory, then renames.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// CSV table with a "# schema:" header naming columns (and units).
struct CsvTable {
  std::string schema;  // e.g. "x[m],energy[J]"
  std::vector<std::string> comments;
  std::vector<std::vector<double>> rows;

  std::string serialize() const;
  void write(const std::filesystem::path& path) const;  // atomic
  static CsvTable read(const std::filesystem::path& path);
};

}  // namespace smoothcontact
