#include "smoothcontact/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace smoothcontact {

namespace {
std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}
}  // namespace

TriMesh2D load_obj(const std::filesystem::path& path) {
  TriMesh2D mesh;
  int lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y;
      if (!(ss >> x >> y))
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad vertex line");
      mesh.vertices.emplace_back(x, y);
    } else if (tag == "f") {
      int i, j, k;
      if (!(ss >> i >> j >> k))
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad face line");
      const int n = static_cast<int>(mesh.vertices.size());
      if (i < 1 || j < 1 || k < 1 || i > n || j > n || k > n)
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": face index out of range");
      mesh.triangles.push_back({i - 1, j - 1, k - 1});
    } else {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": unsupported OBJ tag '" +
                        tag + "'");
    }
  }
  mesh.validate();
  return mesh;
}

Polyline load_polyline(const std::filesystem::path& path) {
  Polyline poly;
  int lineno = 0;
  bool first = true;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok) || tok[0] == '#') continue;
    if (first) {
      if (tok == "closed")
        poly.closed = true;
      else if (tok == "open")
        poly.closed = false;
      else
        throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                          ": expected 'closed' or 'open'");
      first = false;
      continue;
    }
    double y;
    std::istringstream pair(line);
    double x;
    if (!(pair >> x >> y))
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad vertex line");
    poly.vertices.emplace_back(x, y);
  }
  if (first) throw ConfigError(path.string() + ": empty polyline file");
  poly.validate();
  return poly;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string CsvTable::serialize() const {
  std::ostringstream out;
  out.precision(17);
  for (const std::string& c : comments) out << "# " << c << "\n";
  out << "# schema: " << schema << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << row[i];
    }
    out << "\n";
  }
  return out.str();
}

void CsvTable::write(const std::filesystem::path& path) const { atomic_write(path, serialize()); }

CsvTable CsvTable::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file: " + path.string());
  CsvTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string schema_prefix = "# schema: ";
      if (line.rfind(schema_prefix, 0) == 0)
        table.schema = line.substr(schema_prefix.size());
      else
        table.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad CSV cell '" +
                          cell + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.schema.empty()) throw ConfigError(path.string() + ": missing '# schema:' header");
  return table;
}

}  // namespace smoothcontact
