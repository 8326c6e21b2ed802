#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "../vendor/doctest.h"

#include <filesystem>
#include <fstream>

#include "smoothcontact/errors.hpp"
#include "smoothcontact/io.hpp"

using namespace smoothcontact;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "smoothcontact_io_test";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("load_obj reads the minimal v/f subset") {
  const fs::path path = temp_dir() / "tri.obj";
  write_file(path,
             "# comment\n"
             "v 0 0\n"
             "v 1 0\n"
             "v 0 1\n"
             "f 1 2 3\n");
  const TriMesh2D mesh = load_obj(path);
  REQUIRE(mesh.vertices.size() == 3);
  REQUIRE(mesh.triangles.size() == 1);
  CHECK(mesh.vertices[1].x() == doctest::Approx(1.0));
  CHECK(mesh.triangles[0] == std::array<int, 3>{0, 1, 2});
  mesh.validate();
}

TEST_CASE("load_obj rejects missing files and bad indices") {
  CHECK_THROWS(load_obj(temp_dir() / "does_not_exist.obj"));
  const fs::path path = temp_dir() / "bad.obj";
  write_file(path, "v 0 0\nv 1 0\nf 1 2 9\n");
  CHECK_THROWS(load_obj(path));
}

TEST_CASE("load_polyline reads closed and open files") {
  const fs::path closed_path = temp_dir() / "closed.txt";
  write_file(closed_path, "closed\n0 0\n1 0\n1 1\n0 1\n");
  const Polyline closed = load_polyline(closed_path);
  CHECK(closed.closed);
  REQUIRE(closed.vertex_count() == 4);
  CHECK(closed.vertices[2].x() == doctest::Approx(1.0));

  const fs::path open_path = temp_dir() / "open.txt";
  write_file(open_path, "open\n-1 0\n0 0\n1 0\n");
  const Polyline open = load_polyline(open_path);
  CHECK_FALSE(open.closed);
  CHECK(open.vertex_count() == 3);
}

TEST_CASE("load_polyline rejects a missing mode line") {
  const fs::path path = temp_dir() / "nomode.txt";
  write_file(path, "0 0\n1 0\n");
  CHECK_THROWS(load_polyline(path));
}

TEST_CASE("atomic_write replaces the file content in one step") {
  const fs::path path = temp_dir() / "atomic.txt";
  atomic_write(path, "first\n");
  CHECK(read_file(path) == "first\n");
  atomic_write(path, "second\n");
  CHECK(read_file(path) == "second\n");
  // No temp files are left behind.
  int entries = 0;
  for (const auto& e : fs::directory_iterator(temp_dir()))
    if (e.path().filename().string().find("atomic") == 0) ++entries;
  CHECK(entries == 1);
}

TEST_CASE("csv table round trip preserves schema, comments, and rows") {
  CsvTable table;
  table.schema = "x[m],energy[J],f_t[N]";
  table.comments = {"kappa=1 d_hat=0.02"};
  table.rows = {{0.0, 1.5, -0.25}, {0.5, 2.0, 0.125}};

  const std::string text = table.serialize();
  CHECK(text.find("# schema: x[m],energy[J],f_t[N]") != std::string::npos);

  const fs::path path = temp_dir() / "table.csv";
  table.write(path);
  const CsvTable back = CsvTable::read(path);
  CHECK(back.schema == table.schema);
  REQUIRE(back.rows.size() == 2);
  for (size_t r = 0; r < table.rows.size(); ++r)
    for (size_t c = 0; c < table.rows[r].size(); ++c)
      CHECK(back.rows[r][c] == doctest::Approx(table.rows[r][c]).epsilon(1e-15));
}

TEST_CASE("csv read reports malformed cells with a line number") {
  const fs::path path = temp_dir() / "broken.csv";
  write_file(path, "# schema: x,y\n1,2\n3,oops\n");
  try {
    CsvTable::read(path);
    FAIL("expected a parse error");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("csv writes are byte-identical across repeats") {
  CsvTable table;
  table.schema = "a,b";
  table.rows = {{1.0 / 3.0, 2.0 / 7.0}, {-0.0, 1e-17}};
  const fs::path p1 = temp_dir() / "rep1.csv";
  const fs::path p2 = temp_dir() / "rep2.csv";
  table.write(p1);
  table.write(p2);
  CHECK(read_file(p1) == read_file(p2));
}
