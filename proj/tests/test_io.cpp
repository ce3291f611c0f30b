#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "gcorr/graph_io.hpp"
#include "gcorr/graphgen.hpp"

using namespace gcorr;

namespace {

std::filesystem::path scratch_file(const std::string& name) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "gcorr_io_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void put(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("file format follows the extension") {
  REQUIRE(format_from_path("a/b/graph.tsv") == GraphFileFormat::kEdgeListTsv);
  REQUIRE(format_from_path("graph.MTX") ==
          GraphFileFormat::kMatrixMarketSymmetric);
  REQUIRE(format_from_path("graph.mm") ==
          GraphFileFormat::kMatrixMarketSymmetric);
  REQUIRE(format_from_path("graph.CsV") == GraphFileFormat::kDenseCsv);
  REQUIRE_THROWS_AS(format_from_path("graph.gml"), std::invalid_argument);
  REQUIRE_THROWS_AS(format_from_path("graph"), std::invalid_argument);
}

TEST_CASE("every format round-trips a sampled graph") {
  const Graph g = erdos_renyi(25, 0.3, 2024);
  for (const char* name : {"rt.tsv", "rt.mtx", "rt.csv"}) {
    const std::filesystem::path p = scratch_file(name);
    write_graph(g, p.string());
    const ParsedGraph back = read_graph(p.string(), 25);
    REQUIRE(back.graph.adjacency == g.adjacency);
    REQUIRE(back.self_loops_dropped == 0);
  }
}

TEST_CASE("edge list infers the node count from the largest id") {
  const std::filesystem::path p = scratch_file("infer.tsv");
  put(p, "# demo graph\n0\t1\n\n1\t4\n");
  const ParsedGraph parsed = read_graph(p.string());
  REQUIRE(parsed.graph.n() == 5);
  REQUIRE(parsed.graph.edge_count() == 2);
  REQUIRE(parsed.graph.adjacency(1, 4) == 1.0);
  REQUIRE(parsed.graph.adjacency(4, 1) == 1.0);
}

TEST_CASE("edge list drops and counts self-loops") {
  const std::filesystem::path p = scratch_file("loops.tsv");
  put(p, "0\t1\n2\t2\n1\t2\n3\t3\n");
  const ParsedGraph parsed = read_graph(p.string());
  REQUIRE(parsed.self_loops_dropped == 2);
  REQUIRE(parsed.graph.edge_count() == 2);
}

TEST_CASE("edge list parse errors carry the line number") {
  const std::filesystem::path bad = scratch_file("bad.tsv");
  put(bad, "0\t1\n1\t2\textra\n");
  REQUIRE_THROWS_WITH(read_graph(bad.string()),
                      Catch::Matchers::ContainsSubstring(":2:"));

  put(bad, "0\t-3\n");
  REQUIRE_THROWS_WITH(read_graph(bad.string()),
                      Catch::Matchers::ContainsSubstring("nonnegative"));

  put(bad, "0\t9\n");
  REQUIRE_THROWS_WITH(read_graph(bad.string(), 5),
                      Catch::Matchers::ContainsSubstring("out of range"));

  put(bad, "");
  REQUIRE_THROWS_WITH(read_graph(bad.string()),
                      Catch::Matchers::ContainsSubstring("empty edge list"));
}

TEST_CASE("matrix market pattern files parse with comments") {
  const std::filesystem::path p = scratch_file("ok.mtx");
  put(p,
      "%%MatrixMarket matrix coordinate pattern symmetric\n"
      "% produced by hand\n"
      "4 4 3\n"
      "2 1\n"
      "3 1\n"
      "4 3\n");
  const ParsedGraph parsed = read_graph(p.string());
  REQUIRE(parsed.graph.n() == 4);
  REQUIRE(parsed.graph.edge_count() == 3);
  REQUIRE(parsed.graph.adjacency(0, 1) == 1.0);
  REQUIRE(parsed.graph.adjacency(2, 3) == 1.0);
}

TEST_CASE("matrix market integer files honor zero values") {
  const std::filesystem::path p = scratch_file("vals.mtx");
  put(p,
      "%%MatrixMarket matrix coordinate integer symmetric\n"
      "3 3 3\n"
      "2 1 1\n"
      "3 1 0\n"
      "3 2 1\n");
  const ParsedGraph parsed = read_graph(p.string());
  REQUIRE(parsed.graph.edge_count() == 2);
  REQUIRE(parsed.graph.adjacency(0, 2) == 0.0);
}

TEST_CASE("matrix market rejects malformed input with locations") {
  const std::filesystem::path p = scratch_file("broken.mtx");
  put(p, "%%MatrixMarket matrix array real general\n1 1 0\n");
  REQUIRE_THROWS_WITH(read_graph(p.string()),
                      Catch::Matchers::ContainsSubstring("header"));

  put(p, "%%MatrixMarket matrix coordinate pattern symmetric\n3 4 0\n");
  REQUIRE_THROWS_WITH(read_graph(p.string()),
                      Catch::Matchers::ContainsSubstring("square"));

  put(p,
      "%%MatrixMarket matrix coordinate pattern symmetric\n"
      "3 3 1\n"
      "4 1\n");
  REQUIRE_THROWS_WITH(read_graph(p.string()),
                      Catch::Matchers::ContainsSubstring(":3:"));

  put(p,
      "%%MatrixMarket matrix coordinate pattern symmetric\n"
      "3 3 2\n"
      "2 1\n");
  REQUIRE_THROWS_WITH(read_graph(p.string()),
                      Catch::Matchers::ContainsSubstring("expected 2"));

  put(p, "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 0\n");
  REQUIRE_THROWS_WITH(read_graph(p.string(), 5),
                      Catch::Matchers::ContainsSubstring("disagrees"));
}

TEST_CASE("dense csv parses and symmetrizes checks") {
  const std::filesystem::path p = scratch_file("ok.csv");
  put(p, "0,1,0\n1,0,1\n0,1,0\n");
  const ParsedGraph parsed = read_graph(p.string());
  REQUIRE(parsed.graph.n() == 3);
  REQUIRE(parsed.graph.edge_count() == 2);
  REQUIRE(parsed.self_loops_dropped == 0);
}

TEST_CASE("dense csv drops diagonal entries and counts them") {
  const std::filesystem::path p = scratch_file("diag.csv");
  put(p, "1,1\n1,0\n");
  const ParsedGraph parsed = read_graph(p.string());
  REQUIRE(parsed.self_loops_dropped == 1);
  REQUIRE(parsed.graph.adjacency(0, 0) == 0.0);
  REQUIRE(parsed.graph.edge_count() == 1);
}

TEST_CASE("dense csv rejects malformed matrices") {
  const std::filesystem::path p = scratch_file("bad.csv");
  put(p, "0,1\n1,0,0\n");
  REQUIRE_THROWS_WITH(read_graph(p.string()),
                      Catch::Matchers::ContainsSubstring("ragged"));

  put(p, "0,2\n2,0\n");
  REQUIRE_THROWS_WITH(read_graph(p.string()),
                      Catch::Matchers::ContainsSubstring("0 or 1"));

  put(p, "0,x\n1,0\n");
  REQUIRE_THROWS_WITH(read_graph(p.string()),
                      Catch::Matchers::ContainsSubstring("malformed cell"));

  put(p, "0,1\n");
  REQUIRE_THROWS_WITH(read_graph(p.string()),
                      Catch::Matchers::ContainsSubstring("square"));

  put(p, "0,1\n0,0\n");
  REQUIRE_THROWS_WITH(read_graph(p.string()),
                      Catch::Matchers::ContainsSubstring("symmetric"));
}

TEST_CASE("missing files raise a readable error") {
  REQUIRE_THROWS_WITH(read_graph("/nonexistent/graph.tsv"),
                      Catch::Matchers::ContainsSubstring("cannot open"));
}
