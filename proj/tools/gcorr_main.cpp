// Command-line front end: graph generation, embedding, two-graph testing,
// and the simulation studies. Every report embeds its full configuration,
// so a report is reproducible from its own header.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gcorr/gcorr.hpp"

namespace {

using nlohmann::ordered_json;

gcorr::KernelSpec parse_kernel(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("kernel spec '" + text +
                                "' must look like gaussian:<sigma> or "
                                "laplace:<c>");
  }
  const std::string family = text.substr(0, colon);
  double bandwidth = 0.0;
  try {
    bandwidth = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("kernel spec '" + text +
                                "' has a malformed bandwidth");
  }
  if (family == "gaussian") return gcorr::gaussian_kernel(bandwidth);
  if (family == "laplace") return gcorr::laplace_kernel(bandwidth);
  throw std::invalid_argument("unknown kernel family '" + family + "'");
}

std::pair<std::size_t, std::size_t> parse_d_range(const std::string& text) {
  const std::size_t dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const std::size_t d = std::stoull(text);
      return {d, d};
    }
    const std::size_t lo = std::stoull(text.substr(0, dots));
    const std::size_t hi = std::stoull(text.substr(dots + 2));
    if (lo < 1 || lo > hi) throw std::invalid_argument("bad range");
    return {lo, hi};
  } catch (const std::exception&) {
    throw std::invalid_argument("dimension range '" + text +
                                "' must look like 3 or 1..10");
  }
}

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> grid;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      grid.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("grid '" + text +
                                  "' must be comma-separated counts");
    }
  }
  if (grid.empty()) throw std::invalid_argument("empty n grid");
  return grid;
}

std::string scalar(const ordered_json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

// Report sink: config comments + header + rows for CSV, one document for
// JSON. Field order is fixed by construction, output has no timestamps.
struct Report {
  ordered_json config;
  std::vector<std::string> header;
  std::vector<ordered_json> rows;

  void add_row(ordered_json row) { rows.push_back(std::move(row)); }

  void write_csv(std::ostream& out) const {
    for (const auto& item : config.items()) {
      out << "# " << item.key() << "=" << scalar(item.value()) << "\n";
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
      out << (i ? "," : "") << header[i];
    }
    out << "\n";
    for (const ordered_json& row : rows) {
      bool first = true;
      for (const std::string& key : header) {
        out << (first ? "" : ",") << scalar(row.at(key));
        first = false;
      }
      out << "\n";
    }
  }

  void write_json(std::ostream& out) const {
    ordered_json doc;
    doc["config"] = config;
    doc["rows"] = rows;
    out << doc.dump(2) << "\n";
  }

  void emit(const std::string& path, const std::string& format) const {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!path.empty()) {
      file.open(path);
      if (!file) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
      }
      out = &file;
    }
    if (format == "csv") {
      write_csv(*out);
    } else if (format == "json") {
      write_json(*out);
    } else {
      throw std::invalid_argument("unknown report format '" + format + "'");
    }
    if (!*out) throw std::runtime_error("write failed");
  }
};

gcorr::Graph load_graph(const std::string& path, std::size_t declared_n) {
  const gcorr::ParsedGraph parsed = gcorr::read_graph(path, declared_n);
  if (parsed.self_loops_dropped > 0) {
    std::cerr << "warning: " << path << ": dropped "
              << parsed.self_loops_dropped << " self-loop(s)\n";
  }
  gcorr::check_graph(parsed.graph);
  return parsed.graph;
}

struct GenOptions {
  std::string setting = "linear";
  std::size_t n = 0;
  double noise = 0.0;
  std::string kernel1 = "gaussian:1.0";
  std::string kernel2 = "laplace:1.0";
  double rho = 1.0;
  double p = 0.5;
  unsigned which = 1;
  std::uint64_t seed = 1;
  std::string out;
};

int run_gen(const GenOptions& opt) {
  gcorr::Graph graph;
  if (opt.setting == "erdos-renyi") {
    graph = gcorr::erdos_renyi(opt.n, opt.p, opt.seed);
  } else {
    const gcorr::Setting setting = gcorr::setting_from_string(opt.setting);
    const gcorr::LatentSample latent =
        gcorr::sample_latent(setting, opt.n, opt.noise, opt.seed);
    const gcorr::GraphPair pair =
        gcorr::sample_graph_pair(latent, parse_kernel(opt.kernel1),
                                 parse_kernel(opt.kernel2), opt.rho, opt.seed);
    graph = opt.which == 1 ? pair.first : pair.second;
  }
  gcorr::write_graph(graph, opt.out);
  std::cout << opt.out << ": n=" << graph.n()
            << " edges=" << graph.edge_count() << "\n";
  return 0;
}

struct EmbedOptions {
  std::string in;
  std::size_t n = 0;
  std::size_t d = 0;
  std::string embedding = "ase";
  std::string dim_method = "profile-likelihood";
  std::string out;
  std::string format = "csv";
};

int run_embed(const EmbedOptions& opt) {
  if (opt.embedding != "ase" && opt.embedding != "lse") {
    throw std::invalid_argument("embedding must be ase or lse");
  }
  const gcorr::Graph graph = load_graph(opt.in, opt.n);
  const gcorr::EmbeddingKind kind = opt.embedding == "lse"
                                        ? gcorr::EmbeddingKind::kLse
                                        : gcorr::EmbeddingKind::kAse;
  const Eigen::MatrixXd target =
      kind == gcorr::EmbeddingKind::kLse
          ? gcorr::normalized_laplacian(graph.adjacency)
          : graph.adjacency;
  const gcorr::SpectralDecomposition dec =
      gcorr::spectral_decomposition(target);
  std::size_t d = opt.d;
  if (d == 0) {
    d = gcorr::select_dimension(
        gcorr::spectrum_from(dec, graph.n()),
        gcorr::dimension_method_from_string(opt.dim_method), graph.n());
  }
  const gcorr::Embedding emb = gcorr::embedding_from(dec, d, kind);

  Report report;
  report.config["command"] = "embed";
  report.config["in"] = opt.in;
  report.config["n"] = emb.n();
  report.config["embedding"] = opt.embedding;
  report.config["dim_method"] = opt.dim_method;
  report.config["d_requested"] = opt.d;
  report.config["d"] = d;
  for (std::size_t j = 0; j < d; ++j) {
    report.header.push_back("x" + std::to_string(j + 1));
  }
  for (std::size_t i = 0; i < emb.n(); ++i) {
    ordered_json row;
    for (std::size_t j = 0; j < d; ++j) {
      row[report.header[j]] =
          emb.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    report.add_row(std::move(row));
  }
  report.emit(opt.out, opt.format);
  return 0;
}

struct TestOptions {
  std::string graph1;
  std::string graph2;
  std::size_t n = 0;
  std::size_t d = 0;
  std::string d_range;
  std::size_t perms = 1000;
  unsigned workers = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

int run_test(const TestOptions& opt) {
  const gcorr::Graph g1 = load_graph(opt.graph1, opt.n);
  const gcorr::Graph g2 = load_graph(opt.graph2, opt.n);
  if (g1.n() != g2.n()) {
    throw std::runtime_error("node-count mismatch: " + opt.graph1 + " has " +
                             std::to_string(g1.n()) + " nodes, " + opt.graph2 +
                             " has " + std::to_string(g2.n()));
  }

  std::size_t d_lo = 1, d_hi = 10;
  if (opt.d > 0 && !opt.d_range.empty()) {
    throw std::invalid_argument("pass --d or --d-range, not both");
  }
  if (opt.d > 0) {
    d_lo = d_hi = opt.d;
  } else if (!opt.d_range.empty()) {
    std::tie(d_lo, d_hi) = parse_d_range(opt.d_range);
  } else {
    d_hi = std::min<std::size_t>(d_hi, g1.n());
  }
  if (d_hi > g1.n()) {
    throw std::invalid_argument("dimension sweep exceeds the node count");
  }

  const gcorr::SpectralDecomposition dec1 =
      gcorr::spectral_decomposition(g1.adjacency);
  const gcorr::SpectralDecomposition dec2 =
      gcorr::spectral_decomposition(g2.adjacency);

  Report report;
  report.config["command"] = "test";
  report.config["graph1"] = opt.graph1;
  report.config["graph2"] = opt.graph2;
  report.config["n"] = g1.n();
  report.config["d_range"] =
      std::to_string(d_lo) + ".." + std::to_string(d_hi);
  report.config["perms"] = opt.perms;
  report.config["workers"] = opt.workers;
  report.config["seed"] = opt.seed;
  report.header = {"d",           "gcov",  "gvar1",
                   "gvar2",       "gcorr", "p_value",
                   "permutations", "exceed_count", "degenerate"};
  for (std::size_t d = d_lo; d <= d_hi; ++d) {
    const gcorr::Embedding e1 =
        gcorr::embedding_from(dec1, d, gcorr::EmbeddingKind::kAse);
    const gcorr::Embedding e2 =
        gcorr::embedding_from(dec2, d, gcorr::EmbeddingKind::kAse);
    const gcorr::GraphStat stat = gcorr::gcov_embeddings(e1, e2);
    const gcorr::TestReport test =
        gcorr::permutation_test(e1, e2, opt.perms, opt.seed, opt.workers);
    ordered_json row;
    row["d"] = d;
    row["gcov"] = stat.gcov;
    row["gvar1"] = stat.gvar1;
    row["gvar2"] = stat.gvar2;
    row["gcorr"] = stat.gcorr;
    row["p_value"] = test.p_value;
    row["permutations"] = test.permutations;
    row["exceed_count"] = test.exceed_count;
    row["degenerate"] = test.degenerate;
    report.add_row(std::move(row));
  }
  report.emit(opt.out, opt.format);
  return 0;
}

struct ConvergenceOptions {
  std::string setting = "linear";
  std::string n_grid = "100,200,400";
  double noise = 0.0;
  std::string kernel1 = "gaussian:1.0";
  std::string kernel2 = "laplace:1.0";
  std::string d_range = "1..5";
  std::size_t replicates = 10;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

int run_sim_convergence(const ConvergenceOptions& opt) {
  const auto [d_lo, d_hi] = parse_d_range(opt.d_range);
  const std::vector<gcorr::ConvergenceRow> rows = gcorr::convergence_study(
      gcorr::setting_from_string(opt.setting), parse_grid(opt.n_grid),
      opt.noise, parse_kernel(opt.kernel1), parse_kernel(opt.kernel2), d_lo,
      d_hi, opt.replicates, opt.seed);

  Report report;
  report.config["command"] = "sim-convergence";
  report.config["setting"] = opt.setting;
  report.config["n_grid"] = opt.n_grid;
  report.config["noise"] = opt.noise;
  report.config["kernel1"] = opt.kernel1;
  report.config["kernel2"] = opt.kernel2;
  report.config["d_range"] = opt.d_range;
  report.config["replicates"] = opt.replicates;
  report.config["seed"] = opt.seed;
  report.header = {"n", "gcorr_mean", "hsic_mean"};
  for (const gcorr::ConvergenceRow& row : rows) {
    ordered_json r;
    r["n"] = row.n;
    r["gcorr_mean"] = row.gcorr_mean;
    r["hsic_mean"] = row.hsic_mean;
    report.add_row(std::move(r));
  }
  report.emit(opt.out, opt.format);
  return 0;
}

struct PowerOptions {
  std::string setting = "linear";
  std::string n_grid = "25,50,100";
  double noise = 0.0;
  std::size_t perms = 199;
  double alpha = 0.05;
  std::size_t replicates = 100;
  std::string kernel1 = "gaussian:1.0";
  std::string kernel2 = "laplace:1.0";
  double rho = 1.0;
  unsigned workers = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

int run_sim_power(const PowerOptions& opt) {
  const std::vector<gcorr::PowerEstimate> estimates = gcorr::power_study(
      gcorr::setting_from_string(opt.setting), parse_grid(opt.n_grid),
      opt.noise, opt.perms, opt.alpha, opt.replicates, opt.seed,
      parse_kernel(opt.kernel1), parse_kernel(opt.kernel2), opt.rho,
      opt.workers);

  Report report;
  report.config["command"] = "sim-power";
  report.config["setting"] = opt.setting;
  report.config["n_grid"] = opt.n_grid;
  report.config["noise"] = opt.noise;
  report.config["perms"] = opt.perms;
  report.config["alpha"] = opt.alpha;
  report.config["replicates"] = opt.replicates;
  report.config["kernel1"] = opt.kernel1;
  report.config["kernel2"] = opt.kernel2;
  report.config["rho"] = opt.rho;
  report.config["workers"] = opt.workers;
  report.config["seed"] = opt.seed;
  report.header = {"statistic", "n", "alpha", "replicates", "rejections",
                   "power"};
  for (const gcorr::PowerEstimate& e : estimates) {
    ordered_json r;
    r["statistic"] = gcorr::to_string(e.statistic);
    r["n"] = e.n;
    r["alpha"] = e.alpha;
    r["replicates"] = e.replicates;
    r["rejections"] = e.rejections;
    r["power"] = e.power;
    report.add_row(std::move(r));
  }
  report.emit(opt.out, opt.format);
  return 0;
}

struct NullOptions {
  std::size_t n = 200;
  std::size_t replicates = 500;
  std::string hyp = "h0";
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

int run_sim_null(const NullOptions& opt) {
  gcorr::NullStudyHypothesis hyp;
  if (opt.hyp == "h0") {
    hyp = gcorr::NullStudyHypothesis::kIndependent;
  } else if (opt.hyp == "h1") {
    hyp = gcorr::NullStudyHypothesis::kLinearAlternative;
  } else {
    throw std::invalid_argument("--hyp must be h0 or h1");
  }
  const std::vector<double> stats =
      gcorr::null_density_study(opt.n, opt.replicates, opt.seed, hyp);

  Report report;
  report.config["command"] = "sim-null";
  report.config["n"] = opt.n;
  report.config["replicates"] = opt.replicates;
  report.config["hyp"] = opt.hyp;
  report.config["seed"] = opt.seed;
  report.header = {"replicate", "gcov"};
  for (std::size_t i = 0; i < stats.size(); ++i) {
    ordered_json r;
    r["replicate"] = i;
    r["gcov"] = stats[i];
    report.add_row(std::move(r));
  }
  report.emit(opt.out, opt.format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel-based correlation testing for latent-position graphs"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd =
      app.add_subcommand("gen", "sample a graph and write it to a file");
  gen_cmd->add_option("--setting", gen.setting,
                      "dependence setting name or erdos-renyi");
  gen_cmd->add_option("--n", gen.n, "node count")->required();
  gen_cmd->add_option("--noise", gen.noise, "latent noise variance");
  gen_cmd->add_option("--kernel1", gen.kernel1, "first kernel family:bw");
  gen_cmd->add_option("--kernel2", gen.kernel2, "second kernel family:bw");
  gen_cmd->add_option("--rho", gen.rho, "edge sparsity factor in (0,1]");
  gen_cmd->add_option("--p", gen.p, "edge probability for erdos-renyi");
  gen_cmd->add_option("--which", gen.which, "which graph of the pair (1|2)")
      ->check(CLI::Range(1u, 2u));
  gen_cmd->add_option("--seed", gen.seed, "master seed");
  gen_cmd->add_option("--out", gen.out, "output graph path (.tsv|.mtx|.csv)")
      ->required();

  EmbedOptions embed;
  CLI::App* embed_cmd =
      app.add_subcommand("embed", "spectral embedding of a graph file");
  embed_cmd->add_option("--in", embed.in, "input graph path")->required();
  embed_cmd->add_option("--n", embed.n, "declared node count (0 = infer)");
  embed_cmd->add_option("--d", embed.d, "embedding dimension (0 = select)");
  embed_cmd->add_option("--embedding", embed.embedding, "ase|lse");
  embed_cmd->add_option("--dim-method", embed.dim_method,
                        "profile-likelihood|threshold");
  embed_cmd->add_option("--out", embed.out, "report path (default stdout)");
  embed_cmd->add_option("--format", embed.format, "csv|json");

  TestOptions test;
  CLI::App* test_cmd = app.add_subcommand(
      "test", "permutation test of independence between two graphs");
  test_cmd->add_option("graph1", test.graph1, "first graph path")->required();
  test_cmd->add_option("graph2", test.graph2, "second graph path")->required();
  test_cmd->add_option("--n", test.n, "declared node count (0 = infer)");
  test_cmd->add_option("--d", test.d, "single embedding dimension");
  test_cmd->add_option("--d-range", test.d_range,
                       "dimension sweep a..b (default 1..10)");
  test_cmd->add_option("--perms", test.perms, "permutation count");
  test_cmd->add_option("--workers", test.workers, "worker threads");
  test_cmd->add_option("--seed", test.seed, "master seed");
  test_cmd->add_option("--out", test.out, "report path (default stdout)");
  test_cmd->add_option("--format", test.format, "csv|json");

  ConvergenceOptions conv;
  CLI::App* conv_cmd = app.add_subcommand(
      "sim-convergence", "graph statistic vs latent reference over n");
  conv_cmd->add_option("--setting", conv.setting, "dependence setting");
  conv_cmd->add_option("--n-grid", conv.n_grid, "comma-separated node counts");
  conv_cmd->add_option("--noise", conv.noise, "latent noise variance");
  conv_cmd->add_option("--kernel1", conv.kernel1, "first kernel family:bw");
  conv_cmd->add_option("--kernel2", conv.kernel2, "second kernel family:bw");
  conv_cmd->add_option("--d-range", conv.d_range, "dimension sweep a..b");
  conv_cmd->add_option("--replicates", conv.replicates, "replicates per n");
  conv_cmd->add_option("--seed", conv.seed, "master seed");
  conv_cmd->add_option("--out", conv.out, "report path (default stdout)");
  conv_cmd->add_option("--format", conv.format, "csv|json");

  PowerOptions power;
  CLI::App* power_cmd = app.add_subcommand(
      "sim-power", "empirical power of the permutation test over n");
  power_cmd->add_option("--setting", power.setting, "dependence setting");
  power_cmd->add_option("--n-grid", power.n_grid,
                        "comma-separated node counts");
  power_cmd->add_option("--noise", power.noise, "latent noise variance");
  power_cmd->add_option("--perms", power.perms, "permutation count");
  power_cmd->add_option("--alpha", power.alpha, "test level");
  power_cmd->add_option("--replicates", power.replicates, "replicates per n");
  power_cmd->add_option("--kernel1", power.kernel1, "first kernel family:bw");
  power_cmd->add_option("--kernel2", power.kernel2, "second kernel family:bw");
  power_cmd->add_option("--rho", power.rho, "edge sparsity factor");
  power_cmd->add_option("--workers", power.workers, "worker threads");
  power_cmd->add_option("--seed", power.seed, "master seed");
  power_cmd->add_option("--out", power.out, "report path (default stdout)");
  power_cmd->add_option("--format", power.format, "csv|json");

  NullOptions null_opt;
  CLI::App* null_cmd = app.add_subcommand(
      "sim-null", "sample the test statistic under h0 or the linear h1");
  null_cmd->add_option("--n", null_opt.n, "node count");
  null_cmd->add_option("--replicates", null_opt.replicates, "replicates");
  null_cmd->add_option("--hyp", null_opt.hyp, "h0|h1");
  null_cmd->add_option("--seed", null_opt.seed, "master seed");
  null_cmd->add_option("--out", null_opt.out, "report path (default stdout)");
  null_cmd->add_option("--format", null_opt.format, "csv|json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen);
    if (embed_cmd->parsed()) return run_embed(embed);
    if (test_cmd->parsed()) return run_test(test);
    if (conv_cmd->parsed()) return run_sim_convergence(conv);
    if (power_cmd->parsed()) return run_sim_power(power);
    if (null_cmd->parsed()) return run_sim_null(null_opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
