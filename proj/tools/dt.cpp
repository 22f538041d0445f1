// dt: generate instances, run DT / DT_{D,k}, run benchmark suites, and
// cross-check against exhaustive search on small inputs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dtsp/dtsp.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kParse = 3, kGuard = 4, kInvariant = 5 };

dtsp::Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dtsp::ConfigError("cannot open '" + path + "'");
  return dtsp::parse_tsplib(in);
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw dtsp::ConfigError("cannot open '" + path + "' for writing");
  out << content;
}

std::vector<std::size_t> parse_sizes(const std::string& list) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      sizes.push_back(std::stoull(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw dtsp::ConfigError("bad size '" + item + "' in --sizes");
    }
  }
  return sizes;
}

struct GenArgs {
  std::string cls;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double box = 1.0;
  std::size_t clusters = 0;
  double sigma = 0.0;
  std::string out = "-";
};

struct RunArgs {
  std::string input;
  std::string gen;
  std::string heuristic = "dt";
  std::size_t degree_limit = 1;
  std::string depth = "inf";
  std::string tour_out;
  std::string tour_format = "tsplib";
  std::string plot;
  bool csv = false;
  std::size_t hk_iterations = 1000;
};

struct SuiteArgs {
  std::string sizes;
  std::size_t seeds = 1;
  std::string grid = "default";
  std::string cls = "uniform";
  std::string out = "-";
  double box = 1e6;
  bool with_full = false;
  bool no_timing = false;
  std::size_t jobs = 1;
  std::size_t hk_iterations = 1000;
};

struct VerifyArgs {
  std::string input;
  std::size_t max_n = dtsp::kMaxOracleNodes;
};

int do_gen(const GenArgs& a) {
  dtsp::Instance inst = a.cls == "uniform"
                            ? dtsp::generate_uniform(a.n, a.seed, a.box)
                            : dtsp::generate_clustered(a.n, a.seed, a.box, a.clusters, a.sigma);
  write_file(a.out, dtsp::write_tsplib(inst));
  return kOk;
}

int do_run(const RunArgs& a) {
  if (a.input.empty() == a.gen.empty()) {
    throw dtsp::ConfigError("run: give exactly one of --input and --gen");
  }
  std::uint64_t seed = 0;
  dtsp::Instance inst = [&] {
    if (!a.input.empty()) return load_instance(a.input);
    const auto g = dtsp::parse_generator(a.gen);
    seed = g.seed;
    return dtsp::generate(g);
  }();

  dtsp::HeuristicSpec h;
  if (a.heuristic == "dtk") {
    h = dtsp::parse_heuristic(std::to_string(a.degree_limit) + ":" + a.depth);
  } else if (a.heuristic == "dt") {
    if (a.degree_limit != 1 || a.depth != "inf") {
      throw dtsp::ConfigError("run: --heuristic dt takes no --degree-limit/--depth; use dtk");
    }
  } else {
    throw dtsp::ConfigError("run: --heuristic must be dt or dtk");
  }

  dtsp::RunOptions opts;
  opts.hk_iterations = a.hk_iterations;
  const dtsp::RunOutcome res = dtsp::run_single(inst, h, opts, seed);

  if (!a.tour_out.empty()) {
    std::ostringstream out;
    if (a.tour_format == "tsplib") {
      dtsp::write_tour_tsplib(res.tour.order, inst.name(), out);
    } else if (a.tour_format == "plain") {
      dtsp::write_tour_plain(res.tour.order, out);
    } else {
      throw dtsp::ConfigError("run: --tour-format must be tsplib or plain");
    }
    write_file(a.tour_out, out.str());
  }
  if (!a.plot.empty()) dtsp::emit_plot(inst, res.tree, res.tour, a.plot);

  const auto& r = res.record;
  if (a.csv) {
    std::cout << dtsp::kCsvHeader << '\n';
    dtsp::write_csv_row(r, std::cout);
  } else {
    std::printf("instance   %s (n=%zu)\n", r.instance.c_str(), r.n);
    std::printf("heuristic  %s\n", r.heuristic.c_str());
    std::printf("mst        %.6f\n", r.mst_weight);
    std::printf("tour       %.6f\n", r.tour_weight);
    std::printf("hk bound   %.6f\n", r.hk_bound);
    std::printf("excess     %.4f %%\n", r.excess_pct);
    std::printf("time       %.3f ms\n", r.wall_time_ms);
  }
  return kOk;
}

int do_suite(const SuiteArgs& a) {
  dtsp::SuiteConfig cfg;
  cfg.sizes = parse_sizes(a.sizes);
  cfg.seeds = a.seeds;
  cfg.grid = dtsp::parse_grid(a.grid);
  if (a.with_full && !(cfg.grid.front() == dtsp::HeuristicSpec{})) {
    cfg.grid.insert(cfg.grid.begin(), dtsp::HeuristicSpec{});
  }
  cfg.cls = dtsp::parse_instance_class(a.cls);
  cfg.box = a.box;
  cfg.hk_iterations = a.hk_iterations;
  cfg.jobs = a.jobs;
  cfg.timing = !a.no_timing;

  const dtsp::SuiteResult result = dtsp::run_suite(cfg);
  for (const auto& note : result.notes) std::cerr << "note: " << note << '\n';
  std::size_t failed = 0;
  for (const auto& r : result.rows) {
    if (!r.failed) continue;
    ++failed;
    std::cerr << "failed: " << r.instance << ' ' << r.heuristic << ": " << r.error << '\n';
  }
  std::ostringstream out;
  dtsp::write_suite_csv(result, out);
  write_file(a.out, out.str());
  return failed == 0 ? kOk : kInvariant;
}

int do_verify(const VerifyArgs& a) {
  const dtsp::Instance inst = load_instance(a.input);
  const dtsp::VerifyReport rep = dtsp::verify_instance(inst, a.max_n);
  std::printf("dt               %.6f  conforming=%s\n", rep.dt_weight, rep.dt_conforms ? "yes" : "no");
  std::printf("conforming min   %.6f\n", rep.conforming_min_weight);
  std::printf("optimal          %.6f\n", rep.optimal_weight);
  std::printf("depth-first      %.6f\n", rep.depth_first_weight);
  std::printf("hk bound         %.6f\n", rep.hk_bound);
  std::printf("%s\n", rep.ok ? "OK" : "MISMATCH");
  return rep.ok ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-weight double-tree shortcutting for metric TSP"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random Euclidean instance (TSPLIB)");
  gen_cmd->add_option("class", gen.cls, "uniform or clustered")
      ->required()
      ->check(CLI::IsMember({"uniform", "clustered"}));
  gen_cmd->add_option("--n", gen.n, "Number of points")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->required();
  gen_cmd->add_option("--box", gen.box, "Side of the square")->capture_default_str();
  gen_cmd->add_option("--clusters", gen.clusters, "Cluster count (0: n/100)");
  gen_cmd->add_option("--sigma", gen.sigma, "Cluster spread (0: box/(50 sqrt(clusters)))");
  gen_cmd->add_option("-o,--output", gen.out, "Output file, - for stdout");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run DT or DT_{D,k} on one instance");
  run_cmd->add_option("--input", run.input, "TSPLIB instance");
  run_cmd->add_option("--gen", run.gen, "uniform:N:SEED[:BOX] or clustered:N:SEED[:BOX[:C]]");
  run_cmd->add_option("--heuristic", run.heuristic, "dt or dtk")->capture_default_str();
  run_cmd->add_option("--degree-limit", run.degree_limit, "D for dtk")->check(CLI::PositiveNumber);
  run_cmd->add_option("--depth", run.depth, "k for dtk, or inf")->capture_default_str();
  run_cmd->add_option("--tour-out", run.tour_out, "Write the tour here");
  run_cmd->add_option("--tour-format", run.tour_format, "tsplib or plain")->capture_default_str();
  run_cmd->add_option("--plot", run.plot, "Write an SVG of tree and tour");
  run_cmd->add_flag("--csv", run.csv, "Print a CSV row instead of a summary");
  run_cmd->add_option("--hk-iterations", run.hk_iterations, "Held-Karp ascent steps")
      ->capture_default_str();

  SuiteArgs suite;
  auto* suite_cmd = app.add_subcommand("suite", "Run a heuristic grid over generated instances");
  suite_cmd->add_option("--sizes", suite.sizes, "Comma-separated instance sizes")->required();
  suite_cmd->add_option("--seeds", suite.seeds, "Instances per size (seeds 1..N)")
      ->check(CLI::PositiveNumber);
  suite_cmd->add_option("--grid", suite.grid, "default, default+dt, or D:k list (dt = 1:inf)")
      ->capture_default_str();
  suite_cmd->add_option("--class", suite.cls, "uniform or clustered")->capture_default_str();
  suite_cmd->add_option("-o,--output", suite.out, "CSV file, - for stdout");
  suite_cmd->add_option("--box", suite.box, "Side of the square")->capture_default_str();
  suite_cmd->add_flag("--with-full", suite.with_full, "Also run DT with unlimited depth");
  suite_cmd->add_flag("--no-timing", suite.no_timing, "Report 0 wall time (byte-stable CSV)");
  suite_cmd->add_option("--jobs", suite.jobs, "Worker threads")->check(CLI::PositiveNumber);
  suite_cmd->add_option("--hk-iterations", suite.hk_iterations, "Held-Karp ascent steps")
      ->capture_default_str();

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Cross-check DT against exhaustive search");
  verify_cmd->add_option("--input", verify.input, "TSPLIB instance")->required();
  verify_cmd->add_option("--max-n", verify.max_n, "Refuse larger instances")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*gen_cmd) return do_gen(gen);
    if (*run_cmd) return do_run(run);
    if (*suite_cmd) return do_suite(suite);
    if (*verify_cmd) return do_verify(verify);
  } catch (const dtsp::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const dtsp::GuardError& e) {
    std::cerr << "guard: " << e.what() << '\n';
    return kGuard;
  } catch (const dtsp::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kInvariant;
  } catch (const dtsp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const dtsp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInvariant;
  }
  return kOk;
}
