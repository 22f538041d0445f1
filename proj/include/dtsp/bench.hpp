#pragma once

// Experiment harness: runs DT / DT_{D,k} on generated or loaded instances,
// verifies every tour, and reports excess over the Held-Karp bound as CSV.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dtsp/downsweep.hpp"
#include "dtsp/errors.hpp"
#include "dtsp/generators.hpp"
#include "dtsp/held_karp.hpp"
#include "dtsp/instance.hpp"
#include "dtsp/oracles.hpp"
#include "dtsp/spanning_tree.hpp"
#include "dtsp/tour.hpp"
#include "dtsp/upsweep.hpp"

namespace dtsp {

// Largest instance on which the suite runs DT with unlimited depth.
inline constexpr std::size_t kFullDtMaxNodes = 31623;

inline constexpr std::string_view kCsvHeader =
    "instance,n,heuristic,D,k,mst_weight,tour_weight,hk_bound,excess_pct,wall_time_ms,seed";

// DT_{D,k}. D = 1 (or 2) applies no degree increase; DT is DT_{1,inf}.
struct HeuristicSpec {
  std::size_t degree_limit = 1;
  std::size_t depth = kUnlimitedDepth;

  bool is_plain_dt() const { return degree_limit <= 2 && depth == kUnlimitedDepth; }

  std::string depth_string() const {
    return depth == kUnlimitedDepth ? "inf" : std::to_string(depth);
  }

  std::string label() const {
    if (is_plain_dt()) return "DT";
    return "DT_" + std::to_string(degree_limit) + "_" + depth_string();
  }

  friend bool operator==(const HeuristicSpec&, const HeuristicSpec&) = default;
};

// "dt" or "D:k" with k a positive integer or "inf".
inline HeuristicSpec parse_heuristic(std::string_view token) {
  if (token == "dt" || token == "DT") return {};
  const auto colon = token.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("heuristic '" + std::string(token) + "' is not 'dt' or 'D:k'");
  }
  auto number = [&](std::string_view s) -> std::size_t {
    std::size_t v = 0;
    if (s.empty()) throw ConfigError("empty number in heuristic '" + std::string(token) + "'");
    for (char ch : s) {
      if (ch < '0' || ch > '9') {
        throw ConfigError("bad number '" + std::string(s) + "' in heuristic spec");
      }
      v = v * 10 + static_cast<std::size_t>(ch - '0');
    }
    return v;
  };
  HeuristicSpec spec;
  spec.degree_limit = number(token.substr(0, colon));
  const std::string_view k = token.substr(colon + 1);
  spec.depth = (k == "inf") ? kUnlimitedDepth : number(k);
  if (spec.degree_limit < 1) throw ConfigError("degree limit D must be >= 1");
  if (spec.depth < 1) throw ConfigError("depth k must be >= 1");
  return spec;
}

// The DT_{D,k} columns of the reference experiment; plain DT first if asked.
inline std::vector<HeuristicSpec> default_grid(bool include_plain_dt) {
  std::vector<HeuristicSpec> grid;
  if (include_plain_dt) grid.push_back({});
  for (auto [d, k] : {std::pair<std::size_t, std::size_t>{1, 16}, {3, 16}, {3, 32}, {4, 16},
                      {4, 32}, {5, 16}, {5, 32}}) {
    grid.push_back({d, k});
  }
  return grid;
}

// Comma-separated heuristic tokens, or "default" / "default+dt".
inline std::vector<HeuristicSpec> parse_grid(std::string_view spec) {
  if (spec == "default") return default_grid(false);
  if (spec == "default+dt") return default_grid(true);
  std::vector<HeuristicSpec> grid;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', start), spec.size());
    const std::string_view token = spec.substr(start, comma - start);
    if (token.empty()) throw ConfigError("empty entry in heuristic grid");
    grid.push_back(parse_heuristic(token));
    start = comma + 1;
  }
  return grid;
}

enum class InstanceClass { Uniform, Clustered };

struct GeneratorSpec {
  InstanceClass cls = InstanceClass::Uniform;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double box = 1e6;
  std::size_t clusters = 0;  // 0: default n / 100
};

inline InstanceClass parse_instance_class(std::string_view s) {
  if (s == "uniform") return InstanceClass::Uniform;
  if (s == "clustered") return InstanceClass::Clustered;
  throw ConfigError("instance class must be 'uniform' or 'clustered', got '" + std::string(s) + "'");
}

// "uniform:N:SEED[:BOX]" or "clustered:N:SEED[:BOX[:CLUSTERS]]".
inline GeneratorSpec parse_generator(std::string_view text) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  parts.push_back(current);
  if (parts.size() < 3 || parts.size() > 5) {
    throw ConfigError("generator spec must be class:N:SEED[:BOX[:CLUSTERS]]");
  }
  GeneratorSpec g;
  g.cls = parse_instance_class(parts[0]);
  try {
    g.n = std::stoull(parts[1]);
    g.seed = std::stoull(parts[2]);
    if (parts.size() > 3) g.box = std::stod(parts[3]);
    if (parts.size() > 4) {
      if (g.cls != InstanceClass::Clustered) throw ConfigError("only clustered takes CLUSTERS");
      g.clusters = std::stoull(parts[4]);
    }
  } catch (const std::logic_error&) {
    throw ConfigError("malformed number in generator spec '" + std::string(text) + "'");
  }
  return g;
}

inline Instance generate(const GeneratorSpec& g) {
  return g.cls == InstanceClass::Uniform ? generate_uniform(g.n, g.seed, g.box)
                                         : generate_clustered(g.n, g.seed, g.box, g.clusters);
}

struct RunRecord {
  std::string instance;
  std::size_t n = 0;
  std::string heuristic;
  std::size_t degree_limit = 1;
  std::size_t depth = kUnlimitedDepth;
  double mst_weight = 0.0;
  double tour_weight = 0.0;
  double hk_bound = 0.0;
  double excess_pct = 0.0;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
};

struct RunOptions {
  std::size_t hk_iterations = 1000;
  // Reuse a bound already computed for this instance.
  std::optional<double> hk_bound;
  bool compute_hk = true;
  bool timing = true;
};

struct RunOutcome {
  RunRecord record;
  Tour tour;
  RootedTree tree;
  DownsweepStats downsweep;
  UpsweepStats upsweep;
};

// MST -> root -> degree increase -> upsweep(k) -> downsweep -> verification
// -> Held-Karp bound. wall_time_ms covers the heuristic only (up to the
// downsweep). Verification failures throw InvariantError.
inline RunOutcome run_single(const Instance& inst, const HeuristicSpec& h,
                             const RunOptions& options = {}, std::uint64_t seed = 0) {
  if (inst.size() < 3) throw ConfigError("run: need at least 3 nodes");
  if (h.degree_limit < 1 || h.depth < 1) throw ConfigError("run: D and k must be >= 1");

  const auto start = std::chrono::steady_clock::now();
  const auto mst = minimum_spanning_tree(inst);
  RootedTree tree = root_tree(mst, inst.size());
  if (h.degree_limit >= 3) tree = degree_increase(tree, h.degree_limit);
  const UpsweepResult up = upsweep(inst, tree, h.depth, /*keep_bipartitions=*/true);
  DownsweepStats down;
  Tour tour = downsweep(inst, tree, up, &down);
  const auto stop = std::chrono::steady_clock::now();

  RunRecord rec;
  rec.instance = inst.name();
  rec.n = inst.size();
  rec.heuristic = h.label();
  rec.degree_limit = h.degree_limit;
  rec.depth = h.depth;
  rec.mst_weight = tree_weight(mst);
  rec.tour_weight = tour.weight;
  rec.seed = seed;
  rec.wall_time_ms =
      options.timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;

  if (!is_permutation_of_nodes(tour.order, inst.size())) {
    throw InvariantError("run: tour is not a permutation");
  }
  if (!is_conforming(tour, tree)) throw InvariantError("run: tour does not conform to the tree");
  if (down.tree_path_edges > inst.size()) {
    throw InvariantError("run: downsweep tree paths exceed n edges");
  }
  if (tour.weight > 2.0 * rec.mst_weight * (1.0 + 1e-9)) {
    throw InvariantError("run: tour weight exceeds twice the MST weight");
  }

  if (options.hk_bound) {
    rec.hk_bound = *options.hk_bound;
  } else if (options.compute_hk) {
    rec.hk_bound = held_karp_lower_bound(inst, options.hk_iterations, seed);
  }
  if (options.hk_bound || options.compute_hk) {
    if (rec.hk_bound > tour.weight * (1.0 + 1e-9)) {
      throw InvariantError("run: Held-Karp bound exceeds the tour weight");
    }
    rec.excess_pct = rec.hk_bound > 0.0 ? 100.0 * (tour.weight / rec.hk_bound - 1.0) : 0.0;
  }
  return RunOutcome{std::move(rec), std::move(tour), std::move(tree), down, up.stats};
}

namespace detail {

inline std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

inline void write_csv_row(const RunRecord& r, std::ostream& out, bool with_seed = true) {
  const std::string d = std::to_string(r.degree_limit);
  const std::string k = r.depth == kUnlimitedDepth ? "inf" : std::to_string(r.depth);
  const double nan = std::nan("");
  out << r.instance << ',' << r.n << ',' << r.heuristic << ',' << d << ',' << k << ','
      << detail::fixed(r.failed ? nan : r.mst_weight, 6) << ','
      << detail::fixed(r.failed ? nan : r.tour_weight, 6) << ','
      << detail::fixed(r.failed ? nan : r.hk_bound, 6) << ','
      << detail::fixed(r.failed ? nan : r.excess_pct, 4) << ','
      << detail::fixed(r.failed ? nan : r.wall_time_ms, 3) << ',';
  if (with_seed) out << r.seed;
  out << '\n';
}

struct SuiteConfig {
  std::vector<std::size_t> sizes;
  std::size_t seeds = 1;
  std::uint64_t first_seed = 1;
  std::vector<HeuristicSpec> grid;
  InstanceClass cls = InstanceClass::Uniform;
  double box = 1e6;
  std::size_t clusters = 0;
  std::size_t hk_iterations = 1000;
  std::size_t jobs = 1;
  bool timing = true;
};

struct SuiteResult {
  std::vector<RunRecord> rows;   // (size, seed, heuristic) order
  std::vector<RunRecord> means;  // (size, heuristic) order, instance = "mean"
  std::vector<std::string> notes;
};

inline SuiteResult run_suite(const SuiteConfig& cfg) {
  if (cfg.sizes.empty() || cfg.grid.empty() || cfg.seeds == 0) {
    throw ConfigError("suite: sizes, seeds and grid must be non-empty");
  }
  for (std::size_t n : cfg.sizes) {
    if (n < 4) throw ConfigError("suite: sizes must be >= 4");
  }

  struct Job {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t n : cfg.sizes)
    for (std::size_t s = 0; s < cfg.seeds; ++s) jobs.push_back({n, cfg.first_seed + s});

  SuiteResult result;
  auto grid_for = [&](std::size_t n) {
    std::vector<HeuristicSpec> g;
    for (const auto& h : cfg.grid) {
      if (h.depth == kUnlimitedDepth && n > kFullDtMaxNodes) continue;
      g.push_back(h);
    }
    return g;
  };
  for (std::size_t n : cfg.sizes) {
    if (grid_for(n).size() != cfg.grid.size()) {
      result.notes.push_back("n=" + std::to_string(n) + ": unlimited-depth entries skipped above " +
                             std::to_string(kFullDtMaxNodes) + " nodes");
    }
  }

  std::vector<std::vector<RunRecord>> per_job(jobs.size());
  auto work = [&](std::size_t j) {
    const Job& job = jobs[j];
    GeneratorSpec g{cfg.cls, job.n, job.seed, cfg.box, cfg.clusters};
    const Instance inst = generate(g);
    std::optional<double> hk;
    std::string hk_error;
    try {
      hk = held_karp_lower_bound(inst, cfg.hk_iterations, job.seed);
    } catch (const Error& e) {
      hk_error = e.what();
    }
    for (const auto& h : grid_for(job.n)) {
      RunRecord rec;
      try {
        if (!hk) throw InvariantError("Held-Karp bound failed: " + hk_error);
        RunOptions opts;
        opts.hk_bound = hk;
        opts.timing = cfg.timing;
        rec = run_single(inst, h, opts, job.seed).record;
      } catch (const Error& e) {
        rec.instance = inst.name();
        rec.n = inst.size();
        rec.heuristic = h.label();
        rec.degree_limit = h.degree_limit;
        rec.depth = h.depth;
        rec.seed = job.seed;
        rec.failed = true;
        rec.error = e.what();
      }
      per_job[j].push_back(std::move(rec));
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.jobs, jobs.size()));
  if (workers == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) work(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) work(j);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (auto& rows : per_job)
    for (auto& r : rows) result.rows.push_back(std::move(r));

  for (std::size_t n : cfg.sizes) {
    for (const auto& h : grid_for(n)) {
      RunRecord mean;
      mean.instance = "mean";
      mean.n = n;
      mean.heuristic = h.label();
      mean.degree_limit = h.degree_limit;
      mean.depth = h.depth;
      std::size_t count = 0;
      for (const auto& r : result.rows) {
        if (r.n != n || !(r.heuristic == mean.heuristic) || r.failed) continue;
        mean.mst_weight += r.mst_weight;
        mean.tour_weight += r.tour_weight;
        mean.hk_bound += r.hk_bound;
        mean.excess_pct += r.excess_pct;
        mean.wall_time_ms += r.wall_time_ms;
        ++count;
      }
      if (count == 0) {
        mean.failed = true;
      } else {
        const double c = static_cast<double>(count);
        mean.mst_weight /= c;
        mean.tour_weight /= c;
        mean.hk_bound /= c;
        mean.excess_pct /= c;
        mean.wall_time_ms /= c;
      }
      result.means.push_back(std::move(mean));
    }
  }
  return result;
}

// Data rows grouped by size, each group followed by its mean rows.
inline void write_suite_csv(const SuiteResult& result, std::ostream& out) {
  out << kCsvHeader << '\n';
  std::size_t mean_at = 0;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    write_csv_row(result.rows[i], out);
    const bool size_ends = i + 1 == result.rows.size() || result.rows[i + 1].n != result.rows[i].n;
    if (!size_ends) continue;
    while (mean_at < result.means.size() && result.means[mean_at].n == result.rows[i].n) {
      write_csv_row(result.means[mean_at++], out, /*with_seed=*/false);
    }
  }
}

// SVG with the points, tree edges (grey, dashed) and tour edges (red).
inline std::string render_svg(const Instance& inst, const RootedTree& tree,
                              std::span<const Node> order) {
  if (!inst.has_points()) throw ConfigError("plot: instance has no coordinates");
  if (tree.size() != inst.size() || order.size() != inst.size()) {
    throw ConfigError("plot: tree, tour and instance sizes differ");
  }
  const auto& pts = inst.points();
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const auto& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double size = 800.0, margin = 20.0;
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-12});
  const double scale = (size - 2 * margin) / span;
  auto sx = [&](double x) { return detail::fixed(margin + (x - min_x) * scale, 2); };
  auto sy = [&](double y) { return detail::fixed(size - margin - (y - min_y) * scale, 2); };
  auto line = [&](std::ostringstream& out, Node a, Node b, const char* cls) {
    out << "  <line class=\"" << cls << "\" x1=\"" << sx(pts[a].x) << "\" y1=\"" << sy(pts[a].y)
        << "\" x2=\"" << sx(pts[b].x) << "\" y2=\"" << sy(pts[b].y) << "\"/>\n";
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
         "viewBox=\"0 0 800 800\">\n"
      << "  <style>.tree{stroke:#999;stroke-width:1;stroke-dasharray:4 3}"
         ".tour{stroke:#c00;stroke-width:1.5;fill:none}.node{fill:#000}</style>\n";
  for (Node v = 0; v < tree.size(); ++v) {
    if (const auto p = tree.parent(v)) line(out, v, *p, "tree");
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    line(out, order[i], order[(i + 1) % order.size()], "tour");
  }
  for (const auto& p : pts) {
    out << "  <circle class=\"node\" cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"2\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

inline void emit_plot(const Instance& inst, const RootedTree& tree, const Tour& tour,
                      const std::string& path) {
  const std::string svg = render_svg(inst, tree, tour.order);
  std::ofstream out(path);
  if (!out) throw Error("plot: cannot open '" + path + "' for writing");
  out << svg;
}

struct VerifyReport {
  double dt_weight = 0.0;
  double conforming_min_weight = 0.0;
  double optimal_weight = 0.0;
  double depth_first_weight = 0.0;
  double hk_bound = 0.0;
  bool dt_conforms = false;
  bool ok = false;
};

// Cross-checks plain DT against the exhaustive oracles on a small instance.
inline VerifyReport verify_instance(const Instance& inst, std::size_t max_n = kMaxOracleNodes) {
  if (inst.size() > std::min(max_n, kMaxOracleNodes)) {
    throw GuardError("verify: instance has " + std::to_string(inst.size()) +
                     " nodes, oracle limit is " + std::to_string(std::min(max_n, kMaxOracleNodes)));
  }
  if (inst.size() < 3) throw ConfigError("verify: need at least 3 nodes");
  const RootedTree tree = rooted_mst(inst);
  const UpsweepResult up = upsweep(inst, tree, kUnlimitedDepth, true);
  const Tour dt = downsweep(inst, tree, up);

  VerifyReport rep;
  rep.dt_weight = dt.weight;
  rep.dt_conforms = is_conforming(dt, tree);
  rep.conforming_min_weight = enumerate_conforming_min(inst, tree).weight;
  rep.optimal_weight = brute_force_optimal(inst).weight;
  rep.depth_first_weight = depth_first_shortcut(inst, tree).weight;
  rep.hk_bound = held_karp_lower_bound(inst, 1000);
  rep.ok = rep.dt_conforms && nearly_equal(rep.dt_weight, rep.conforming_min_weight) &&
           rep.dt_weight <= 2.0 * rep.optimal_weight * (1 + 1e-9) &&
           rep.dt_weight <= rep.depth_first_weight * (1 + 1e-9) &&
           rep.hk_bound <= rep.optimal_weight * (1 + 1e-9);
  return rep;
}

}  // namespace dtsp
