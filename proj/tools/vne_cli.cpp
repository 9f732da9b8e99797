// vne: generate density matrices, estimate their entropy, run benchmark grids.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vne/vne.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

std::uint64_t parse_seed(const std::string& text) {
  std::string digits = text;
  int base = 10;
  if (digits.rfind("0x", 0) == 0 || digits.rfind("0X", 0) == 0) {
    digits = digits.substr(2);
    base = 16;
  }
  std::uint64_t v = 0;
  const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
  if (digits.empty() || res.ec != std::errc() || res.ptr != digits.data() + digits.size())
    vne::fail(vne::Errc::invalid_argument, "seed must be a decimal or 0x-prefixed hex integer: " + text);
  return v;
}

unsigned thread_count(std::optional<unsigned> flag) {
  if (flag) return vne::resolve_threads(*flag);
  if (const char* env = std::getenv("VNE_THREADS")) {
    unsigned v = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      vne::fail(vne::Errc::invalid_argument, "VNE_THREADS must be a non-negative integer");
    return vne::resolve_threads(v);
  }
  return 1;
}

vne::Decay parse_decay(const std::string& name) {
  if (name == "linear") return vne::Decay::linear;
  if (name == "exponential" || name == "exp") return vne::Decay::exponential;
  vne::fail(vne::Errc::invalid_argument, "decay must be linear or exponential");
}

// ---------------------------------------------------------------- generate

struct MatrixSource {
  std::string family;
  std::size_t n = 0;
  std::size_t k = 0;
  std::string decay = "linear";
  std::uint64_t seed = 0;
};

vne::GeneratedMatrix generate(const MatrixSource& src, std::size_t oracle_limit = vne::kDefaultOracleLimit) {
  const vne::RngStream stream(src.seed, 0);
  if (src.n == 0) vne::fail(vne::Errc::invalid_argument, "--n must be at least 1");
  if (src.family == "haar") return vne::generate_haar_like_density(src.n, stream, oracle_limit);
  if (src.family == "tridiagonal") return vne::generate_tridiagonal_poisson(src.n);
  if (src.family == "lowrank") {
    if (src.k == 0) vne::fail(vne::Errc::invalid_argument, "lowrank needs --k");
    return vne::generate_low_rank_density(src.n, src.k, parse_decay(src.decay), stream);
  }
  if (src.family == "linear-uniform") {
    if (src.k == 0) vne::fail(vne::Errc::invalid_argument, "linear-uniform needs --k");
    return vne::generate_linear_plus_uniform(src.n, src.k, stream);
  }
  vne::fail(vne::Errc::invalid_argument, "family must be haar, tridiagonal, lowrank or linear-uniform");
}

fs::path sidecar_path(const fs::path& matrix) { return fs::path(matrix.string() + ".spectrum"); }

int cmd_generate(const MatrixSource& src, const fs::path& out) {
  const auto g = generate(src);
  vne::write_matrix_market(g.matrix, out);
  if (!g.spectrum.empty()) vne::write_spectrum(g.spectrum.probs, sidecar_path(out));
  return 0;
}

// ---------------------------------------------------------------- estimate

struct EstimateOptions {
  std::string method = "exact";
  vne::EstimatorConfig cfg;
  std::string u_mode = "six";
  std::optional<std::size_t> m;
  std::optional<std::size_t> s;
  std::string proj;
  std::optional<std::size_t> rank;
  double s_multiplier = 1.0;
  bool with_exact = false;
  bool no_timing = false;
};

struct Problem {
  vne::SparseSymMatrix matrix;
  vne::SpectralModel spectrum;  // empty when unknown
};

vne::SpectralModel load_spectrum(const fs::path& path, std::size_t n) {
  vne::SpectralModel model;
  model.probs = vne::read_spectrum(path);
  if (model.probs.size() > n) vne::fail(vne::Errc::dimension_mismatch, "spectrum sidecar lists more than n values");
  std::sort(model.probs.begin(), model.probs.end(), std::greater<>());
  model.validate();
  return model;
}

Problem load_problem(const fs::path& matrix, const std::optional<fs::path>& spectrum) {
  Problem p{vne::read_matrix_market(matrix), {}};
  if (spectrum) {
    p.spectrum = load_spectrum(*spectrum, p.matrix.dim());
  } else if (fs::exists(sidecar_path(matrix))) {
    p.spectrum = load_spectrum(sidecar_path(matrix), p.matrix.dim());
  }
  return p;
}

json run_estimate(const Problem& problem, EstimateOptions opt) {
  auto& cfg = opt.cfg;
  cfg.u_mode = vne::UMode::parse(opt.u_mode);
  cfg.m_override = opt.m;
  cfg.s_override = opt.s;
  cfg.validate();
  const vne::SparseSymMatrix& r = problem.matrix;
  vne::SpectralModel model = problem.spectrum;
  if (model.empty() && opt.with_exact) model = vne::exact_entropy(r, cfg.oracle_limit).spectrum;
  const vne::SpectralModel* known = model.empty() ? nullptr : &model;

  json out;
  vne::EstimateReport rep;
  std::vector<double> probs_tilde;
  if (opt.method == "exact") {
    const vne::Stopwatch clock;
    const auto ex = vne::exact_entropy(r, cfg.oracle_limit);
    rep.method = "exact";
    rep.n = r.dim();
    rep.nnz = r.nnz();
    rep.seed = cfg.seed;
    rep.estimate = ex.entropy;
    vne::attach_exact(rep, ex.entropy);
    rep.wall_ms = clock.elapsed_ms();
  } else if (opt.method == "taylor") {
    rep = vne::taylor_entropy(r, cfg, known);
  } else if (opt.method == "chebyshev") {
    rep = vne::chebyshev_entropy(r, cfg, known);
  } else if (opt.method == "sketch") {
    if (!opt.rank) vne::fail(vne::Errc::invalid_argument, "sketch needs --rank");
    if (opt.proj.empty()) vne::fail(vne::Errc::invalid_argument, "sketch needs --proj");
    const vne::Stopwatch clock;
    const auto kind = vne::parse_projection(opt.proj);
    const std::size_t n = r.dim();
    const std::size_t s = kind == vne::ProjectionKind::exact_debug ? n
                          : opt.s ? *opt.s
                                  : vne::default_s_sketch(kind, n, *opt.rank, cfg.epsilon, opt.s_multiplier);
    const vne::RngStream root(cfg.seed, 0);
    const vne::ProjectionSpec spec{kind, s, root.child(vne::kSketchStream)};
    const auto sk = vne::sketch_entropy(r, *opt.rank, spec, cfg.threads, cfg.oracle_limit);
    rep.method = "sketch";
    rep.n = n;
    rep.nnz = r.nnz();
    rep.s_used = s;
    rep.seed = cfg.seed;
    rep.estimate = sk.entropy_tilde;
    probs_tilde = sk.probs_tilde;
    if (known) {
      if (vne::check_assumptions(known, {std::nullopt, std::nullopt, *opt.rank, n}).rank_le_k == vne::Tri::no)
        rep.warnings.emplace_back("assumption violated: rank > k");
      vne::attach_exact(rep, vne::entropy_from_probs(known->probs, 1e-14));
    }
    rep.wall_ms = clock.elapsed_ms();
  } else {
    vne::fail(vne::Errc::invalid_argument, "method must be exact, taylor, chebyshev or sketch");
  }
  if (!std::isfinite(rep.estimate)) vne::fail(vne::Errc::no_convergence, "estimate is not finite");

  out["method"] = rep.method;
  out["n"] = rep.n;
  out["nnz"] = rep.nnz;
  if (rep.m_used) out["m"] = *rep.m_used;
  if (rep.s_used) out["s"] = *rep.s_used;
  if (rep.u_used) out["u"] = *rep.u_used;
  if (rep.p1_tilde) out["p1_tilde"] = *rep.p1_tilde;
  if (opt.method == "taylor" || opt.method == "chebyshev") out["nte"] = rep.nte;
  if (opt.method == "sketch") {
    out["proj"] = vne::projection_name(vne::parse_projection(opt.proj));
    out["rank"] = *opt.rank;
    out["probs"] = probs_tilde;
  }
  out["seed"] = rep.seed;
  out["estimate"] = rep.estimate;
  out["wall_ms"] = opt.no_timing ? 0.0 : rep.wall_ms;
  if (rep.exact) out["exact"] = *rep.exact;
  if (rep.rel_err) out["rel_err"] = *rep.rel_err;
  if (rep.abs_err) out["abs_err"] = *rep.abs_err;
  out["warnings"] = rep.warnings;
  return out;
}

// ---------------------------------------------------------------- bench

std::string csv_double(const std::optional<double>& v) { return v ? vne::format_double(*v) : std::string(); }

template <typename T>
std::vector<T> list_or(const json& grid, const char* key, std::vector<T> fallback) {
  if (!grid.contains(key)) return fallback;
  const auto& v = grid.at(key);
  std::vector<T> out = v.is_array() ? v.get<std::vector<T>>() : std::vector<T>{v.get<T>()};
  if (out.empty()) vne::fail(vne::Errc::invalid_argument, std::string("bench grid: '") + key + "' must be nonempty");
  return out;
}

struct BenchCell {
  std::string method;
  std::string proj;
  bool nte = false;
  std::optional<std::size_t> m;
  std::optional<std::size_t> s;
  std::string u_mode;
  std::uint64_t seed = 0;
  std::size_t rep = 0;
};

struct BenchRow {
  std::optional<double> estimate, exact, rel_err;
  double wall_ms = 0.0;
  std::string error;
};

/// Repetition r > 0 runs with a seed derived from (seed, r); rep 0 uses the seed itself.
std::uint64_t rep_seed(std::uint64_t seed, std::size_t rep) {
  return rep == 0 ? seed : vne::detail::splitmix64(seed ^ vne::detail::splitmix64(rep));
}

std::uint64_t seed_from_json(const json& v) {
  return v.is_string() ? parse_seed(v.get<std::string>()) : v.get<std::uint64_t>();
}

Problem bench_problem(const json& source, const fs::path& base) {
  if (source.contains("path")) {
    fs::path p = source.at("path").get<std::string>();
    if (p.is_relative()) p = base / p;
    if (!fs::exists(p)) vne::fail(vne::Errc::io, "bench grid: matrix file not found: " + p.string());
    std::optional<fs::path> spec;
    if (source.contains("spectrum")) {
      spec = fs::path(source.at("spectrum").get<std::string>());
      if (spec->is_relative()) spec = base / *spec;
    }
    return load_problem(p, spec);
  }
  MatrixSource src;
  src.family = source.at("family").get<std::string>();
  src.n = source.at("n").get<std::size_t>();
  src.k = source.value("k", std::size_t{0});
  src.decay = source.value("decay", std::string("linear"));
  if (source.contains("seed")) src.seed = seed_from_json(source.at("seed"));
  auto g = generate(src);
  return {std::move(g.matrix), std::move(g.spectrum)};
}

int cmd_bench(const fs::path& grid_path, unsigned threads, bool no_timing) {
  std::ifstream is(grid_path);
  if (!is) vne::fail(vne::Errc::io, "cannot open " + grid_path.string());
  json grid;
  try {
    grid = json::parse(is);
  } catch (const json::exception& e) {
    vne::fail(vne::Errc::parse, std::string("bench grid: ") + e.what());
  }

  std::vector<BenchCell> cells;
  Problem problem;
  EstimateOptions base;
  try {
    problem = bench_problem(grid.at("matrix"), grid_path.parent_path());
    const auto methods = list_or<std::string>(grid, "methods", {});
    if (methods.empty()) vne::fail(vne::Errc::invalid_argument, "bench grid: 'methods' is required");
    const auto ms = list_or<std::size_t>(grid, "m", {0});
    const auto ss = list_or<std::size_t>(grid, "s", {0});
    const auto umodes = list_or<std::string>(grid, "u_modes", {"six"});
    const auto ntes = list_or<bool>(grid, "nte", {false});
    const auto projs = list_or<std::string>(grid, "proj", {"countsketch"});
    std::vector<std::uint64_t> seeds;
    for (const auto& s : grid.value("seeds", json::array({0}))) seeds.push_back(seed_from_json(s));
    if (seeds.empty()) vne::fail(vne::Errc::invalid_argument, "bench grid: 'seeds' must be nonempty");
    const std::size_t reps = grid.value("repetitions", std::size_t{1});
    if (reps == 0) vne::fail(vne::Errc::invalid_argument, "bench grid: 'repetitions' must be at least 1");
    base.cfg.epsilon = grid.value("eps", 0.1);
    base.cfg.delta = grid.value("delta", 0.1);
    if (grid.contains("ell")) base.cfg.ell = grid.at("ell").get<double>();
    if (grid.contains("rank")) base.rank = grid.at("rank").get<std::size_t>();
    base.s_multiplier = grid.value("s_multiplier", 1.0);

    const auto opt_count = [](std::size_t v) { return v == 0 ? std::nullopt : std::optional<std::size_t>(v); };
    for (const auto& method : methods) {
      for (std::uint64_t seed : seeds)
        for (std::size_t rep = 0; rep < reps; ++rep) {
          if (method == "exact") {
            cells.push_back({method, "", false, std::nullopt, std::nullopt, "", seed, rep});
          } else if (method == "sketch") {
            for (const auto& proj : projs)
              for (std::size_t s : ss) cells.push_back({method, proj, false, std::nullopt, opt_count(s), "", seed, rep});
          } else {
            for (bool nte : ntes)
              for (const auto& um : umodes)
                for (std::size_t m : ms) {
                  if (nte) {
                    cells.push_back({method, "", true, opt_count(m), std::nullopt, um, seed, rep});
                  } else {
                    for (std::size_t s : ss) cells.push_back({method, "", false, opt_count(m), opt_count(s), um, seed, rep});
                  }
                }
          }
        }
    }
  } catch (const json::exception& e) {
    vne::fail(vne::Errc::parse, std::string("bench grid: ") + e.what());
  }

  std::vector<BenchRow> rows(cells.size());
  vne::parallel_for(cells.size(), threads, [&](std::size_t i) {
    const BenchCell& c = cells[i];
    EstimateOptions opt = base;
    opt.method = c.method;
    opt.proj = c.proj;
    opt.m = c.m;
    opt.s = c.s;
    opt.u_mode = c.u_mode.empty() ? "six" : c.u_mode;
    opt.cfg.nte = c.nte;
    opt.cfg.seed = rep_seed(c.seed, c.rep);
    opt.cfg.threads = 1;
    BenchRow& row = rows[i];
    try {
      const json res = run_estimate(problem, opt);
      row.estimate = res.at("estimate").get<double>();
      if (res.contains("exact")) row.exact = res.at("exact").get<double>();
      if (res.contains("rel_err")) row.rel_err = res.at("rel_err").get<double>();
      row.wall_ms = no_timing ? 0.0 : res.at("wall_ms").get<double>();
    } catch (const vne::Error& e) {
      row.error = vne::errc_name(e.code());
    } catch (const std::exception&) {
      row.error = "internal";
    }
  });

  std::ostringstream os;
  os << "method,proj,nte,m,s,u_mode,seed,rep,estimate,exact,rel_err,wall_ms,error\n";
  struct Summary {
    double sum = 0.0, max = 0.0;
    std::size_t count = 0, errors = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Summary> summary;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const auto& r = rows[i];
    std::ostringstream key;
    key << c.method << ',' << c.proj << ',' << (c.method == "taylor" || c.method == "chebyshev" ? (c.nte ? "1" : "0") : "")
        << ',' << (c.m ? std::to_string(*c.m) : "") << ',' << (c.s ? std::to_string(*c.s) : "") << ',' << c.u_mode;
    os << key.str() << ',' << c.seed << ',' << c.rep << ',' << csv_double(r.estimate) << ',' << csv_double(r.exact)
       << ',' << csv_double(r.rel_err) << ',' << vne::format_double(r.wall_ms) << ',' << r.error << '\n';
    auto [it, inserted] = summary.try_emplace(key.str());
    if (inserted) order.push_back(key.str());
    if (!r.error.empty()) {
      ++it->second.errors;
    } else if (r.rel_err) {
      it->second.sum += *r.rel_err;
      it->second.max = std::max(it->second.max, *r.rel_err);
      ++it->second.count;
    }
  }
  os << "# summary\n";
  os << "method,proj,nte,m,s,u_mode,runs,errors,mean_rel_err,max_rel_err\n";
  for (const auto& key : order) {
    const auto& s = summary.at(key);
    os << key << ',' << s.count << ',' << s.errors << ','
       << (s.count ? vne::format_double(s.sum / static_cast<double>(s.count)) : "") << ','
       << (s.count ? vne::format_double(s.max) : "") << '\n';
  }
  std::cout << os.str();
  return 0;
}

int report_error(const vne::Error& e) {
  std::cerr << "vne: " << vne::errc_name(e.code()) << ": " << e.what() << '\n';
  return vne::is_numerical(e.code()) ? kExitNumerical : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"von Neumann entropy estimation"};
  app.require_subcommand(1);

  MatrixSource gen;
  std::string gen_seed = "0";
  std::string gen_out;
  auto* g = app.add_subcommand("generate", "write a density matrix and its spectrum sidecar");
  g->add_option("--family", gen.family, "haar | tridiagonal | lowrank | linear-uniform")->required();
  g->add_option("--n", gen.n, "dimension")->required();
  g->add_option("--k", gen.k, "rank (lowrank) or number of linear weights (linear-uniform)");
  g->add_option("--decay", gen.decay, "linear | exponential (lowrank)");
  g->add_option("--seed", gen_seed, "decimal or 0x-hex");
  g->add_option("--out", gen_out, "Matrix Market output path")->required();

  EstimateOptions est;
  std::string est_matrix, est_seed = "0";
  std::optional<std::string> est_spectrum;
  std::optional<unsigned> est_threads;
  std::optional<double> est_ell;
  auto* e = app.add_subcommand("estimate", "estimate the entropy of a Matrix Market density matrix");
  e->add_option("matrix", est_matrix, "Matrix Market file")->required();
  e->add_option("--method", est.method, "exact | taylor | chebyshev | sketch");
  e->add_option("--eps", est.cfg.epsilon, "accuracy parameter");
  e->add_option("--delta", est.cfg.delta, "failure probability");
  e->add_option("--ell", est_ell, "lower bound on the eigenvalues");
  e->add_option("--m", est.m, "polynomial degree override");
  e->add_option("--s", est.s, "probe count or sketch size override (0 allowed with --nte)");
  e->add_option("--u-mode", est.u_mode, "six | raw | manual:<v>");
  e->add_flag("--nte", est.cfg.nte, "exact trace of the truncated polynomial (no probes)");
  e->add_option("--proj", est.proj, "gaussian | srht | countsketch | exact");
  e->add_option("--rank", est.rank, "rank k for sketching");
  e->add_option("--s-multiplier", est.s_multiplier, "constant in the default sketch size");
  e->add_option("--seed", est_seed, "decimal or 0x-hex");
  e->add_option("--threads", est_threads, "worker threads, 0 = hardware (env VNE_THREADS)");
  e->add_option("--spectrum", est_spectrum, "spectrum sidecar (default <matrix>.spectrum if present)");
  e->add_option("--oracle-limit", est.cfg.oracle_limit, "largest n for the dense oracle");
  e->add_flag("--with-exact", est.with_exact, "run the dense oracle for exact / rel_err");
  e->add_flag("--no-timing", est.no_timing, "report wall_ms as 0");

  std::string bench_grid;
  std::optional<unsigned> bench_threads;
  bool bench_no_timing = false;
  auto* b = app.add_subcommand("bench", "run a benchmark grid and print CSV");
  b->add_option("grid", bench_grid, "grid JSON file")->required();
  b->add_option("--threads", bench_threads, "cells run in parallel, 0 = hardware (env VNE_THREADS)");
  b->add_flag("--no-timing", bench_no_timing, "report wall_ms as 0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) {
      gen.seed = parse_seed(gen_seed);
      return cmd_generate(gen, gen_out);
    }
    if (*e) {
      est.cfg.seed = parse_seed(est_seed);
      est.cfg.threads = thread_count(est_threads);
      est.cfg.ell = est_ell;
      if (est.s && *est.s == 0 && !est.cfg.nte) vne::fail(vne::Errc::invalid_argument, "--s 0 requires --nte");
      if (est.s && *est.s == 0) est.s.reset();
      const bool oracle_method = est.method == "exact";
      std::optional<fs::path> spec;
      if (est_spectrum) spec = fs::path(*est_spectrum);
      Problem problem = load_problem(est_matrix, oracle_method ? std::nullopt : spec);
      if (oracle_method) problem.spectrum = {};
      std::cout << run_estimate(problem, est).dump() << '\n';
      return 0;
    }
    if (*b) return cmd_bench(bench_grid, thread_count(bench_threads), bench_no_timing);
  } catch (const vne::Error& err) {
    return report_error(err);
  } catch (const std::exception& err) {
    std::cerr << "vne: " << err.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
