#pragma once

// The rkum command-line tool: simulate | fit | influence | compare.
//
// Exit codes: 0 success, 2 usage, 3 data error, 4 numerical failure.

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rkum/io.hpp"
#include "rkum/plot.hpp"
#include "rkum/rkum.hpp"

namespace rkum::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

enum Exit { ok = 0, usage = 2, data = 3, numerical = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 1;
  std::string out = ".";
  bool quiet = false;
};

// ---------------------------------------------------------------- helpers

inline std::string relative_to(const fs::path& p, const fs::path& base) {
  const fs::path rel = fs::absolute(p).lexically_normal().lexically_relative(
      fs::absolute(base).lexically_normal());
  return rel.empty() ? p.generic_string() : rel.generic_string();
}

inline ordered_json versions() {
  ordered_json v;
  v["rkum"] = kVersion;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
               "." + std::to_string(EIGEN_MINOR_VERSION);
  return v;
}

inline ordered_json file_entries(const std::vector<fs::path>& files, const fs::path& base) {
  ordered_json arr = ordered_json::array();
  for (const auto& f : files)
    arr.push_back({{"path", relative_to(f, base)}, {"fnv1a64", io::file_hash(f)}});
  return arr;
}

inline void write_json(const fs::path& path, const ordered_json& j) {
  io::write_file(path, j.dump(2) + "\n");
}

/// JSON number that stays exact through a round trip; non-finite values become null.
inline ordered_json exact(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(exact(v(i)));
  return arr;
}

inline ordered_json weights_json(const WeightVector& w) {
  return {{"iterations", w.iterations},
          {"converged", w.converged},
          {"final_objective", exact(w.final_objective)}};
}

inline ordered_json kernel_json(const KernelSpec& k) {
  ordered_json j;
  j["kind"] = to_string(k.kind);
  if (k.bandwidth) j["bandwidth"] = exact(*k.bandwidth);
  return j;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    const auto b = cur.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = cur.find_last_not_of(" \t");
    out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

inline DataMatrix load_view(const fs::path& p, bool header) { return DataMatrix(io::read_csv(p, header)); }

// ---------------------------------------------------------------- methods

/// The influence methods the tool knows, in display order.
struct MethodInfo {
  std::string name;
  std::string title;
};

inline const std::vector<MethodInfo>& known_methods() {
  static const std::vector<MethodInfo> m = {
      {"linear-cca", "Linear CCA"},
      {"kernel-cca", "Kernel CCA"},
      {"hampel-rkcca", "Hampel's robust kernel CCA"},
      {"huber-rkcca", "Huber's robust kernel CCA"},
      {"multiple-kernel-cca", "Multiple kernel CCA"},
  };
  return m;
}

inline std::string canonical_method(const std::string& s) {
  if (s == "huber") return "huber-rkcca";
  if (s == "hampel") return "hampel-rkcca";
  if (s == "linear") return "linear-cca";
  if (s == "kernel") return "kernel-cca";
  if (s == "mkcca" || s == "multiple") return "multiple-kernel-cca";
  for (const auto& m : known_methods())
    if (m.name == s) return s;
  throw UsageError("unknown method '" + s + "'");
}

inline std::vector<std::string> parse_methods(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& m : split_list(s)) {
    const std::string c = canonical_method(m);
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  if (out.empty()) throw UsageError("method list is empty");
  return out;
}

inline std::string method_title(const std::string& name) {
  for (const auto& m : known_methods())
    if (m.name == name) return m.title;
  return name;
}

struct MethodRun {
  InfluenceProfile profile;
  std::vector<WeightVector> centering;
  WeightVector joint;
};

inline MethodRun run_method(const std::string& method, const std::vector<DataMatrix>& views,
                            const KernelSpec& kernel, const CcaConfig& cfg, Index component) {
  MethodRun r;
  if (method == "multiple-kernel-cca") {
    if (views.size() < 3) throw DataError("multiple-kernel-cca needs a third view (z.csv)");
    const MkccaSolution sol = multiple_kernel_cca(views, LossSpec::square(), kernel, cfg);
    r.profile = eif_multiple_kernel_corr(sol, component);
    for (const auto& v : sol.views) r.centering.push_back(v.centering);
    r.joint = sol.joint;
    return r;
  }
  LossSpec loss = LossSpec::square();
  KernelSpec k = kernel;
  if (method == "linear-cca") k = KernelSpec::linear();
  if (method == "hampel-rkcca") loss = LossSpec::data_driven_of(LossKind::hampel);
  if (method == "huber-rkcca") loss = LossSpec::data_driven_of(LossKind::huber);
  const CcaSolution sol = kernel_cca(views[0], views[1], loss, k, cfg);
  r.profile = eif_kernel_corr(sol, component);
  if (method == "linear-cca") r.profile.method = InfluenceMethod::linear_cca;
  r.centering = {sol.x.centering, sol.y.centering};
  r.joint = sol.joint;
  return r;
}

/// Views of a simulate output directory for one condition.
struct Conditions {
  std::vector<DataMatrix> ideal;
  std::vector<DataMatrix> contaminated;
  std::vector<Index> contaminated_indices;
  std::vector<fs::path> inputs;
};

inline Conditions load_conditions(const fs::path& dir, bool need_third) {
  Conditions c;
  std::vector<std::string> names = {"x", "y"};
  if (need_third || fs::exists(dir / "z.csv")) names.push_back("z");
  for (const auto& n : names) {
    const fs::path dirty = dir / (n + ".csv");
    const fs::path clean = dir / (n + "_clean.csv");
    if (!fs::exists(dirty) || !fs::exists(clean))
      throw DataError("missing " + dirty.string() + " or " + clean.string());
    c.contaminated.push_back(load_view(dirty, false));
    c.ideal.push_back(load_view(clean, false));
    c.inputs.push_back(dirty);
    c.inputs.push_back(clean);
  }
  const fs::path manifest = dir / "manifest.json";
  if (fs::exists(manifest)) {
    const auto j = nlohmann::json::parse(io::read_file(manifest), nullptr, false);
    if (j.is_discarded()) throw DataError("malformed " + manifest.string());
    if (j.contains("contaminated_indices"))
      for (const auto& v : j["contaminated_indices"]) c.contaminated_indices.push_back(v.get<Index>());
    c.inputs.push_back(manifest);
  }
  return c;
}

/// 1-based rank by |value|, ties to the lower index.
inline std::vector<Index> ranks_of(const InfluenceProfile& p) {
  const auto order = rank_outliers(p, p.values.size());
  std::vector<Index> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[static_cast<std::size_t>(order[r])] = static_cast<Index>(r + 1);
  return rank;
}

inline std::string profile_csv(const InfluenceProfile& p) {
  const auto rank = ranks_of(p);
  std::string s = "index,eif_value,rank\n";
  for (Index i = 0; i < p.values.size(); ++i)
    s += std::to_string(i) + "," + io::format_double(p.values(i)) + "," +
         std::to_string(rank[static_cast<std::size_t>(i)]) + "\n";
  return s;
}

inline double top_recall(const InfluenceProfile& p, const std::vector<Index>& truth,
                         double fraction = 0.05) {
  if (truth.empty()) return std::nan("");
  const auto n = p.values.size();
  const auto k = std::clamp<Index>(static_cast<Index>(std::llround(fraction * static_cast<double>(n))), 1, n);
  const auto top = rank_outliers(p, k);
  Index hits = 0;
  for (Index i : truth)
    if (std::find(top.begin(), top.end(), i) != top.end()) ++hits;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

// ---------------------------------------------------------------- commands

struct SimulateArgs {
  std::string mode;
  Index n = 300;
  double rate = 0.05;
  std::string allele = "shared";
  bool reorder = false;
};

inline int cmd_simulate(const SimulateArgs& a, const Globals& g, std::ostream& out) {
  const fs::path dir = g.out;
  fs::create_directories(dir);
  TwoViewParams p;
  p.n = a.n;
  p.contamination_rate = a.rate;
  p.seed = g.seed;
  p.reorder = a.reorder;
  p.allele_mode = a.allele == "per-entry" ? AlleleMode::per_entry : AlleleMode::shared_marker_uniform;

  SynthDataset d;
  ordered_json params;
  params["n"] = p.n;
  params["pt"] = p.pt;
  params["p1"] = p.p1;
  params["p2"] = p.p2;
  params["sig1"] = p.sig1;
  params["sig2"] = p.sig2;
  params["maf_range"] = {p.maf_lo, p.maf_hi};
  params["contamination_rate"] = p.contamination_rate;
  params["allele_mode"] = a.allele;
  params["reorder"] = p.reorder;
  if (a.mode == "three-view") {
    ThreeViewParams tp;
    tp.base = p;
    d = gen_three_view(tp);
    params["p3"] = tp.p3;
    params["sig3"] = tp.sig3;
    params["cluster_props"] = tp.cluster_props;
    params["p_dmp"] = tp.p_dmp;
    params["delta_methyl"] = tp.delta_methyl;
    params["contaminated_noise_scale"] = tp.contaminated_noise_scale;
  } else {
    d = gen_two_view(p);
  }

  const std::vector<std::string> names = {"x", "y", "z"};
  std::vector<fs::path> files;
  for (std::size_t v = 0; v < d.views.size(); ++v) {
    files.push_back(dir / (names[v] + ".csv"));
    io::write_csv(files.back(), d.views[v].values());
  }
  for (std::size_t v = 0; v < d.clean_views.size(); ++v) {
    files.push_back(dir / (names[v] + "_clean.csv"));
    io::write_csv(files.back(), d.clean_views[v].values());
  }

  ordered_json m;
  m["command"] = "simulate";
  m["mode"] = a.mode;
  m["seed"] = g.seed;
  m["params"] = params;
  m["contaminated_indices"] = d.contaminated_indices;
  if (!d.cluster_labels.empty()) m["cluster_labels"] = d.cluster_labels;
  m["outputs"] = file_entries(files, dir);
  m["versions"] = versions();
  write_json(dir / "manifest.json", m);
  if (!g.quiet)
    out << "simulated " << a.mode << " data (n=" << p.n << ", "
        << d.contaminated_indices.size() << " contaminated rows) in " << dir.string() << "\n";
  return ok;
}

struct FitArgs {
  std::string x, y, z;
  std::string kernel = "rbf";
  std::optional<double> bandwidth;
  std::string loss = "huber";
  std::string loss_config;
  double kappa = 1e-5;
  int ncomp = 10;
  std::string constraint = "weighted";
  int max_iter = 100;
  double tol = 1e-8;
  bool header = false;
};

inline KernelSpec kernel_from(const std::string& kind, std::optional<double> bw) {
  KernelSpec k;
  k.kind = parse_kernel_kind(kind);
  if (bw) {
    if (k.kind != KernelKind::rbf) throw UsageError("--bandwidth applies to the rbf kernel only");
    if (!(*bw > 0.0)) throw UsageError("--bandwidth must be positive");
    k.bandwidth = bw;
  }
  return k;
}

inline CcaConfig config_from(double kappa, int ncomp, const std::string& constraint, int max_iter,
                             double tol) {
  CcaConfig cfg;
  cfg.kappa = kappa;
  cfg.ncomp = ncomp;
  cfg.constraint_mode = parse_constraint_mode(constraint);
  cfg.kirwls.max_iter = max_iter;
  cfg.kirwls.rel_tol = tol;
  return cfg;
}

inline int cmd_fit(const FitArgs& a, const Globals& g, std::ostream& out) {
  const fs::path dir = g.out;
  fs::create_directories(dir);

  LossSpec loss;
  if (!a.loss_config.empty()) {
    const auto j = nlohmann::json::parse(io::read_file(a.loss_config), nullptr, false);
    if (j.is_discarded()) throw DataError("malformed loss config '" + a.loss_config + "'");
    loss = j.get<LossSpec>();
  } else {
    loss = LossSpec::data_driven_of(parse_loss_kind(a.loss));
  }
  const KernelSpec kernel = kernel_from(a.kernel, a.bandwidth);
  const CcaConfig cfg = config_from(a.kappa, a.ncomp, a.constraint, a.max_iter, a.tol);

  std::vector<fs::path> inputs = {a.x, a.y};
  if (!a.z.empty()) inputs.emplace_back(a.z);
  std::vector<DataMatrix> views;
  for (const auto& p : inputs) views.push_back(load_view(p, a.header));
  for (const auto& v : views)
    if (v.rows() != views.front().rows())
      throw DataError("views have different row counts (" + std::to_string(views.front().rows()) +
                      " vs " + std::to_string(v.rows()) + ")");

  const MkccaSolution sol = multiple_kernel_cca(views, loss, kernel, cfg);

  const std::vector<std::string> names = {"x", "y", "z"};
  std::vector<std::string> header;
  Eigen::MatrixXd variates(sol.n(), sol.ncomp() * static_cast<Index>(views.size()));
  for (std::size_t u = 0; u < views.size(); ++u) {
    variates.middleCols(static_cast<Index>(u) * sol.ncomp(), sol.ncomp()) = sol.views[u].variates;
    for (Index j = 0; j < sol.ncomp(); ++j) header.push_back("cv_" + names[u] + "_" + std::to_string(j + 1));
  }
  const fs::path vpath = dir / "variates.csv";
  io::write_csv(vpath, variates, header);

  ordered_json s;
  s["command"] = "fit";
  s["n"] = sol.n();
  s["views"] = views.size();
  s["kcor"] = vector_json(sol.kcor);
  s["eigenvalues"] = vector_json(sol.eigenvalues);
  nlohmann::json lj = loss;
  s["loss"] = ordered_json::parse(lj.dump());
  ordered_json kernels = ordered_json::array();
  ordered_json centering = ordered_json::array();
  for (const auto& v : sol.views) {
    kernels.push_back(kernel_json(v.kernel));
    centering.push_back(weights_json(v.centering));
  }
  s["kernels"] = kernels;
  s["config"] = {{"kappa", cfg.kappa},
                 {"ncomp", cfg.ncomp},
                 {"constraint", to_string(cfg.constraint_mode)},
                 {"max_iter", cfg.kirwls.max_iter},
                 {"tol", cfg.kirwls.rel_tol}};
  s["kirwls"] = {{"centering", centering}, {"joint", weights_json(sol.joint)}};
  s["jittered"] = sol.jittered;
  s["inputs"] = file_entries(inputs, dir);
  s["outputs"] = file_entries({vpath}, dir);
  s["versions"] = versions();
  write_json(dir / "solution.json", s);
  if (!g.quiet) out << "kcor_1 = " << io::format_double(sol.kcor(0)) << "\n";
  return ok;
}

struct InfluenceArgs {
  std::string data;
  std::string methods = "linear-cca,kernel-cca,hampel-rkcca,huber-rkcca";
  std::string kernel = "linear";
  std::optional<double> bandwidth;
  double kappa = 1e-5;
  int ncomp = 10;
  int component = 1;
  std::string constraint = "weighted";
  int max_iter = 100;
  double tol = 1e-8;
  std::string format = "both";
};

struct Grid {
  std::vector<std::string> methods;
  std::map<std::pair<std::string, std::string>, MethodRun> runs;
  Conditions cond;
};

inline Grid run_grid(const std::string& data_dir, const std::string& methods,
                     const std::string& kernel_kind, std::optional<double> bw, double kappa,
                     int ncomp, int component, const std::string& constraint, int max_iter,
                     double tol) {
  Grid g;
  g.methods = parse_methods(methods);
  if (component < 1 || component > ncomp) throw UsageError("--component must be in [1, ncomp]");
  const bool third = std::find(g.methods.begin(), g.methods.end(), "multiple-kernel-cca") != g.methods.end();
  g.cond = load_conditions(data_dir, third);
  const KernelSpec kernel = kernel_from(kernel_kind, bw);
  const CcaConfig cfg = config_from(kappa, ncomp, constraint, max_iter, tol);
  for (const auto& m : g.methods) {
    g.runs[{m, "ideal"}] = run_method(m, g.cond.ideal, kernel, cfg, component - 1);
    g.runs[{m, "contaminated"}] = run_method(m, g.cond.contaminated, kernel, cfg, component - 1);
  }
  return g;
}

inline int cmd_influence(const InfluenceArgs& a, const Globals& g, std::ostream& out) {
  if (a.format != "csv" && a.format != "svg" && a.format != "both")
    throw UsageError("--format must be csv, svg or both");
  const fs::path dir = g.out;
  fs::create_directories(dir);
  const Grid grid = run_grid(a.data, a.methods, a.kernel, a.bandwidth, a.kappa, a.ncomp,
                             a.component, a.constraint, a.max_iter, a.tol);

  std::vector<fs::path> files;
  if (a.format != "svg") {
    for (const auto& m : grid.methods)
      for (const char* c : {"ideal", "contaminated"}) {
        files.push_back(dir / ("profile_" + m + "_" + c + ".csv"));
        io::write_file(files.back(), profile_csv(grid.runs.at({m, c}).profile));
      }
  }
  if (a.format != "csv") {
    std::vector<plot::ProfileRow> rows;
    for (const auto& m : grid.methods)
      rows.push_back({method_title(m), grid.runs.at({m, "ideal"}).profile.values,
                      grid.runs.at({m, "contaminated"}).profile.values});
    files.push_back(dir / "influence.svg");
    io::write_file(files.back(), plot::profiles_svg(rows));
  }

  ordered_json m;
  m["command"] = "influence";
  m["seed"] = g.seed;
  m["params"] = {{"methods", grid.methods}, {"kernel", a.kernel},   {"kappa", a.kappa},
                 {"ncomp", a.ncomp},        {"component", a.component},
                 {"constraint", a.constraint}, {"format", a.format}};
  m["inputs"] = file_entries(grid.cond.inputs, dir);
  m["outputs"] = file_entries(files, dir);
  m["versions"] = versions();
  write_json(dir / "influence_manifest.json", m);
  if (!g.quiet) {
    for (const auto& meth : grid.methods)
      out << meth << ": max|EIF| ideal " << io::format_double(grid.runs.at({meth, "ideal"}).profile.values.cwiseAbs().maxCoeff())
          << ", contaminated "
          << io::format_double(grid.runs.at({meth, "contaminated"}).profile.values.cwiseAbs().maxCoeff())
          << "\n";
  }
  return ok;
}

inline int cmd_compare(const InfluenceArgs& a, const Globals& g, std::ostream& out) {
  const fs::path dir = g.out;
  fs::create_directories(dir);
  const Grid grid = run_grid(a.data, a.methods, a.kernel, a.bandwidth, a.kappa, a.ncomp,
                             a.component, a.constraint, a.max_iter, a.tol);

  std::string csv =
      "method,condition,max_abs_eif,top5_recall,kirwls_iterations_centering,kirwls_iterations_joint\n";
  for (const auto& m : grid.methods)
    for (const char* c : {"ideal", "contaminated"}) {
      const MethodRun& r = grid.runs.at({m, c});
      int centering = 0;
      for (const auto& w : r.centering) centering += w.iterations;
      csv += m + "," + c + "," + io::format_double(r.profile.values.cwiseAbs().maxCoeff()) + "," +
             io::format_double(top_recall(r.profile, grid.cond.contaminated_indices)) + "," +
             std::to_string(centering) + "," + std::to_string(r.joint.iterations) + "\n";
    }
  const fs::path table = dir / "compare.csv";
  io::write_file(table, csv);

  ordered_json m;
  m["command"] = "compare";
  m["seed"] = g.seed;
  m["params"] = {{"methods", grid.methods}, {"kernel", a.kernel}, {"kappa", a.kappa},
                 {"ncomp", a.ncomp},        {"component", a.component},
                 {"constraint", a.constraint}, {"top_fraction", 0.05}};
  m["inputs"] = file_entries(grid.cond.inputs, dir);
  m["outputs"] = file_entries({table}, dir);
  m["versions"] = versions();
  write_json(dir / "compare_manifest.json", m);
  if (!g.quiet) out << csv;
  return ok;
}

// ---------------------------------------------------------------- entry

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust kernel CCA and influence-based outlier detection"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress progress output and warnings");

  const std::vector<std::string> kernels = {"linear", "rbf", "rbfdot", "ibs"};
  const std::vector<std::string> constraints = {"weighted", "ridge"};

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Generate synthetic two- or three-view data");
  sim->add_option("--mode", sa.mode, "two-view or three-view")
      ->required()
      ->check(CLI::IsMember({"two-view", "three-view"}));
  sim->add_option("--n", sa.n, "Sample count")->check(CLI::Range(2, 1000000))->capture_default_str();
  sim->add_option("--rate", sa.rate, "Contamination rate")->check(CLI::Range(0.0, 0.999999))->capture_default_str();
  sim->add_option("--allele-mode", sa.allele, "shared or per-entry")
      ->check(CLI::IsMember({"shared", "per-entry"}))
      ->capture_default_str();
  sim->add_flag("--reorder", sa.reorder, "Move contaminated rows to the end");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit (robust) kernel CCA to view CSVs");
  fit->add_option("--x", fa.x, "First view CSV")->required();
  fit->add_option("--y", fa.y, "Second view CSV")->required();
  fit->add_option("--z", fa.z, "Optional third view CSV");
  fit->add_option("--kernel", fa.kernel)->check(CLI::IsMember(kernels))->capture_default_str();
  fit->add_option("--bandwidth", fa.bandwidth, "RBF bandwidth (default: median heuristic)");
  fit->add_option("--loss", fa.loss)
      ->check(CLI::IsMember({"square", "huber", "hampel", "tukey"}, CLI::ignore_case))
      ->capture_default_str();
  fit->add_option("--loss-config", fa.loss_config, "JSON loss specification");
  fit->add_option("--kappa", fa.kappa)->check(CLI::NonNegativeNumber)->capture_default_str();
  fit->add_option("--ncomp", fa.ncomp)->check(CLI::Range(1, 1000000))->capture_default_str();
  fit->add_option("--constraint", fa.constraint)->check(CLI::IsMember(constraints))->capture_default_str();
  fit->add_option("--max-iter", fa.max_iter)->check(CLI::Range(1, 1000000))->capture_default_str();
  fit->add_option("--tol", fa.tol)->check(CLI::PositiveNumber)->capture_default_str();
  fit->add_flag("--header", fa.header, "Input CSVs have a header row");

  InfluenceArgs ia;
  auto add_grid_options = [&](CLI::App* sub) {
    sub->add_option("--data", ia.data, "Directory written by simulate")->required();
    sub->add_option("--methods", ia.methods, "Comma-separated methods")->capture_default_str();
    sub->add_option("--kernel", ia.kernel)->check(CLI::IsMember(kernels))->capture_default_str();
    sub->add_option("--bandwidth", ia.bandwidth);
    sub->add_option("--kappa", ia.kappa)->check(CLI::NonNegativeNumber)->capture_default_str();
    sub->add_option("--ncomp", ia.ncomp)->check(CLI::Range(1, 1000000))->capture_default_str();
    sub->add_option("--component", ia.component, "1-based component")->capture_default_str();
    sub->add_option("--constraint", ia.constraint)->check(CLI::IsMember(constraints))->capture_default_str();
    sub->add_option("--max-iter", ia.max_iter)->check(CLI::Range(1, 1000000))->capture_default_str();
    sub->add_option("--tol", ia.tol)->check(CLI::PositiveNumber)->capture_default_str();
  };
  auto* inf = app.add_subcommand("influence", "Influence profiles on ideal and contaminated data");
  add_grid_options(inf);
  inf->add_option("--format", ia.format)->check(CLI::IsMember({"csv", "svg", "both"}))->capture_default_str();
  auto* cmp = app.add_subcommand("compare", "Tabulate max |EIF|, recall and KIRWLS iterations");
  add_grid_options(cmp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  WarningSink previous;
  if (g.quiet) previous = set_warning_sink([](std::string_view) {});
  struct Restore {
    WarningSink& prev;
    bool active;
    ~Restore() {
      if (active) set_warning_sink(std::move(prev));
    }
  } restore{previous, g.quiet};

  try {
    if (*sim) return cmd_simulate(sa, g, out);
    if (*fit) return cmd_fit(fa, g, out);
    if (*inf) return cmd_influence(ia, g, out);
    if (*cmp) return cmd_compare(ia, g, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return usage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return numerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return data;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return data;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return data;
  }
  return usage;
}

}  // namespace rkum::cli
