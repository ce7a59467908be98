// isoflip command-line driver: spectra, verification reports, pair search and
// the finite-difference cross-check. Exit status: 0 all assertions pass,
// 1 a verification failed or was inconclusive, 2 bad usage or input.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "isoflip/io.hpp"
#include "isoflip/isoflip.hpp"

using namespace isoflip;
using io::json;

namespace {

struct Config {
  std::vector<std::string> inputs;
  std::string output;
  std::string csv;
  std::string trace;
  double kmax = 0.0;
  double grid_density = 20.0;
  double tol_degeneracy = 1e-8;
  double tol_zero = 1e-8;
  double tol_qzero = 1e-6;
  double tol_iso = 1e-9;
  std::uint64_t seed = 0;
  int nmax = 20;
  int j = 1;
  double l1_fraction = 0.4142;
  double length = 1.0;
  double l1 = 0.4142;
  double ppu = 2000.0;
  int count = 10;
  int max_vertices = 11;
  int max_results = 25;
  bool vectors = false;
};

void emit(const Config& cfg, const json& j) {
  const std::string text = j.dump(2) + "\n";
  if (cfg.output.empty())
    std::cout << text;
  else
    io::write_text_file(cfg.output, text);
}

int verdict_status(const VerificationReport& r) { return r.passed() ? 0 : 1; }

void need_inputs(const Config& cfg, std::size_t lo, std::size_t hi) {
  if (cfg.inputs.size() < lo || cfg.inputs.size() > hi)
    throw io::InputError("expected " + std::to_string(lo) + (lo == hi ? "" : "-" + std::to_string(hi)) +
                         " --input file(s)");
}

/// Two graphs with one leaf pair each: either two files (first pair of each)
/// or one file with at least two pairs (the same graph twice).
struct DiscretePair {
  DiscreteGraph g1, g2;
  LeafPair p1, p2;
};

DiscretePair discrete_pair(const Config& cfg) {
  need_inputs(cfg, 1, 2);
  auto a = io::parse_graph(io::read_json_file(cfg.inputs[0]));
  if (cfg.inputs.size() == 2) {
    auto b = io::parse_graph(io::read_json_file(cfg.inputs[1]));
    if (a.pairs.empty() || b.pairs.empty()) throw io::InputError("each input needs a leaf pair");
    return {a.graph, b.graph, a.pairs[0], b.pairs[0]};
  }
  if (a.pairs.size() < 2) throw io::InputError("a single input needs two leaf pairs");
  return {a.graph, a.graph, a.pairs[0], a.pairs[1]};
}

/// Applies the glues listed in the file. Indices refer to the input's leaf
/// pairs, so they are applied from the highest index down.
MetricGraph apply_glues(const io::MetricInput& in) {
  auto glues = in.glues;
  std::sort(glues.begin(), glues.end(), [](const auto& a, const auto& b) { return a.pair > b.pair; });
  MetricGraph m = in.graph;
  for (const auto& g : glues) m = glue_leaf_pair(m, g.pair, g.l1);
  return m;
}

SecularOptions secular_options(const Config& cfg, double kmax) {
  SecularOptions o;
  o.kmax = kmax;
  o.grid_density = cfg.grid_density;
  o.zero_tol = cfg.tol_qzero;
  o.keep_trace = !cfg.trace.empty();
  return o;
}

int cmd_spectrum(const Config& cfg) {
  need_inputs(cfg, 1, 1);
  const auto in = io::parse_graph(io::read_json_file(cfg.inputs[0]));
  const Spectrum s = laplacian_spectrum(in.graph, {cfg.tol_degeneracy, cfg.tol_zero});
  const auto rows = nodal_profiles(in.graph, s);
  const auto bounds = check_bounds(in.graph, rows);
  emit(cfg, {{"graph", io::graph_json(in.graph, in.pairs)},
             {"spectrum", io::spectrum_json(s, cfg.vectors)},
             {"profiles", io::profiles_json(rows)},
             {"betti", bounds.beta},
             {"bounds_hold", bounds.all_pass()}});
  if (!cfg.csv.empty()) io::write_text_file(cfg.csv, io::profiles_csv(rows));
  return bounds.all_pass() ? 0 : 1;
}

int cmd_qspectrum(const Config& cfg) {
  need_inputs(cfg, 1, 1);
  const MetricGraph m = apply_glues(io::parse_metric(io::read_json_file(cfg.inputs[0])));
  const double kmax = cfg.kmax > 0 ? cfg.kmax : std::numbers::pi * (cfg.nmax + 1) / m.total_length();
  const QSpectrum s = secular_spectrum(m, secular_options(cfg, kmax));
  const auto rows = q_nodal_profiles(m, s, s.size(), cfg.tol_qzero);
  const auto bounds = check_bounds(m.betti(), rows);
  emit(cfg, {{"graph", io::metric_json(m)},
             {"kmax", io::num(kmax)},
             {"spectrum", io::qspectrum_json(s)},
             {"profiles", io::profiles_json(rows, true)},
             {"betti", bounds.beta},
             {"bounds_hold", bounds.all_pass()}});
  if (!cfg.csv.empty()) io::write_text_file(cfg.csv, io::profiles_csv(rows, true));
  if (!cfg.trace.empty()) io::write_text_file(cfg.trace, io::trace_csv(s));
  return bounds.all_pass() ? 0 : 1;
}

int cmd_verify(const Config& cfg, const std::string& which) {
  VerificationReport rep;
  if (which == "lemma1" || which == "thm1") {
    const auto d = discrete_pair(cfg);
    rep = which == "lemma1" ? verify_lemma1(d.g1, d.g2, d.p1, d.p2, cfg.j, cfg.tol_iso)
                            : verify_theorem1(d.g1, d.g2, d.p1, d.p2, cfg.j, cfg.tol_iso);
  } else if (which == "thm2") {
    need_inputs(cfg, 1, 1);
    const auto in = io::parse_graph(io::read_json_file(cfg.inputs[0]));
    if (in.pairs.empty()) throw io::InputError("thm2 needs a leaf pair in the input");
    rep = verify_theorem2(in.graph, in.pairs[0], cfg.tol_iso);
  } else if (which == "cor1") {
    const auto d = discrete_pair(cfg);
    rep = verify_corollary1(d.g1, d.g2, d.p1, d.p2, cfg.tol_iso);
  } else if (which == "thm3") {
    need_inputs(cfg, 1, 2);
    const auto a = io::parse_metric(io::read_json_file(cfg.inputs[0]));
    Theorem3Options opt;
    opt.n_max = cfg.nmax;
    opt.l1_fraction = cfg.l1_fraction;
    opt.secular = secular_options(cfg, 1.0);
    opt.secular.keep_trace = false;
    if (!a.glues.empty()) {
      const auto& p = a.graph.leaf_pairs()[a.glues[0].pair];
      opt.l1_fraction = a.glues[0].l1 / a.graph.edge(p.edge_plus).length;
    }
    if (cfg.inputs.size() == 2) {
      const auto b = io::parse_metric(io::read_json_file(cfg.inputs[1]));
      if (a.graph.leaf_pairs().empty() || b.graph.leaf_pairs().empty())
        throw io::InputError("each input needs a leaf pair");
      rep = verify_theorem3(a.graph, b.graph, 0, 0, opt);
    } else {
      if (a.graph.leaf_pairs().size() < 2) throw io::InputError("a single input needs two leaf pairs");
      rep = verify_theorem3(a.graph, a.graph, 0, 1, opt);
    }
  } else if (which == "interlacing") {
    const double kmax = cfg.kmax > 0 ? cfg.kmax : 30.0;
    rep = interlacing_check(cfg.length, cfg.l1, kmax);
  } else {
    throw io::InputError("unknown verify case '" + which + "'");
  }
  emit(cfg, io::report_json(rep));
  return verdict_status(rep);
}

int cmd_search(const Config& cfg) {
  SearchLimits lim;
  lim.max_vertices = cfg.max_vertices;
  lim.max_results = cfg.max_results;
  lim.seed = cfg.seed;
  lim.tol = cfg.tol_iso;
  const auto res = search_noniso_pairs(lim);
  emit(cfg, io::catalog_json(res));
  std::fprintf(stderr, "search: %ld candidates, %ld admissible pairs, %zu reported\n", res.stats.candidates,
               res.stats.pairs_admissible, res.pairs.size());
  return res.pairs.empty() ? 1 : 0;
}

/// Secular eigenvalues against the finite-difference oracle.
int cmd_oracle(const Config& cfg) {
  need_inputs(cfg, 1, 1);
  const MetricGraph m = apply_glues(io::parse_metric(io::read_json_file(cfg.inputs[0])));
  const auto fd = fd_oracle(m, cfg.ppu, cfg.count + 1);
  const QSpectrum s = secular_spectrum_count(m, cfg.count + 1, secular_options(cfg, 1.0));
  const auto k = s.k_values();
  VerificationReport rep;
  rep.claim = "fd_oracle";
  rep.input("ppu", io::fmt12(cfg.ppu));
  json rows = json::array();
  double worst = 0.0;
  for (int n = 1; n <= cfg.count; ++n) {
    const double lam = k[n] * k[n];
    const double rel = std::abs(fd[n] - lam) / lam;
    worst = std::max(worst, rel);
    rows.push_back({{"n", n + 1}, {"secular", io::num(lam)}, {"fd", io::num(fd[n])}, {"relative", io::num(rel)}});
  }
  rep.check_le("relative_agreement", worst, 1e-3);
  json out = io::report_json(rep);
  out["table"] = rows;
  emit(cfg, out);
  return verdict_status(rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isospectral graph constructions: spectra, flip and nodal counts, verification"};
  app.require_subcommand(1);
  Config cfg;

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.inputs, "input JSON file (repeat for a second graph)")->check(CLI::ExistingFile);
    sub->add_option("--output", cfg.output, "write JSON here instead of stdout");
  };
  auto add_tols = [&](CLI::App* sub) {
    sub->add_option("--tol-degeneracy", cfg.tol_degeneracy, "relative eigenvalue degeneracy tolerance");
    sub->add_option("--tol-zero", cfg.tol_zero, "relative zero tolerance for eigenvector entries");
    sub->add_option("--tol-qzero", cfg.tol_qzero, "relative zero tolerance for quantum vertex values");
    sub->add_option("--tol-iso", cfg.tol_iso, "isospectrality tolerance");
  };
  auto add_secular = [&](CLI::App* sub) {
    sub->add_option("--kmax", cfg.kmax, "largest wavenumber to scan");
    sub->add_option("--grid-density", cfg.grid_density, "scan points per mean eigenvalue spacing");
    sub->add_option("--nmax", cfg.nmax, "number of eigenvalues to compare or report");
  };

  auto* spectrum = app.add_subcommand("spectrum", "discrete Laplacian spectrum with flip/nodal profiles");
  add_io(spectrum);
  add_tols(spectrum);
  spectrum->add_option("--csv", cfg.csv, "also write the profile table as CSV");
  spectrum->add_flag("--vectors", cfg.vectors, "include eigenvectors");

  auto* qspectrum = app.add_subcommand("qspectrum", "quantum graph spectrum with flip/nodal profiles");
  add_io(qspectrum);
  add_tols(qspectrum);
  add_secular(qspectrum);
  qspectrum->add_option("--csv", cfg.csv, "also write the profile table as CSV");
  qspectrum->add_option("--trace", cfg.trace, "write the secular scan (k, sigma_min) as CSV");

  std::string which;
  auto* verify = app.add_subcommand("verify", "check one claim on given inputs");
  verify->add_option("case", which, "lemma1 | thm1 | thm2 | cor1 | thm3 | interlacing")
      ->required()
      ->check(CLI::IsMember({"lemma1", "thm1", "thm2", "cor1", "thm3", "interlacing"}));
  add_io(verify);
  add_tols(verify);
  add_secular(verify);
  verify->add_option("--j", cfg.j, "arm position of the inserted edge");
  verify->add_option("--l1-fraction", cfg.l1_fraction, "glue distance as a fraction of the leaf length");
  verify->add_option("--length", cfg.length, "leaf length for interlacing");
  verify->add_option("--l1", cfg.l1, "glue distance for interlacing");

  auto* search = app.add_subcommand("search", "search trees for non-isospectral pairs with equal counts");
  search->add_option("--output", cfg.output, "write the catalog here instead of stdout");
  search->add_option("--max-vertices", cfg.max_vertices, "largest tree order");
  search->add_option("--max-results", cfg.max_results, "pairs to report");
  search->add_option("--seed", cfg.seed, "evaluation-order seed (results do not depend on it)");
  search->add_option("--tol-iso", cfg.tol_iso, "isospectrality tolerance");

  auto* oracle = app.add_subcommand("oracle", "compare secular eigenvalues with finite differences");
  add_io(oracle);
  oracle->add_option("--ppu", cfg.ppu, "finite-difference points per unit length (>= 100)");
  oracle->add_option("--count", cfg.count, "nonzero eigenvalues to compare");
  oracle->add_option("--grid-density", cfg.grid_density, "scan points per mean eigenvalue spacing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*spectrum) return cmd_spectrum(cfg);
    if (*qspectrum) return cmd_qspectrum(cfg);
    if (*verify) return cmd_verify(cfg, which);
    if (*search) return cmd_search(cfg);
    if (*oracle) return cmd_oracle(cfg);
  } catch (const io::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const GraphError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
