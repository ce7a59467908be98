#pragma once

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "isoflip/graph.hpp"
#include "isoflip/metric.hpp"
#include "isoflip/nodal.hpp"
#include "isoflip/qspectra.hpp"
#include "isoflip/report.hpp"
#include "isoflip/spectra.hpp"
#include "isoflip/theorems.hpp"

namespace isoflip::io {

using nlohmann::json;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rounds to 12 significant digits so that serialised output is stable.
inline double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  double y = std::strtod(buf, nullptr);
  return y == 0.0 ? 0.0 : y;  // no "-0"
}

inline std::string fmt12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", round12(x));
  return buf;
}

/// Non-finite values become null.
inline json num(double x) { return std::isfinite(x) ? json(round12(x)) : json(nullptr); }

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": malformed JSON: " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

namespace detail {

template <class T>
T get_field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string(what) + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string(what) + ": bad \"" + key + "\": " + e.what());
  }
}

inline std::vector<Edge> read_edges(const json& j) {
  std::vector<Edge> edges;
  for (const auto& e : get_field<std::vector<std::vector<int>>>(j, "edges", "graph")) {
    if (e.size() != 2) throw InputError("graph: every edge needs exactly two endpoints");
    edges.push_back({e[0], e[1]});
  }
  return edges;
}

inline json arm_json(const std::vector<Vertex>& arm) { return json(arm); }

/// Eigenvalues within 1e-12 of the spectral scale print as 0 (no "-4e-17").
inline double snap(double x, double scale) { return std::abs(x) <= 1e-12 * std::max(scale, 1.0) ? 0.0 : x; }

inline double lambda_scale(const std::vector<NodalProfile>& rows) {
  double s = 0.0;
  for (const auto& p : rows) s = std::max(s, std::abs(p.lambda));
  return s;
}

}  // namespace detail

struct GraphInput {
  DiscreteGraph graph;
  std::vector<LeafPair> pairs;
};

/// {"vertices": V, "edges": [[u,v],...], "leaf_pairs": [{"root", "arm_plus", "arm_minus"}]}
inline GraphInput parse_graph(const json& j) {
  const int n = detail::get_field<int>(j, "vertices", "graph");
  const auto edges = detail::read_edges(j);
  GraphInput out{DiscreteGraph(n, edges), {}};
  if (j.contains("leaf_pairs"))
    for (const auto& p : j.at("leaf_pairs")) {
      LeafPair lp{detail::get_field<int>(p, "root", "leaf pair"),
                  detail::get_field<std::vector<int>>(p, "arm_plus", "leaf pair"),
                  detail::get_field<std::vector<int>>(p, "arm_minus", "leaf pair")};
      validate_leaf_pair(out.graph, lp);
      out.pairs.push_back(std::move(lp));
    }
  return out;
}

inline json graph_json(const DiscreteGraph& g, const std::vector<LeafPair>& pairs = {}) {
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
  json j{{"vertices", g.vertex_count()}, {"edges", edges}};
  if (!pairs.empty()) {
    json ps = json::array();
    for (const auto& p : pairs) ps.push_back({{"root", p.root}, {"arm_plus", p.arm_plus}, {"arm_minus", p.arm_minus}});
    j["leaf_pairs"] = ps;
  }
  return j;
}

struct GlueSpec {
  int pair = 0;
  double l1 = 0.0;
};

struct MetricInput {
  MetricGraph graph;
  std::vector<GlueSpec> glues;
};

/// Graph format plus "lengths": [...] (one per edge, in listed order) and
/// optional "glues": [{"pair": i, "l1": x}]. Leaf pairs name the two leaves:
/// {"root": u, "arm_plus": [v+], "arm_minus": [v-]}.
inline MetricInput parse_metric(const json& j) {
  const int n = detail::get_field<int>(j, "vertices", "metric graph");
  const auto edges = detail::read_edges(j);
  const auto lengths = detail::get_field<std::vector<double>>(j, "lengths", "metric graph");
  if (lengths.size() != edges.size())
    throw InputError("metric graph: " + std::to_string(edges.size()) + " edges but " + std::to_string(lengths.size()) +
                     " lengths");
  std::vector<MetricEdge> me;
  for (std::size_t e = 0; e < edges.size(); ++e) me.push_back({edges[e].u, edges[e].v, lengths[e]});
  MetricGraph bare(n, me);
  std::vector<MetricLeafPair> pairs;
  if (j.contains("leaf_pairs"))
    for (const auto& p : j.at("leaf_pairs")) {
      const auto plus = detail::get_field<std::vector<int>>(p, "arm_plus", "leaf pair");
      const auto minus = detail::get_field<std::vector<int>>(p, "arm_minus", "leaf pair");
      if (plus.size() != 1 || minus.size() != 1)
        throw InputError("metric leaf pair: arms must name exactly one leaf vertex each");
      pairs.push_back(metric_leaf_pair(bare, detail::get_field<int>(p, "root", "leaf pair"), plus[0], minus[0]));
    }
  MetricInput out{MetricGraph(n, std::move(me), std::move(pairs)), {}};
  if (j.contains("glues"))
    for (const auto& gl : j.at("glues")) {
      GlueSpec s{detail::get_field<int>(gl, "pair", "glue"), detail::get_field<double>(gl, "l1", "glue")};
      if (s.pair < 0 || s.pair >= static_cast<int>(out.graph.leaf_pairs().size()))
        throw InputError("glue refers to missing leaf pair " + std::to_string(s.pair));
      out.glues.push_back(s);
    }
  return out;
}

inline json metric_json(const MetricGraph& m) {
  json edges = json::array(), lengths = json::array();
  for (const auto& e : m.edges()) {
    edges.push_back({e.u, e.v});
    lengths.push_back(num(e.length));
  }
  json j{{"vertices", m.vertex_count()}, {"edges", edges}, {"lengths", lengths}};
  if (!m.leaf_pairs().empty()) {
    json ps = json::array();
    for (const auto& p : m.leaf_pairs())
      ps.push_back({{"root", p.root},
                    {"arm_plus", {m.other_end(p.edge_plus, p.root)}},
                    {"arm_minus", {m.other_end(p.edge_minus, p.root)}}});
    j["leaf_pairs"] = ps;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Spectra and profiles
// ---------------------------------------------------------------------------

inline json spectrum_json(const Spectrum& s, bool with_vectors = false) {
  const auto flags = genericity_flags(s);
  json ev = json::array(), gen = json::array();
  for (int i = 0; i < s.size(); ++i) {
    ev.push_back(num(detail::snap(s.eigenvalues[i], s.scale())));
    gen.push_back(flags.generic(i));
  }
  json j{{"eigenvalues", ev}, {"generic", gen}};
  if (with_vectors) {
    json vecs = json::array();
    for (const auto& v : s.eigenvectors) {
      json row = json::array();
      for (double x : v) row.push_back(num(x));
      vecs.push_back(row);
    }
    j["eigenvectors"] = vecs;
  }
  return j;
}

inline json profiles_json(const std::vector<NodalProfile>& rows, bool quantum = false) {
  json out = json::array();
  const double scale = detail::lambda_scale(rows);
  for (const auto& p : rows) {
    json r{{"n", p.n}, {"lambda", num(detail::snap(p.lambda, scale))}, {"generic", p.generic}};
    r["mu"] = p.mu ? json(*p.mu) : json(nullptr);
    r["nu"] = p.nu ? json(*p.nu) : json(nullptr);
    if (quantum) r["quantum"] = true;
    out.push_back(r);
  }
  return out;
}

/// n,lambda,generic,mu,nu with empty cells at non-generic rows.
inline std::string profiles_csv(const std::vector<NodalProfile>& rows, bool quantum = false) {
  std::ostringstream os;
  os << "n,lambda,generic,mu,nu" << (quantum ? ",quantum" : "") << "\n";
  const double scale = detail::lambda_scale(rows);
  for (const auto& p : rows) {
    os << p.n << "," << fmt12(detail::snap(p.lambda, scale)) << "," << (p.generic ? 1 : 0) << ",";
    if (p.mu) os << *p.mu;
    os << ",";
    if (p.nu) os << *p.nu;
    if (quantum) os << ",1";
    os << "\n";
  }
  return os.str();
}

inline json qspectrum_json(const QSpectrum& s) {
  json k = json::array(), lam = json::array(), mult = json::array(), gen = json::array();
  for (const auto& p : s.eigenpairs) {
    k.push_back(num(p.k));
    lam.push_back(num(p.lambda));
    mult.push_back(p.multiplicity);
    gen.push_back(p.generic);
  }
  return {{"k", k}, {"lambda", lam}, {"multiplicity", mult}, {"generic", gen}};
}

inline std::string trace_csv(const QSpectrum& s) {
  std::ostringstream os;
  os << "k,sigma_min\n";
  for (const auto& [k, sig] : s.trace) os << fmt12(k) << "," << fmt12(sig) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json report_json(const VerificationReport& r) {
  json inputs = json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  json asserts = json::array();
  for (const auto& a : r.assertions) {
    json row{{"name", a.name}, {"pass", a.pass}, {"measured", num(a.measured)}, {"bound", num(a.bound)}};
    if (a.precondition) row["precondition"] = true;
    asserts.push_back(row);
  }
  json j{{"claim", r.claim}, {"inputs", inputs}, {"assertions", asserts}, {"verdict", to_string(r.verdict())}};
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

inline json catalog_json(const SearchResult& res) {
  json pairs = json::array();
  for (const auto& fp : res.pairs) {
    pairs.push_back({{"seed1", graph_json(fp.seed1, {fp.pair1})},
                     {"seed2", graph_json(fp.seed2, {fp.pair2})},
                     {"graph1", graph_json(fp.graph1)},
                     {"graph2", graph_json(fp.graph2)},
                     {"spectrum1", spectrum_json(laplacian_spectrum(fp.graph1))},
                     {"spectrum2", spectrum_json(laplacian_spectrum(fp.graph2))},
                     {"report", report_json(fp.report)}});
  }
  json stats{{"trees_scanned", res.stats.trees_scanned},
             {"candidates", res.stats.candidates},
             {"pairs_examined", res.stats.pairs_examined},
             {"pairs_admissible", res.stats.pairs_admissible}};
  return {{"pairs", pairs}, {"stats", stats}};
}

}  // namespace isoflip::io
