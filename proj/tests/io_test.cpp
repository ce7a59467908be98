#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <numbers>

#include "isoflip/io.hpp"
#include "isoflip/isoflip.hpp"

using namespace isoflip;
using io::json;

namespace {

const char* kStar = R"({"vertices": 4, "edges": [[0,1],[0,2],[0,3]],
                        "leaf_pairs": [{"root": 0, "arm_plus": [1], "arm_minus": [2]}]})";

const char* kMetric = R"({"vertices": 4, "edges": [[0,1],[0,2],[0,3]], "lengths": [1, 1, 0.7],
                          "leaf_pairs": [{"root": 0, "arm_plus": [1], "arm_minus": [2]}],
                          "glues": [{"pair": 0, "l1": 0.4142}]})";

}  // namespace

TEST(Format, TwelveSignificantDigits) {
  EXPECT_EQ(io::fmt12(std::numbers::pi), "3.14159265359");
  EXPECT_EQ(io::fmt12(-0.0), "0");
  EXPECT_EQ(io::fmt12(1e-20), "1e-20");
  EXPECT_EQ(io::round12(0.1 + 0.2), 0.3);
  EXPECT_TRUE(io::num(std::nan("")).is_null());
  EXPECT_TRUE(io::num(INFINITY).is_null());
}

TEST(GraphJson, RoundTrip) {
  const auto in = io::parse_graph(json::parse(kStar));
  EXPECT_EQ(in.graph.vertex_count(), 4);
  ASSERT_EQ(in.pairs.size(), 1u);
  EXPECT_EQ(in.pairs[0].arm_plus, std::vector<Vertex>{1});
  const auto again = io::parse_graph(io::graph_json(in.graph, in.pairs));
  EXPECT_EQ(again.graph, in.graph);
  EXPECT_EQ(again.pairs[0].arm_minus, in.pairs[0].arm_minus);
}

TEST(GraphJson, Errors) {
  EXPECT_THROW(io::parse_graph(json::parse(R"({"edges": [[0,1]]})")), io::InputError);
  EXPECT_THROW(io::parse_graph(json::parse(R"({"vertices": 2, "edges": [[0,1,2]]})")), io::InputError);
  EXPECT_THROW(io::parse_graph(json::parse(R"({"vertices": "two", "edges": []})")), io::InputError);
  EXPECT_THROW(io::parse_graph(json::parse(R"({"vertices": 2, "edges": [[0,2]]})")), GraphError);
  EXPECT_THROW(io::parse_graph(json::parse(
                   R"({"vertices": 4, "edges": [[0,1],[0,2],[0,3]], "leaf_pairs": [{"root": 0, "arm_plus": [1]}]})")),
               io::InputError);
  EXPECT_THROW(io::parse_graph(json::parse(R"({"vertices": 3, "edges": [[0,1],[1,2]],
                                               "leaf_pairs": [{"root": 1, "arm_plus": [0], "arm_minus": [1]}]})")),
               GraphError);
}

TEST(MetricJson, ParsesLengthsAndGlues) {
  const auto in = io::parse_metric(json::parse(kMetric));
  EXPECT_NEAR(in.graph.total_length(), 2.7, 1e-15);
  ASSERT_EQ(in.glues.size(), 1u);
  EXPECT_EQ(in.glues[0].pair, 0);
  EXPECT_DOUBLE_EQ(in.glues[0].l1, 0.4142);
  const auto j = io::metric_json(in.graph);
  const auto back = io::parse_metric(j);
  EXPECT_EQ(back.graph, in.graph);
  EXPECT_EQ(back.graph.leaf_pairs().size(), 1u);
}

TEST(MetricJson, Errors) {
  auto j = json::parse(kMetric);
  j["lengths"] = {1, 1};
  EXPECT_THROW(io::parse_metric(j), io::InputError);
  j = json::parse(kMetric);
  j["lengths"] = {1, 0, 1};
  EXPECT_THROW(io::parse_metric(j), GraphError);
  j = json::parse(kMetric);
  j["glues"] = {{{"pair", 3}, {"l1", 0.2}}};
  EXPECT_THROW(io::parse_metric(j), io::InputError);
  j = json::parse(kMetric);
  j["leaf_pairs"][0]["arm_plus"] = {1, 3};
  EXPECT_THROW(io::parse_metric(j), io::InputError);
}

TEST(Files, MalformedAndMissing) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto bad = (dir / "isoflip_io_test_bad.json").string();
  io::write_text_file(bad, "{\"vertices\": 2, ");
  EXPECT_THROW(io::read_json_file(bad), io::InputError);
  std::remove(bad.c_str());
  EXPECT_THROW(io::read_json_file((dir / "isoflip_no_such_file.json").string()), io::InputError);
}

TEST(Profiles, CsvRows) {
  const auto g = io::parse_graph(json::parse(kStar)).graph;
  const auto rows = nodal_profiles(g, laplacian_spectrum(g));
  const std::string csv = io::profiles_csv(rows);
  EXPECT_EQ(csv,
            "n,lambda,generic,mu,nu\n"
            "1,0,1,0,1\n"
            "2,1,0,,\n"
            "3,1,0,,\n"
            "4,4,1,3,4\n");
  const auto j = io::profiles_json(rows, true);
  EXPECT_TRUE(j[1]["mu"].is_null());
  EXPECT_TRUE(j[0]["quantum"].get<bool>());
  EXPECT_NE(io::profiles_csv(rows, true).find(",quantum\n"), std::string::npos);
}

TEST(Report, Schema) {
  const auto in = io::parse_graph(json::parse(kStar));
  const auto j = io::report_json(verify_theorem2(in.graph, in.pairs[0]));
  EXPECT_EQ(j["claim"], "theorem2");
  EXPECT_EQ(j["verdict"], "pass");
  ASSERT_TRUE(j["assertions"].is_array());
  for (const auto& a : j["assertions"]) {
    EXPECT_TRUE(a.contains("name"));
    EXPECT_TRUE(a["pass"].is_boolean());
    EXPECT_TRUE(a.contains("measured"));
    EXPECT_TRUE(a.contains("bound"));
  }
  EXPECT_TRUE(j["inputs"].is_object());
}

TEST(Output, DeterministicSerialisation) {
  const auto m = io::parse_metric(json::parse(kMetric)).graph;
  SecularOptions opt;
  opt.kmax = 12;
  const auto a = io::qspectrum_json(secular_spectrum(m, opt)).dump(2);
  const auto b = io::qspectrum_json(secular_spectrum(m, opt)).dump(2);
  EXPECT_EQ(a, b);
  opt.keep_trace = true;
  const auto t = io::trace_csv(secular_spectrum(m, opt));
  EXPECT_EQ(t.rfind("k,sigma_min\n", 0), 0u);
}

TEST(Catalog, SmallSearch) {
  SearchLimits lim;
  lim.max_vertices = 8;
  lim.max_results = 2;
  const auto j = io::catalog_json(search_noniso_pairs(lim));
  ASSERT_FALSE(j["pairs"].empty());
  const auto& p = j["pairs"][0];
  for (const char* key : {"seed1", "seed2", "graph1", "graph2", "spectrum1", "spectrum2", "report"})
    EXPECT_TRUE(p.contains(key)) << key;
  EXPECT_EQ(p["report"]["verdict"], "pass");
  EXPECT_GT(j["stats"]["candidates"].get<long>(), 0);
}
