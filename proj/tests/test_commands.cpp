#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "spectree/commands.hpp"
#include "spectree/verify.hpp"

using namespace spectree;
using io::Json;

namespace {

const std::filesystem::path samples = SPECTREE_SAMPLES_DIR;

Json base_doc() {
  return Json::parse(R"({
    "schema_version": 1,
    "tree": {"kind": "bary", "branching": 2},
    "weight": {"family": "constant", "c": 1},
    "map": {"kind": "identity"},
    "p": 2,
    "depth_ladder": [2]
  })");
}

std::string location_of(const Json& doc) {
  try {
    cli::parse_spec(doc, samples);
  } catch (const ValidationError& e) {
    return e.location();
  }
  return "<no error>";
}

} // namespace

TEST(Spec, DefaultsAreFilledIn) {
  const auto spec = cli::parse_spec(base_doc());
  const Json n = spec.normalized();
  EXPECT_EQ(n["schatten_exponents"], Json::parse("[1.0, 2.0]"));
  EXPECT_EQ(n["tolerances"]["compact_decay"].get<double>(), 0.1);
  EXPECT_EQ(n["oracle"]["max_vertices"].get<std::size_t>(), 600u);
  EXPECT_EQ(n["seed"].get<std::uint64_t>(), 1u);
}

TEST(Spec, ValidationErrorsNameTheField) {
  Json d = base_doc();
  d.erase("schema_version");
  EXPECT_EQ(location_of(d), "spec.schema_version");

  d = base_doc();
  d["depth_ladder"] = Json::array();
  EXPECT_EQ(location_of(d), "depth_ladder");
  d["depth_ladder"] = {4, 4};
  EXPECT_EQ(location_of(d), "depth_ladder[1]");

  d = base_doc();
  d["p"] = 0.5;
  EXPECT_EQ(location_of(d), "p");

  d = base_doc();
  d["tree"]["kind"] = "forest";
  EXPECT_EQ(location_of(d), "tree.kind");

  d = base_doc();
  d["weight"] = {{"family", "geometric"}};
  EXPECT_EQ(location_of(d), "weight.c");

  d = base_doc();
  d["weight"] = {{"family", "file"}, {"path", "documents/weights.json"}};
  EXPECT_EQ(location_of(d), "weight.family");  // weight documents need a document tree

  d = base_doc();
  d["tree"] = {{"kind", "file"}, {"path", "documents/missing.json"}};
  EXPECT_NE(location_of(d).find("missing.json"), std::string::npos);

  d = base_doc();
  d["schatten_exponents"] = {2, 0.5};
  EXPECT_EQ(location_of(d), "schatten_exponents[1]");
}

TEST(Spec, DocumentTreeLadderAndClosure) {
  auto spec = cli::load_spec(samples / "document_swap.json");
  ASSERT_TRUE(spec.document_tree.has_value());
  EXPECT_TRUE(std::filesystem::path(spec.tree_source["path"].get<std::string>()).is_absolute());

  Json d = io::read_json_file(samples / "document_swap.json");
  d["depth_ladder"] = {3};
  try {
    cli::parse_spec(d, samples);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.location(), "depth_ladder[0]");
  }

  // a1 -> o is fine at depth 2 but o -> a1 leaves the depth-1 truncation.
  d = io::read_json_file(samples / "document_swap.json");
  d["map"] = {{"kind", "inline"},
              {"map", {{"o", "a1"}, {"a", "a"}, {"b", "b"}, {"a1", "o"}, {"b1", "b1"}, {"b2", "b2"}}}};
  d["depth_ladder"] = {1, 2};
  spec = cli::parse_spec(d, samples);
  EXPECT_NO_THROW(cli::build_instance(spec, 2));
  try {
    cli::build_instance(spec, 1);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("not closed"), std::string::npos);
  }
}

TEST(Spec, OversizedGeneratedTreeRejected) {
  Json d = base_doc();
  d["depth_ladder"] = {40};
  const auto spec = cli::parse_spec(d);
  EXPECT_THROW(cli::build_instance(spec, 40), ValidationError);
}

TEST(Analyze, DepthSquareLadder) {
  const auto report = cli::cmd_analyze(cli::load_spec(samples / "depth_square.json"));
  const double expected[] = {5.0 / 3.0, 10.0 / 4.0, 17.0 / 5.0};
  ASSERT_EQ(report["depths"].size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& b = report["depths"][i]["boundedness"];
    EXPECT_NEAR(b["beta"].get<double>(), expected[i], 1e-15);
    EXPECT_EQ(b["effective_domain_depth"].get<std::size_t>(), i + 2);
  }
  EXPECT_EQ(report["beta_trend"]["verdict"], "unbounded trend");
  EXPECT_TRUE(report.contains("conventions"));
  EXPECT_EQ(report["depth_ladder"], Json::parse("[4, 9, 16]"));
}

TEST(Analyze, IdentityIsIsometryWithFlatTail) {
  const auto report = cli::cmd_analyze(cli::load_spec(samples / "identity.json"));
  for (const auto& d : report["depths"]) {
    EXPECT_EQ(d["boundedness"]["norm_exact"].get<double>(), 1.0);
    EXPECT_TRUE(d["isometry"]["is_isometry"].get<bool>());
    for (const auto& s : d["compactness"]["tail_sup"]) EXPECT_EQ(s.get<double>(), 1.0);
    EXPECT_EQ(d["compactness"]["verdict"], "not compact-consistent");
    EXPECT_TRUE(d["oracle"]["checked"].get<bool>());
  }
  EXPECT_EQ(report["beta_trend"]["verdict"], "bounded plateau");
}

TEST(Analyze, ConstantWeightBijectionSummary) {
  const auto report = cli::cmd_analyze(cli::load_spec(samples / "document_swap.json"));
  const auto text = cli::analyze_summary(report);
  EXPECT_NE(text.find("isometry: true"), std::string::npos);
}

TEST(Analyze, ReportRoundTripsByteForByte) {
  for (const char* name : {"depth_square.json", "identity.json", "document_swap.json"}) {
    const auto first = cli::cmd_analyze(cli::load_spec(samples / name));
    const auto again = cli::cmd_analyze(cli::parse_spec(first["spec"]));
    EXPECT_EQ(io::dump(first), io::dump(again)) << name;
  }
}

TEST(Spectrum, IdentityAndPathExamples) {
  Json d = base_doc();
  auto out = cli::cmd_spectrum(cli::parse_spec(d));
  const auto& depth = out.report["depths"][0];
  EXPECT_NEAR(depth["hs_norm"].get<double>(), std::sqrt(7.0), 1e-15);
  EXPECT_EQ(depth["trace"]["fixed_point_count"].get<std::size_t>(), 7u);
  EXPECT_TRUE(depth["trace"]["agree"].get<bool>());
  EXPECT_EQ(out.csv.substr(0, out.csv.find('\n')), "rank,sigma_analytic,sigma_oracle");
  EXPECT_EQ(std::count(out.csv.begin(), out.csv.end(), '\n'), 8);

  out = cli::cmd_spectrum(cli::load_spec(samples / "geometric_parent_path.json"));
  EXPECT_NEAR(out.report["depths"][2]["hs_norm"].get<double>(), 2.0, 1e-15);
  for (const auto& dd : out.report["depths"]) EXPECT_LE(dd["oracle"]["max_abs_deviation"].get<double>(), 1e-8);
  EXPECT_TRUE(out.report["observed_identity"]["diagonal_sum_equals_singular_value_sum"].get<bool>());
}

TEST(Spectrum, OracleColumnDroppedWhenDisabled) {
  Json d = base_doc();
  d["oracle"] = {{"enabled", false}};
  const auto out = cli::cmd_spectrum(cli::parse_spec(d));
  EXPECT_EQ(out.csv.substr(0, out.csv.find('\n')), "rank,sigma_analytic");
  EXPECT_FALSE(out.report["depths"][0]["oracle"]["checked"].get<bool>());
}

TEST(Spectrum, ConvergenceVerdicts) {
  // Geometric parent map on a path: the q = 2 sum is 1 + D c, linear in D.
  Json d = base_doc();
  d["tree"] = {{"kind", "bary"}, {"branching", 1}};
  d["weight"] = {{"family", "geometric"}, {"c", 0.25}};
  d["map"] = {{"kind", "parent"}};
  d["depth_ladder"] = {4, 8, 16};
  d["schatten_exponents"] = {2};
  auto out = cli::cmd_spectrum(cli::parse_spec(d));
  EXPECT_EQ(out.report["convergence"][0]["verdict"], "diverging");

  d["weight"] = {{"family", "constant"}, {"c", 1}};
  d["map"] = {{"kind", "level_shift"}, {"k", 1}};
  d["tree"] = {{"kind", "bary"}, {"branching", 2}};
  d["depth_ladder"] = {2, 4, 6};
  out = cli::cmd_spectrum(cli::parse_spec(d));
  EXPECT_EQ(out.report["convergence"][0]["verdict"], "diverging");
}

TEST(Spectrum, RejectsNonHilbertExponent) {
  EXPECT_THROW(cli::cmd_spectrum(cli::load_spec(samples / "invalid_p3.json")), DomainError);
}

TEST(Adversary, LaddersAndNotFound) {
  auto report = cli::cmd_adversary(cli::load_spec(samples / "adversary_constant.json"));
  EXPECT_EQ(report["verdict"], "no adversary found");
  EXPECT_FALSE(report["unbounded"]["found"].get<bool>());

  report = cli::cmd_adversary(cli::load_spec(samples / "adversary_reciprocal.json"));
  const auto& vanishing = report["vanishing"]["ladder"];
  ASSERT_EQ(vanishing.size(), 3u);
  EXPECT_EQ(report["vanishing"]["beta_trend"], "unbounded trend");
  EXPECT_GE(vanishing[2]["beta"].get<double>(), 2 * vanishing[1]["beta"].get<double>());

  report = cli::cmd_adversary(cli::load_spec(samples / "adversary_geometric.json"));
  const auto& unbounded = report["unbounded"]["ladder"];
  EXPECT_EQ(report["unbounded"]["beta_trend"], "unbounded trend");
  EXPECT_GE(unbounded[2]["beta"].get<double>(), 2 * unbounded[1]["beta"].get<double>());
}

TEST(Verify, SingleSuitePassesAndIsDeterministic) {
  const auto a = verify::run({"trace", 5, std::nullopt});
  const auto b = verify::run({"trace", 5, std::nullopt});
  EXPECT_TRUE(a["passed"].get<bool>());
  EXPECT_EQ(a.dump(), b.dump());
  ASSERT_EQ(a["suites"].size(), 1u);
  EXPECT_GT(a["suites"][0]["checks"].get<std::size_t>(), 0u);
}

TEST(Verify, InjectedPerturbationFailsWithWitness) {
  const auto r = verify::run({"isometry", 3, std::string("isometry-perturb")});
  EXPECT_FALSE(r["passed"].get<bool>());
  const auto& v = r["suites"][0]["violations"][0];
  EXPECT_EQ(v["check"], "constant weight bijection is an isometry");
  EXPECT_TRUE(v.contains("witness_vertex"));
  // The counterexample is itself a valid experiment document.
  const auto spec = cli::parse_spec(v["counterexample"]);
  const auto report = cli::cmd_analyze(spec);
  EXPECT_FALSE(report["depths"][0]["isometry"]["is_isometry"].get<bool>());
  EXPECT_EQ(report["depths"][0]["isometry"]["witness_vertex"], v["witness_vertex"]);
}

TEST(Verify, UnknownNamesAreRejected) {
  EXPECT_THROW(verify::run({"nope", 1, std::nullopt}), ValidationError);
  EXPECT_THROW(verify::run({"tree", 1, std::string("flip-bits")}), ValidationError);
}
