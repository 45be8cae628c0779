#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "coherent/report.hpp"
#include "test_support.hpp"

using namespace coherent;

namespace {

nlohmann::json example_json(const char* kind) {
  return nlohmann::json{
      {"worlds", {"w1", "w2", "w3"}},
      {"kind", kind},
      {"assessments",
       {{{"event", {"w1", "w2"}}, {"value", "1/4"}},
        {{"event", {"w2", "w3"}}, {"value", "1"}},
        {{"event", {"w2"}}, {"value", "1/2"}}}}};
}

}  // namespace

TEST_CASE("documents parse into assessments") {
  AssessmentDocument doc = parse_document(example_json("belief"));
  CHECK(doc.worlds.size() == 3);
  CHECK(doc.kind == Kind::Belief);
  REQUIRE(doc.rows.size() == 3);
  CHECK(doc.rows[0].value == Rational(1, 4));
  Assessment assessment = to_assessment(doc);
  CHECK(assessment.size() == 3);
  CHECK(assessment.family[2].count() == 1);
}

TEST_CASE("rational value forms: fractions, decimals, integers") {
  nlohmann::json doc = example_json("belief");
  doc["assessments"][0]["value"] = "0.25";
  doc["assessments"][1]["value"] = 1;
  doc["assessments"][2]["value"] = "5e-1";
  AssessmentDocument parsed = parse_document(doc);
  CHECK(parsed.rows[0].value == Rational(1, 4));
  CHECK(parsed.rows[1].value == Rational(1));
  CHECK(parsed.rows[2].value == Rational(1, 2));
}

TEST_CASE("malformed documents are rejected with diagnostics") {
  nlohmann::json bad = example_json("belief");
  bad["assessments"][0]["value"] = "3/0";
  CHECK_THROWS_WITH_AS(parse_document(bad), doctest::Contains("invalid rational"),
                       DocumentError);

  nlohmann::json out_of_range = example_json("belief");
  out_of_range["assessments"][0]["value"] = "9/8";
  CHECK_THROWS_WITH_AS(parse_document(out_of_range), doctest::Contains("outside [0,1]"),
                       DocumentError);

  nlohmann::json bad_kind = example_json("plausibility");
  CHECK_THROWS_AS(parse_document(bad_kind), DocumentError);

  nlohmann::json unknown_label = example_json("belief");
  unknown_label["assessments"][0]["event"] = {"nope"};
  CHECK_THROWS_WITH_AS(to_assessment(parse_document(unknown_label)),
                       doctest::Contains("unknown world label"), DocumentError);

  nlohmann::json dup_worlds = example_json("belief");
  dup_worlds["worlds"] = {"w1", "w1"};
  CHECK_THROWS_AS(to_assessment(parse_document(dup_worlds)), DocumentError);

  nlohmann::json float_value = example_json("belief");
  float_value["assessments"][0]["value"] = 0.25;
  CHECK_THROWS_AS(parse_document(float_value), DocumentError);
}

TEST_CASE("cmd_check: exit codes and reports across the three kinds") {
  for (const char* kind : {"belief", "probability", "necessity"}) {
    std::ostringstream out;
    nlohmann::json report;
    const int code = cmd_check(parse_document(example_json(kind)), out, &report);
    CHECK(code == 1);
    CHECK(report["coherent"] == false);
    CHECK(out.str().find("incoherent") != std::string::npos);
  }

  nlohmann::json trivial{{"worlds", {"w"}},
                         {"kind", "belief"},
                         {"assessments", {{{"event", {"w"}}, {"value", "1"}}}}};
  std::ostringstream out;
  nlohmann::json report;
  CHECK(cmd_check(parse_document(trivial), out, &report) == 0);
  CHECK(report["coherent"] == true);
  CHECK(report["witness"].is_array());
}

TEST_CASE("cmd_check: belief stakes appear in the report") {
  std::ostringstream out;
  nlohmann::json report;
  cmd_check(parse_document(example_json("belief")), out, &report);
  REQUIRE(report["dutch_book"].is_object());
  CHECK(report["dutch_book"]["stakes"].size() == 3);
  const std::string bound = report["dutch_book"]["gain_bound"].get<std::string>();
  CHECK(bound.find("-") == 0);
}

TEST_CASE("cmd_correct emits the worked corrections and round-trips") {
  for (const char* kind : {"belief", "probability", "necessity"}) {
    std::ostringstream out;
    nlohmann::json report;
    AssessmentDocument corrected;
    const int code = cmd_correct(parse_document(example_json(kind)), out, &report, &corrected);
    CHECK(code == 0);
    CHECK(report["corrected"] ==
          nlohmann::json::array({"3/8", "1/1", "3/8"}));
    CHECK(report["divergence"] == "1/32");

    std::ostringstream recheck_out;
    nlohmann::json recheck;
    CHECK(cmd_check(corrected, recheck_out, &recheck) == 0);
  }

  // the belief correction reports the degenerate weight family
  std::ostringstream out;
  nlohmann::json report;
  cmd_correct(parse_document(example_json("belief")), out, &report, nullptr);
  CHECK(report["degenerate"] == true);
  CHECK(report["weights"].size() == 2);

  nlohmann::json necessity_report;
  std::ostringstream nec_out;
  cmd_correct(parse_document(example_json("necessity")), nec_out, &necessity_report, nullptr);
  REQUIRE(necessity_report["chain"].is_array());
  CHECK(necessity_report["chain"].size() == 3);
  CHECK(necessity_report["chain"][0] == nlohmann::json::array({"w2"}));
}

TEST_CASE("cmd_correct rejects the unbounded rule") {
  nlohmann::json doc = example_json("belief");
  doc["options"] = {{"rule", "log"}};
  std::ostringstream out;
  CHECK_THROWS_WITH_AS(cmd_correct(parse_document(doc), out, nullptr, nullptr),
                       doctest::Contains("unbounded"), DocumentError);
}

TEST_CASE("cmd_correct with the spherical rule round-trips too") {
  nlohmann::json doc = example_json("belief");
  doc["options"] = {{"rule", "spherical"}};
  std::ostringstream out;
  nlohmann::json report;
  AssessmentDocument corrected;
  CHECK(cmd_correct(parse_document(doc), out, &report, &corrected) == 0);
  CHECK(report["exact"] == false);

  std::ostringstream recheck_out;
  CHECK(cmd_check(corrected, recheck_out, nullptr) == 0);
}

TEST_CASE("cmd_extend: intervals, degenerate targets, incoherent inputs") {
  nlohmann::json doc{{"worlds", {"w1", "w2", "w3"}},
                     {"kind", "belief"},
                     {"assessments", nlohmann::json::array()}};
  std::ostringstream out;
  nlohmann::json report;
  CHECK(cmd_extend(parse_document(doc), {"w1"}, out, &report) == 0);
  CHECK(report["lo"] == "0/1");
  CHECK(report["hi"] == "1/1");

  nlohmann::json assessed{{"worlds", {"w1", "w2", "w3"}},
                          {"kind", "belief"},
                          {"assessments",
                           {{{"event", {"w2", "w3"}}, {"value", "3/5"}}}}};
  std::ostringstream out2;
  nlohmann::json report2;
  CHECK(cmd_extend(parse_document(assessed), {"w2", "w3"}, out2, &report2) == 0);
  CHECK(report2["lo"] == "3/5");
  CHECK(report2["hi"] == "3/5");

  std::ostringstream out3;
  nlohmann::json report3;
  CHECK(cmd_extend(parse_document(example_json("belief")), {"w2"}, out3, &report3) == 1);
  CHECK(out3.str().find("correct") != std::string::npos);
}

TEST_CASE("cmd_gain: sweep reproduces the worked stakes table") {
  std::ostringstream out;
  nlohmann::json report;
  const int code = cmd_gain(parse_document(example_json("belief")), {"-1", "0", "1"},
                            std::nullopt, true, out, &report);
  CHECK(code == 0);
  REQUIRE(report["gains"].size() == 7);
  CHECK(report["max_gain"] == "-1/4");
  for (const auto& entry : report["gains"])
    CHECK(entry["gain"].get<std::string>().front() == '-');

  // zero stakes gain nothing anywhere
  std::ostringstream out_zero;
  nlohmann::json report_zero;
  cmd_gain(parse_document(example_json("belief")), {"0", "0", "0"}, std::nullopt, true,
           out_zero, &report_zero);
  CHECK(report_zero["max_gain"] == "0/1");

  // certificate stakes from cmd_check stay below their bound
  nlohmann::json verdict;
  std::ostringstream check_out;
  cmd_check(parse_document(example_json("belief")), check_out, &verdict);
  std::vector<std::string> stakes;
  for (const auto& s : verdict["dutch_book"]["stakes"])
    stakes.push_back(s.get<std::string>());
  std::ostringstream out_cert;
  nlohmann::json report_cert;
  cmd_gain(parse_document(example_json("belief")), stakes, std::nullopt, true, out_cert,
           &report_cert);
  auto bound = parse_rational(verdict["dutch_book"]["gain_bound"].get<std::string>());
  auto max_gain = parse_rational(report_cert["max_gain"].get<std::string>());
  REQUIRE(bound.has_value());
  REQUIRE(max_gain.has_value());
  CHECK(*max_gain <= *bound);
  CHECK(*max_gain < 0);
}

TEST_CASE("cmd_gain validates stakes and observed events") {
  std::ostringstream out;
  CHECK_THROWS_WITH_AS(cmd_gain(parse_document(example_json("belief")), {"1", "2"},
                                std::nullopt, true, out, nullptr),
                       doctest::Contains("one stake per assessed event"), DocumentError);
  CHECK_THROWS_WITH_AS(cmd_gain(parse_document(example_json("belief")), {"1", "x", "0"},
                                std::nullopt, true, out, nullptr),
                       doctest::Contains("invalid rational"), DocumentError);
  const std::optional<std::vector<std::string>> empty_observed{std::vector<std::string>{}};
  CHECK_THROWS_AS(cmd_gain(parse_document(example_json("belief")), {"1", "0", "0"},
                           empty_observed, false, out, nullptr),
                  DocumentError);
}

TEST_CASE("reports are byte-stable across runs") {
  for (int run = 0; run < 2; ++run) {
    std::ostringstream out_a, out_b;
    nlohmann::json report_a, report_b;
    cmd_check(parse_document(example_json("necessity")), out_a, &report_a);
    cmd_check(parse_document(example_json("necessity")), out_b, &report_b);
    CHECK(out_a.str() == out_b.str());
    CHECK(report_a.dump() == report_b.dump());

    std::ostringstream cor_a, cor_b;
    nlohmann::json corr_a, corr_b;
    cmd_correct(parse_document(example_json("belief")), cor_a, &corr_a, nullptr);
    cmd_correct(parse_document(example_json("belief")), cor_b, &corr_b, nullptr);
    CHECK(cor_a.str() == cor_b.str());
    CHECK(corr_a.dump() == corr_b.dump());
  }
}

TEST_CASE("document round trip preserves content") {
  AssessmentDocument doc = parse_document(example_json("necessity"));
  AssessmentDocument back = parse_document(document_to_json(doc));
  CHECK(back.worlds == doc.worlds);
  CHECK(back.kind == doc.kind);
  REQUIRE(back.rows.size() == doc.rows.size());
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    CHECK(back.rows[i].event == doc.rows[i].event);
    CHECK(back.rows[i].value == doc.rows[i].value);
  }
}

TEST_CASE("necessity incoherence report carries per-chain refutations") {
  std::ostringstream out;
  nlohmann::json report;
  cmd_check(parse_document(example_json("necessity")), out, &report);
  CHECK(report["chain_refutations"].size() == 6);
  CHECK(report["chains_all_infeasible"] == true);
}
