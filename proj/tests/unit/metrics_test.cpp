#include <random>

#include <gtest/gtest.h>

#include "tracelens/error.hpp"
#include "tracelens/metrics.hpp"

namespace tracelens {
namespace {

SessionRecord record(const std::string& model, SessionScores s, SessionStatus status = SessionStatus::Closed) {
  SessionRecord r;
  r.session_id = model + "-" + std::to_string(s.tte);
  r.model = ModelRef{"p", model, {}};
  r.exhibit_id = "ue01";
  r.status = status;
  if (status == SessionStatus::Closed) r.scores = s;
  return r;
}

SessionScores random_scores(std::mt19937& rng) {
  SessionScores s;
  s.anomaly = rng() % 2;
  s.locus = static_cast<Locus>(rng() % 3);
  s.characterization = rng() % 2;
  s.human_exp = rng() % 2;
  s.tte = rng() % 9;
  s.baseline_inversion = rng() % 5 == 0;
  return s;
}

std::vector<SessionRecord> random_records(std::mt19937& rng, std::size_t n) {
  static const std::vector<std::string> models = {"Claude Opus", "gpt-4o", "GPT-5.2", "o3", "Llama 3", "qwen, coder"};
  std::vector<SessionRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(record(models[rng() % models.size()], random_scores(rng)));
  return out;
}

TEST(Metrics, EmptyInput) {
  const auto s = aggregate({});
  EXPECT_TRUE(s.rows.empty());
  EXPECT_EQ(s.total, ModelRow{"Total"});
}

TEST(Metrics, SingleSessionRowIsThatSession) {
  const auto s = aggregate({record("m", {true, Locus::Prompted, true, false, 4, false})});
  ASSERT_EQ(s.rows.size(), 1u);
  const auto& r = s.rows[0];
  EXPECT_EQ(r.model, "m");
  EXPECT_EQ(r.n, 1u);
  EXPECT_EQ(r.anomaly, 1u);
  EXPECT_EQ(r.locus_prompted, 1u);
  EXPECT_EQ(r.characterization, 1u);
  EXPECT_EQ(r.tte_sum, 4u);
  EXPECT_DOUBLE_EQ(r.avg_tte(), 4.0);
  ModelRow total = r;
  total.model = "Total";
  EXPECT_EQ(s.total, total);
}

TEST(Metrics, NonClosedRecordsExcluded) {
  const auto s = aggregate({record("m", {}, SessionStatus::Aborted), record("m", {}, SessionStatus::Running)});
  EXPECT_TRUE(s.rows.empty());
  EXPECT_EQ(s.total.n, 0u);
}

TEST(Metrics, RowsOrderedCaseInsensitively) {
  const auto s = aggregate({record("o3", {}), record("GPT-4o", {}), record("Claude", {}), record("gemini", {})});
  std::vector<std::string> names;
  for (const auto& r : s.rows) names.push_back(r.model);
  EXPECT_EQ(names, (std::vector<std::string>{"Claude", "gemini", "GPT-4o", "o3"}));
}

TEST(Metrics, FormatTenthsRoundsHalfUp) {
  EXPECT_EQ(format_tenths(46, 9), "5.1");
  EXPECT_EQ(format_tenths(23, 4), "5.8");
  EXPECT_EQ(format_tenths(3, 3), "1.0");
  EXPECT_EQ(format_tenths(1, 20), "0.1");  // 0.05 rounds up
  EXPECT_EQ(format_tenths(144, 40), "3.6");
  EXPECT_EQ(format_tenths(0, 0), "0.0");
}

TEST(Metrics, FormatTenthsMatchesDecimalOracle) {
  // Oracle: floor to hundredths by long division, then half-up on the last digit.
  for (std::size_t n = 1; n <= 60; ++n) {
    for (std::size_t sum = 0; sum <= 10 * n; ++sum) {
      const std::size_t hundredths = sum * 100 / n;
      const std::size_t tenths = hundredths / 10 + (hundredths % 10 >= 5 ? 1 : 0);
      const std::string expect = std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
      ASSERT_EQ(format_tenths(sum, n), expect) << sum << "/" << n;
    }
  }
}

TEST(Metrics, ParseReportFormat) {
  EXPECT_EQ(parse_report_format("text"), ReportFormat::Text);
  EXPECT_EQ(parse_report_format("table-text"), ReportFormat::Text);
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::Delimited);
  EXPECT_EQ(parse_report_format("delimited"), ReportFormat::Delimited);
  EXPECT_EQ(parse_report_format("json"), ReportFormat::Structured);
  EXPECT_EQ(parse_report_format("structured"), ReportFormat::Structured);
  EXPECT_THROW(parse_report_format("xml"), ValidationError);
}

TEST(Metrics, ZeroRowsIsHeaderOnly) {
  const auto text = render_report(aggregate({}), ReportFormat::Text);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1) << text;
  EXPECT_NE(text.find("Model"), std::string::npos);
}

TEST(Metrics, TextShowsBaselineSplit) {
  const auto s = aggregate({record("m", {true, Locus::Prompted, true, false, 4, false})});
  const auto text = render_report(s, ReportFormat::Text);
  EXPECT_NE(text.find("Baseline anomaly detection: 1/1; baseline inversion identification: 0/1"), std::string::npos)
      << text;
}

TEST(MetricsProperty, LinearityUnderMerge) {
  std::mt19937 rng(17);
  for (int iter = 0; iter < 300; ++iter) {
    const auto a = random_records(rng, rng() % 30);
    const auto b = random_records(rng, rng() % 30);
    auto both = a;
    both.insert(both.end(), b.begin(), b.end());
    const auto merged = merge(aggregate(a), aggregate(b));
    EXPECT_EQ(aggregate(both), merged);
    // Weighted mean of the parts equals the mean of the union.
    const auto& ta = aggregate(a).total;
    const auto& tb = aggregate(b).total;
    if (ta.n + tb.n) {
      EXPECT_DOUBLE_EQ(merged.total.avg_tte(),
                       (ta.avg_tte() * ta.n + tb.avg_tte() * tb.n) / static_cast<double>(ta.n + tb.n));
    }
  }
}

TEST(MetricsProperty, PartitionsAndColumnSums) {
  std::mt19937 rng(19);
  for (int iter = 0; iter < 200; ++iter) {
    const auto s = aggregate(random_records(rng, rng() % 50));
    ModelRow sum{"Total"};
    for (const auto& r : s.rows) {
      EXPECT_EQ(r.locus_independent + r.locus_prompted + r.locus_unreached, r.n);
      sum.add(r);
    }
    EXPECT_EQ(sum, s.total);
  }
}

TEST(MetricsProperty, StructuredRoundTripIsByteIdentical) {
  std::mt19937 rng(23);
  for (int iter = 0; iter < 200; ++iter) {
    const auto s = aggregate(random_records(rng, rng() % 40));
    const auto doc = render_report(s, ReportFormat::Structured);
    const auto parsed = parse_structured_report(doc);
    EXPECT_EQ(parsed, s);
    EXPECT_EQ(render_report(parsed, ReportFormat::Structured), doc);
  }
}

TEST(MetricsProperty, DelimitedRoundTrip) {
  std::mt19937 rng(29);
  for (int iter = 0; iter < 200; ++iter) {
    const auto s = aggregate(random_records(rng, rng() % 40));
    const auto doc = render_report(s, ReportFormat::Delimited);
    const auto parsed = parse_delimited_report(doc);
    EXPECT_EQ(parsed, s);
    EXPECT_EQ(render_report(parsed, ReportFormat::Delimited), doc);
  }
}

TEST(Metrics, DelimitedQuotesAwkwardNames) {
  const auto s = aggregate({record("qwen, \"coder\"", {})});
  const auto doc = render_report(s, ReportFormat::Delimited);
  EXPECT_NE(doc.find("\"qwen, \"\"coder\"\"\""), std::string::npos) << doc;
  EXPECT_EQ(parse_delimited_report(doc), s);
}

TEST(Metrics, ParsersRejectInconsistentTotals) {
  const auto s = aggregate({record("m", {true, Locus::Prompted, true, false, 4, false})});
  auto j = to_json(s);
  j["total"]["anomaly"] = 5;
  EXPECT_THROW(parse_structured_report(j.dump()), ParseError);
  auto csv = render_report(s, ReportFormat::Delimited);
  csv.replace(csv.rfind("Total,1,1"), 9, "Total,1,0");
  EXPECT_THROW(parse_delimited_report(csv), ParseError);
  EXPECT_THROW(parse_delimited_report("nonsense"), ParseError);
  EXPECT_THROW(parse_structured_report("[]"), ParseError);
}

TEST(Metrics, RowPartitionCheckedOnParse) {
  const auto s = aggregate({record("m", {true, Locus::Prompted, true, false, 4, false})});
  auto j = to_json(s);
  j["rows"][0]["locus_unreached"] = 1;
  j["total"]["locus_unreached"] = 1;
  EXPECT_THROW(parse_structured_report(j.dump()), ParseError);
}

}  // namespace
}  // namespace tracelens
