#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tracelens/session.hpp"

namespace tracelens {

struct ModelRow {
  std::string model;
  std::size_t n = 0;
  std::size_t anomaly = 0;
  std::size_t locus_independent = 0;
  std::size_t locus_prompted = 0;
  std::size_t locus_unreached = 0;
  std::size_t human_exp = 0;
  std::size_t characterization = 0;
  std::size_t baseline_inversion = 0;
  std::size_t tte_sum = 0;

  double avg_tte() const { return n ? static_cast<double>(tte_sum) / static_cast<double>(n) : 0.0; }
  void add(const SessionScores& s);
  void add(const ModelRow& other);

  bool operator==(const ModelRow&) const = default;
};

struct CorpusStats {
  std::vector<ModelRow> rows;  // ordered by model name, case-insensitive
  ModelRow total{"Total"};

  bool operator==(const CorpusStats&) const = default;
};

// Closed sessions only; aborted or running records do not count.
CorpusStats aggregate(const std::vector<SessionRecord>& records);
CorpusStats merge(const CorpusStats& a, const CorpusStats& b);

// Mean to one decimal, halves rounded up: 46/9 -> "5.1", 23/4 -> "5.8".
std::string format_tenths(std::size_t sum, std::size_t n);

enum class ReportFormat { Text, Delimited, Structured };
// Accepts text|table-text, csv|delimited, json|structured.
ReportFormat parse_report_format(std::string_view name);

std::string render_report(const CorpusStats& stats, ReportFormat format);
nlohmann::ordered_json to_json(const CorpusStats& stats);

// Inverses of the delimited and structured renderings. Throw ParseError.
CorpusStats parse_delimited_report(std::string_view text);
CorpusStats parse_structured_report(std::string_view text);

}  // namespace tracelens
