#include "tracelens/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "tracelens/error.hpp"

namespace tracelens {
namespace {

bool model_less(const std::string& a, const std::string& b) {
  const auto fold = [](const std::string& s) {
    std::string out = s;
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const auto fa = fold(a), fb = fold(b);
  return fa != fb ? fa < fb : a < b;
}

std::string frac(std::size_t k, std::size_t n) { return std::to_string(k) + "/" + std::to_string(n); }

const std::vector<std::string>& delimited_header() {
  static const std::vector<std::string> h = {"model",           "n",          "anomaly",
                                             "locus_independent", "locus_prompted", "locus_unreached",
                                             "human_exp",       "characterization", "baseline_inversion",
                                             "tte_sum",         "avg_tte"};
  return h;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t parse_count(const std::string& s, std::size_t line) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw ParseError("expected a count, got '" + s + "'", line);
  return std::stoull(s);
}

void check_row(const ModelRow& r) {
  if (r.locus_independent + r.locus_prompted + r.locus_unreached != r.n)
    throw ParseError("locus columns do not sum to n for '" + r.model + "'");
  for (auto v : {r.anomaly, r.human_exp, r.characterization, r.baseline_inversion})
    if (v > r.n) throw ParseError("count exceeds n for '" + r.model + "'");
}

CorpusStats finish(std::vector<ModelRow> rows, const ModelRow& claimed_total) {
  CorpusStats s;
  for (auto& r : rows) {
    check_row(r);
    s.total.add(r);
  }
  s.rows = std::move(rows);
  if (!(s.total == claimed_total)) throw ParseError("total row disagrees with the per-model rows");
  return s;
}

nlohmann::ordered_json row_json(const ModelRow& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["n"] = r.n;
  j["anomaly"] = r.anomaly;
  j["locus_independent"] = r.locus_independent;
  j["locus_prompted"] = r.locus_prompted;
  j["locus_unreached"] = r.locus_unreached;
  j["human_exp"] = r.human_exp;
  j["characterization"] = r.characterization;
  j["baseline_inversion"] = r.baseline_inversion;
  j["tte_sum"] = r.tte_sum;
  j["avg_tte"] = r.avg_tte();
  j["avg_tte_display"] = format_tenths(r.tte_sum, r.n);
  return j;
}

ModelRow row_from_json(const nlohmann::json& j) {
  ModelRow r;
  r.model = j.at("model").get<std::string>();
  r.n = j.at("n").get<std::size_t>();
  r.anomaly = j.at("anomaly").get<std::size_t>();
  r.locus_independent = j.at("locus_independent").get<std::size_t>();
  r.locus_prompted = j.at("locus_prompted").get<std::size_t>();
  r.locus_unreached = j.at("locus_unreached").get<std::size_t>();
  r.human_exp = j.at("human_exp").get<std::size_t>();
  r.characterization = j.at("characterization").get<std::size_t>();
  r.baseline_inversion = j.at("baseline_inversion").get<std::size_t>();
  r.tte_sum = j.at("tte_sum").get<std::size_t>();
  return r;
}

std::string render_text(const CorpusStats& s) {
  const std::vector<std::string> header = {"Model",           "N",          "Anomaly", "Locus: indep.",
                                           "Locus: prompted", "Locus: unreach.", "Human exp.", "Avg TTE"};
  std::vector<std::vector<std::string>> body;
  const auto cells = [](const ModelRow& r) {
    return std::vector<std::string>{r.model,
                                    std::to_string(r.n),
                                    frac(r.anomaly, r.n),
                                    frac(r.locus_independent, r.n),
                                    frac(r.locus_prompted, r.n),
                                    frac(r.locus_unreached, r.n),
                                    frac(r.human_exp, r.n),
                                    format_tenths(r.tte_sum, r.n)};
  };
  for (const auto& r : s.rows) body.push_back(cells(r));
  if (!s.rows.empty()) body.push_back(cells(s.total));

  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : body) width[c] = std::max(width[c], row[c].size());
  }
  const auto line = [&](const std::vector<std::string>& row) {
    std::string out;
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::string cell = row[c];
      if (c + 1 < row.size()) cell.resize(width[c], ' ');
      out += (c ? "  " : "") + cell;
    }
    return out + "\n";
  };
  std::string out = line(header);
  if (s.rows.empty()) return out;
  std::size_t total_width = 2 * (header.size() - 1);
  for (auto w : width) total_width += w;
  const std::string rule(total_width, '-');
  out += rule + "\n";
  for (std::size_t i = 0; i + 1 < body.size(); ++i) out += line(body[i]);
  out += rule + "\n" + line(body.back());
  out += "\nBaseline anomaly detection: " + frac(s.total.anomaly, s.total.n) +
         "; baseline inversion identification: " + frac(s.total.baseline_inversion, s.total.n) + "\n";
  return out;
}

std::string render_delimited(const CorpusStats& s) {
  std::string out;
  const auto& h = delimited_header();
  for (std::size_t i = 0; i < h.size(); ++i) out += (i ? "," : "") + h[i];
  out += "\n";
  const auto row = [&](const ModelRow& r) {
    out += csv_field(r.model);
    for (auto v : {r.n, r.anomaly, r.locus_independent, r.locus_prompted, r.locus_unreached, r.human_exp,
                   r.characterization, r.baseline_inversion, r.tte_sum})
      out += "," + std::to_string(v);
    out += "," + format_tenths(r.tte_sum, r.n) + "\n";
  };
  for (const auto& r : s.rows) row(r);
  row(s.total);
  return out;
}

}  // namespace

void ModelRow::add(const SessionScores& s) {
  ++n;
  anomaly += s.anomaly;
  locus_independent += s.locus == Locus::Independent;
  locus_prompted += s.locus == Locus::Prompted;
  locus_unreached += s.locus == Locus::Unreached;
  human_exp += s.human_exp;
  characterization += s.characterization;
  baseline_inversion += s.baseline_inversion;
  tte_sum += s.tte;
}

void ModelRow::add(const ModelRow& o) {
  n += o.n;
  anomaly += o.anomaly;
  locus_independent += o.locus_independent;
  locus_prompted += o.locus_prompted;
  locus_unreached += o.locus_unreached;
  human_exp += o.human_exp;
  characterization += o.characterization;
  baseline_inversion += o.baseline_inversion;
  tte_sum += o.tte_sum;
}

CorpusStats aggregate(const std::vector<SessionRecord>& records) {
  std::map<std::string, ModelRow> by_model;
  CorpusStats s;
  for (const auto& r : records) {
    if (r.status != SessionStatus::Closed || !r.scores) continue;
    auto& row = by_model[r.model.model_name];
    row.model = r.model.model_name;
    row.add(*r.scores);
    s.total.add(*r.scores);
  }
  for (auto& [_, row] : by_model) s.rows.push_back(std::move(row));
  std::sort(s.rows.begin(), s.rows.end(), [](const auto& a, const auto& b) { return model_less(a.model, b.model); });
  return s;
}

CorpusStats merge(const CorpusStats& a, const CorpusStats& b) {
  CorpusStats s;
  std::map<std::string, ModelRow> by_model;
  for (const auto* side : {&a, &b}) {
    for (const auto& r : side->rows) {
      auto& row = by_model[r.model];
      row.model = r.model;
      row.add(r);
    }
    s.total.add(side->total);
  }
  for (auto& [_, row] : by_model) s.rows.push_back(std::move(row));
  std::sort(s.rows.begin(), s.rows.end(), [](const auto& x, const auto& y) { return model_less(x.model, y.model); });
  return s;
}

std::string format_tenths(std::size_t sum, std::size_t n) {
  if (n == 0) return "0.0";
  const std::size_t tenths = (20 * sum + n) / (2 * n);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "text" || name == "table-text") return ReportFormat::Text;
  if (name == "csv" || name == "delimited") return ReportFormat::Delimited;
  if (name == "json" || name == "structured") return ReportFormat::Structured;
  throw ValidationError("unknown report format '" + std::string(name) + "'");
}

nlohmann::ordered_json to_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : s.rows) j["rows"].push_back(row_json(r));
  j["total"] = row_json(s.total);
  j["baseline"] = {{"anomaly_detection", frac(s.total.anomaly, s.total.n)},
                   {"inversion_identification", frac(s.total.baseline_inversion, s.total.n)}};
  return j;
}

std::string render_report(const CorpusStats& stats, ReportFormat format) {
  switch (format) {
    case ReportFormat::Text: return render_text(stats);
    case ReportFormat::Delimited: return render_delimited(stats);
    case ReportFormat::Structured: break;
  }
  return to_json(stats).dump(2) + "\n";
}

CorpusStats parse_delimited_report(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows.front() != delimited_header()) throw ParseError("missing or unexpected header", 1);
  if (rows.size() < 2) throw ParseError("missing total row");
  std::vector<ModelRow> parsed;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != delimited_header().size()) throw ParseError("wrong number of fields", i + 1);
    ModelRow r;
    r.model = f[0];
    std::size_t* slots[] = {&r.n,           &r.anomaly,          &r.locus_independent,  &r.locus_prompted, &r.locus_unreached,
                            &r.human_exp,   &r.characterization, &r.baseline_inversion, &r.tte_sum};
    for (std::size_t k = 0; k < std::size(slots); ++k) *slots[k] = parse_count(f[k + 1], i + 1);
    if (f.back() != format_tenths(r.tte_sum, r.n)) throw ParseError("avg_tte disagrees with tte_sum", i + 1);
    parsed.push_back(std::move(r));
  }
  const ModelRow total = parsed.back();
  parsed.pop_back();
  if (total.model != "Total") throw ParseError("last row must be the total");
  return finish(std::move(parsed), total);
}

CorpusStats parse_structured_report(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    std::vector<ModelRow> rows;
    for (const auto& r : j.at("rows")) rows.push_back(row_from_json(r));
    return finish(std::move(rows), row_from_json(j.at("total")));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed structured report: ") + e.what());
  }
}

}  // namespace tracelens
