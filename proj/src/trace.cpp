#include "tracelens/trace.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "tracelens/error.hpp"

namespace tracelens {
namespace {

bool is_word_byte(std::string_view text, std::size_t i) {
  if (i >= text.size()) return false;
  const auto c = static_cast<unsigned char>(text[i]);
  return c >= 0x80 || std::isalnum(c);
}

struct QuoteMark {
  std::size_t length = 0;
  bool single = false;
  bool opening = false;  // typographic marks know their direction
  bool closing = false;
};

QuoteMark quote_at(std::string_view text, std::size_t i) {
  if (text[i] == '"') return {1, false, true, true};
  if (text[i] == '\'') return {1, true, true, true};
  const auto cp = text.substr(i, 3);
  if (cp == "\xE2\x80\x9C") return {3, false, true, false};
  if (cp == "\xE2\x80\x9D") return {3, false, false, true};
  if (cp == "\xE2\x80\x98") return {3, true, true, false};
  if (cp == "\xE2\x80\x99") return {3, true, false, true};
  return {};
}

// A single quote opens only before a word and not inside one; it closes only
// after a non-space and not before a word, so apostrophes never pair.
bool can_open_single(std::string_view text, std::size_t i, std::size_t len) {
  const bool after_ok = is_word_byte(text, i + len);
  const bool before_ok = i == 0 || !is_word_byte(text, i - 1);
  return after_ok && before_ok;
}

bool can_close_single(std::string_view text, std::size_t i, std::size_t len) {
  const bool before_ok = i > 0 && text[i - 1] != ' ' && text[i - 1] != '\n' && text[i - 1] != '\t';
  return before_ok && !is_word_byte(text, i + len);
}

int kind_rank(MatchKind k) {
  switch (k) {
    case MatchKind::Quotation: return 0;
    case MatchKind::NearQuotation: return 1;
    case MatchKind::Restatement: break;
  }
  return 2;
}

struct Prepared {
  std::string normalized;
  std::set<std::string> content;
  std::vector<std::string> matching;
};

Prepared prepare(std::string_view text) {
  Prepared p;
  p.normalized = text::normalize(text);
  p.content = text::content_set(text);
  for (auto& t : text::matching_tokens(text)) p.matching.push_back(std::move(t.text));
  return p;
}

SharedRun shared_run(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  SharedRun best;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      const std::size_t len = cur[j];
      if (len <= best.length) continue;
      const std::size_t start = i - len;
      const bool has_content = std::any_of(a.begin() + static_cast<std::ptrdiff_t>(start),
                                           a.begin() + static_cast<std::ptrdiff_t>(i),
                                           [](const std::string& w) { return !text::is_stopword(w); });
      if (has_content) best = {len, start, j - len};
    }
    std::swap(prev, cur);
  }
  return best;
}

std::optional<std::pair<MatchKind, double>> classify(const Prepared& origin, const Prepared& recap,
                                                     const LinkConfig& config) {
  if (!origin.normalized.empty() && origin.normalized == recap.normalized)
    return std::pair{MatchKind::Quotation, 1.0};
  const double score = text::overlap_coefficient(origin.content, recap.content);
  if (score <= 0.0 || score < config.threshold) return std::nullopt;
  const auto run = shared_run(origin.matching, recap.matching);
  if (run.length >= config.quotation_window) return std::pair{MatchKind::NearQuotation, score};
  return std::pair{MatchKind::Restatement, score};
}

}  // namespace

std::string_view to_string(TraceRole r) {
  switch (r) {
    case TraceRole::Origin: return "origin";
    case TraceRole::Recapitulant: return "recapitulant";
    case TraceRole::Plain: break;
  }
  return "plain";
}

std::string_view to_string(TraceKind k) { return k == TraceKind::Quote ? "quote" : "clause"; }

std::string_view to_string(MatchKind k) {
  switch (k) {
    case MatchKind::Quotation: return "quotation";
    case MatchKind::NearQuotation: return "near_quotation";
    case MatchKind::Restatement: break;
  }
  return "restatement";
}

double match_score(std::string_view a, std::string_view b) {
  return text::overlap_coefficient(text::content_set(a), text::content_set(b));
}

SharedRun longest_shared_run(std::string_view a, std::string_view b) {
  return shared_run(prepare(a).matching, prepare(b).matching);
}

std::optional<std::pair<MatchKind, double>> classify_match(std::string_view origin, std::string_view recap,
                                                           const LinkConfig& config) {
  return classify(prepare(origin), prepare(recap), config);
}

std::vector<Span> quoted_spans(std::string_view text) {
  std::vector<Span> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto open = quote_at(text, i);
    if (!open.length || !open.opening) continue;
    if (open.single && !can_open_single(text, i, open.length)) continue;
    const std::size_t inner_begin = i + open.length;
    for (std::size_t j = inner_begin; j < text.size(); ++j) {
      const auto close = quote_at(text, j);
      if (!close.length || !close.closing || close.single != open.single) continue;
      if (close.single && !can_close_single(text, j, close.length)) continue;
      const Span inner = text::trim(text, {inner_begin, j});
      if (text::tokenize(inner.slice(text)).size() >= 2) out.push_back(inner);
      break;
    }
    i += open.length - 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Trace> build_traces(const Transcript& transcript) {
  std::vector<Trace> traces;
  for (const auto& turn : transcript.turns()) {
    const auto spans = clause_spans(turn.text);
    const std::string prefix = "t" + std::to_string(turn.index) + ".";
    std::vector<Trace> turn_traces;
    for (std::size_t k = 0; k < spans.size(); ++k)
      turn_traces.push_back({prefix + "c" + std::to_string(k), turn.index, spans[k], TraceRole::Plain,
                             TraceKind::Clause, k});
    std::size_t q = 0;
    for (const auto& span : quoted_spans(turn.text)) {
      auto owner = std::find_if(spans.begin(), spans.end(), [&](const Span& c) {
        return c.begin <= span.begin && span.begin < c.end;
      });
      if (owner == spans.end()) continue;
      turn_traces.push_back({prefix + "q" + std::to_string(q++), turn.index, span, TraceRole::Plain,
                             TraceKind::Quote, static_cast<std::size_t>(owner - spans.begin())});
    }
    std::stable_sort(turn_traces.begin(), turn_traces.end(),
                     [](const Trace& a, const Trace& b) { return a.span.begin < b.span.begin; });
    traces.insert(traces.end(), turn_traces.begin(), turn_traces.end());
  }
  return traces;
}

std::vector<TraceLink> link_recapitulants(const Transcript& transcript, const LinkConfig& config) {
  const auto traces = build_traces(transcript);
  std::vector<Prepared> prepared;
  prepared.reserve(traces.size());
  for (const auto& t : traces) prepared.push_back(prepare(t.span.slice(transcript.at(t.turn_index).text)));

  struct Best {
    std::size_t origin;
    MatchKind kind;
    double score;
  };
  std::map<std::size_t, Best> best;  // recap index -> chosen origin
  for (std::size_t r = 0; r < traces.size(); ++r) {
    for (std::size_t o = 0; o < traces.size() && traces[o].turn_index < traces[r].turn_index; ++o) {
      const auto m = classify(prepared[o], prepared[r], config);
      if (!m) continue;
      auto it = best.find(r);
      const bool better = it == best.end() || kind_rank(m->first) < kind_rank(it->second.kind) ||
                          (m->first == it->second.kind && m->second > it->second.score);
      if (better) best[r] = {o, m->first, m->second};
    }
  }

  std::vector<TraceLink> links;
  for (const auto& [r, b] : best) {
    const auto& recap = traces[r];
    if (recap.kind == TraceKind::Clause) {
      const bool covered = std::any_of(best.begin(), best.end(), [&](const auto& other) {
        const auto& q = traces[other.first];
        return q.kind == TraceKind::Quote && q.turn_index == recap.turn_index &&
               q.clause_index == recap.clause_index && other.second.origin == b.origin;
      });
      if (covered) continue;
    }
    links.push_back({recap.id, traces[b.origin].id, b.score, b.kind});
  }
  return links;
}

void assign_roles(std::vector<Trace>& traces, const std::vector<TraceLink>& links) {
  std::set<std::string_view> origins, recaps;
  for (const auto& l : links) {
    origins.insert(l.origin);
    recaps.insert(l.recapitulant);
  }
  for (auto& t : traces) {
    if (recaps.contains(t.id)) t.role = TraceRole::Recapitulant;
    else if (origins.contains(t.id)) t.role = TraceRole::Origin;
    else t.role = TraceRole::Plain;
  }
}

TraceGraph::TraceGraph(const Transcript& transcript, const LinkConfig& config)
    : transcript_(&transcript), traces_(build_traces(transcript)), links_(link_recapitulants(transcript, config)) {
  for (const auto& turn : transcript.turns()) clauses_.push_back(segment_clauses(turn.text));
  assign_roles(traces_, links_);
}

const Trace* TraceGraph::find(std::string_view id) const {
  for (const auto& t : traces_)
    if (t.id == id) return &t;
  return nullptr;
}

const Trace& TraceGraph::trace(std::string_view id) const {
  if (const auto* t = find(id)) return *t;
  throw InvalidReference("unknown trace '" + std::string(id) + "'");
}

const ClauseAnalysis& TraceGraph::clause_of(const Trace& t) const { return clauses_.at(t.turn_index).at(t.clause_index); }

std::string_view TraceGraph::text_of(const Trace& t) const {
  return t.span.slice(transcript_->at(t.turn_index).text);
}

Polarity TraceGraph::polarity_of(const Trace& t) const {
  const auto& c = clause_of(t);
  if (c.polarity == Polarity::Negated && c.negation_scope && c.negation_scope->overlaps(t.span))
    return Polarity::Negated;
  return Polarity::Affirmative;
}

TemporalScope TraceGraph::temporal_of(const Trace& t) const {
  if (t.kind == TraceKind::Clause) return clause_of(t).temporal_scope;
  return analyze_clause(transcript_->at(t.turn_index).text, t.span).temporal_scope;
}

}  // namespace tracelens
