#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracelens/clause.hpp"
#include "tracelens/transcript.hpp"

namespace tracelens {

enum class TraceRole { Origin, Recapitulant, Plain };
enum class TraceKind { Clause, Quote };
enum class MatchKind { Quotation, NearQuotation, Restatement };

std::string_view to_string(TraceRole r);
std::string_view to_string(TraceKind k);
std::string_view to_string(MatchKind k);

struct Trace {
  std::string id;  // "t3.c1" for clause 1 of turn 3, "t3.q0" for a quoted span
  std::size_t turn_index = 0;
  Span span;
  TraceRole role = TraceRole::Plain;
  TraceKind kind = TraceKind::Clause;
  // Clause of the owning turn that contains the trace (itself, for clauses).
  std::size_t clause_index = 0;

  bool operator==(const Trace&) const = default;
};

struct TraceLink {
  std::string recapitulant;
  std::string origin;
  double match_score = 0.0;
  MatchKind match_kind = MatchKind::Restatement;

  bool operator==(const TraceLink&) const = default;
};

struct LinkConfig {
  // Minimum content-token overlap coefficient for any non-identical link.
  double threshold = 0.5;
  // Shared contiguous run length that upgrades a link to NearQuotation.
  std::size_t quotation_window = 3;
};

struct SharedRun {
  std::size_t length = 0;
  std::size_t begin_a = 0;
  std::size_t begin_b = 0;
};

// Overlap coefficient of the content-token sets of a and b.
double match_score(std::string_view a, std::string_view b);

// Longest contiguous run of matching tokens shared by a and b that contains at
// least one non-stopword. Length 0 when there is none.
SharedRun longest_shared_run(std::string_view a, std::string_view b);

// Kind and score for a candidate pair, or nullopt when they do not link.
std::optional<std::pair<MatchKind, double>> classify_match(std::string_view origin, std::string_view recap,
                                                           const LinkConfig& config = {});

// Quoted spans of two or more words, returned as inner-content spans.
std::vector<Span> quoted_spans(std::string_view text);

// Clause traces plus quote traces for every turn, all with role Plain, in
// turn order then span order.
std::vector<Trace> build_traces(const Transcript& transcript);

std::vector<TraceLink> link_recapitulants(const Transcript& transcript, const LinkConfig& config = {});

// Recapitulant wins over Origin when a trace is both.
void assign_roles(std::vector<Trace>& traces, const std::vector<TraceLink>& links);

// Everything the detectors need, computed once.
class TraceGraph {
 public:
  explicit TraceGraph(const Transcript& transcript, const LinkConfig& config = {});

  const Transcript& transcript() const { return *transcript_; }
  const std::vector<Trace>& traces() const { return traces_; }
  const std::vector<TraceLink>& links() const { return links_; }
  const std::vector<ClauseAnalysis>& clauses(std::size_t turn) const { return clauses_.at(turn); }

  // Throws InvalidReference for unknown ids.
  const Trace& trace(std::string_view id) const;
  const Trace* find(std::string_view id) const;
  const ClauseAnalysis& clause_of(const Trace& t) const;
  std::string_view text_of(const Trace& t) const;

  // Negated iff the enclosing clause is negated and its scope overlaps t.
  Polarity polarity_of(const Trace& t) const;
  TemporalScope temporal_of(const Trace& t) const;

 private:
  const Transcript* transcript_;
  std::vector<std::vector<ClauseAnalysis>> clauses_;
  std::vector<Trace> traces_;
  std::vector<TraceLink> links_;
};

}  // namespace tracelens
