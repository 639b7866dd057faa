#include "tracelens/detectors.hpp"

#include <algorithm>
#include <tuple>

namespace tracelens {
namespace {

std::vector<Token> trace_content(const TraceGraph& g, const Trace& t) {
  auto tokens = text::content_tokens(g.text_of(t));
  for (auto& tok : tokens) tok.span = tok.span.shifted(t.span.begin);
  return tokens;
}

std::set<std::string> set_of(const std::vector<Token>& tokens) {
  std::set<std::string> out;
  for (const auto& t : tokens) out.insert(t.text);
  return out;
}

bool is_temporal_class(const std::string& w) { return w == text::kFutureClass || w == text::kPresentClass; }

std::string join(const std::set<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ", ";
    out += w;
  }
  return out;
}

Evidence make_evidence(const TraceGraph& g, const Trace& o, const Trace& r, std::string feature,
                       std::string origin_value, std::string recap_value, Span origin_span, Span recap_span) {
  const auto& otext = g.transcript().at(o.turn_index).text;
  const auto& rtext = g.transcript().at(r.turn_index).text;
  return {std::move(feature),
          std::move(origin_value),
          std::move(recap_value),
          origin_span,
          recap_span,
          std::string(origin_span.slice(otext)),
          std::string(recap_span.slice(rtext))};
}

Evidence shared_evidence(const TraceGraph& g, const Trace& o, const Trace& r, const std::set<std::string>& shared) {
  return make_evidence(g, o, r, "shared_tokens", join(shared), join(shared), o.span, r.span);
}

ClauseAnalysis features_of(const TraceGraph& g, const Trace& t) {
  if (t.kind == TraceKind::Clause) return g.clause_of(t);
  return analyze_clause(g.transcript().at(t.turn_index).text, t.span);
}

MutationFinding make_finding(const TraceGraph& g, MutationSubtype subtype, const Trace& o, const Trace& r,
                             std::optional<TraceLink> link) {
  MutationFinding f;
  f.subtype = subtype;
  f.mutation_class = class_of(subtype);
  f.severity = severity_of(subtype);
  f.origin = make_ref(g, o);
  f.recapitulant = make_ref(g, r);
  f.link = std::move(link);
  return f;
}

std::optional<TraceLink> link_between(const TraceGraph& g, const std::string& origin, const std::string& recap) {
  for (const auto& l : g.links())
    if (l.origin == origin && l.recapitulant == recap) return l;
  return std::nullopt;
}

const Token* token_in(const std::vector<Token>& tokens, const std::set<std::string>& words, std::optional<Span> within) {
  for (const auto& t : tokens)
    if (words.contains(t.text) && (!within || within->overlaps(t.span))) return &t;
  return nullptr;
}

}  // namespace

std::optional<MutationFinding> detect_semiotic_reversal(const TraceGraph& g, const TraceLink& link,
                                                        const DetectorConfig& config) {
  const Trace& o = g.trace(link.origin);
  const Trace& r = g.trace(link.recapitulant);
  const auto ot = trace_content(g, o);
  const auto rt = trace_content(g, r);
  const auto shared = text::intersection(set_of(ot), set_of(rt));
  if (shared.size() < config.reversal_min_shared) return std::nullopt;

  const Polarity po = g.polarity_of(o);
  const Polarity pr = g.polarity_of(r);
  if (po == pr) return std::nullopt;

  const bool origin_negated = po == Polarity::Negated;
  const Trace& neg = origin_negated ? o : r;
  const auto& neg_tokens = origin_negated ? ot : rt;
  const auto& aff_tokens = origin_negated ? rt : ot;
  const auto& neg_clause = g.clause_of(neg);
  const Token* anchor = token_in(neg_tokens, shared, neg_clause.negation_scope);
  if (!anchor) return std::nullopt;
  const Token* counterpart = token_in(aff_tokens, {anchor->text}, std::nullopt);

  const auto subtype = origin_negated ? MutationSubtype::SemioticReversal_NegationLoss
                                      : MutationSubtype::SemioticReversal_GeneratedNegation;
  auto f = make_finding(g, subtype, o, r, link);
  f.evidence.push_back(make_evidence(g, o, r, "polarity", std::string(to_string(po)), std::string(to_string(pr)),
                                     o.span, r.span));
  const auto& cue = neg_clause.negation_cues.front();
  const Span aff_span = counterpart ? counterpart->span : (origin_negated ? r.span : o.span);
  if (origin_negated)
    f.evidence.push_back(make_evidence(g, o, r, "negation_cue", cue.text, "", cue.span, aff_span));
  else
    f.evidence.push_back(make_evidence(g, o, r, "negation_cue", "", cue.text, aff_span, cue.span));
  f.evidence.push_back(shared_evidence(g, o, r, shared));
  return f;
}

std::optional<MutationFinding> detect_scope_collapse(const TraceGraph& g, const TraceLink& link,
                                                     const DetectorConfig& config) {
  const Trace& o = g.trace(link.origin);
  const Trace& r = g.trace(link.recapitulant);
  const auto of = features_of(g, o);
  if (of.temporal_scope != TemporalScope::Future) return std::nullopt;

  const auto rf = features_of(g, r);
  std::string recap_value;
  Span recap_span = r.span;
  if (rf.temporal_scope == TemporalScope::Present) {
    recap_value = "present";
    recap_span = rf.temporal_cues.front().span;
  } else if (g.polarity_of(r) == Polarity::Negated && g.polarity_of(o) == Polarity::Affirmative) {
    recap_value = "prohibited";
    recap_span = g.clause_of(r).negation_cues.front().span;
  } else {
    return std::nullopt;
  }

  std::set<std::string> shared;
  for (const auto& w : text::intersection(set_of(trace_content(g, o)), set_of(trace_content(g, r))))
    if (!is_temporal_class(w)) shared.insert(w);
  if (shared.size() < config.scope_min_shared) return std::nullopt;

  auto f = make_finding(g, MutationSubtype::ScopeCollapse, o, r, link);
  f.evidence.push_back(
      make_evidence(g, o, r, "temporal_scope", "future", recap_value, of.temporal_cues.front().span, recap_span));
  f.evidence.push_back(shared_evidence(g, o, r, shared));
  return f;
}

bool accountability_context(const Turn& human_turn, const DetectorConfig& config) {
  if (config.accountability_markers.contains("?") && human_turn.text.find('?') != std::string::npos) return true;
  for (const auto& t : text::tokenize(human_turn.text))
    if (config.accountability_markers.contains(t.text)) return true;
  return false;
}

std::optional<MutationFinding> detect_residual_user_ownership(const TraceGraph& g, std::size_t human_turn,
                                                              std::size_t model_turn, const DetectorConfig& config) {
  const auto& transcript = g.transcript();
  if (human_turn >= model_turn || model_turn >= transcript.size()) return std::nullopt;
  if (transcript.at(human_turn).speaker != Speaker::Human || transcript.at(model_turn).speaker != Speaker::Model)
    return std::nullopt;
  if (!accountability_context(transcript.at(human_turn), config)) return std::nullopt;

  std::vector<const Trace*> human_clauses;
  for (const auto& t : g.traces())
    if (t.turn_index == human_turn && t.kind == TraceKind::Clause) human_clauses.push_back(&t);

  for (const auto& mc : g.traces()) {
    if (mc.turn_index != model_turn || mc.kind != TraceKind::Clause) continue;
    const auto& markers = g.clause_of(mc).person_markers;
    if (!markers.has(PersonClass::SecondPerson) || markers.has(PersonClass::FirstPlural)) continue;

    const auto mset = set_of(trace_content(g, mc));
    const Trace* best = nullptr;
    double best_score = 0.0;
    for (const auto* hc : human_clauses) {
      const double s = text::overlap_coefficient(set_of(trace_content(g, *hc)), mset);
      if (s > best_score) {
        best_score = s;
        best = hc;
      }
    }
    if (!best) continue;
    const auto shared = text::intersection(set_of(trace_content(g, *best)), mset);
    if (shared.size() < config.ownership_min_shared) continue;
    const auto& hmarkers = g.clause_of(*best).person_markers;
    if (!hmarkers.has(PersonClass::FirstPlural)) continue;

    auto first_of = [](const PersonMarkers& m, PersonClass p) {
      return std::find_if(m.hits.begin(), m.hits.end(), [p](const PersonMarker& x) { return x.person == p; })->hit;
    };
    const auto ohit = first_of(hmarkers, PersonClass::FirstPlural);
    const auto rhit = first_of(markers, PersonClass::SecondPerson);
    auto f = make_finding(g, MutationSubtype::ResidualUserOwnership, *best, mc, link_between(g, best->id, mc.id));
    f.evidence.push_back(make_evidence(g, *best, mc, "person", std::string(to_string(PersonClass::FirstPlural)),
                                       std::string(to_string(PersonClass::SecondPerson)), ohit.span, rhit.span));
    f.evidence.push_back(shared_evidence(g, *best, mc, shared));
    return f;
  }
  return std::nullopt;
}

std::optional<MutationFinding> detect_projective_reassignment(const TraceGraph& g, std::size_t model_turn,
                                                              const DetectorConfig& config) {
  const auto& transcript = g.transcript();
  if (model_turn >= transcript.size() || transcript.at(model_turn).speaker != Speaker::Model) return std::nullopt;

  for (const auto& link : g.links()) {
    const Trace& r = g.trace(link.recapitulant);
    if (r.turn_index != model_turn) continue;
    const Trace& o = g.trace(link.origin);
    if (transcript.at(o.turn_index).speaker != Speaker::Model) continue;
    const auto possessives = g.clause_of(r).person_markers.second_person_possessives();
    if (possessives.empty()) continue;
    if (g.clause_of(o).person_markers.has(PersonClass::SecondPerson)) continue;

    const auto origin_text = g.text_of(o);
    const bool human_first = std::any_of(g.traces().begin(), g.traces().end(), [&](const Trace& h) {
      return h.turn_index < o.turn_index && transcript.at(h.turn_index).speaker == Speaker::Human &&
             classify_match(g.text_of(h), origin_text, config.link).has_value();
    });
    if (human_first) continue;

    auto f = make_finding(g, MutationSubtype::ProjectiveReassignment, o, r, link);
    f.evidence.push_back(make_evidence(g, o, r, "possession", "model", "second_person", o.span,
                                       possessives.front().span));
    f.evidence.push_back(shared_evidence(
        g, o, r, text::intersection(set_of(trace_content(g, o)), set_of(trace_content(g, r)))));
    return f;
  }
  return std::nullopt;
}

std::optional<MutationFinding> detect_genitive_dissociation(const TraceGraph& g, std::size_t human_turn,
                                                            std::size_t model_turn, const DetectorConfig& config) {
  if (auto f = detect_residual_user_ownership(g, human_turn, model_turn, config)) return f;
  return detect_projective_reassignment(g, model_turn, config);
}

std::vector<MutationFinding> run_all_detectors(const Transcript& transcript, const DetectorConfig& config) {
  const TraceGraph g(transcript, config.link);
  std::vector<MutationFinding> out;
  auto speaker_of = [&](const std::string& id) { return transcript.at(g.trace(id).turn_index).speaker; };

  for (const auto& link : g.links()) {
    if (speaker_of(link.origin) != Speaker::Human || speaker_of(link.recapitulant) != Speaker::Model) continue;
    if (auto f = detect_semiotic_reversal(g, link, config)) out.push_back(std::move(*f));
    if (auto f = detect_scope_collapse(g, link, config)) out.push_back(std::move(*f));
  }
  for (const auto& turn : transcript.turns()) {
    if (turn.speaker != Speaker::Model) continue;
    if (turn.index > 0 && transcript.at(turn.index - 1).speaker == Speaker::Human)
      if (auto f = detect_residual_user_ownership(g, turn.index - 1, turn.index, config)) out.push_back(std::move(*f));
    if (auto f = detect_projective_reassignment(g, turn.index, config)) out.push_back(std::move(*f));
  }

  auto key = [](const MutationFinding& f) {
    return std::tuple(f.recapitulant.turn, f.recapitulant.span, f.subtype, f.origin.turn, f.origin.span);
  };
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
  out.erase(std::unique(out.begin(), out.end(), [&](const auto& a, const auto& b) { return key(a) == key(b); }),
            out.end());
  return out;
}

}  // namespace tracelens
