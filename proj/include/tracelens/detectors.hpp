#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tracelens/finding.hpp"
#include "tracelens/trace.hpp"
#include "tracelens/transcript.hpp"

namespace tracelens {

struct DetectorConfig {
  LinkConfig link;
  // Shared content tokens required before polarity is compared.
  std::size_t reversal_min_shared = 2;
  // Shared non-temporal content tokens required for scope collapse.
  std::size_t scope_min_shared = 1;
  // Shared content tokens between the paired human and model clauses.
  std::size_t ownership_min_shared = 2;
  // Human-turn markers that open an accountability context. "?" matches
  // anywhere; the rest match whole words.
  std::set<std::string> accountability_markers = {"?", "really", "should", "problem", "issue"};
};

std::optional<MutationFinding> detect_semiotic_reversal(const TraceGraph& graph, const TraceLink& link,
                                                        const DetectorConfig& config = {});

std::optional<MutationFinding> detect_scope_collapse(const TraceGraph& graph, const TraceLink& link,
                                                     const DetectorConfig& config = {});

bool accountability_context(const Turn& human_turn, const DetectorConfig& config = {});

std::optional<MutationFinding> detect_residual_user_ownership(const TraceGraph& graph, std::size_t human_turn,
                                                              std::size_t model_turn,
                                                              const DetectorConfig& config = {});

std::optional<MutationFinding> detect_projective_reassignment(const TraceGraph& graph, std::size_t model_turn,
                                                              const DetectorConfig& config = {});

// Residual ownership on the pair, else projective reassignment on model_turn.
std::optional<MutationFinding> detect_genitive_dissociation(const TraceGraph& graph, std::size_t human_turn,
                                                            std::size_t model_turn,
                                                            const DetectorConfig& config = {});

// Sorted by recapitulant turn, then span, then subtype; duplicates dropped.
std::vector<MutationFinding> run_all_detectors(const Transcript& transcript, const DetectorConfig& config = {});

}  // namespace tracelens
