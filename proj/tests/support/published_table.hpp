#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace tracelens::testing {

// API corpus results by model family, as printed (counts per column, avg TTE
// to one decimal).
struct PublishedRow {
  std::string_view model;
  std::size_t n, anomaly, locus_independent, locus_prompted, locus_unreached, human_exp;
  std::string_view avg_tte;
};

inline constexpr std::array<PublishedRow, 10> kPublishedRows = {{
    {"Claude Opus", 3, 1, 3, 0, 0, 2, "1.0"},
    {"Claude Sonnet", 5, 5, 4, 1, 0, 0, "2.6"},
    {"Gemini Flash", 3, 0, 1, 2, 0, 0, "1.7"},
    {"Gemini Flash Lite", 3, 1, 0, 3, 0, 1, "3.0"},
    {"Gemini Pro", 3, 0, 0, 3, 0, 2, "3.7"},
    {"GPT-4o", 9, 3, 0, 5, 4, 1, "5.1"},
    {"GPT-5.2", 4, 3, 3, 1, 0, 4, "2.5"},
    {"Llama 3", 3, 0, 0, 3, 0, 0, "4.0"},
    {"o3", 3, 2, 0, 2, 1, 2, "4.0"},
    {"Qwen 2.5", 4, 1, 0, 1, 3, 1, "5.8"},
}};

inline constexpr PublishedRow kPublishedTotal = {"Total", 40, 16, 11, 21, 8, 13, "3.5"};

// Baseline identification of the inversion itself.
inline constexpr std::size_t kPublishedInversionIdentified = 0;

}  // namespace tracelens::testing
