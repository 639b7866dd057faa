#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tracelens {

enum class Speaker { Human, Model };

std::string_view to_string(Speaker s);
Speaker speaker_from_string(std::string_view s);

struct Turn {
  std::size_t index = 0;
  Speaker speaker = Speaker::Human;
  std::string text;
  // Reviewer annotations. "contests" holds comma-separated ids of the
  // degenerate traces a human turn pushes back on.
  std::map<std::string, std::string> meta;

  bool operator==(const Turn&) const = default;
};

inline constexpr std::string_view kContestsKey = "contests";

// Ordered, speaker-attributed record of a session. Turns are only ever
// appended; indices stay contiguous from 0.
class Transcript {
 public:
  Transcript() = default;
  explicit Transcript(std::string source_id) : source_id_(std::move(source_id)) {}
  Transcript(std::string source_id, std::vector<Turn> turns);

  const std::string& source_id() const { return source_id_; }
  const std::vector<Turn>& turns() const { return turns_; }
  const Turn& at(std::size_t index) const;
  std::size_t size() const { return turns_.size(); }
  bool empty() const { return turns_.empty(); }

  const Turn& append(Speaker speaker, std::string text, std::map<std::string, std::string> meta = {});

  // Trace ids named in the "contests" annotation of a turn.
  std::vector<std::string> contested_traces(std::size_t index) const;

  bool operator==(const Transcript&) const = default;

 private:
  static void check_text(const std::string& text, std::size_t index);

  std::string source_id_;
  std::vector<Turn> turns_;
};

Transcript parse_transcript(std::istream& in, std::string source_id);
Transcript load_transcript(const std::filesystem::path& path);
void write_transcript(std::ostream& out, const Transcript& transcript);

nlohmann::ordered_json to_json(const Turn& turn);
Turn turn_from_json(const nlohmann::json& j);

}  // namespace tracelens
