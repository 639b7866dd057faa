#include "tracelens/transcript.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include "tracelens/error.hpp"
#include "tracelens/text.hpp"

namespace tracelens {

std::string_view to_string(Speaker s) { return s == Speaker::Human ? "human" : "model"; }

Speaker speaker_from_string(std::string_view s) {
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "human" || lower == "user") return Speaker::Human;
  if (lower == "model" || lower == "llm" || lower == "assistant") return Speaker::Model;
  throw ParseError("unknown speaker '" + std::string(s) + "'");
}

Transcript::Transcript(std::string source_id, std::vector<Turn> turns) : source_id_(std::move(source_id)) {
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (turns[i].index != i)
      throw ValidationError("turn indices must be contiguous from 0; found " +
                            std::to_string(turns[i].index) + " at position " + std::to_string(i));
    check_text(turns[i].text, i);
  }
  turns_ = std::move(turns);
}

void Transcript::check_text(const std::string& text, std::size_t index) {
  if (text::trim(text, {0, text.size()}).empty())
    throw ValidationError("turn " + std::to_string(index) + " has empty text");
}

const Turn& Transcript::at(std::size_t index) const {
  if (index >= turns_.size())
    throw InvalidReference("turn " + std::to_string(index) + " not in transcript '" + source_id_ + "'");
  return turns_[index];
}

const Turn& Transcript::append(Speaker speaker, std::string text, std::map<std::string, std::string> meta) {
  check_text(text, turns_.size());
  turns_.push_back({turns_.size(), speaker, std::move(text), std::move(meta)});
  return turns_.back();
}

std::vector<std::string> Transcript::contested_traces(std::size_t index) const {
  std::vector<std::string> ids;
  const auto& meta = at(index).meta;
  auto it = meta.find(std::string(kContestsKey));
  if (it == meta.end()) return ids;
  std::string current;
  auto flush = [&] {
    auto span = text::trim(current, {0, current.size()});
    if (!span.empty()) ids.emplace_back(span.slice(current));
    current.clear();
  };
  for (char c : it->second) {
    if (c == ',') flush();
    else current.push_back(c);
  }
  flush();
  return ids;
}

nlohmann::ordered_json to_json(const Turn& turn) {
  nlohmann::ordered_json j;
  j["index"] = turn.index;
  j["speaker"] = to_string(turn.speaker);
  j["text"] = turn.text;
  j["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : turn.meta) j["meta"][k] = v;
  return j;
}

Turn turn_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("turn record must be an object");
  for (const char* field : {"index", "speaker", "text"})
    if (!j.contains(field)) throw ParseError(std::string("missing field '") + field + "'");
  if (!j["index"].is_number_unsigned() && !(j["index"].is_number_integer() && j["index"].get<long long>() >= 0))
    throw ParseError("'index' must be a non-negative integer");
  if (!j["speaker"].is_string()) throw ParseError("'speaker' must be a string");
  if (!j["text"].is_string()) throw ParseError("'text' must be a string");
  Turn turn;
  turn.index = j["index"].get<std::size_t>();
  turn.speaker = speaker_from_string(j["speaker"].get<std::string>());
  turn.text = j["text"].get<std::string>();
  if (j.contains("meta") && !j["meta"].is_null()) {
    if (!j["meta"].is_object()) throw ParseError("'meta' must be an object");
    for (const auto& [k, v] : j["meta"].items()) {
      if (!v.is_string()) throw ParseError("meta value '" + k + "' must be a string");
      turn.meta[k] = v.get<std::string>();
    }
  }
  return turn;
}

Transcript parse_transcript(std::istream& in, std::string source_id) {
  std::vector<Turn> turns;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line, {0, line.size()}).empty()) continue;
    try {
      turns.push_back(turn_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed record: ") + e.what(), line_no);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (turns.back().index != turns.size() - 1)
      throw ParseError("turn index " + std::to_string(turns.back().index) + " breaks contiguity", line_no);
    if (text::trim(turns.back().text, {0, turns.back().text.size()}).empty())
      throw ParseError("turn text is empty", line_no);
  }
  if (turns.empty()) throw ParseError("no turns");
  return Transcript(std::move(source_id), std::move(turns));
}

Transcript load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  return parse_transcript(in, path.stem().string());
}

void write_transcript(std::ostream& out, const Transcript& transcript) {
  for (const auto& turn : transcript.turns()) out << to_json(turn).dump() << '\n';
}

}  // namespace tracelens
