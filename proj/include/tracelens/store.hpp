#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "tracelens/event_log.hpp"
#include "tracelens/exhibit.hpp"
#include "tracelens/session.hpp"

namespace tracelens {

// Checks that a record is what its event log replays to. Throws
// ValidationError on any mismatch.
void validate_record(const SessionRecord& record, const std::vector<Event>& events);

// Append-only directory store:
//   sessions.jsonl          one SessionRecord per line
//   events/<id>.jsonl       the session's event log
//   exhibits/<id>.json
// One writer per directory; readers may run concurrently.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // Validates, writes the event log, then appends the record line (flock +
  // fsync). Duplicate ids throw StoreError; replay mismatches ValidationError.
  void append_session(const SessionRecord& record, const std::vector<Event>& events);

  // Throws StoreError "<file>:<line>: ..." on a corrupt line.
  std::vector<SessionRecord> load_sessions() const;
  std::vector<Event> load_events(const SessionRecord& record) const;
  bool contains(const std::string& session_id) const;

  // Replays every stored record; throws on the first inconsistency.
  void verify() const;

  void save_exhibit(const Exhibit& exhibit);
  std::vector<Exhibit> load_exhibits() const;

 private:
  std::filesystem::path sessions_path() const { return root_ / "sessions.jsonl"; }

  std::filesystem::path root_;
  std::mutex write_mu_;
};

}  // namespace tracelens
