#include "tracelens/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tracelens/error.hpp"

namespace tracelens {
namespace {

namespace fs = std::filesystem;

class Fd {
 public:
  Fd(const fs::path& path, int flags) : fd_(::open(path.c_str(), flags, 0644)) {
    if (fd_ < 0) throw StoreError("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

void write_all(int fd, const std::string& data, const fs::path& path) {
  std::size_t off = 0;
  while (off < data.size()) {
    const auto n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StoreError("write to " + path.string() + " failed: " + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) throw StoreError("fsync of " + path.string() + " failed: " + std::strerror(errno));
}

void fsync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 200 || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

std::vector<SessionRecord> parse_sessions(std::istream& in, const std::string& name) {
  std::vector<SessionRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw StoreError(name + ":" + std::to_string(n) + ": " + e.what());
    } catch (const Error& e) {
      throw StoreError(name + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

void validate_record(const SessionRecord& record, const std::vector<Event>& events) {
  const auto r = replay(events);
  const auto fail = [&](const std::string& what) {
    throw ValidationError("session " + record.session_id + ": " + what);
  };
  if (r.session_id != record.session_id) fail("event log belongs to " + r.session_id);
  if (r.exhibit_id != record.exhibit_id) fail("exhibit differs from event log");
  if (r.model != record.model.str()) fail("model differs from event log");
  if (record.event_log != "events/" + record.session_id + ".jsonl") fail("unexpected event log path");
  switch (record.status) {
    case SessionStatus::Running: fail("only finished sessions can be stored"); break;
    case SessionStatus::Aborted:
      if (!r.aborted) fail("marked aborted but the log does not abort");
      if (record.scores) fail("aborted sessions carry no scores");
      break;
    case SessionStatus::Closed:
      if (!r.scores) fail("marked closed but the log does not close");
      if (!record.scores || *record.scores != *r.scores) fail("scores differ from replay");
      break;
  }
}

Store::Store(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "events", ec);
  if (!ec) fs::create_directories(root_ / "exhibits", ec);
  if (ec) throw StoreError("cannot create store at " + root_.string() + ": " + ec.message());
}

void Store::append_session(const SessionRecord& record, const std::vector<Event>& events) {
  if (!valid_id(record.session_id)) throw StoreError("session id '" + record.session_id + "' is not file-safe");
  validate_record(record, events);

  std::lock_guard guard(write_mu_);
  Fd sessions(sessions_path(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC);
  if (::flock(sessions.get(), LOCK_EX) != 0) throw StoreError("cannot lock " + sessions_path().string());
  // Ids are checked under the lock so two writers cannot both pass.
  for (const auto& existing : load_sessions())
    if (existing.session_id == record.session_id)
      throw StoreError("duplicate session id '" + record.session_id + "'");

  std::ostringstream log;
  write_events(log, events);
  const auto final_path = root_ / record.event_log;
  const auto tmp_path = final_path.string() + ".tmp";
  {
    Fd f(tmp_path, O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC);
    write_all(f.get(), log.str(), tmp_path);
  }
  std::error_code ec;
  fs::rename(tmp_path, final_path, ec);
  if (ec) throw StoreError("cannot place " + final_path.string() + ": " + ec.message());
  fsync_dir(final_path.parent_path());

  write_all(sessions.get(), to_json(record).dump() + "\n", sessions_path());
}

std::vector<SessionRecord> Store::load_sessions() const {
  std::ifstream in(sessions_path());
  if (!in) return {};
  return parse_sessions(in, sessions_path().string());
}

std::vector<Event> Store::load_events(const SessionRecord& record) const {
  const auto path = root_ / record.event_log;
  std::ifstream in(path);
  if (!in) throw StoreError("missing event log " + path.string());
  try {
    return read_events(in);
  } catch (const ParseError& e) {
    throw StoreError(path.string() + ":" + std::to_string(e.line()) + ": " + e.what());
  }
}

bool Store::contains(const std::string& session_id) const {
  const auto all = load_sessions();
  return std::any_of(all.begin(), all.end(), [&](const auto& r) { return r.session_id == session_id; });
}

void Store::verify() const {
  for (const auto& r : load_sessions()) validate_record(r, load_events(r));
}

void Store::save_exhibit(const Exhibit& exhibit) {
  validate(exhibit);
  if (!valid_id(exhibit.id)) throw StoreError("exhibit id '" + exhibit.id + "' is not file-safe");
  const auto path = root_ / "exhibits" / (exhibit.id + ".json");
  const auto tmp = path.string() + ".tmp";
  {
    Fd f(tmp, O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC);
    write_all(f.get(), to_json(exhibit).dump(2) + "\n", tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StoreError("cannot place " + path.string() + ": " + ec.message());
}

std::vector<Exhibit> Store::load_exhibits() const {
  std::vector<fs::path> paths;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root_ / "exhibits", ec))
    if (entry.path().extension() == ".json") paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  std::vector<Exhibit> out;
  for (const auto& p : paths) {
    try {
      out.push_back(load_exhibit(p));
    } catch (const Error& e) {
      throw StoreError(p.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace tracelens
