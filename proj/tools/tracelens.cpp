// tracelens: transcript analysis, elicitation sessions, corpus reports and
// the local review service.

#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "tracelens/detectors.hpp"
#include "tracelens/error.hpp"
#include "tracelens/fixture.hpp"
#include "tracelens/grounding.hpp"
#include "tracelens/metrics.hpp"
#include "tracelens/service.hpp"
#include "tracelens/session.hpp"
#include "tracelens/store.hpp"
#include "tracelens/transcript.hpp"

namespace tl = tracelens;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kProvider = 3, kStore = 4 };

class UsageError : public tl::Error {
 public:
  using tl::Error::Error;
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw UsageError("cannot write " + out_path);
  out << text;
}

std::string quote(std::string_view s) { return "\"" + std::string(s) + "\""; }

struct AnalyzeOptions {
  std::string file;
  std::string format = "text";
  std::string out;
};

int cmd_analyze(const AnalyzeOptions& o) {
  const auto transcript = tl::load_transcript(o.file);
  const auto findings = tl::run_all_detectors(transcript);
  const auto timeline = tl::grounding_timeline(transcript, findings);

  if (o.format == "json") {
    nlohmann::ordered_json j;
    j["source"] = transcript.source_id();
    j["turns"] = transcript.size();
    j["findings"] = nlohmann::ordered_json::array();
    for (const auto& f : findings) {
      auto fj = tl::to_json(f);
      fj["repair_position"] = tl::to_string(tl::classify_repair_position(transcript, f));
      j["findings"].push_back(std::move(fj));
    }
    j["timeline"] = nlohmann::ordered_json::array();
    for (const auto& g : timeline) j["timeline"].push_back(tl::to_json(g));
    emit(j.dump(2) + "\n", o.out);
    return kOk;
  }

  std::ostringstream s;
  s << "transcript " << transcript.source_id() << ": " << transcript.size() << " turns\n";
  s << "findings: " << findings.size() << "\n";
  for (std::size_t i = 0; i < findings.size(); ++i) {
    const auto& f = findings[i];
    s << "  [" << i + 1 << "] " << tl::to_string(f.mutation_class) << "/" << tl::to_string(f.subtype) << " ("
      << tl::to_string(f.severity) << ")\n";
    s << "      origin " << f.origin.trace << " turn " << f.origin.turn << ": " << quote(f.origin.text) << "\n";
    s << "      recap  " << f.recapitulant.trace << " turn " << f.recapitulant.turn << ": "
      << quote(f.recapitulant.text) << "\n";
    for (const auto& e : f.evidence)
      s << "      " << e.feature << ": " << e.origin_value << " -> " << e.recap_value << "\n";
    s << "      repair: " << tl::to_string(tl::classify_repair_position(transcript, f)) << "\n";
  }
  s << "grounding:\n";
  for (const auto& g : timeline) {
    s << "  turn " << g.turn_index << ": asymmetry " << g.asymmetry_count << ", eclipsed {";
    bool first = true;
    for (const auto& id : g.eclipsed_origins) {
      s << (first ? "" : ", ") << id;
      first = false;
    }
    s << "}\n";
  }
  emit(s.str(), o.out);
  return kOk;
}

struct RunOptions {
  std::string exhibit;
  std::string model;
  std::string providers;
  std::string script;
  std::string store = "store";
  std::string judge = "terminal";
  std::string verdicts;
  std::string session_id;
  std::string escalation;
  std::string clock;
  std::string notes;
  std::optional<double> temperature;
  std::optional<int> max_tokens;
  std::string host = "127.0.0.1";
  int port = 0;
};

tl::ProviderRegistry build_registry(const std::string& config_path, const std::string& script_path,
                                    const tl::ModelRef& model) {
  if (!script_path.empty()) {
    std::ifstream in(script_path);
    if (!in) throw tl::ParseError("cannot read " + script_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw tl::ParseError(script_path + ": " + e.what());
    }
    tl::ProviderRegistry reg;
    tl::ProviderConfig c;
    c.id = model.provider_id;
    c.format = "scripted";
    c.script = script_path;
    reg.add(c, tl::ScriptedProvider::from_json(j));
    return reg;
  }
  if (config_path.empty()) throw UsageError("either --providers or --script is required");
  return tl::ProviderRegistry::from_config(tl::load_provider_config(config_path), tl::process_env(),
                                           fs::path(config_path).parent_path());
}

void apply_escalation_overrides(tl::Exhibit& exhibit, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tl::ParseError("cannot read " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw tl::ParseError(path + ": " + e.what());
  }
  if (!j.is_object()) throw tl::ParseError(path + ": overrides must be an object keyed by level");
  for (const auto& [key, prompts] : j.items()) {
    const auto level = tl::level_from_string(key);
    exhibit.escalation_prompts[tl::index_of(level)] = prompts.get<std::vector<std::string>>();
  }
  tl::validate(exhibit);
}

int finish_run(const tl::SessionRecord& record) {
  std::cout << tl::to_json(record).dump(2) << "\n";
  if (record.status == tl::SessionStatus::Aborted) {
    std::cerr << "session aborted: " << record.notes << "\n";
    return kProvider;
  }
  return kOk;
}

int cmd_run(const RunOptions& o) {
  auto exhibit = tl::load_exhibit(o.exhibit);
  if (!o.escalation.empty()) apply_escalation_overrides(exhibit, o.escalation);
  auto model = tl::ModelRef::parse(o.model);
  model.params.temperature = o.temperature;
  model.params.max_tokens = o.max_tokens;
  const auto registry = build_registry(o.providers, o.script, model);
  registry.check(model);
  tl::Store store(o.store);
  const auto clock = o.clock.empty() ? tl::system_clock() : tl::fixed_clock(o.clock);
  std::string id = o.session_id;
  if (id.empty()) {
    const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    id = exhibit.id + "-" + std::to_string(now);
  }

  if (o.judge == "service") {
    tl::ReviewService service(store, registry, {exhibit}, clock);
    const int port = service.bind(o.host, o.port);
    nlohmann::json body = {{"exhibit_id", exhibit.id}, {"model", model.str()}, {"session_id", id}};
    const auto created = service.handle("POST", "/sessions", body.dump());
    if (created.status != 201) throw tl::ValidationError(created.body.dump());
    std::cerr << "judge session " << id << " at http://" << o.host << ":" << port << "/sessions/" << id << "\n";
    std::atomic<bool> done = store.contains(id);
    std::thread watcher([&] {
      if (done) return;
      service.wait_ready();
      while (!done) {
        if (store.contains(id)) {
          service.stop();
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
      }
    });
    if (!done) service.serve();
    done = true;
    watcher.join();
    for (const auto& r : store.load_sessions())
      if (r.session_id == id) return finish_run(r);
    throw tl::StoreError("session " + id + " was not stored");
  }

  std::unique_ptr<tl::Judge> judge;
  if (o.judge == "terminal") {
    judge = std::make_unique<tl::TerminalJudge>(std::cin, std::cerr, exhibit.canonical_human_experience);
  } else if (o.judge == "scripted") {
    judge = std::make_unique<tl::ScriptedJudge>(tl::ScriptedJudge::parse(o.verdicts));
  } else {
    throw UsageError("unknown judge mode '" + o.judge + "'");
  }
  tl::SessionDriver driver(id, exhibit, model, registry.get(model.provider_id), clock);
  tl::run_with_judge(driver, *judge);
  auto record = driver.record();
  if (!o.notes.empty()) record.notes += (record.notes.empty() ? "" : "\n") + o.notes;
  store.append_session(record, driver.events());
  return finish_run(record);
}

struct ReportOptions {
  std::string store;
  std::string format = "text";
  std::string out;
  bool no_verify = false;
};

int cmd_report(const ReportOptions& o) {
  tl::ReportFormat format;
  try {
    format = tl::parse_report_format(o.format);
  } catch (const tl::ValidationError& e) {
    throw UsageError(e.what());
  }
  if (!fs::is_directory(o.store)) throw tl::StoreError("no store at " + o.store);
  tl::Store store(o.store);
  if (!o.no_verify) store.verify();
  emit(tl::render_report(tl::aggregate(store.load_sessions()), format), o.out);
  return kOk;
}

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store = "store";
  std::string providers;
  std::vector<std::string> exhibits;
};

int cmd_serve(const ServeOptions& o) {
  tl::Store store(o.store);
  tl::ProviderRegistry registry;
  if (!o.providers.empty())
    registry = tl::ProviderRegistry::from_config(tl::load_provider_config(o.providers), tl::process_env(),
                                                 fs::path(o.providers).parent_path());
  auto exhibits = store.load_exhibits();
  for (const auto& p : o.exhibits) {
    auto e = tl::load_exhibit(p);
    const auto same = [&](const tl::Exhibit& x) { return x.id == e.id; };
    exhibits.erase(std::remove_if(exhibits.begin(), exhibits.end(), same), exhibits.end());
    exhibits.push_back(std::move(e));
  }
  tl::ReviewService service(store, registry, exhibits);
  const int port = service.bind(o.host, o.port);
  std::cerr << "serving on http://" << o.host << ":" << port << "\n";
  service.serve();
  return kOk;
}

struct FixtureOptions {
  std::string corpus;
  std::string store;
  std::string clock = "2026-01-01T00:00:00.000Z";
};

int cmd_fixture(const FixtureOptions& o) {
  const auto corpus = tl::load_fixture(o.corpus);
  tl::Store store(o.store);
  tl::write_fixture_store(corpus, store, tl::fixed_clock(o.clock));
  std::cout << "wrote " << corpus.sessions.size() << " sessions to " << o.store << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace mutation analysis and elicitation sessions"};
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Detect trace mutations in a transcript");
  a->add_option("file", analyze.file, "Transcript (.jsonl)")->required();
  a->add_option("--format", analyze.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  a->add_option("--out", analyze.out, "Write to file instead of stdout");

  RunOptions run;
  auto* r = app.add_subcommand("run", "Run one elicitation session");
  r->add_option("--exhibit", run.exhibit, "Exhibit file")->required();
  r->add_option("--model", run.model, "provider:model")->required();
  r->add_option("--providers", run.providers, "Provider config file");
  r->add_option("--script", run.script, "Scripted replies (JSON array) instead of a provider config");
  r->add_option("--store", run.store, "Store directory");
  r->add_option("--judge", run.judge, "terminal, scripted or service")
      ->check(CLI::IsMember({"terminal", "scripted", "service"}));
  r->add_option("--verdicts", run.verdicts, "Scripted verdicts, e.g. nynnyyn; the last is human-experience");
  r->add_option("--session-id", run.session_id, "Session id");
  r->add_option("--escalation", run.escalation, "JSON object of per-level escalation prompt overrides");
  r->add_option("--clock", run.clock, "Fixed timestamp for every event");
  r->add_option("--notes", run.notes, "Judge comments appended to the record");
  r->add_option("--temperature", run.temperature, "Sampling temperature");
  r->add_option("--max-tokens", run.max_tokens, "Completion token limit");
  r->add_option("--host", run.host, "Service judge: bind address");
  r->add_option("--port", run.port, "Service judge: port (0 picks one)");

  ReportOptions report;
  auto* rp = app.add_subcommand("report", "Aggregate a store into the corpus table");
  rp->add_option("store", report.store, "Store directory")->required();
  rp->add_option("--format", report.format, "text, csv or json (also table-text, delimited, structured)");
  rp->add_option("--out", report.out, "Write to file instead of stdout");
  rp->add_flag("--no-verify", report.no_verify, "Skip replaying event logs");

  ServeOptions serve;
  auto* sv = app.add_subcommand("serve", "Run the local review service");
  sv->add_option("--host", serve.host, "Bind address");
  sv->add_option("--port", serve.port, "Port");
  sv->add_option("--store", serve.store, "Store directory");
  sv->add_option("--providers", serve.providers, "Provider config file");
  sv->add_option("--exhibit", serve.exhibits, "Exhibit file (repeatable)");

  FixtureOptions fixture;
  auto* fx = app.add_subcommand("fixture", "Write the encoded API corpus into a store");
  fx->add_option("--corpus", fixture.corpus, "Fixture outcomes file")->required();
  fx->add_option("--store", fixture.store, "Store directory")->required();
  fx->add_option("--clock", fixture.clock, "Timestamp for generated events");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (a->parsed()) return cmd_analyze(analyze);
    if (r->parsed()) return cmd_run(run);
    if (rp->parsed()) return cmd_report(report);
    if (sv->parsed()) return cmd_serve(serve);
    if (fx->parsed()) return cmd_fixture(fixture);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const tl::StoreError& e) {
    std::cerr << "store error: " << e.what() << "\n";
    return kStore;
  } catch (const tl::ProviderError& e) {
    std::cerr << "provider error: " << e.what() << "\n";
    return kProvider;
  } catch (const tl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  }
  return kUsage;
}
