#include <atomic>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "published_table.hpp"
#include "test_support.hpp"
#include "tracelens/fixture.hpp"
#include "tracelens/service.hpp"

namespace tracelens {
namespace {

using json = nlohmann::json;

const std::string kClock = "2026-01-01T00:00:00.000Z";

json script() { return json::parse(testing::read_file(testing::data_dir() / "scripts" / "ue01_script.json")); }

ProviderRegistry registry_with_script(std::size_t copies = 1) {
  json replies = json::array();
  for (std::size_t i = 0; i < copies; ++i)
    for (const auto& r : script()) replies.push_back(r);
  ProviderRegistry reg;
  ProviderConfig c;
  c.id = "scripted";
  c.format = "scripted";
  reg.add(c, ScriptedProvider::from_json(replies));
  return reg;
}

struct Fixture {
  testing::TempDir dir;
  Store store{dir.path()};
  ProviderRegistry providers = registry_with_script(4);
  ReviewService service{store, providers, {testing::ue01_exhibit()}, fixed_clock(kClock)};

  ServiceResponse create(const std::string& id = "s1") {
    return service.handle("POST", "/sessions",
                          json{{"exhibit_id", "ue01"}, {"model", "scripted:mock"}, {"session_id", id}}.dump());
  }
  ServiceResponse judge(const std::string& id, bool verdict, std::optional<std::string> token = std::nullopt) {
    json body{{"verdict", verdict}};
    if (token) body["token"] = *token;
    return service.handle("POST", "/sessions/" + id + "/judgment", body.dump());
  }
};

TEST(Service, ListsExhibits) {
  Fixture f;
  const auto r = f.service.handle("GET", "/exhibits", "");
  EXPECT_EQ(r.status, 200);
  ASSERT_EQ(r.body["exhibits"].size(), 1u);
  EXPECT_EQ(r.body["exhibits"][0]["id"], "ue01");
}

TEST(Service, CreateSessionAwaitsFirstJudgment) {
  Fixture f;
  const auto r = f.create();
  ASSERT_EQ(r.status, 201) << r.body.dump();
  EXPECT_EQ(r.body["status"], "needs_judgment");
  EXPECT_EQ(r.body["pending"]["level"], "anomaly_detection");
  EXPECT_EQ(r.body["pending"]["token"], "h0:L1");
  EXPECT_EQ(r.body["phase"], "socratic/anomaly_detection");
  EXPECT_FALSE(r.body["pending"]["response"].get<std::string>().empty());
}

TEST(Service, CreateErrors) {
  Fixture f;
  EXPECT_EQ(f.service.handle("POST", "/sessions", json{{"exhibit_id", "zz"}, {"model", "scripted:m"}}.dump()).status,
            404);
  EXPECT_EQ(f.service.handle("POST", "/sessions", "{oops").status, 400);
  EXPECT_EQ(f.service.handle("POST", "/sessions", json{{"exhibit_id", "ue01"}}.dump()).status, 400);
  EXPECT_EQ(f.service.handle("POST", "/sessions", json{{"exhibit_id", "ue01"}, {"model", "nope:m"}}.dump()).status,
            400);
  EXPECT_EQ(f.create("dup").status, 201);
  EXPECT_EQ(f.create("dup").status, 409);
}

TEST(Service, TrueVerdictAdvancesToLocus) {
  Fixture f;
  f.create();
  const auto r = f.judge("s1", true, "h0:L1");
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body["level"], "locus_identification");
  EXPECT_EQ(r.body["pending"]["level"], "locus_identification");
  EXPECT_EQ(r.body["pending"]["history_index"], 0);
}

TEST(Service, SecondJudgmentForSameResponseConflicts) {
  Fixture f;
  f.create();
  ASSERT_EQ(f.judge("s1", false, "h0:L1").status, 200);
  const auto before = f.service.handle("GET", "/sessions/s1", "");
  const auto again = f.judge("s1", false, "h0:L1");
  EXPECT_EQ(again.status, 409);
  EXPECT_EQ(f.service.handle("GET", "/sessions/s1", "").body, before.body);
}

TEST(Service, ConcurrentDuplicateSubmissionsApplyOnce) {
  Fixture f;
  f.create();
  std::atomic<int> ok{0}, conflict{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([&] {
      const auto s = f.judge("s1", false, "h0:L1").status;
      (s == 200 ? ok : conflict)++;
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok, 1);
  EXPECT_EQ(conflict, 7);
}

TEST(Service, UnknownSessionAndRoutes) {
  Fixture f;
  EXPECT_EQ(f.service.handle("GET", "/sessions/nope", "").status, 404);
  EXPECT_EQ(f.judge("nope", true).status, 404);
  EXPECT_EQ(f.service.handle("GET", "/nothing", "").status, 404);
  EXPECT_EQ(f.service.handle("DELETE", "/sessions", "").status, 405);
  EXPECT_EQ(f.service.handle("POST", "/report", "").status, 405);
}

TEST(Service, JudgmentBodyValidated) {
  Fixture f;
  f.create();
  EXPECT_EQ(f.service.handle("POST", "/sessions/s1/judgment", R"({"verdict":"yes"})").status, 400);
  EXPECT_EQ(f.service.handle("POST", "/sessions/s1/judgment", "{}").status, 400);
  EXPECT_EQ(f.service.handle("POST", "/sessions/s1/human-exp", R"({"verdict":true})").status, 409);
}

TEST(Service, GetsAreSideEffectFree) {
  Fixture f;
  f.create();
  f.judge("s1", false);
  const auto a = f.service.handle("GET", "/sessions/s1", "");
  for (int i = 0; i < 5; ++i) {
    f.service.handle("GET", "/sessions", "");
    f.service.handle("GET", "/report", "");
    f.service.handle("GET", "/exhibits", "");
  }
  EXPECT_EQ(f.service.handle("GET", "/sessions/s1", "").body, a.body);
}

// Drives a session to close through the service; returns the final view.
json run_through_service(Fixture& f, const std::string& id, const std::string& verdicts, bool human_exp) {
  auto view = f.create(id).body;
  for (char v : verdicts) {
    const auto r = f.judge(id, v == 'y', view["pending"]["token"].get<std::string>());
    EXPECT_EQ(r.status, 200) << r.body.dump();
    view = r.body;
  }
  EXPECT_EQ(view["status"], "needs_human_experience");
  return f.service.handle("POST", "/sessions/" + id + "/human-exp", json{{"verdict", human_exp}}.dump()).body;
}

TEST(Service, FullSessionClosesAndPersists) {
  Fixture f;
  const auto closed = run_through_service(f, "s1", "nynnnyy", true);
  EXPECT_EQ(closed["status"], "closed");
  EXPECT_EQ(closed["scores"]["tte"], 4);
  EXPECT_EQ(closed["scores"]["locus"], "prompted");
  ASSERT_TRUE(f.store.contains("s1"));
  EXPECT_NO_THROW(f.store.verify());
  const auto list = f.service.handle("GET", "/sessions", "").body["sessions"];
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0]["status"], "closed");
}

TEST(Service, StoredSessionServedByReplay) {
  Fixture f;
  run_through_service(f, "s1", "nynnnyy", false);
  const auto live = f.service.handle("GET", "/sessions/s1", "").body;
  ReviewService fresh(f.store, f.providers, {testing::ue01_exhibit()}, fixed_clock(kClock));
  const auto stored = fresh.handle("GET", "/sessions/s1", "");
  ASSERT_EQ(stored.status, 200);
  EXPECT_EQ(stored.body["history"], live["history"]);
  EXPECT_EQ(stored.body["scores"], live["scores"]);
  EXPECT_EQ(stored.body["socratic_turns"], live["socratic_turns"]);
}

TEST(Service, RecordMatchesInProcessRun) {
  Fixture f;
  run_through_service(f, "same", "nynnnyy", true);
  const auto service_record = f.store.load_sessions().at(0);
  const auto service_events = f.store.load_events(service_record);

  auto provider = ScriptedProvider::from_json(script());
  SessionDriver d("same", testing::ue01_exhibit(), ModelRef::parse("scripted:mock"), *provider, fixed_clock(kClock));
  auto judge = ScriptedJudge::parse("nynnnyyy");
  run_with_judge(d, judge);
  EXPECT_EQ(to_json(d.record()).dump(), to_json(service_record).dump());
  EXPECT_EQ(d.events(), service_events);
}

TEST(Service, ReportOverFixture) {
  testing::TempDir dir;
  Store store(dir.path());
  write_fixture_store(load_fixture(testing::data_dir() / "fixture" / "api_corpus.json"), store, fixed_clock(kClock));
  ProviderRegistry none;
  ReviewService service(store, none, {});
  const auto r = service.handle("GET", "/report", "");
  ASSERT_EQ(r.status, 200);
  const auto& t = r.body["total"];
  EXPECT_EQ(t["n"], testing::kPublishedTotal.n);
  EXPECT_EQ(t["anomaly"], testing::kPublishedTotal.anomaly);
  EXPECT_EQ(t["locus_independent"], testing::kPublishedTotal.locus_independent);
  EXPECT_EQ(t["locus_prompted"], testing::kPublishedTotal.locus_prompted);
  EXPECT_EQ(t["locus_unreached"], testing::kPublishedTotal.locus_unreached);
  EXPECT_EQ(t["human_exp"], testing::kPublishedTotal.human_exp);
  EXPECT_EQ(r.body["baseline"]["inversion_identification"], "0/40");
  EXPECT_EQ(r.body["baseline"]["anomaly_detection"], "16/40");
  EXPECT_EQ(r.body["rows"].size(), testing::kPublishedRows.size());
}

TEST(Service, OverHttp) {
  Fixture f;
  const int port = f.service.bind("127.0.0.1", 0);
  std::thread server([&] { f.service.serve(); });
  f.service.wait_ready();
  httplib::Client client("127.0.0.1", port);

  auto created = client.Post("/sessions", json{{"exhibit_id", "ue01"}, {"model", "scripted:mock"}}.dump(),
                             "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");
  const auto id = json::parse(created->body)["session_id"].get<std::string>();

  auto got = client.Get("/sessions/" + id);
  ASSERT_TRUE(got);
  EXPECT_EQ(got->status, 200);
  EXPECT_EQ(json::parse(got->body)["pending"]["token"], "h0:L1");

  const auto body = json{{"verdict", true}, {"token", "h0:L1"}}.dump();
  auto first = client.Post("/sessions/" + id + "/judgment", body, "application/json");
  auto second = client.Post("/sessions/" + id + "/judgment", body, "application/json");
  ASSERT_TRUE(first && second);
  EXPECT_EQ(first->status, 200);
  EXPECT_EQ(second->status, 409);

  auto options = client.Options("/sessions");
  ASSERT_TRUE(options);
  EXPECT_EQ(options->status, 204);
  auto missing = client.Get("/sessions/zzz");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  f.service.stop();
  server.join();
}

}  // namespace
}  // namespace tracelens
