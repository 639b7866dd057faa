#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracelens/event_log.hpp"
#include "tracelens/exhibit.hpp"
#include "tracelens/provider.hpp"
#include "tracelens/session.hpp"
#include "tracelens/store.hpp"

namespace httplib {
class Server;
}

namespace tracelens {

// JSON view of a live driver, as served by GET /sessions/{id}.
nlohmann::ordered_json session_view(const SessionDriver& driver);

struct ServiceResponse {
  int status = 200;
  nlohmann::ordered_json body;
};

// Local review service. Live sessions are held in memory; a session is
// appended to the store when it closes or aborts.
class ReviewService {
 public:
  ReviewService(Store& store, const ProviderRegistry& providers, std::vector<Exhibit> exhibits,
                Clock clock = system_clock());
  ~ReviewService();

  // Routing without a socket. GET routes never change state.
  ServiceResponse handle(const std::string& method, const std::string& path, const std::string& body);

  // Binds host:port (port 0 picks one) and returns the bound port.
  int bind(const std::string& host = "127.0.0.1", int port = 0);
  // Blocks until stop().
  void serve();
  // Returns once serve() is accepting connections.
  void wait_ready() const;
  void stop();

 private:
  struct Live {
    std::mutex mu;
    std::unique_ptr<SessionDriver> driver;
    bool persisted = false;
  };

  ServiceResponse list_sessions();
  ServiceResponse get_session(const std::string& id);
  ServiceResponse create_session(const nlohmann::json& body);
  ServiceResponse post_judgment(const std::string& id, const nlohmann::json& body);
  ServiceResponse post_human_exp(const std::string& id, const nlohmann::json& body);
  ServiceResponse list_exhibits() const;
  ServiceResponse report() const;

  std::shared_ptr<Live> find_live(const std::string& id) const;
  void persist_if_finished(Live& live);

  Store& store_;
  const ProviderRegistry& providers_;
  std::vector<Exhibit> exhibits_;
  Clock clock_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::shared_ptr<Live>> live_;
  std::size_t next_id_ = 1;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace tracelens
