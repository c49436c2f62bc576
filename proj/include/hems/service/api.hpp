#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hems/app/engine.hpp"
#include "hems/service/auth.hpp"

namespace hems {

struct ApiRequest {
  std::string method;  // GET, POST, PATCH
  std::string path;    // "/api/v1/devices"
  std::map<std::string, std::string> query;
  std::string body;
  std::string authorization;  // raw Authorization header
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// JSON API over one household engine, mounted under /api/v1.
/// handle() is transport-free; serve() binds it to HTTP.
class ApiService {
 public:
  using Clock = std::function<Timestamp()>;

  ApiService(HomeEngine& engine, Clock clock);
  ~ApiService();

  ApiResponse handle(const ApiRequest& request);

  /// (method, path template) of every route.
  static const std::vector<std::pair<std::string, std::string>>& routes();

  /// Binds without serving yet; port 0 picks a free one. Returns the port.
  /// Throws Error when the address cannot be bound.
  int bind(const std::string& host, int port);
  /// Serves the bound address until stop().
  void listen();
  /// bind + listen.
  void serve(const std::string& host, int port);
  void stop();

 private:
  HomeEngine& engine_;
  Clock clock_;
  TokenAuthenticator auth_;
  struct Server;
  std::unique_ptr<Server> server_;
};

}  // namespace hems
