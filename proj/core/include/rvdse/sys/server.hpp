#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace rvdse::sys {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// The JSON API without a socket. Runs execute on their own threads; every
// run owns its System, and the run's mutex guards its published state.
//
//   GET  /api/schema                 config JSON Schema
//   GET  /api/stats-schema           StatsReport JSON Schema
//   POST /api/validate               {errors, warnings, ok}
//   POST /api/runs                   {config, program | vmh, max_cycles?, wait?} -> {id, status}
//   GET  /api/runs                   run list
//   GET  /api/runs/{id}              status (+ report once finished)
//   GET  /api/runs/{id}/trace        ?hart=&from=&count=
//   GET  /api/benchmarks             bundled programs
class ApiService {
 public:
  ApiService();
  ~ApiService();
  ApiService(const ApiService&) = delete;
  ApiService& operator=(const ApiService&) = delete;

  ApiResponse handle(const std::string& method, const std::string& path,
                     const std::map<std::string, std::string>& query, const std::string& body);

  // Blocks until every started run has finished.
  void wait_all();

 private:
  struct Run;
  ApiResponse create_run(const nlohmann::json& body);
  ApiResponse get_run(const std::string& id);
  ApiResponse get_trace(const std::string& id, const std::map<std::string, std::string>& query);
  ApiResponse list_runs();
  std::shared_ptr<Run> find(const std::string& id);

  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Run>> runs_;
  std::vector<std::thread> threads_;
  std::uint64_t next_id_ = 1;
};

// HTTP front end (cpp-httplib).
class HttpServer {
 public:
  explicit HttpServer(std::string static_dir = {});
  ~HttpServer();
  // Binds; port 0 picks a free one. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Serves until stop().
  void listen();
  void stop();
  ApiService& service() { return *service_; }

 private:
  struct Impl;
  std::unique_ptr<ApiService> service_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rvdse::sys
