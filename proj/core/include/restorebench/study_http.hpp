#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "restorebench/study_service.hpp"

namespace httplib {
class Server;
}

namespace restorebench {

struct StudyHttpOptions {
  std::filesystem::path image_root;             // relative image refs resolve here
  std::optional<std::filesystem::path> assets;  // mounted at / when set
};

// Routes:
//   GET  /study/{id}/session?worker=W             -> session payload
//   POST /study/{id}/response {session, pair, label_index}
//   GET  /study/{id}/report                        -> aggregated ratings
//   GET  /study/{id}/audit                         -> schedule audit
//   GET  /study/{id}/image/{session}/{item}/{left|right}
// Errors come back as {"error": message} with 400 (malformed or out of
// range), 404 (unknown study, session or item) or 409 (duplicate, subscribed).
class StudyHttpServer {
 public:
  StudyHttpServer(StudyService& service, StudyHttpOptions options);
  ~StudyHttpServer();
  StudyHttpServer(const StudyHttpServer&) = delete;
  StudyHttpServer& operator=(const StudyHttpServer&) = delete;

  // Binds to host:port (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  void listen();
  void stop();

 private:
  void install_routes();

  StudyService& service_;
  StudyHttpOptions options_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace restorebench
