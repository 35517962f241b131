#include "restorebench/study_http.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "restorebench/error.hpp"

namespace restorebench {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, json{{"error", message}});
}

// Maps service failures onto HTTP status codes by message class.
int status_for(const ValidationError& e) {
  const std::string what = e.what();
  if (what.find("unknown") != std::string::npos || what.find("not part of") != std::string::npos) {
    return 404;
  }
  if (what.find("already") != std::string::npos || what.find("subscribed") != std::string::npos) {
    return 409;
  }
  return 400;
}

std::string content_type_for(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  return "application/octet-stream";
}

json payload_to_json(const SessionPayload& p) {
  json items = json::array();
  for (const auto& item : p.items) {
    items.push_back({{"item", item.item_id}, {"left", item.left_image}, {"right", item.right_image}});
  }
  return {{"study", p.study_id}, {"session", p.session_id}, {"items", std::move(items)}};
}

}  // namespace

StudyHttpServer::StudyHttpServer(StudyService& service, StudyHttpOptions options)
    : service_(service), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

StudyHttpServer::~StudyHttpServer() { stop(); }

int StudyHttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host.c_str());
    if (bound < 0) throw IoError("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host.c_str(), port)) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void StudyHttpServer::listen() { server_->listen_after_bind(); }

void StudyHttpServer::stop() {
  if (server_) server_->stop();
}

void StudyHttpServer::install_routes() {
  const std::string study = service_.study().study_id;
  auto known = [study](const httplib::Request& req, httplib::Response& res) {
    if (req.matches[1] != study) {
      send_error(res, 404, "unknown study " + std::string(req.matches[1]));
      return false;
    }
    return true;
  };

  server_->Get(R"(/study/([^/]+)/session)", [this, known](const httplib::Request& req,
                                                          httplib::Response& res) {
    if (!known(req, res)) return;
    const auto worker = req.get_param_value("worker");
    if (worker.empty()) return send_error(res, 400, "missing worker parameter");
    try {
      send_json(res, 200, payload_to_json(service_.assign_session(worker)));
    } catch (const ValidationError& e) {
      send_error(res, status_for(e), e.what());
    }
  });

  server_->Post(R"(/study/([^/]+)/response)", [this, known](const httplib::Request& req,
                                                            httplib::Response& res) {
    if (!known(req, res)) return;
    std::string session;
    std::string item;
    int label = 0;
    try {
      const json body = json::parse(req.body);
      session = body.at("session").get<std::string>();
      item = body.at("pair").get<std::string>();
      label = body.at("label_index").get<int>();
    } catch (const json::exception& e) {
      return send_error(res, 400, std::string("malformed response body: ") + e.what());
    }
    try {
      const auto stored = service_.record_response(session, item, label);
      send_json(res, 201, {{"session", stored.session_id},
                           {"pair", stored.item_id},
                           {"ordinal", stored.ordinal},
                           {"timestamp", stored.timestamp_ms}});
    } catch (const ValidationError& e) {
      send_error(res, status_for(e), e.what());
    }
  });

  server_->Get(R"(/study/([^/]+)/report)", [this, known](const httplib::Request& req,
                                                         httplib::Response& res) {
    if (!known(req, res)) return;
    try {
      send_json(res, 200, to_json(service_.report()));
    } catch (const ValidationError& e) {
      send_error(res, 409, e.what());
    }
  });

  server_->Get(R"(/study/([^/]+)/audit)", [this, known](const httplib::Request& req,
                                                        httplib::Response& res) {
    if (!known(req, res)) return;
    const auto audit = service_.audit();
    json pairs = json::array();
    for (const auto& p : audit.pairs) {
      pairs.push_back({{"pair", p.pair_id}, {"scheduled", p.scheduled}, {"recorded", p.recorded}});
    }
    send_json(res, 200, {{"pairs", pairs},
                         {"overshoot", audit.overshoot},
                         {"open_sessions", audit.open_sessions},
                         {"assigned_sessions", audit.assigned_sessions}});
  });

  server_->Get(R"(/study/([^/]+)/image/([^/]+)/([^/]+)/(left|right))",
               [this, known](const httplib::Request& req, httplib::Response& res) {
                 if (!known(req, res)) return;
                 const std::string session = req.matches[2];
                 const std::string item = req.matches[3];
                 const bool left = req.matches[4] == "left";
                 const auto& def = service_.study();
                 std::optional<SessionRecord> record;
                 for (const auto& s : service_.sessions()) {
                   if (s.session_id == session) record = s;
                 }
                 if (!record) return send_error(res, 404, "unknown session " + session);
                 const auto& items = def.sessions[record->slot].items;
                 auto it = std::find_if(items.begin(), items.end(),
                                        [&](const ScheduledItem& i) { return i.item_id == item; });
                 if (it == items.end()) return send_error(res, 404, "unknown item " + item);
                 const ImagePair* pair = it->sentinel ? &def.find_sentinel(it->pair_id)->pair
                                                      : def.find_pair(it->pair_id);
                 const bool show_original = left != it->swapped;
                 std::filesystem::path path = show_original ? pair->original : pair->enhanced;
                 if (path.is_relative()) path = options_.image_root / path;
                 std::ifstream in(path, std::ios::binary);
                 if (!in) return send_error(res, 404, "image not available");
                 std::ostringstream bytes;
                 bytes << in.rdbuf();
                 res.set_content(bytes.str(), content_type_for(path));
               });

  if (options_.assets) server_->set_mount_point("/", options_.assets->string());
}

}  // namespace restorebench
