#include <csignal>

#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "cli/staging.hpp"
#include "restorebench/metrics.hpp"
#include "restorebench/psychstudy.hpp"
#include "restorebench/study_http.hpp"
#include "restorebench/study_service.hpp"

namespace restorebench::cli {

namespace {

StudyHttpServer* active_server = nullptr;

void handle_signal(int) {
  if (active_server) active_server->stop();
}

}  // namespace

int cmd_study_serve(const GlobalOptions&, const StudyServeOptions& options) {
  StudyService service(load_study_definition(options.definition), options.state_dir);
  StudyHttpOptions http;
  http.image_root = options.image_root.value_or(options.definition.parent_path());
  http.assets = options.assets;
  StudyHttpServer server(service, http);
  const int port = server.bind(options.host, options.port);
  progress("study: serving " + service.study().study_id + " on http://" + options.host + ":" +
           std::to_string(port) + " (" + std::to_string(service.study().sessions.size()) +
           " sessions)");
  active_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  server.listen();
  active_server = nullptr;
  return kOk;
}

int cmd_study_report(const GlobalOptions&, const StudyReportOptions& options) {
  const StudyService service(load_study_definition(options.definition), options.state_dir);
  StudyReport report = service.report();
  if (options.scores) {
    attach_external_scores(report, service.study(), load_external_scores(*options.scores));
  }
  write_text_atomic(options.out, to_json(report).dump(2) + "\n");
  progress("study: " + std::to_string(report.pairs.size()) + " pairs, " +
           std::to_string(report.kept_workers.size()) + " workers kept, " +
           std::to_string(report.discarded_workers.size()) + " discarded");
  return kOk;
}

}  // namespace restorebench::cli
