#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "restorebench/error.hpp"

namespace restorebench::cli {

namespace {

void print_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", message}, {"kind", kind}, {"exit_code", code}}.dump()
            << '\n';
}

std::map<std::string, std::filesystem::path> parse_algorithms(
    const std::vector<std::string>& entries) {
  std::map<std::string, std::filesystem::path> out;
  for (const auto& entry : entries) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
      throw CLI::ValidationError("--algorithm", "expected NAME=REPORT, got '" + entry + "'");
    }
    if (!out.emplace(entry.substr(0, eq), entry.substr(eq + 1)).second) {
      throw CLI::ValidationError("--algorithm", "duplicate algorithm '" + entry.substr(0, eq) + "'");
    }
  }
  return out;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Benchmark harness for image restoration and enhancement", "restorebench"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file supplying option defaults");

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--jobs", global.jobs, "Images processed concurrently")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();

  std::function<int()> action;

  ExtractOptions extract;
  auto* sub_extract = app.add_subcommand("extract", "Build the crop manifest and extract crops");
  sub_extract->add_option("--annotations", extract.annotations, "VATIC annotation directory")
      ->required()->check(CLI::ExistingDirectory);
  sub_extract->add_option("--frames", extract.frames, "Frame directory (<video>/<frame>.png)")
      ->required()->check(CLI::ExistingDirectory);
  sub_extract->add_option("--out", extract.out, "Output directory")->required();
  sub_extract->add_option("--min-side", extract.min_side, "Minimum crop side")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sub_extract->add_flag("--skip-generated", extract.skip_generated,
                        "Drop interpolated (generated) annotation rows");
  sub_extract->callback([&] { action = [&] { return cmd_extract(global, extract); }; });

  BatchOptions degrade;
  auto* sub_degrade = app.add_subcommand("degrade", "Apply a degradation recipe to a directory");
  sub_degrade->add_option("--input", degrade.input, "Input image directory")
      ->required()->check(CLI::ExistingDirectory);
  sub_degrade->add_option("--recipe", degrade.config, "Recipe JSON")
      ->required()->check(CLI::ExistingFile);
  sub_degrade->add_option("--out", degrade.out, "Output directory")->required();
  sub_degrade->callback([&] { action = [&] { return cmd_degrade(global, degrade); }; });

  BatchOptions enhance;
  auto* sub_enhance = app.add_subcommand("enhance", "Run an enhancement chain over a directory");
  sub_enhance->add_option("--input", enhance.input, "Input image directory")
      ->required()->check(CLI::ExistingDirectory);
  sub_enhance->add_option("--chain", enhance.config, "Chain JSON")
      ->required()->check(CLI::ExistingFile);
  sub_enhance->add_option("--out", enhance.out, "Output directory")->required();
  sub_enhance->callback([&] { action = [&] { return cmd_enhance(global, enhance); }; });

  EvaluateOptions evaluate;
  auto* sub_evaluate = app.add_subcommand("evaluate", "Score predictions against a baseline");
  sub_evaluate->add_option("--manifest", evaluate.manifest, "Crop manifest (JSONL)")
      ->required()->check(CLI::ExistingFile);
  sub_evaluate->add_option("--superclasses", evaluate.superclasses, "Super-class map JSON")
      ->required()->check(CLI::ExistingFile);
  sub_evaluate->add_option("--predictions", evaluate.predictions, "Enhanced predictions (JSONL)")
      ->required()->check(CLI::ExistingFile);
  sub_evaluate->add_option("--baseline", evaluate.baseline, "Baseline predictions (JSONL)")
      ->required()->check(CLI::ExistingFile);
  sub_evaluate->add_option("--epsilon", evaluate.epsilon, "Minimum improvement")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  sub_evaluate->add_option("--out", evaluate.out, "Output directory")->required();
  sub_evaluate->callback([&] { action = [&] { return cmd_evaluate(global, evaluate); }; });

  RankOptions rank;
  std::vector<std::string> algorithm_entries;
  auto* sub_rank = app.add_subcommand("rank", "Award per-cell points across algorithms");
  sub_rank->add_option("--baseline", rank.baseline, "Baseline metrics report")
      ->required()->check(CLI::ExistingFile);
  sub_rank->add_option("--algorithm", algorithm_entries, "NAME=METRICS_REPORT (repeatable)")
      ->required();
  sub_rank->add_option("--epsilon", rank.epsilon, "Minimum improvement")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  sub_rank->add_option("--out", rank.out, "Output JSON")->required();
  sub_rank->callback([&] {
    rank.algorithms = parse_algorithms(algorithm_entries);
    action = [&] { return cmd_rank(global, rank); };
  });

  auto* sub_study = app.add_subcommand("study", "Serve or report a perceptual rating study");
  sub_study->require_subcommand(1);

  StudyServeOptions serve;
  auto* sub_serve = sub_study->add_subcommand("serve", "Run the rating HTTP service");
  sub_serve->add_option("--definition", serve.definition, "Study definition JSON")
      ->required()->check(CLI::ExistingFile);
  sub_serve->add_option("--state-dir", serve.state_dir, "Directory holding the response log")
      ->required();
  sub_serve->add_option("--host", serve.host)->capture_default_str();
  sub_serve->add_option("--port", serve.port)->check(CLI::Range(0, 65535))->capture_default_str();
  sub_serve->add_option("--image-root", serve.image_root,
                        "Base for relative image paths (default: definition's directory)")
      ->check(CLI::ExistingDirectory);
  sub_serve->add_option("--assets", serve.assets, "Static files served at /")
      ->check(CLI::ExistingDirectory);
  sub_serve->callback([&] { action = [&] { return cmd_study_serve(global, serve); }; });

  StudyReportOptions report;
  auto* sub_report = sub_study->add_subcommand("report", "Aggregate recorded ratings");
  sub_report->add_option("--definition", report.definition, "Study definition JSON")
      ->required()->check(CLI::ExistingFile);
  sub_report->add_option("--state-dir", report.state_dir, "Directory holding the response log")
      ->required()->check(CLI::ExistingDirectory);
  sub_report->add_option("--scores", report.scores, "Per-image scores (JSONL) to attach")
      ->check(CLI::ExistingFile);
  sub_report->add_option("--out", report.out, "Output JSON")->required();
  sub_report->callback([&] { action = [&] { return cmd_study_report(global, report); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action();
  } catch (const restorebench::ParseError& e) {
    print_error("parse", e.what(), kDataIntegrity);
    return kDataIntegrity;
  } catch (const restorebench::ValidationError& e) {
    print_error("validation", e.what(), kDataIntegrity);
    return kDataIntegrity;
  } catch (const std::exception& e) {
    print_error("runtime", e.what(), kRuntime);
    return kRuntime;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace restorebench::cli
