#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "erm/errors.hpp"
#include "erm/harness.hpp"

namespace h = erm::harness;

namespace {

void print_error(const std::string& type, const std::string& message) {
  std::cerr << h::json{{"error", type}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on ERM with SGD for clipped ReLU networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool strict = false;

  const std::vector<h::Kind> kinds = {h::Kind::bounds,   h::Kind::train,          h::Kind::mmc,
                                      h::Kind::decompose, h::Kind::overall,       h::Kind::verify_special,
                                      h::Kind::covering};
  std::vector<CLI::Option*> seed_opts;
  for (h::Kind kind : kinds) {
    auto* sub = app.add_subcommand(h::to_string(kind), "Run a " + h::to_string(kind) + " experiment");
    sub->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    seed_opts.push_back(sub->add_option("--seed", seed, "Override the config seed"));
    sub->add_option("--out", out_dir, "Directory for <kind>.json and <kind>.csv (default: config \"out\", else .)");
    sub->add_flag("--strict", strict, "Treat hypothesis warnings as failures");
  }

  std::vector<std::string> merge_inputs;
  std::string merge_out;
  auto* merge = app.add_subcommand("merge", "Concatenate same-kind JSON reports into one CSV");
  merge->add_option("reports", merge_inputs, "Report JSON files");
  merge->add_option("--out", merge_out, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (merge->parsed()) {
      std::vector<std::filesystem::path> paths(merge_inputs.begin(), merge_inputs.end());
      const std::string csv = h::merge_report_files(paths);
      if (merge_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(merge_out) << csv;
      }
      return 0;
    }

    for (std::size_t i = 0; i < kinds.size(); ++i) {
      auto* sub = app.get_subcommand(h::to_string(kinds[i]));
      if (!sub->parsed()) continue;
      h::RunOptions options;
      if (seed_opts[i]->count() > 0) options.seed = seed;
      options.strict = strict;
      const h::json config = h::load_json(config_path);
      const h::Report report = h::run(kinds[i], config, options);
      std::string dir = out_dir;
      if (dir.empty()) dir = config.contains("out") ? config["out"].get<std::string>() : ".";
      h::write_report(report, dir);
      std::cout << h::json{{"kind", report.kind},
                           {"config_hash", report.config_hash},
                           {"seed", report.seed},
                           {"failures", report.failures}}
                       .dump()
                << '\n';
      return report.ok() ? 0 : 1;
    }
  } catch (const erm::SchemaError& e) {
    print_error("schema", e.what());
    return 2;
  } catch (const erm::CapabilityError& e) {
    print_error("capability", e.what());
    return 2;
  } catch (const erm::ReproducibilityError& e) {
    print_error("reproducibility", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return 2;
  }
  return 2;
}
