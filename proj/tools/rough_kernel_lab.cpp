#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rkl/error.hpp"
#include "rkl/experiment.hpp"

namespace {

// exit codes: 2 schema or usage, 3 numeric failure, 1 anything else
int exit_code(rkl::ErrorKind k) {
  using rkl::ErrorKind;
  switch (k) {
    case ErrorKind::schema: return 2;
    case ErrorKind::divergence:
    case ErrorKind::no_convergence:
    case ErrorKind::unreliable_estimate:
    case ErrorKind::sweep_aborted:
    case ErrorKind::evaluation:
    case ErrorKind::insufficient_data: return 3;
    default: return 1;
  }
}

int report_error(const rkl::Error& e) {
  nlohmann::json j{{"error", std::string(rkl::to_string(e.kind()))}, {"message", e.what()}};
  if (auto* s = dynamic_cast<const rkl::SchemaError*>(&e)) j["field"] = s->path();
  std::cerr << j.dump() << "\n";
  return exit_code(e.kind());
}

int resolve_threads(std::optional<int> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ROUGH_KERNEL_LAB_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring invalid ROUGH_KERNEL_LAB_THREADS='" << env << "'\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rough homogeneous kernels: moduli of continuity, level sets and limiting constants"};
  app.require_subcommand(1);

  std::string config_path, out_dir, report_path, plot_out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  auto* run = app.add_subcommand("run", "run an experiment described by a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides output_dir)");
  run->add_option("--seed", seed, "random seed (overrides the config)");
  run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto* plot = app.add_subcommand("plot", "write plot-data CSVs for a report");
  plot->add_option("report", report_path, "report.json")->required();
  plot->add_option("--out", plot_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      rkl::ExperimentConfig cfg = rkl::load_config(config_path);
      if (seed) cfg.seed = *seed;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      rkl::RunOutput res = rkl::run_experiment(cfg, resolve_threads(threads));
      rkl::write_files_atomically(cfg.output_dir, res.files);
      std::cout << res.summary;
      std::cout << "wrote";
      for (const auto& f : res.files) std::cout << " " << f.name;
      std::cout << " to " << cfg.output_dir << "\n";
      return 0;
    }
    std::ifstream in(report_path);
    if (!in) throw rkl::SchemaError("$", "cannot read report '" + report_path + "'");
    nlohmann::json rep;
    try {
      rep = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw rkl::SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    auto files = rkl::plot_files(rep);
    rkl::write_files_atomically(plot_out, files);
    for (const auto& f : files) std::cout << "wrote " << f.name << "\n";
    return 0;
  } catch (const rkl::Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
}
