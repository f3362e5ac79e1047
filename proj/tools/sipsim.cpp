#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "sipsim/config.hpp"
#include "sipsim/experiments.hpp"
#include "sipsim/oracle.hpp"

namespace fs = std::filesystem;

namespace {

struct Invocation {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "results";
  unsigned workers = 1;
  bool print_default = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes next to the target and renames, so readers never see a partial file.
void write_atomically(const fs::path& target, const std::string& content) {
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, target);
}

int run(sipsim::Study study, const Invocation& inv) {
  if (inv.print_default) {
    std::cout << sipsim::default_config_text(study);
    return 0;
  }
  sipsim::ExperimentConfig cfg;
  sipsim::Report report;
  std::string generator_dump;
  try {
    cfg = inv.config_path.empty() ? sipsim::default_config(study)
                                  : sipsim::parse_config(read_file(inv.config_path), study);
    if (inv.seed) cfg.seed = *inv.seed;
    report = sipsim::run_study(cfg, inv.workers);
    if (cfg.study == sipsim::Study::OracleCheck && cfg.dump_generator) {
      const sipsim::Geometry g = cfg.geometry();
      const sipsim::StateSpace space(sipsim::occupation_of(cfg.eta, g).total(), g);
      std::ostringstream os;
      sipsim::write_generator(os, space, sipsim::build_generator(space, cfg.params()));
      generator_dump = os.str();
    }
  } catch (const sipsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    const fs::path dir(inv.out_dir);
    fs::create_directories(dir);
    const std::string stem = report.study;
    write_atomically(dir / (stem + ".csv"), report.csv());
    write_atomically(dir / (stem + ".json"), report.summary_json());
    if (!generator_dump.empty()) write_atomically(dir / "generator.txt", generator_dump);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  std::size_t failed = 0;
  for (const auto& row : report.rows) {
    if (row.pass) continue;
    ++failed;
    std::cerr << "FAIL " << row.statistic << ": estimate " << row.estimate << ", target " << row.target
              << ", tolerance " << row.tolerance << '\n';
  }
  std::cout << report.study << ": " << report.rows.size() << " rows, " << failed << " failed, "
            << static_cast<long long>(report.wall_ms) << " ms -> " << inv.out_dir << '\n';
  return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric inclusion process simulator and verification studies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sipsim::version_string());

  Invocation inv;
  int status = 0;
  for (sipsim::Study study : sipsim::all_studies()) {
    auto* sub = app.add_subcommand(sipsim::to_string(study), "Run the " + sipsim::to_string(study) + " study");
    sub->add_option("--config", inv.config_path, "Config file (flat key = value)")->check(CLI::ExistingFile);
    sub->add_option("--seed", inv.seed, "Override the config seed");
    sub->add_option("--out", inv.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--workers", inv.workers, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
    sub->add_flag("--print-default", inv.print_default, "Print the built-in config and exit");
    sub->callback([&, study] { status = run(study, inv); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return status;
}
