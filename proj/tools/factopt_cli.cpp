// Copyright 2026 The factopt Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "factopt/bpstring.hpp"
#include "factopt/domain.hpp"
#include "factopt/orchestrator.hpp"
#include "factopt/render.hpp"
#include "factopt/validator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitLimit = 2;
constexpr int kExitInputError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

factopt::ProblemInstance load_instance(const std::string& path) {
  factopt::ProblemInstance inst = factopt::parse_instance(read_file(path));
  const std::vector<std::string> problems = factopt::validate_instance(inst);
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid instance " << path << ":";
    for (const std::string& p : problems) os << "\n  " << p;
    throw std::runtime_error(os.str());
  }
  return inst;
}

factopt::Blueprint load_blueprint(const std::string& path) {
  return factopt::blueprint_from_text(read_file(path));
}

int run_solve(const std::string& instance_path, const factopt::RunConfig& cfg) {
  const factopt::ProblemInstance inst = load_instance(instance_path);
  const factopt::RunReport report = factopt::optimize(inst, cfg);
  std::cout << report.to_text();
  switch (report.outcome) {
    case factopt::RunOutcome::Infeasible:
      return kExitInfeasible;
    case factopt::RunOutcome::LimitReached:
      return kExitLimit;
    case factopt::RunOutcome::Solved:
      break;
  }
  std::cout << "\n" << factopt::blueprint_to_text(report.blueprint);
  std::cout << "\n" << factopt::render_ascii(report.blueprint);
  std::cout << "\nblueprint string:\n"
            << factopt::export_blueprint(report.blueprint) << "\n";
  return kExitOk;
}

int run_validate(const std::string& bp_path, const std::string& inst_path) {
  const factopt::Blueprint bp = load_blueprint(bp_path);
  const factopt::ProblemInstance inst = load_instance(inst_path);
  const std::vector<std::string> violations =
      factopt::validate_structure(bp, inst);
  if (violations.empty()) {
    std::cout << "ok\n";
    return kExitOk;
  }
  for (const std::string& v : violations) std::cout << v << "\n";
  return kExitInputError;
}

int run_simulate(const std::string& bp_path, const std::string& inst_path) {
  const factopt::Blueprint bp = load_blueprint(bp_path);
  const factopt::ProblemInstance inst = load_instance(inst_path);
  const std::vector<std::string> violations =
      factopt::validate_structure(bp, inst);
  if (!violations.empty()) {
    for (const std::string& v : violations) std::cerr << v << "\n";
    return kExitInputError;
  }
  std::cout << factopt::simulate_flow(bp, inst).to_text();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blueprint layout optimizer for belt-and-inserter factories"};
  app.require_subcommand(1);

  std::string instance_path, blueprint_path, token;
  factopt::RunConfig cfg;
  double time_limit = 0.0;
  bool legend = false;

  CLI::App* solve = app.add_subcommand("solve", "optimize a problem instance");
  solve->add_option("instance", instance_path, "instance JSON file")
      ->required();
  solve->add_option("--dump", cfg.dump_dir,
                    "directory for intermediate solutions and the report");
  solve->add_option("--max-attempts", cfg.max_stage1_attempts,
                    "production-plan attempts before giving up");
  solve->add_option("--time-limit", time_limit,
                    "per-stage solver time limit in seconds");
  solve->add_option("--conveyor-penalty", cfg.conveyor_penalty,
                    "layout cost per conveyor tile");
  solve->add_option("--inserter-penalty", cfg.inserter_penalty,
                    "layout cost per inserter");

  CLI::App* validate =
      app.add_subcommand("validate", "check a blueprint against an instance");
  validate->add_option("blueprint", blueprint_path, "blueprint text file")
      ->required();
  validate->add_option("instance", instance_path, "instance JSON file")
      ->required();

  CLI::App* simulate =
      app.add_subcommand("simulate", "steady-state flow of a valid blueprint");
  simulate->add_option("blueprint", blueprint_path, "blueprint text file")
      ->required();
  simulate->add_option("instance", instance_path, "instance JSON file")
      ->required();

  CLI::App* render = app.add_subcommand("render", "draw a blueprint as ASCII");
  render->add_option("blueprint", blueprint_path, "blueprint text file")
      ->required();
  render->add_flag("--legend", legend, "append a glyph legend");

  CLI::App* exportc =
      app.add_subcommand("export", "emit the one-line exchange string");
  exportc->add_option("blueprint", blueprint_path, "blueprint text file")
      ->required();

  CLI::App* importc =
      app.add_subcommand("import", "decode an exchange string to a blueprint file");
  importc->add_option("string", token, "blueprint exchange string")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      cfg.stage1_time_limit_s = time_limit;
      cfg.stage2_time_limit_s = time_limit;
      cfg.stage3_time_limit_s = time_limit;
      return run_solve(instance_path, cfg);
    }
    if (validate->parsed()) return run_validate(blueprint_path, instance_path);
    if (simulate->parsed()) return run_simulate(blueprint_path, instance_path);
    if (render->parsed()) {
      factopt::RenderStyle style;
      style.legend = legend;
      std::cout << factopt::render_ascii(load_blueprint(blueprint_path), style);
      return kExitOk;
    }
    if (exportc->parsed()) {
      std::cout << factopt::export_blueprint(load_blueprint(blueprint_path))
                << "\n";
      return kExitOk;
    }
    if (importc->parsed()) {
      std::cout << factopt::blueprint_to_text(factopt::import_blueprint(token));
      return kExitOk;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
