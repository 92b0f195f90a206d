// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
//
// forge: build prescribed-matrix orthonormal bases for banded operator
// models, verify the runs, and export matrices and decay curves.

#include <CLI11.hpp>

#include "opforge/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"prescribed matrix representations for banded operator models"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir, format = "csv";
  int size = 0;

  auto* build = app.add_subcommand("build", "run a construction from a JSON config");
  build->add_option("--config", config_path, "config JSON path")->required();
  build->add_option("--out", out_dir, "output run directory")->required();

  auto* verify = app.add_subcommand("verify", "re-verify a run directory from scratch");
  verify->add_option("--run", run_dir, "run directory")->required();

  auto* exp = app.add_subcommand("export", "export the matrix grid and decay curves");
  exp->add_option("--run", run_dir, "run directory")->required();
  exp->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  exp->add_option("--size", size, "grid size k (k x k entries)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (build->parsed()) return opforge::cli::cmd_build(config_path, out_dir);
  if (verify->parsed()) return opforge::cli::cmd_verify(run_dir);
  return opforge::cli::cmd_export(run_dir, format, size);
}
