// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <exception>
#include <iostream>
#include <string>

#include "opforge/runner.hpp"

namespace opforge::cli {

// Exit codes: 0 success, 2 config/usage/io, 3 construction failure,
// 4 audit failure; verify uses 1 for failed checks. Every path ends with a
// single machine-parsable JSON line on stdout.
inline int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case Error::Kind::config:
    case Error::Kind::io: return 2;
    case Error::Kind::precondition:
    case Error::Kind::construction: return 3;
    case Error::Kind::audit:
    case Error::Kind::verification: return 4;
  }
  return 3;
}

inline void emit(const io::json& j) { std::cout << j.dump() << std::endl; }

inline int cmd_build(const std::string& config_path, const std::string& out_dir) {
  io::json line;
  line["cmd"] = "build";
  try {
    io::RunConfig cfg = io::load_run_config(config_path);
    io::RunOutcome outcome = io::run_build(cfg, out_dir);
    line["ok"] = true;
    line["out"] = out_dir;
    line["construction"] = cfg.construction;
    line["steps"] = static_cast<int>(outcome.state.build.us.size());
    line["report_pass"] = outcome.report.pass;
    emit(line);
    return 0;
  } catch (const Error& e) {
    line["ok"] = false;
    line["error"] = e.what();
    emit(line);
    std::cerr << "forge build: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    line["ok"] = false;
    line["error"] = e.what();
    emit(line);
    std::cerr << "forge build: " << e.what() << "\n";
    return 3;
  }
}

inline int cmd_verify(const std::string& run_dir) {
  io::json line;
  line["cmd"] = "verify";
  try {
    verify::VerificationReport rep = io::run_verify(run_dir);
    line["ok"] = rep.pass;
    line["run"] = run_dir;
    line["checks"] = static_cast<int>(rep.checks.size());
    int failed = 0;
    for (const auto& c : rep.checks)
      if (!c.pass) ++failed;
    line["failed"] = failed;
    emit(line);
    return rep.pass ? 0 : 1;
  } catch (const Error& e) {
    line["ok"] = false;
    line["error"] = e.what();
    emit(line);
    std::cerr << "forge verify: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    line["ok"] = false;
    line["error"] = e.what();
    emit(line);
    std::cerr << "forge verify: " << e.what() << "\n";
    return 2;
  }
}

inline int cmd_export(const std::string& run_dir, const std::string& format, int size) {
  io::json line;
  line["cmd"] = "export";
  try {
    io::ExportPaths paths = io::run_export(run_dir, format, size);
    line["ok"] = true;
    line["matrix"] = paths.matrix.string();
    line["decay"] = paths.decay.string();
    emit(line);
    return 0;
  } catch (const Error& e) {
    line["ok"] = false;
    line["error"] = e.what();
    emit(line);
    std::cerr << "forge export: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    line["ok"] = false;
    line["error"] = e.what();
    emit(line);
    std::cerr << "forge export: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace opforge::cli
