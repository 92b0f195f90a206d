// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "opforge/io.hpp"

namespace opforge::io {

// ---- verification composition ------------------------------------------------

/// Tolerances for every check, pinned here; reports always carry them.
struct VerifyTolerances {
  double unit_norm = 1e-12;
  double gram = 1e-10;
  double prescribed = 1e-9;
  double decay_rel = 1e-6;
  double bound_rel = 1e-8;   // multiplicative slack on the small-entry grid
  double ineq_slack = 1e-8;  // additive slack on inequality audits
  double ineq_slack_fine = 1e-9;
};

inline seqspace::OperatorModel model_for_verification(const RunState& rs) {
  seqspace::OperatorModel T = model_from_json(rs.config.operator_config);
  if (rs.build.construction == "small") {
    auto it = rs.build.constants.find("norm_scale");
    if (it != rs.build.constants.end() && it->second != 1.0)
      return seqspace::make_affine(std::move(T), cx{1.0 / it->second, 0}, cx{0, 0});
  }
  return T;
}

inline verify::VerificationReport verify_build(const RunState& rs) {
  const auto tol = VerifyTolerances{};
  const forge::BuildState& b = rs.build;
  const int N = static_cast<int>(b.us.size());
  seqspace::OperatorModel T = model_for_verification(rs);

  verify::VerificationReport rep;
  rep.add(verify::check_unit_norms(b.us, tol.unit_norm));
  rep.add(verify::check_orthonormality(b.us, tol.gram));
  rep.add(verify::check_seed_monotonicity(b));

  const std::string& c = b.construction;
  if (c == "band") {
    const int K = static_cast<int>(b.constants.at("K"));
    std::vector<verify::EntryTarget> diag, zeros;
    for (int n = 1; n <= N; ++n) {
      diag.push_back({n, n, rs.config.lambdas[static_cast<std::size_t>(n - 1)]});
      for (int j = std::max(1, n - K); j <= std::min(N, n + K); ++j)
        if (j != n) zeros.push_back({n, j, cx{0, 0}});
    }
    rep.add(verify::check_prescribed_entries(T, b.us, diag, tol.prescribed, "main_diagonal"));
    rep.add(verify::check_prescribed_entries(T, b.us, zeros, tol.prescribed, "zero_band"));
    rep.add(verify::check_decay_ledger(b, tol.decay_rel));
  } else if (c == "tridiag") {
    const double eps = b.constants.at("epsilon");
    std::vector<verify::EntryTarget> targets;
    for (int n = 1; n <= N; ++n) {
      targets.push_back({n, n, rs.config.lambdas[static_cast<std::size_t>(n - 1)]});
      if (n + 1 <= N) {
        targets.push_back({n, n + 1, rs.config.mus[static_cast<std::size_t>(n - 1)]});
        targets.push_back({n + 1, n, rs.config.nus[static_cast<std::size_t>(n - 1)]});
      }
    }
    rep.add(verify::check_prescribed_entries(T, b.us, targets, tol.prescribed, "tridiagonal"));

    verify::detail::Violation vz, vb, vl, vs;
    const double b_target = eps * std::sqrt(eps) / 32.0;
    for (const auto& r : b.steps) {
      if (r.z_norm) vz.merge(*r.z_norm - (std::sqrt(eps) / 2.0 + 1e-10), r.n, 0);
      if (r.b_norm && r.n >= 2) vb.merge(std::abs(*r.b_norm - b_target), r.n, 0);
      if (r.lambda_prime && r.lambda)
        vl.merge(std::abs(*r.lambda_prime - *r.lambda) - (eps + 1e-10), r.n, 0);
      if (r.scale_s && r.n >= 2) vs.merge(0.8 - *r.scale_s, r.n, 0);
    }
    rep.add({"z_norm_bound", 0.0, std::max(vz.value, 0.0), vz.n, vz.j, vz.value <= 0});
    rep.add({"b_norm_exact", 1e-12, std::max(vb.value, 0.0), vb.n, vb.j, vb.value <= 1e-12});
    rep.add({"lambda_prime_drift", 0.0, std::max(vl.value, 0.0), vl.n, vl.j, vl.value <= 0});
    rep.add({"normalization_floor", 1e-12, std::max(vs.value, 0.0), vs.n, vs.j, vs.value <= 1e-12});
  } else if (c == "small") {
    const auto& a = rs.config.a_weights;
    rep.add(verify::check_entry_bounds(
        T, b.us,
        [&](int n, int j) {
          return std::sqrt(a[static_cast<std::size_t>(n - 1)] * a[static_cast<std::size_t>(j - 1)]) *
                 (1.0 + tol.bound_rel);
        },
        verify::BoundMode::upper, 0.0, "entry_bound_grid"));
    rep.add(verify::check_entry_bounds(
        T, b.us, [&](int n, int j) { return n == j ? a[static_cast<std::size_t>(n - 1)] : 0.0; },
        verify::BoundMode::upper, 1e-12, "diagonal_bound",
        [](int n, int j) { return n == j; }));
    rep.add(verify::check_decay_ledger(b, tol.decay_rel));
  } else if (c == "large") {
    const double a = b.constants.at("a");
    const double C = b.constants.at("C");
    const double c1 = b.constants.at("c1");
    const double c2 = b.constants.at("c2");
    const double d = b.constants.at("d");
    rep.add(verify::check_entry_bounds(
        T, b.us, [&](int n, int j) { return n == j ? d : 0.0; }, verify::BoundMode::lower,
        tol.ineq_slack, "diag_lower", [](int n, int j) { return n == j; }));
    rep.add(verify::check_entry_bounds(
        T, b.us, [&](int n, int j) { return c2 / std::sqrt(static_cast<double>(std::max(n, j))); },
        verify::BoundMode::upper, tol.ineq_slack, "offdiag_upper",
        [](int n, int j) { return n != j; }));
    rep.add(verify::check_entry_bounds(
        T, b.us,
        [&](int n, int j) {
          double mn = std::min(n, j), mx = std::max(n, j);
          return c1 * std::sqrt(mn) / (mx * std::sqrt(mx));
        },
        verify::BoundMode::lower, tol.ineq_slack, "offdiag_lower",
        [](int n, int j) { return n != j; }));

    // entry grids once; everything below replays from them
    std::vector<std::vector<cx>> A(static_cast<std::size_t>(N),
                                   std::vector<cx>(static_cast<std::size_t>(N)));
    auto B = A;
    std::vector<double> tu_norm_sq(static_cast<std::size_t>(N)), tsu_norm_sq(static_cast<std::size_t>(N));
    for (int j = 1; j <= N; ++j) {
      seqspace::FinVec Tu = T.apply(b.us[static_cast<std::size_t>(j - 1)]);
      seqspace::FinVec Tsu = T.apply_adjoint(b.us[static_cast<std::size_t>(j - 1)]);
      tu_norm_sq[static_cast<std::size_t>(j - 1)] = Tu.norm_sq();
      tsu_norm_sq[static_cast<std::size_t>(j - 1)] = Tsu.norm_sq();
      for (int i = 1; i <= N; ++i) {
        A[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] =
            seqspace::inner_product(Tu, b.us[static_cast<std::size_t>(i - 1)]);
        B[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] =
            seqspace::inner_product(Tsu, b.us[static_cast<std::size_t>(i - 1)]);
      }
    }

    verify::detail::Violation v34;
    for (int j = 1; j <= N; ++j) {
      double rT = tu_norm_sq[static_cast<std::size_t>(j - 1)];
      double rS = tsu_norm_sq[static_cast<std::size_t>(j - 1)];
      for (int k = 1; k <= N; ++k) {
        rT -= std::norm(A[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j - 1)]);
        rS -= std::norm(B[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j - 1)]);
        if (k >= j) {
          const double bound = C * C * j / (2.0 * k);
          v34.merge(bound - rT, k, j);
          v34.merge(bound - rS, k, j);
        }
      }
    }
    rep.add({"invariant_34", tol.ineq_slack, std::max(v34.value, 0.0), v34.n, v34.j,
             v34.value <= tol.ineq_slack});

    // plank certificates replayed via <r, z_n> = sqrt(a n) <r, u_n>
    verify::detail::Violation vz;
    std::vector<double> rT(static_cast<std::size_t>(N)), rS(static_cast<std::size_t>(N));
    std::map<int, double> seed_resid, seed_bound;
    for (std::size_t i = 0; i < b.seed_labels.size(); ++i) {
      seed_resid[b.seed_labels[i]] = 1.0;
      seed_bound[b.seed_labels[i]] = 1.0;
    }
    verify::detail::Violation v5;
    for (int n = 1; n <= N; ++n) {
      const double root_an = std::sqrt(a * n);
      const double w_off = 1.0 / (2.0 * std::sqrt(static_cast<double>(n)));
      for (int j = 1; j < n; ++j) {
        vz.merge(w_off * std::sqrt(std::max(0.0, rT[static_cast<std::size_t>(j - 1)])) -
                     root_an * std::abs(A[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(j - 1)]),
                 n, j);
        vz.merge(w_off * std::sqrt(std::max(0.0, rS[static_cast<std::size_t>(j - 1)])) -
                     root_an * std::abs(B[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(j - 1)]),
                 n, j);
      }
      const int label = forge::dyadic_level(n);
      const seqspace::FinVec* y = b.seed_by_label(label);
      if (y) {
        const cx yu = seqspace::inner_product(*y, b.us[static_cast<std::size_t>(n - 1)]);
        if (n >= 2)
          vz.merge(std::sqrt(std::max(0.0, seed_resid[label])) / std::sqrt(2.0) -
                       root_an * std::abs(yu),
                   n, 0);
        for (auto& [lbl, r] : seed_resid) {
          r -= std::norm(seqspace::inner_product(*b.seed_by_label(lbl),
                                                 b.us[static_cast<std::size_t>(n - 1)]));
          if (lbl == label) seed_bound[lbl] *= 1.0 - 1.0 / (2.0 * a * n);
          v5.merge(r - seed_bound[lbl], n, lbl);
        }
      }
      // advance residuals to P_n: existing columns lose their u_n component,
      // the new column enters with its full prefix subtracted
      for (int j = 1; j < n; ++j) {
        rT[static_cast<std::size_t>(j - 1)] -=
            std::norm(A[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(j - 1)]);
        rS[static_cast<std::size_t>(j - 1)] -=
            std::norm(B[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(j - 1)]);
      }
      double fresh_T = tu_norm_sq[static_cast<std::size_t>(n - 1)];
      double fresh_S = tsu_norm_sq[static_cast<std::size_t>(n - 1)];
      for (int i = 1; i <= n; ++i) {
        fresh_T -= std::norm(A[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(n - 1)]);
        fresh_S -= std::norm(B[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(n - 1)]);
      }
      rT[static_cast<std::size_t>(n - 1)] = fresh_T;
      rS[static_cast<std::size_t>(n - 1)] = fresh_S;
    }
    rep.add({"plank_certificates", tol.ineq_slack_fine, std::max(vz.value, 0.0), vz.n, vz.j,
             vz.value <= tol.ineq_slack_fine});
    rep.add({"invariant_5", tol.ineq_slack_fine, std::max(v5.value, 0.0), v5.n, v5.j,
             v5.value <= tol.ineq_slack_fine});
  }
  return rep;
}

// ---- orchestration -------------------------------------------------------------

struct RunOutcome {
  RunState state;
  verify::VerificationReport report;
};

inline forge::BuildState dispatch_build(const seqspace::OperatorModel& T, const RunConfig& cfg) {
  if (cfg.construction == "band") {
    forge::BandParams p;
    p.K = cfg.K;
    p.N = cfg.steps;
    p.window = cfg.window;
    return forge::build_banded_diagonal(T, cfg.lambdas, p);
  }
  if (cfg.construction == "tridiag") {
    forge::TridiagParams p;
    p.epsilon = cfg.epsilon;
    p.N = cfg.steps;
    p.window = cfg.window;
    return forge::build_tridiagonal(T, cfg.lambdas, cfg.mus, cfg.nus, p);
  }
  if (cfg.construction == "small") {
    forge::SmallParams p;
    p.N = cfg.steps;
    p.window = cfg.window;
    return forge::build_small_entries(T, cfg.a_weights, p);
  }
  forge::LargeParams p;
  p.C = cfg.C;
  p.D = cfg.D;
  p.eps_p = cfg.eps_p;
  p.N = cfg.steps;
  p.seed = cfg.seed;
  p.window = cfg.window;
  return forge::build_large_entries(T, p);
}

inline RunOutcome run_build(const RunConfig& cfg, const fs::path& out_dir) {
  seqspace::OperatorModel T = model_from_json(cfg.operator_config);
  RunState rs;
  rs.config = cfg;
  rs.build = dispatch_build(T, cfg);

  fs::create_directories(out_dir);
  write_text(out_dir / "state.json", state_to_json(rs).dump(2) + "\n");
  std::ostringstream steps;
  for (const auto& r : rs.build.steps) steps << step_to_json(r).dump() << "\n";
  write_text(out_dir / "steps.jsonl", steps.str());

  verify::VerificationReport rep = verify_build(rs);
  write_text(out_dir / "report.json", report_to_json(rep).dump(2) + "\n");
  if (!rep.pass) fail(Error::Kind::audit, "post-build verification failed");
  return {std::move(rs), std::move(rep)};
}

inline RunState load_run(const fs::path& run_dir) {
  RunState rs = state_from_json(read_json(run_dir / "state.json"));
  std::ifstream in(run_dir / "steps.jsonl");
  if (!in) fail(Error::Kind::io, "cannot open " + (run_dir / "steps.jsonl").string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rs.build.steps.push_back(step_from_json(json::parse(line)));
  }
  return rs;
}

/// Regenerates report.json from state.json + steps.jsonl alone.
inline verify::VerificationReport run_verify(const fs::path& run_dir) {
  RunState rs = load_run(run_dir);
  verify::VerificationReport rep = verify_build(rs);
  write_text(run_dir / "report.json", report_to_json(rep).dump(2) + "\n");
  return rep;
}

struct ExportPaths {
  fs::path matrix;
  fs::path decay;
};

inline ExportPaths run_export(const fs::path& run_dir, const std::string& format, int size) {
  RunState rs = load_run(run_dir);
  if (size < 0 || size > static_cast<int>(rs.build.us.size()))
    fail(Error::Kind::config, "export: size exceeds built prefix");
  seqspace::OperatorModel T = model_for_verification(rs);

  ExportPaths paths;
  if (format == "csv") {
    paths.matrix = run_dir / "matrix.csv";
    std::ostringstream out;
    verify::export_matrix_csv(T, rs.build.us, size, out);
    write_text(paths.matrix, out.str());
  } else if (format == "json") {
    paths.matrix = run_dir / "matrix.json";
    auto grid = verify::entry_grid(T, rs.build.us, size);
    json j;
    j["size"] = size;
    json rows = json::array();
    for (const auto& row : grid) {
      json r = json::array();
      for (cx v : row) r.push_back(json::array({v.real(), v.imag()}));
      rows.push_back(r);
    }
    j["entries"] = rows;
    write_text(paths.matrix, j.dump(2) + "\n");
  } else {
    fail(Error::Kind::config, "export: format must be csv or json");
  }
  paths.decay = run_dir / "decay.csv";
  std::ostringstream decay;
  verify::export_decay_csv(rs.build, decay);
  write_text(paths.decay, decay.str());
  return paths;
}

}  // namespace opforge::io
