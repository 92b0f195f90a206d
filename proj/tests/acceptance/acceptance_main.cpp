// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: every criterion prints exactly one PASS/FAIL line with
// the decisive measurements. Run all by default, or a single one with
// --only <k>.

#include <chrono>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "opforge/runner.hpp"
#include "../oracles.hpp"

namespace fs = std::filesystem;
using namespace opforge;
using opforge::io::json;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED[" << what << "]";
    }
  }
};

fs::path work_dir() {
  fs::path d = fs::path(ACCEPT_TMP_DIR);
  fs::create_directories(d);
  return d;
}

double report_worst(const verify::VerificationReport& rep, const std::string& name) {
  const auto* c = rep.find(name);
  return c ? c->worst : std::numeric_limits<double>::infinity();
}

bool report_pass(const verify::VerificationReport& rep, const std::string& name) {
  const auto* c = rep.find(name);
  return c && c->pass;
}

// ---- criterion 1: band construction ----------------------------------------

Outcome criterion_band() {
  Outcome out;
  auto t0 = std::chrono::steady_clock::now();
  json cfg = {{"construction", "band"},
              {"operator", {{"kind", "shift"}}},
              {"steps", 200},
              {"seed", 1},
              {"K", 3},
              {"lambda_spec", {{"kind", "spiral"}, {"omega", 0.3819}}}};
  fs::path dir = work_dir() / "band";
  fs::remove_all(dir);
  auto run = io::run_build(io::parse_run_config(cfg), dir);
  auto rep = io::run_verify(dir);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  out.require(run.state.build.us.size() == 200, "200 steps");
  out.require(report_pass(rep, "main_diagonal"), "diagonal 1e-9");
  out.require(report_pass(rep, "zero_band"), "band zeros 1e-9");
  out.require(report_pass(rep, "orthonormality") && report_worst(rep, "orthonormality") <= 1e-10,
              "gram 1e-10");
  out.require(report_pass(rep, "decay_ledger"), "decrement replay 1e-6");
  out.require(secs <= 120.0, "wall time");
  out.detail << "diag=" << report_worst(rep, "main_diagonal")
             << " band=" << report_worst(rep, "zero_band")
             << " gram=" << report_worst(rep, "orthonormality")
             << " decay=" << report_worst(rep, "decay_ledger") << " time=" << secs << "s";
  return out;
}

// ---- criterion 2: window corollary ------------------------------------------

Outcome criterion_window() {
  Outcome out;
  json cfg = {{"construction", "band"},
              {"operator", {{"kind", "shift"}}},
              {"steps", 150},
              {"seed", 1},
              {"K", 4},
              {"lambda_spec", {{"kind", "constant"}, {"value", {0.0, 0.0}}}}};
  fs::path dir = work_dir() / "window";
  fs::remove_all(dir);
  auto run = io::run_build(io::parse_run_config(cfg), dir);

  // the full window |n - j| <= 4 vanishes: diagonal targets are 0 too
  auto T = seqspace::make_shift();
  double worst = 0;
  for (int n = 1; n <= 150; ++n) {
    seqspace::FinVec Tu = T.apply(run.state.build.us[n - 1]);
    for (int j = std::max(1, n - 4); j <= std::min(150, n + 4); ++j)
      worst = std::max(worst,
                       std::abs(seqspace::inner_product(Tu, run.state.build.us[j - 1])));
  }
  out.require(worst <= 1e-9, "window zeros 1e-9");
  out.detail << "worst |entry| on |n-j|<=4: " << worst;
  return out;
}

// ---- criterion 3: tridiagonal construction -----------------------------------

Outcome criterion_tridiag() {
  Outcome out;
  const double eps = 0.2;
  const double cap = eps * std::sqrt(eps) / 16.0;
  out.require(std::abs(cap - 5.590169943749474e-3) < 1e-15, "eps sqrt(eps)/16 value");

  json cfg = {{"construction", "tridiag"},
              {"operator", {{"kind", "shift"}}},
              {"steps", 150},
              {"seed", 7},
              {"epsilon", eps},
              {"lambda_spec", {{"kind", "uniform_disk"}, {"radius", 0.55}}},
              {"mu_spec", {{"kind", "uniform_disk"}, {"radius", 0.005}}},
              {"nu_spec", {{"kind", "uniform_disk"}, {"radius", 0.005}}}};
  fs::path dir = work_dir() / "tridiag";
  fs::remove_all(dir);
  auto run = io::run_build(io::parse_run_config(cfg), dir);
  auto rep = io::run_verify(dir);

  out.require(report_pass(rep, "tridiagonal"), "conditions (i)-(iii) 1e-9");
  double worst_z = 0, worst_b = 0;
  const double b_target = eps * std::sqrt(eps) / 32.0;
  for (const auto& r : run.state.build.steps) {
    if (r.z_norm) worst_z = std::max(worst_z, *r.z_norm - (std::sqrt(eps) / 2));
    if (r.b_norm && r.n >= 2) worst_b = std::max(worst_b, std::abs(*r.b_norm - b_target));
  }
  out.require(worst_z <= 1e-10, "|z_n| <= sqrt(eps)/2 + 1e-10");
  out.require(worst_b <= 1e-12, "|b_n| = eps sqrt(eps)/32 +- 1e-12");
  out.detail << "entries=" << report_worst(rep, "tridiagonal") << " z_slack=" << worst_z
             << " b_dev=" << worst_b;
  return out;
}

// ---- criterion 4: small entries ----------------------------------------------

Outcome criterion_small() {
  Outcome out;
  json cfg = {{"construction", "small"},
              {"operator", {{"kind", "shift"}}},
              {"steps", 150},
              {"seed", 3},
              {"a_spec", {{"kind", "harmonic"}, {"scale", 1.0}}}};
  fs::path dir = work_dir() / "small";
  fs::remove_all(dir);
  auto run = io::run_build(io::parse_run_config(cfg), dir);
  auto rep = io::run_verify(dir);

  out.require(report_pass(rep, "entry_bound_grid"), "sqrt(a_n a_j) grid bound");
  out.require(report_pass(rep, "diagonal_bound"), "diagonal specialization");
  out.require(report_pass(rep, "decay_ledger"), "decrement factors 1e-6");
  double worst_factor = 0;
  for (const auto& r : run.state.build.steps)
    if (r.decrement_factor && r.a_prime_n)
      worst_factor = std::max(worst_factor,
                              std::abs(*r.decrement_factor - (1.0 - *r.a_prime_n / 4)));
  out.require(worst_factor <= 1e-12, "factor equals 1 - a'_n/4");
  out.detail << "grid_viol=" << report_worst(rep, "entry_bound_grid")
             << " decay=" << report_worst(rep, "decay_ledger")
             << " factor_dev=" << worst_factor;
  return out;
}

// ---- criterion 5: large entries ------------------------------------------------

Outcome criterion_large() {
  Outcome out;
  forge::LargeConstants kc = forge::derive_large_constants(0.35, 0.49);
  out.require(std::abs(kc.a - 1.943e5) / 1.943e5 < 1e-3, "a ~ 1.943e5");
  out.require(std::abs(kc.c1 - 2.647e-4) / 2.647e-4 < 1e-3, "c1 ~ 2.647e-4");
  out.require(std::abs(kc.c2 - 2.268e-3) / 2.268e-3 < 1e-3, "c2 ~ 2.268e-3");
  out.require(kc.d == 0.245, "d = 0.245");

  json cfg = {{"construction", "large"},
              {"operator", {{"kind", "shift"}}},
              {"steps", 120},
              {"seed", 5},
              {"C", 0.35},
              {"D", 0.49}};
  fs::path dir = work_dir() / "large";
  fs::remove_all(dir);
  io::run_build(io::parse_run_config(cfg), dir);
  auto rep = io::run_verify(dir);

  out.require(report_pass(rep, "diag_lower"), "Eq (11) lower bound d");
  out.require(report_pass(rep, "offdiag_lower") && report_pass(rep, "offdiag_upper"),
              "Eq (12) two-sided");
  out.require(report_pass(rep, "invariant_34"), "invariants (3)/(4) slack 1e-8");
  out.require(report_pass(rep, "invariant_5"), "invariant (5)");
  out.require(report_pass(rep, "plank_certificates"), "plank (z1)-(z3) every step");
  out.detail << "eq11=" << report_worst(rep, "diag_lower")
             << " eq12lo=" << report_worst(rep, "offdiag_lower")
             << " inv34=" << report_worst(rep, "invariant_34")
             << " plank=" << report_worst(rep, "plank_certificates");
  return out;
}

// ---- criterion 6: lemma-level oracles -------------------------------------------

Outcome criterion_lemmas() {
  Outcome out;
  auto S = seqspace::make_shift();
  const double eps = 0.2;
  forge::Lemma2dState L = forge::lemma2d_state(S, cx{0, 0}, eps, {});
  Rng rng(21);
  double worst_rep = 0, worst_norm = 0;
  for (int t = 0; t < 1000; ++t) {
    cx a = rng.normal_cx(), b = rng.normal_cx();
    seqspace::FinVec z = L.z_for(a, b);
    worst_rep = std::max({worst_rep, std::abs(seqspace::inner_product(L.w, z) - a),
                          std::abs(seqspace::inner_product(L.w_prime, z) - b)});
    worst_norm = std::max(worst_norm, z.norm() - 2 * (std::abs(a) + std::abs(b)) / eps);
  }
  out.require(worst_rep <= 1e-10, "z-solver reproduction 1e-10");
  out.require(worst_norm <= 1e-10, "|z| <= 2(|a|+|b|)/eps");

  // pearcy bounds on 50 constraint sets
  int pearcy_ok = 0;
  for (int s = 0; s < 50; ++s) {
    std::vector<seqspace::FinVec> cons;
    if (s % 2 == 0) {
      for (index_t k = 1; k <= 1 + s; ++k) cons.push_back(seqspace::FinVec::basis(k));
    } else {
      Rng crng(100 + s);
      for (int i = 0; i < 4 + s % 7; ++i) cons.push_back(oracles::random_finvec(crng, 40 + s, 6));
    }
    std::vector<const seqspace::FinVec*> ptrs;
    for (const auto& c : cons) ptrs.push_back(&c);
    seqspace::FinVec u = forge::pearcy_state(S, ptrs, {0.35, 0.49, 0.0});
    seqspace::FinVec Tu = S.apply(u), Tsu = S.apply_adjoint(u);
    cx d = seqspace::inner_product(Tu, u);
    seqspace::FinVec w = Tu;
    w.add_scaled(u, -d);
    seqspace::FinVec wp = Tsu;
    wp.add_scaled(u, -seqspace::inner_product(Tsu, u));
    bool ok = std::abs(d) >= 0.49 - 1e-9 && w.norm() >= 0.35 - 1e-9 && wp.norm() >= 0.35 - 1e-9;
    for (const auto& c : cons)
      ok = ok && std::abs(seqspace::inner_product(u, c)) < 1e-13;
    if (ok) ++pearcy_ok;
  }
  out.require(pearcy_ok == 50, "pearcy bounds on 50 constraint sets");
  out.detail << "z_rep=" << worst_rep << " z_norm_slack=" << worst_norm
             << " pearcy_ok=" << pearcy_ok << "/50";
  return out;
}

// ---- criterion 7: numerical-range oracle ------------------------------------------

Outcome criterion_numrange() {
  Outcome out;
  Rng rng(33);
  const double pi = 3.14159265358979324;
  for (int k : {2, 5, 12}) {
    numrange::Matrix J(k, k);
    J.setZero();
    for (int i = 0; i + 1 < k; ++i) J(i + 1, i) = 1;
    auto sweep = numrange::numerical_range_boundary(J, 256, {256, false, 0});
    double sweep_radius = 0;
    for (const auto& p : sweep.points) sweep_radius = std::max(sweep_radius, std::abs(p.value));
    double oracle = oracles::sample_numerical_radius(J, k == 2 ? 200000 : 40000, rng, 8);
    double analytic = std::cos(pi / (k + 1));
    out.require(std::abs(sweep_radius - oracle) <= 1e-6,
                "k=" + std::to_string(k) + " sweep vs sampling oracle");
    out.require(std::abs(sweep_radius - analytic) <= 1e-6,
                "k=" + std::to_string(k) + " sweep vs cos(pi/(k+1))");
    out.detail << "k" << k << ": sweep=" << sweep_radius << " oracle=" << oracle << "; ";
  }

  // 100 random (M, lambda) pairs, lambda from the polygon shrunk by 10%
  int done = 0;
  double worst = 0;
  while (done < 100) {
    numrange::Matrix M = oracles::random_matrix(8, rng);
    auto sweep = numrange::numerical_range_boundary(M, 48, {48, false, 0});
    auto hull = sweep.hull();
    if (hull.kind() != numrange::ConvexRegion::Kind::polygon) continue;
    cx c = hull.interior_point();
    const auto& vs = hull.vertices();
    cx p{0, 0};
    double wsum = 0;
    for (const auto& v : vs) {
      double w = -std::log(std::max(rng.uniform(), 1e-12));
      p += w * v;
      wsum += w;
    }
    cx lambda = c + 0.9 * (p / wsum - c);
    double margin = hull.dist_to_boundary(lambda);
    if (margin <= 1e-6) continue;
    numrange::Vector x = numrange::find_state_with_value(M, lambda, margin / 2);
    worst = std::max({worst, std::abs(numrange::rayleigh(M, x) - lambda),
                      std::abs(x.norm() - 1.0)});
    ++done;
  }
  out.require(worst <= 1e-11, "100-random inverse problem at 1e-11");
  out.detail << "inverse_worst=" << worst;
  return out;
}

// ---- criterion 8: determinism and tamper ---------------------------------------

Outcome criterion_determinism() {
  Outcome out;
  json cfg = {{"construction", "band"},
              {"operator", {{"kind", "shift"}}},
              {"steps", 40},
              {"seed", 11},
              {"K", 2},
              {"lambda_spec", {{"kind", "spiral"}, {"omega", 0.3819}}}};
  fs::path a = work_dir() / "det_a";
  fs::path b = work_dir() / "det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  io::run_build(io::parse_run_config(cfg), a);
  io::run_build(io::parse_run_config(cfg), b);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  out.require(slurp(a / "state.json") == slurp(b / "state.json"), "state.json byte-identical");
  out.require(slurp(a / "steps.jsonl") == slurp(b / "steps.jsonl"), "steps.jsonl byte-identical");
  out.require(slurp(a / "report.json") == slurp(b / "report.json"), "report.json byte-identical");

  // flip the largest stored coefficient of u_20 by 1e-6
  json st = io::read_json(a / "state.json");
  auto& entries = st["basis"][19]["entries"];
  std::size_t big = 0;
  double mag = -1;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    double m = std::abs(cx{entries[i][1].get<double>(), entries[i][2].get<double>()});
    if (m > mag) mag = m, big = i;
  }
  entries[big][1] = entries[big][1].get<double>() + 1e-6;
  io::write_text(a / "state.json", st.dump(2) + "\n");
  bool tamper_caught = false;
  try {
    auto rep = io::run_verify(a);
    tamper_caught = !rep.pass;
  } catch (const Error&) {
    tamper_caught = true;
  }
  out.require(tamper_caught, "1e-6 perturbation fails verification");
  out.detail << "tamper_caught=" << (tamper_caught ? "yes" : "no");
  return out;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  const Criterion criteria[] = {
      {1, "band construction (K=3, spiral diagonal, N=200)", criterion_band},
      {2, "window corollary (K=4, N=150)", criterion_window},
      {3, "tridiagonal construction (eps=0.2, N=150)", criterion_tridiag},
      {4, "small entries (a_n=1/n, N=150)", criterion_small},
      {5, "large entries (C=0.35, D=0.49, N=120)", criterion_large},
      {6, "lemma-level oracles (z-solver x1000, pearcy x50)", criterion_lemmas},
      {7, "numerical-range oracle (Jordan radii, 100 inverse problems)", criterion_numrange},
      {8, "determinism and tamper detection", criterion_determinism},
  };

  bool all_pass = true;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " EXCEPTION[" << e.what() << "]";
    }
    all_pass = all_pass && out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << "  " << c.id << "  " << c.name << "  ("
              << out.detail.str() << ")" << std::endl;
  }
  return all_pass ? 0 : 1;
}
