// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "opforge/build_band.hpp"
#include "opforge/build_large.hpp"
#include "opforge/build_small.hpp"
#include "opforge/build_tridiag.hpp"
#include "opforge/export.hpp"
#include "opforge/records.hpp"
#include "opforge/rng.hpp"
#include "opforge/verify.hpp"

namespace opforge::io {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---- strict parsing helpers -------------------------------------------------

inline void expect_keys(const json& j, const std::string& where,
                        std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(Error::Kind::config, where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) fail(Error::Kind::config, where + ": unknown key '" + it.key() + "'");
  }
}

inline const json& require(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) fail(Error::Kind::config, where + ": missing key '" + key + "'");
  return j.at(key);
}

inline cx complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(Error::Kind::config, where + ": complex values are [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json complex_to_json(cx z) { return json::array({z.real(), z.imag()}); }

// ---- regions ----------------------------------------------------------------

inline numrange::ConvexRegion region_from_json(const json& j) {
  const std::string kind = require(j, "we_region", "kind").get<std::string>();
  if (kind == "disk") {
    expect_keys(j, "we_region(disk)", {"kind", "center", "radius"});
    return numrange::ConvexRegion::disk(complex_from_json(require(j, "disk", "center"), "center"),
                                        require(j, "disk", "radius").get<double>());
  }
  if (kind == "polygon") {
    expect_keys(j, "we_region(polygon)", {"kind", "vertices"});
    std::vector<cx> vs;
    for (const auto& v : require(j, "polygon", "vertices")) vs.push_back(complex_from_json(v, "vertex"));
    return numrange::ConvexRegion::polygon(vs);
  }
  if (kind == "segment") {
    expect_keys(j, "we_region(segment)", {"kind", "endpoints"});
    const auto& e = require(j, "segment", "endpoints");
    if (!e.is_array() || e.size() != 2) fail(Error::Kind::config, "segment: endpoints must be a pair");
    return numrange::ConvexRegion::segment(complex_from_json(e[0], "endpoint"),
                                           complex_from_json(e[1], "endpoint"));
  }
  if (kind == "point") {
    expect_keys(j, "we_region(point)", {"kind", "value"});
    return numrange::ConvexRegion::point(complex_from_json(require(j, "point", "value"), "value"));
  }
  fail(Error::Kind::config, "we_region: unknown kind '" + kind + "'");
}

inline json region_to_json(const numrange::ConvexRegion& r) {
  json j;
  switch (r.kind()) {
    case numrange::ConvexRegion::Kind::disk:
      j["kind"] = "disk";
      j["center"] = complex_to_json(r.disk_center());
      j["radius"] = r.disk_radius();
      break;
    case numrange::ConvexRegion::Kind::polygon: {
      j["kind"] = "polygon";
      json vs = json::array();
      for (cx v : r.vertices()) vs.push_back(complex_to_json(v));
      j["vertices"] = vs;
      break;
    }
    case numrange::ConvexRegion::Kind::segment:
      j["kind"] = "segment";
      j["endpoints"] = json::array({complex_to_json(r.vertices()[0]), complex_to_json(r.vertices()[1])});
      break;
    case numrange::ConvexRegion::Kind::point:
      j["kind"] = "point";
      j["value"] = complex_to_json(r.vertices()[0]);
      break;
  }
  return j;
}

// ---- operator models --------------------------------------------------------

inline seqspace::OperatorModel model_from_json(const json& j) {
  const std::string kind = require(j, "operator", "kind").get<std::string>();
  std::optional<numrange::ConvexRegion> we;
  if (j.contains("we_region")) we = region_from_json(j.at("we_region"));

  auto with_overrides = [&](seqspace::OperatorModel m) {
    if (we) m.we_region = *we;
    if (j.contains("norm_bound")) m.norm_bound = j.at("norm_bound").get<double>();
    return m;
  };

  if (kind == "shift") {
    expect_keys(j, "operator(shift)", {"kind", "we_region", "norm_bound"});
    return with_overrides(seqspace::make_shift());
  }
  if (kind == "weighted_shift") {
    expect_keys(j, "operator(weighted_shift)", {"kind", "weights", "we_region", "norm_bound"});
    const auto& w = require(j, "weighted_shift", "weights");
    const std::string wk = require(w, "weights", "kind").get<std::string>();
    if (wk == "constant") {
      expect_keys(w, "weights(constant)", {"kind", "value"});
      const double c = require(w, "weights", "value").get<double>();
      auto region = we ? *we : numrange::ConvexRegion::disk({0, 0}, std::abs(c));
      return with_overrides(
          seqspace::make_weighted_shift([c](index_t) { return c; }, std::abs(c), region));
    }
    if (wk == "explicit") {
      expect_keys(w, "weights(explicit)", {"kind", "values", "tail"});
      auto values = require(w, "weights", "values").get<std::vector<double>>();
      const double tail = require(w, "weights", "tail").get<double>();
      if (!we) fail(Error::Kind::config, "weighted_shift(explicit): we_region required");
      double sup = std::abs(tail);
      for (double v : values) sup = std::max(sup, std::abs(v));
      return with_overrides(seqspace::make_weighted_shift(
          [values, tail](index_t n) {
            return n < static_cast<index_t>(values.size()) ? values[static_cast<std::size_t>(n)]
                                                           : tail;
          },
          sup, *we));
    }
    fail(Error::Kind::config, "weighted_shift: unknown weights kind '" + wk + "'");
  }
  if (kind == "diagonal") {
    expect_keys(j, "operator(diagonal)", {"kind", "values", "we_region", "norm_bound"});
    const auto& d = require(j, "diagonal", "values");
    const std::string dk = require(d, "values", "kind").get<std::string>();
    if (dk == "harmonic") {
      expect_keys(d, "values(harmonic)", {"kind", "scale"});
      const double s = d.contains("scale") ? d.at("scale").get<double>() : 1.0;
      auto region = we ? *we : numrange::ConvexRegion::point({0, 0});
      return with_overrides(seqspace::make_diagonal(
          [s](index_t n) { return cx{s / static_cast<double>(std::max<index_t>(n, 1)), 0}; },
          std::abs(s), region));
    }
    if (dk == "constant") {
      expect_keys(d, "values(constant)", {"kind", "value"});
      const cx c = complex_from_json(require(d, "values", "value"), "diagonal value");
      auto region = we ? *we : numrange::ConvexRegion::point(c);
      return with_overrides(seqspace::make_diagonal([c](index_t) { return c; }, std::abs(c), region));
    }
    if (dk == "explicit") {
      expect_keys(d, "values(explicit)", {"kind", "values", "tail"});
      std::vector<cx> values;
      for (const auto& v : require(d, "values", "values"))
        values.push_back(complex_from_json(v, "diagonal value"));
      const cx tail = complex_from_json(require(d, "values", "tail"), "diagonal tail");
      if (!we) fail(Error::Kind::config, "diagonal(explicit): we_region required");
      double sup = std::abs(tail);
      for (cx v : values) sup = std::max(sup, std::abs(v));
      return with_overrides(seqspace::make_diagonal(
          [values, tail](index_t n) {
            return n < static_cast<index_t>(values.size()) ? values[static_cast<std::size_t>(n)]
                                                           : tail;
          },
          sup, *we));
    }
    fail(Error::Kind::config, "diagonal: unknown values kind '" + dk + "'");
  }
  if (kind == "toeplitz_banded") {
    expect_keys(j, "operator(toeplitz)", {"kind", "coeffs", "we_region", "norm_bound"});
    if (!we) fail(Error::Kind::config, "toeplitz_banded: we_region required");
    std::vector<std::pair<index_t, cx>> coeffs;
    for (const auto& c : require(j, "toeplitz", "coeffs")) {
      if (!c.is_array() || c.size() != 3)
        fail(Error::Kind::config, "toeplitz coeffs entries are [offset, re, im]");
      coeffs.emplace_back(c[0].get<index_t>(), cx{c[1].get<double>(), c[2].get<double>()});
    }
    return with_overrides(seqspace::make_toeplitz_banded(std::move(coeffs), *we));
  }
  if (kind == "affine") {
    expect_keys(j, "operator(affine)", {"kind", "alpha", "beta", "inner", "we_region", "norm_bound"});
    return with_overrides(seqspace::make_affine(
        model_from_json(require(j, "affine", "inner")),
        complex_from_json(require(j, "affine", "alpha"), "alpha"),
        complex_from_json(require(j, "affine", "beta"), "beta")));
  }
  if (kind == "direct_sum") {
    expect_keys(j, "operator(direct_sum)", {"kind", "blocks", "we_region", "norm_bound"});
    if (!we) fail(Error::Kind::config, "direct_sum: we_region required");
    std::vector<seqspace::OperatorModel> blocks;
    for (const auto& b : require(j, "direct_sum", "blocks")) blocks.push_back(model_from_json(b));
    return with_overrides(seqspace::make_direct_sum(std::move(blocks), *we));
  }
  fail(Error::Kind::config, "operator: unknown kind '" + kind + "'");
}

// ---- sequence specs ----------------------------------------------------------

/// Complex sequences (1-based semantics: element i is the value at n = i+1).
inline std::vector<cx> complex_sequence(const json& spec, int length, Rng rng,
                                        const std::string& role) {
  const std::string kind = require(spec, role, "kind").get<std::string>();
  std::vector<cx> out;
  out.reserve(static_cast<std::size_t>(length));
  if (kind == "constant") {
    expect_keys(spec, role + "(constant)", {"kind", "value"});
    cx v = complex_from_json(require(spec, role, "value"), role);
    out.assign(static_cast<std::size_t>(length), v);
  } else if (kind == "spiral") {
    // (1 - 1/(n+1)) e^{2 pi i omega n}: approaches the unit circle with
    // non-summable boundary distance.
    expect_keys(spec, role + "(spiral)", {"kind", "omega"});
    const double omega = require(spec, role, "omega").get<double>();
    for (int n = 1; n <= length; ++n)
      out.push_back(std::polar(1.0 - 1.0 / (n + 1), numrange::kTwoPi * omega * n));
  } else if (kind == "harmonic") {
    expect_keys(spec, role + "(harmonic)", {"kind", "scale"});
    const double s = spec.contains("scale") ? spec.at("scale").get<double>() : 1.0;
    for (int n = 1; n <= length; ++n) out.push_back(cx{s / n, 0});
  } else if (kind == "uniform_disk") {
    expect_keys(spec, role + "(uniform_disk)", {"kind", "radius"});
    const double r = require(spec, role, "radius").get<double>();
    for (int n = 1; n <= length; ++n) out.push_back(rng.uniform_disk(r));
  } else if (kind == "explicit") {
    expect_keys(spec, role + "(explicit)", {"kind", "values"});
    for (const auto& v : require(spec, role, "values")) out.push_back(complex_from_json(v, role));
    if (static_cast<int>(out.size()) < length)
      fail(Error::Kind::config, role + "(explicit): needs at least " + std::to_string(length) +
                                    " values");
    out.resize(static_cast<std::size_t>(length));
  } else {
    fail(Error::Kind::config, role + ": unknown sequence kind '" + kind + "'");
  }
  return out;
}

inline std::vector<double> real_sequence(const json& spec, int length, const std::string& role) {
  const std::string kind = require(spec, role, "kind").get<std::string>();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(length));
  if (kind == "constant") {
    expect_keys(spec, role + "(constant)", {"kind", "value"});
    out.assign(static_cast<std::size_t>(length), require(spec, role, "value").get<double>());
  } else if (kind == "harmonic") {
    expect_keys(spec, role + "(harmonic)", {"kind", "scale"});
    const double s = spec.contains("scale") ? spec.at("scale").get<double>() : 1.0;
    for (int n = 1; n <= length; ++n) out.push_back(s / n);
  } else if (kind == "explicit") {
    expect_keys(spec, role + "(explicit)", {"kind", "values"});
    out = require(spec, role, "values").get<std::vector<double>>();
    if (static_cast<int>(out.size()) < length)
      fail(Error::Kind::config, role + "(explicit): needs at least " + std::to_string(length) +
                                    " values");
    out.resize(static_cast<std::size_t>(length));
  } else {
    fail(Error::Kind::config, role + ": unknown sequence kind '" + kind + "'");
  }
  return out;
}

// ---- run configuration --------------------------------------------------------

struct RunConfig {
  std::string construction;
  json operator_config;
  int steps = 0;
  std::uint64_t seed = 1;
  json raw;  // normalized config for provenance

  // band
  int K = 0;
  // tridiag
  double epsilon = 0.0;
  // large
  double C = 0.0, D = 0.0, eps_p = 0.0;
  // sequences
  std::vector<cx> lambdas, mus, nus;
  std::vector<double> a_weights;

  numrange::WindowPolicy window;
};

inline RunConfig parse_run_config(const json& j) {
  expect_keys(j, "config",
              {"construction", "operator", "steps", "seed", "K", "epsilon", "C", "D", "eps_p",
               "lambda_spec", "mu_spec", "nu_spec", "a_spec", "window"});
  RunConfig cfg;
  cfg.raw = j;
  cfg.construction = require(j, "config", "construction").get<std::string>();
  cfg.operator_config = require(j, "config", "operator");
  cfg.steps = require(j, "config", "steps").get<int>();
  if (cfg.steps < 1) fail(Error::Kind::config, "config: steps must be >= 1");
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("window")) {
    const auto& w = j.at("window");
    expect_keys(w, "window", {"initial_length", "max_length"});
    if (w.contains("initial_length")) cfg.window.initial_length = w.at("initial_length").get<index_t>();
    if (w.contains("max_length")) cfg.window.max_length = w.at("max_length").get<index_t>();
  }
  Rng rng(cfg.seed);

  if (cfg.construction == "band") {
    cfg.K = require(j, "band config", "K").get<int>();
    cfg.lambdas = complex_sequence(require(j, "band config", "lambda_spec"),
                                   cfg.steps + cfg.K + 2, rng.fork("lambda"), "lambda_spec");
  } else if (cfg.construction == "tridiag") {
    cfg.epsilon = require(j, "tridiag config", "epsilon").get<double>();
    cfg.lambdas = complex_sequence(require(j, "tridiag config", "lambda_spec"), cfg.steps,
                                   rng.fork("lambda"), "lambda_spec");
    cfg.mus = complex_sequence(require(j, "tridiag config", "mu_spec"), cfg.steps,
                               rng.fork("mu"), "mu_spec");
    cfg.nus = complex_sequence(require(j, "tridiag config", "nu_spec"), cfg.steps,
                               rng.fork("nu"), "nu_spec");
  } else if (cfg.construction == "small") {
    const int lookahead = std::max(cfg.steps, 64);
    cfg.a_weights = real_sequence(require(j, "small config", "a_spec"), cfg.steps + lookahead,
                                  "a_spec");
  } else if (cfg.construction == "large") {
    cfg.C = require(j, "large config", "C").get<double>();
    cfg.D = require(j, "large config", "D").get<double>();
    if (j.contains("eps_p")) cfg.eps_p = j.at("eps_p").get<double>();
  } else {
    fail(Error::Kind::config, "config: unknown construction '" + cfg.construction + "'");
  }
  return cfg;
}

inline RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Error::Kind::config, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(Error::Kind::config, std::string("config JSON parse error: ") + e.what());
  }
  return parse_run_config(j);
}

// ---- state serialization --------------------------------------------------------

inline json finvec_to_json(const seqspace::FinVec& v) {
  json entries = json::array();
  for (const auto& [k, c] : v) entries.push_back(json::array({k, c.real(), c.imag()}));
  return entries;
}

inline seqspace::FinVec finvec_from_json(const json& j) {
  seqspace::FinVec v;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 3) fail(Error::Kind::io, "vector entries are [index, re, im]");
    v.set(e[0].get<index_t>(), cx{e[1].get<double>(), e[2].get<double>()});
  }
  return v;
}

inline json sequence_to_json(const std::vector<cx>& xs) {
  json arr = json::array();
  for (cx x : xs) arr.push_back(complex_to_json(x));
  return arr;
}

inline std::vector<cx> sequence_from_json(const json& j) {
  std::vector<cx> out;
  for (const auto& e : j) out.push_back(complex_from_json(e, "sequence"));
  return out;
}

struct RunState {
  RunConfig config;
  forge::BuildState build;
};

inline json step_to_json(const forge::StepRecord& r) {
  json j;
  j["n"] = r.n;
  j["kind"] = r.kind;
  if (r.seed_m) j["m"] = *r.seed_m;
  if (r.lambda) j["lambda"] = complex_to_json(*r.lambda);
  if (r.seed_in_span) j["seed_in_span"] = *r.seed_in_span;
  if (r.rho) j["rho"] = *r.rho;
  if (r.delta) j["delta"] = *r.delta;
  if (r.mu) j["mu"] = complex_to_json(*r.mu);
  if (r.resid_before_sq) j["resid_before_sq"] = *r.resid_before_sq;
  if (r.resid_after_sq) j["resid_after_sq"] = *r.resid_after_sq;
  if (r.decrement_factor) j["decrement_factor"] = *r.decrement_factor;
  if (r.a_n) j["a_n"] = *r.a_n;
  if (r.a_prime_n) j["a_prime_n"] = *r.a_prime_n;
  if (r.c_n) j["c_n"] = *r.c_n;
  if (r.d_n) j["d_n"] = *r.d_n;
  if (r.z_norm) j["z_norm"] = *r.z_norm;
  if (r.b_norm) j["b_norm"] = *r.b_norm;
  if (r.lambda_prime) j["lambda_prime"] = complex_to_json(*r.lambda_prime);
  if (r.scale_s) j["scale_s"] = *r.scale_s;
  if (!r.plank_lhs.empty()) j["plank_lhs"] = r.plank_lhs;
  if (!r.plank_rhs.empty()) j["plank_rhs"] = r.plank_rhs;
  if (r.window_start) j["window_start"] = *r.window_start;
  if (r.window_length) j["window_length"] = *r.window_length;
  return j;
}

inline forge::StepRecord step_from_json(const json& j) {
  forge::StepRecord r;
  r.n = j.at("n").get<int>();
  r.kind = j.at("kind").get<std::string>();
  if (j.contains("m")) r.seed_m = j.at("m").get<int>();
  if (j.contains("lambda")) r.lambda = complex_from_json(j.at("lambda"), "lambda");
  if (j.contains("seed_in_span")) r.seed_in_span = j.at("seed_in_span").get<bool>();
  if (j.contains("rho")) r.rho = j.at("rho").get<double>();
  if (j.contains("delta")) r.delta = j.at("delta").get<double>();
  if (j.contains("mu")) r.mu = complex_from_json(j.at("mu"), "mu");
  if (j.contains("resid_before_sq")) r.resid_before_sq = j.at("resid_before_sq").get<double>();
  if (j.contains("resid_after_sq")) r.resid_after_sq = j.at("resid_after_sq").get<double>();
  if (j.contains("decrement_factor")) r.decrement_factor = j.at("decrement_factor").get<double>();
  if (j.contains("a_n")) r.a_n = j.at("a_n").get<double>();
  if (j.contains("a_prime_n")) r.a_prime_n = j.at("a_prime_n").get<double>();
  if (j.contains("c_n")) r.c_n = j.at("c_n").get<double>();
  if (j.contains("d_n")) r.d_n = j.at("d_n").get<index_t>();
  if (j.contains("z_norm")) r.z_norm = j.at("z_norm").get<double>();
  if (j.contains("b_norm")) r.b_norm = j.at("b_norm").get<double>();
  if (j.contains("lambda_prime")) r.lambda_prime = complex_from_json(j.at("lambda_prime"), "lp");
  if (j.contains("scale_s")) r.scale_s = j.at("scale_s").get<double>();
  if (j.contains("plank_lhs")) r.plank_lhs = j.at("plank_lhs").get<std::vector<double>>();
  if (j.contains("plank_rhs")) r.plank_rhs = j.at("plank_rhs").get<std::vector<double>>();
  if (j.contains("window_start")) r.window_start = j.at("window_start").get<index_t>();
  if (j.contains("window_length")) r.window_length = j.at("window_length").get<index_t>();
  return r;
}

inline json state_to_json(const RunState& rs) {
  json j;
  j["schema"] = "opforge-run/1";
  j["construction"] = rs.config.construction;
  j["seed"] = rs.config.seed;
  j["config"] = rs.config.raw;
  json seqs;
  if (!rs.config.lambdas.empty()) seqs["lambda"] = sequence_to_json(rs.config.lambdas);
  if (!rs.config.mus.empty()) seqs["mu"] = sequence_to_json(rs.config.mus);
  if (!rs.config.nus.empty()) seqs["nu"] = sequence_to_json(rs.config.nus);
  if (!rs.config.a_weights.empty()) seqs["a"] = rs.config.a_weights;
  j["sequences"] = seqs;
  j["constants"] = rs.build.constants;
  json seeds = json::array();
  for (std::size_t i = 0; i < rs.build.seeds.size(); ++i) {
    json s;
    s["m"] = rs.build.seed_labels[i];
    s["entries"] = finvec_to_json(rs.build.seeds[i]);
    seeds.push_back(s);
  }
  j["seed_vectors"] = seeds;
  json basis = json::array();
  for (std::size_t i = 0; i < rs.build.us.size(); ++i) {
    json b;
    b["n"] = static_cast<int>(i) + 1;
    b["entries"] = finvec_to_json(rs.build.us[i]);
    basis.push_back(b);
  }
  j["basis"] = basis;
  return j;
}

inline RunState state_from_json(const json& j) {
  if (!j.contains("schema") || j.at("schema").get<std::string>() != "opforge-run/1")
    fail(Error::Kind::io, "state.json: unknown schema");
  RunState rs;
  rs.config = parse_run_config(j.at("config"));
  // stored sequences are authoritative (the run may predate spec changes)
  const auto& seqs = j.at("sequences");
  if (seqs.contains("lambda")) rs.config.lambdas = sequence_from_json(seqs.at("lambda"));
  if (seqs.contains("mu")) rs.config.mus = sequence_from_json(seqs.at("mu"));
  if (seqs.contains("nu")) rs.config.nus = sequence_from_json(seqs.at("nu"));
  if (seqs.contains("a")) rs.config.a_weights = seqs.at("a").get<std::vector<double>>();
  rs.build.construction = j.at("construction").get<std::string>();
  for (const auto& [k, v] : j.at("constants").items())
    rs.build.constants[k] = v.get<double>();
  for (const auto& s : j.at("seed_vectors")) {
    rs.build.seed_labels.push_back(s.at("m").get<int>());
    rs.build.seeds.push_back(finvec_from_json(s.at("entries")));
  }
  for (const auto& b : j.at("basis")) rs.build.us.push_back(finvec_from_json(b.at("entries")));
  return rs;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Error::Kind::io, "cannot write " + path.string());
  out << text;
}

inline json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Error::Kind::io, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(Error::Kind::io, path.string() + ": JSON parse error: " + e.what());
  }
  return j;
}

inline json report_to_json(const verify::VerificationReport& rep) {
  json j;
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json e;
    e["name"] = c.name;
    e["tolerance"] = c.tolerance;
    e["worst"] = c.worst;
    e["at"] = json::array({c.at_n, c.at_j});
    e["pass"] = c.pass;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["pass"] = rep.pass;
  return j;
}

}  // namespace opforge::io
