// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "opforge/common.hpp"
#include "opforge/operator_model.hpp"
#include "opforge/ortho.hpp"
#include "opforge/records.hpp"

namespace opforge::verify {

/// 17 significant digits round-trips doubles exactly.
inline std::string format_double_17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Complex as "re+imi" / "re-imi", e.g. "1.5+0.25i".
inline std::string format_complex(cx z) {
  std::string s = format_double_17(z.real());
  s += (z.imag() < 0 || (z.imag() == 0 && std::signbit(z.imag()))) ? "-" : "+";
  s += format_double_17(std::abs(z.imag()));
  s += "i";
  return s;
}

inline cx parse_complex(const std::string& s) {
  if (s.empty() || s.back() != 'i')
    fail(Error::Kind::io, "parse_complex: missing trailing i in '" + s + "'");
  // split at the sign that separates re from im (skip mantissa signs and
  // exponent signs)
  for (std::size_t k = s.size() - 1; k > 0; --k) {
    char c = s[k];
    if ((c == '+' || c == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      double re = std::stod(s.substr(0, k));
      double im = std::stod(s.substr(k, s.size() - 1 - k));
      return {re, im};
    }
  }
  fail(Error::Kind::io, "parse_complex: malformed '" + s + "'");
}

/// size x size grid A[j][n] = <T u_n, u_j> (row j, column n).
inline std::vector<std::vector<cx>> entry_grid(const seqspace::OperatorModel& T,
                                               const seqspace::OrthoFamily& us, int size) {
  if (size < 0 || size > static_cast<int>(us.size()))
    fail(Error::Kind::verification, "entry_grid: size exceeds built prefix");
  std::vector<std::vector<cx>> grid(static_cast<std::size_t>(size),
                                    std::vector<cx>(static_cast<std::size_t>(size)));
  for (int n = 1; n <= size; ++n) {
    seqspace::FinVec Tu = T.apply(us[static_cast<std::size_t>(n - 1)]);
    for (int j = 1; j <= size; ++j)
      grid[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(n - 1)] =
          seqspace::inner_product(Tu, us[static_cast<std::size_t>(j - 1)]);
  }
  return grid;
}

/// CSV: header "j/n,1,..,size", then one row per j.
inline void export_matrix_csv(const seqspace::OperatorModel& T, const seqspace::OrthoFamily& us,
                              int size, std::ostream& out) {
  auto grid = entry_grid(T, us, size);
  out << "j/n";
  for (int n = 1; n <= size; ++n) out << "," << n;
  out << "\n";
  for (int j = 1; j <= size; ++j) {
    out << j;
    for (int n = 1; n <= size; ++n)
      out << "," << format_complex(grid[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(n - 1)]);
    out << "\n";
  }
}

inline std::vector<std::vector<cx>> parse_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(Error::Kind::io, "parse_matrix_csv: empty input");
  std::vector<std::vector<cx>> grid;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<cx> row;
    std::stringstream ss(line);
    std::string cell;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        first = false;
        continue;
      }
      row.push_back(parse_complex(cell));
    }
    grid.push_back(std::move(row));
  }
  return grid;
}

/// Decay table, one row per (step n, seed label m): replayed residual norm.
inline void export_decay_csv(const forge::BuildState& state, std::ostream& out) {
  out << "n,m,residual_norm\n";
  std::map<int, double> resid;
  for (std::size_t i = 0; i < state.seed_labels.size(); ++i)
    resid[state.seed_labels[i]] = state.seeds[i].norm_sq();
  for (int n = 1; n <= static_cast<int>(state.us.size()); ++n) {
    for (auto& [label, r] : resid) {
      r -= std::norm(seqspace::inner_product(*state.seed_by_label(label),
                                             state.us[static_cast<std::size_t>(n - 1)]));
      out << n << "," << label << "," << format_double_17(std::sqrt(std::max(0.0, r))) << "\n";
    }
  }
}

}  // namespace opforge::verify
