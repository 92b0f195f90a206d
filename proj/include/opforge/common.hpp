// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace opforge {

using cx = std::complex<double>;
using index_t = std::int64_t;

/// Coefficients with magnitude below this are dropped from sparse vectors.
inline constexpr double kPruneEps = 1e-15;

/// Structured failure carried through every layer. `kind` maps onto the
/// CLI exit codes (config -> 2, construction/precondition -> 3, audit -> 4).
class Error : public std::runtime_error {
public:
  enum class Kind { config, precondition, construction, audit, verification, io };

  Error(Kind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

[[noreturn]] inline void fail(Error::Kind kind, const std::string& message) {
  throw Error(kind, message);
}

/// Compensated (Kahan) accumulator; inner products over a few thousand
/// terms must stay exact to ~1e-15 for the unit-norm verification check.
class KahanSum {
public:
  void add(double x) {
    double y = x - carry_;
    double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

class KahanSumCx {
public:
  void add(cx z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  cx value() const { return {re_.value(), im_.value()}; }

private:
  KahanSum re_, im_;
};

inline double sqr(double x) { return x * x; }

}  // namespace opforge
