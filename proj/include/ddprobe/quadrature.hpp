// Copyright 2026 The ddprobe Authors
//
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

#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace ddprobe {

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double value, double achieved, double requested)
      : std::runtime_error(what), value_(value), achieved_(achieved), requested_(requested) {}

  double value() const { return value_; }
  double achieved_tolerance() const { return achieved_; }
  double requested_tolerance() const { return requested_; }

 private:
  double value_;
  double achieved_;
  double requested_;
};

struct QuadratureOptions {
  double rel_tol = 1e-8;
  // Floor for integrals that are legitimately ~0 (e.g. fully decoupled filters).
  double abs_tol = 1e-14;
  unsigned max_depth = 20;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive 31-point Gauss-Kronrod on [a, b]. Throws QuadratureError when the
// estimated error exceeds max(rel_tol * |value|, abs_tol).
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  QuadratureResult r;
  if (a == b) return r;
  double l1 = 0.0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, opts.max_depth, opts.rel_tol, &r.error, &l1);
  const double allowed = std::max(opts.rel_tol * std::abs(r.value), opts.abs_tol);
  if (!std::isfinite(r.value) || !(r.error <= allowed)) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "quadrature on [%g, %g] did not converge: value %.6e, achieved error %.3e, "
                  "requested %.3e",
                  a, b, r.value, r.error, allowed);
    throw QuadratureError(buf, r.value, r.error, allowed);
  }
  return r;
}

}  // namespace ddprobe
