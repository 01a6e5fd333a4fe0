#pragma once

#include "homog/types.hpp"

#include <json.hpp>

#include <limits>
#include <string>
#include <vector>

namespace homog {

struct RateRow {
  double eps = 0.0;
  double value = 0.0;
};

/// Least-squares fit of log(value) against log(eps).
struct RateReport {
  std::string label;
  std::vector<RateRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  /// All values equal: slope 0, r2 reported as 1.
  bool zero_variance = false;
  /// Acceptance: |slope - expected| <= band, or slope >= min_slope when
  /// only a lower bound is given.
  double expected = std::numeric_limits<double>::quiet_NaN();
  double band = std::numeric_limits<double>::quiet_NaN();
  double min_slope = std::numeric_limits<double>::quiet_NaN();
  bool pass = true;

  void require_band(double expected_slope, double half_width);
  void require_min(double lower);
  nlohmann::json to_json() const;
};

/// Throws ConfigError("need ≥ 3 points") for short input and on
/// non-positive eps or values.
RateReport fit_rate(const std::vector<RateRow>& rows, std::string label = {});

}  // namespace homog
