#include "homog/rate_fit.hpp"

#include <cmath>

namespace homog {

RateReport fit_rate(const std::vector<RateRow>& rows, std::string label) {
  if (rows.size() < 3) throw ConfigError("need ≥ 3 points");
  RateReport r;
  r.label = std::move(label);
  r.rows = rows;
  const double n = static_cast<double>(rows.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& row : rows) {
    if (!(row.eps > 0.0) || !std::isfinite(row.eps)) throw ConfigError("rate fit needs positive eps values");
    if (!(row.value > 0.0) || !std::isfinite(row.value)) throw ConfigError("rate fit needs positive values");
    sx += std::log(row.eps);
    sy += std::log(row.value);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& row : rows) {
    const double dx = std::log(row.eps) - mx;
    const double dy = std::log(row.value) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw ConfigError("rate fit needs distinct eps values");
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  if (syy <= 1e-28 * std::max(1.0, my * my)) {
    r.zero_variance = true;
    r.slope = 0.0;
    r.intercept = my;
    r.r2 = 1.0;
  } else {
    r.r2 = sxy * sxy / (sxx * syy);
  }
  return r;
}

void RateReport::require_band(double expected_slope, double half_width) {
  expected = expected_slope;
  band = half_width;
  pass = pass && std::abs(slope - expected) <= band;
}

void RateReport::require_min(double lower) {
  min_slope = lower;
  pass = pass && slope >= lower;
}

nlohmann::json RateReport::to_json() const {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["label"] = label;
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& row : rows) rs.push_back({{"eps", row.eps}, {"value", row.value}});
  j["rows"] = rs;
  j["slope"] = slope;
  j["intercept"] = intercept;
  j["r2"] = r2;
  j["zero_variance"] = zero_variance;
  j["expected"] = num(expected);
  j["band"] = num(band);
  j["min_slope"] = num(min_slope);
  j["pass"] = pass;
  return j;
}

}  // namespace homog
