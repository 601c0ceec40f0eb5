#include <cmath>
#include <map>

#include "bench/experiment.hpp"

namespace ahc::bench {

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("x and y lengths differ");
  if (x.size() < 3) throw ConfigError("slope fit needs at least 3 points");
  const double m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("log-log fit needs positive values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("slope fit needs at least two distinct x values");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / m);
  fit.points = x.size();
  return fit;
}

SlopeFit fit_summary_slope(const std::vector<SummaryRow>& rows, SlopeTarget target, std::optional<Algorithm> algorithm) {
  if (!algorithm) {
    for (const SummaryRow& r : rows) {
      if (algorithm && *algorithm != r.algorithm) throw ConfigError("summary holds several algorithms; pick one");
      algorithm = r.algorithm;
    }
  }
  std::map<std::size_t, std::pair<double, std::size_t>> by_n;
  for (const SummaryRow& r : rows) {
    if (!algorithm || r.algorithm != *algorithm) continue;
    auto& [sum, count] = by_n[r.n];
    sum += target == SlopeTarget::Queries ? r.queries_mean : r.time_mean_ms;
    ++count;
  }
  std::vector<double> x, y;
  for (const auto& [n, acc] : by_n) {
    x.push_back(static_cast<double>(n));
    y.push_back(acc.first / static_cast<double>(acc.second));
  }
  return fit_loglog(x, y);
}

}  // namespace ahc::bench
