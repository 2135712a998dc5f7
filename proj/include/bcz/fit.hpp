#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bcz {

/// Ordinary least-squares fit of log y against log x. Residuals are reported,
/// never hidden.
struct FitReport {
    std::vector<std::pair<double, double>> points;  // (log x, log y)
    double exponent = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};

/// Fit y ~ C x^e through the log-log plane. Requires >= 2 points with
/// positive coordinates.
inline FitReport fit_power_law(const std::vector<std::pair<double, double>>& xy) {
    FitReport report;
    for (const auto& [x, y] : xy) {
        if (!(x > 0.0) || !(y > 0.0))
            throw std::domain_error("power-law fit needs positive coordinates");
        report.points.emplace_back(std::log(x), std::log(y));
    }
    const std::size_t n = report.points.size();
    if (n < 2) throw std::domain_error("power-law fit needs at least 2 points");

    double sx = 0.0, sy = 0.0;
    for (const auto& [lx, ly] : report.points) {
        sx += lx;
        sy += ly;
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (const auto& [lx, ly] : report.points) {
        sxx += (lx - mx) * (lx - mx);
        sxy += (lx - mx) * (ly - my);
    }
    if (sxx == 0.0) throw std::domain_error("power-law fit needs distinct x values");

    report.exponent = sxy / sxx;
    report.intercept = my - report.exponent * mx;
    for (const auto& [lx, ly] : report.points) {
        const double r = std::fabs(ly - (report.exponent * lx + report.intercept));
        if (r > report.max_residual) report.max_residual = r;
    }
    return report;
}

}  // namespace bcz
