#include "nhsl/dominating.hpp"

#include "nhsl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nhsl {

namespace {

std::size_t nearest_index(const std::vector<double>& grid, double x) {
    auto it = std::lower_bound(grid.begin(), grid.end(), x);
    if (it == grid.end()) return grid.size() - 1;
    std::size_t i = static_cast<std::size_t>(it - grid.begin());
    if (i == 0) return 0;
    return (x - grid[i - 1] <= grid[i] - x) ? i - 1 : i;
}

// Distinct distances from x to the atoms, ascending.
std::vector<double> distinct_distances(const AtomicMeasure& mu, double x) {
    std::vector<double> d;
    d.reserve(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        d.push_back(std::abs(mu.position(i) - x));
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
}

// Representative radii, one per constancy interval of r -> mu(B(x,r)).
std::vector<double> representative_radii(const std::vector<double>& dist,
                                         double floor) {
    std::vector<double> reps;
    for (std::size_t j = 0; j + 1 < dist.size(); ++j) {
        const double mid = 0.5 * (dist[j] + dist[j + 1]);
        if (mid >= floor) reps.push_back(mid);
    }
    const double d_max = dist.back();
    double tail = d_max;
    if (dist.size() > 1) {
        const double mean_gap = (dist.back() - dist.front()) /
                                static_cast<double>(dist.size() - 1);
        tail = d_max + 0.5 * mean_gap;
    } else {
        tail = std::max(1.5 * d_max, floor) + floor;
    }
    if (tail >= floor) reps.push_back(tail);
    return reps;
}

void update_witness(UpperDoublingWitness& w, double x, double y, double r,
                    double ratio) {
    if (ratio > w.ratio) w = {x, y, r, ratio};
}

} // namespace

double DominatingFunction::eval(double x, double r) const {
    switch (family) {
    case Family::Power:
        return power_c * std::pow(r, power_s);
    case Family::Constant:
        return constant_value;
    case Family::Table: {
        const std::size_t xi = nearest_index(grid_x, x);
        const std::vector<double>& row = table[xi];
        if (r <= grid_r.front()) return row.front();
        if (r >= grid_r.back()) return row.back();
        auto it = std::upper_bound(grid_r.begin(), grid_r.end(), r);
        const std::size_t j = static_cast<std::size_t>(it - grid_r.begin());
        const double r0 = grid_r[j - 1], r1 = grid_r[j];
        const double t = (r - r0) / (r1 - r0);
        return row[j - 1] + t * (row[j] - row[j - 1]);
    }
    }
    return 0.0;
}

DominatingFunction DominatingFunction::power(double c, double s,
                                             double c_lambda) {
    DominatingFunction f;
    f.family = Family::Power;
    f.power_c = c;
    f.power_s = s;
    f.c_lambda = c_lambda;
    if (!(c > 0.0) || !(s >= 0.0))
        throw ConfigError("dominating: power family needs c > 0, s >= 0");
    return f;
}

DominatingFunction DominatingFunction::constant(double value,
                                                double c_lambda) {
    DominatingFunction f;
    f.family = Family::Constant;
    f.constant_value = value;
    f.c_lambda = c_lambda;
    if (!(value > 0.0))
        throw ConfigError("dominating: constant family needs a positive value");
    return f;
}

namespace {

std::vector<double> log_spaced_radii(const AtomicMeasure& mu,
                                     const GridSpec& spec) {
    const double h = mu.resolution_floor();
    double r_min = spec.r_min > 0.0 ? spec.r_min : h;
    double r_max = spec.r_max > 0.0 ? spec.r_max
                                    : std::max(2.0 * mu.diameter(), 4.0 * h);
    if (r_min > 2.0 * h)
        throw ConfigError("dominating: radius grid starts at " +
                          std::to_string(r_min) +
                          ", too coarse for resolution floor " +
                          std::to_string(h));
    if (r_max < r_min) r_max = r_min;
    std::vector<double> radii;
    const double decades = std::log10(r_max / r_min);
    const std::size_t n = std::max<std::size_t>(
        2, static_cast<std::size_t>(
               std::ceil(decades * static_cast<double>(spec.radii_per_decade))) +
               1);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        radii.push_back(r_min * std::pow(r_max / r_min, t));
    }
    return radii;
}

} // namespace

DominatingFunction regularize_dominating(const DominatingFunction& lambda,
                                         const AtomicMeasure& mu,
                                         const GridSpec& grid) {
    DominatingFunction out;
    out.family = DominatingFunction::Family::Table;
    out.c_lambda = lambda.c_lambda;
    out.grid_x = mu.positions();
    out.grid_r = log_spaced_radii(mu, grid);

    out.table.resize(out.grid_x.size());
    for (std::size_t xi = 0; xi < out.grid_x.size(); ++xi) {
        const double x = out.grid_x[xi];
        out.table[xi].resize(out.grid_r.size());
        for (std::size_t rj = 0; rj < out.grid_r.size(); ++rj) {
            const double r = out.grid_r[rj];
            double best = lambda.eval(x, r);  // z = x term
            for (std::size_t k = 0; k < mu.size(); ++k) {
                const double z = mu.position(k);
                best = std::min(best, lambda.eval(z, r + std::abs(x - z)));
            }
            out.table[xi][rj] = best;
        }
    }
    return out;
}

std::string UpperDoublingReport::summary() const {
    std::ostringstream os;
    os << (pass ? "pass" : "fail")
       << " domination=" << domination.ratio
       << " (strict=" << domination_strict.ratio << ")"
       << " halving=" << halving.ratio << " locality=" << locality.ratio;
    return os.str();
}

UpperDoublingReport verify_upper_doubling(const AtomicMeasure& mu,
                                          const DominatingFunction& lambda,
                                          const GridSpec& grid) {
    UpperDoublingReport report;
    const double h = mu.resolution_floor();

    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double x = mu.position(i);
        const std::vector<double> dist = distinct_distances(mu, x);
        for (double r : representative_radii(dist, h)) {
            const double ratio = mu.ball_mass({x, r}) / lambda.eval(x, r);
            update_witness(report.domination, x, x, r, ratio);
        }
        for (double r : dist) {
            if (r < h) continue;
            const double ratio = mu.ball_mass({x, r}) / lambda.eval(x, r);
            update_witness(report.domination_strict, x, x, r, ratio);
        }
    }

    const std::vector<double> radii = log_spaced_radii(mu, grid);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double x = mu.position(i);
        for (double r : radii) {
            const double ratio = lambda.eval(x, r) / lambda.eval(x, 0.5 * r);
            update_witness(report.halving, x, x, r, ratio);
        }
    }

    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double x = mu.position(i);
        for (double r : radii) {
            auto [lo, hi] = mu.ball_range({x, r});
            for (std::size_t j = lo; j < hi; ++j) {
                const double y = mu.position(j);
                const double ratio = lambda.eval(x, r) / lambda.eval(y, r);
                update_witness(report.locality, x, y, r, ratio);
            }
        }
    }

    const double tol = 1.0 + 1e-9;
    report.pass = report.domination.ratio <= tol &&
                  report.halving.ratio <= lambda.c_lambda * tol &&
                  report.locality.ratio <= lambda.c_lambda * tol;
    return report;
}

DoublingDimensionReport
estimate_doubling_dimension(const AtomicMeasure& mu,
                            const DimensionScales& scales) {
    DoublingDimensionReport report;
    const double h = mu.resolution_floor();
    const double diam = mu.diameter();

    std::vector<double> radii = scales.radii;
    if (radii.empty() && diam > 0.0) {
        for (double R = diam; R >= 4.0 * h; R /= 4.0) radii.push_back(R);
    }

    std::vector<std::size_t> centers;
    const std::size_t stride =
        std::max<std::size_t>(1, mu.size() / scales.max_centers);
    for (std::size_t i = 0; i < mu.size(); i += stride) centers.push_back(i);

    for (double R : radii) {
        if (R > diam && diam > 0.0) continue;
        for (double ratio : scales.ratios) {
            const double r = R / ratio;
            if (r < h) continue;
            std::size_t best = 0;
            for (std::size_t c : centers) {
                auto [lo, hi] = mu.ball_range({mu.position(c), R});
                // Greedy left-to-right r-separated subset; on the line this
                // attains the maximum cardinality.
                std::size_t count = 0;
                double last = -std::numeric_limits<double>::infinity();
                for (std::size_t j = lo; j < hi; ++j) {
                    if (mu.position(j) - last >= r) {
                        ++count;
                        last = mu.position(j);
                    }
                }
                best = std::max(best, count);
            }
            report.samples.push_back({R, r, best});
        }
    }

    // Least squares of log(count) against log(R/r).
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (const auto& s : report.samples) {
        if (s.count == 0) continue;
        const double lx = std::log(s.R / s.r);
        const double ly = std::log(static_cast<double>(s.count));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    report.dimension = (n >= 2 && std::abs(denom) > 1e-30)
                           ? (static_cast<double>(n) * sxy - sx * sy) / denom
                           : 0.0;
    report.constant = 1.0;
    for (const auto& s : report.samples) {
        if (s.count == 0) continue;
        const double bound = std::pow(s.R / s.r, report.dimension);
        report.constant =
            std::max(report.constant, static_cast<double>(s.count) / bound);
    }
    return report;
}

} // namespace nhsl
