#include "nhsl/measure.hpp"

#include "nhsl/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace nhsl {

AtomicMeasure::AtomicMeasure(std::vector<double> positions,
                             std::vector<double> masses,
                             double resolution_floor, double gap_factor)
    : positions_(std::move(positions)),
      masses_(std::move(masses)),
      resolution_floor_(resolution_floor) {
    if (positions_.empty())
        throw ConfigError("measure: needs at least one atom");
    if (positions_.size() != masses_.size())
        throw ConfigError("measure: positions and masses differ in length");
    if (!(resolution_floor_ > 0.0))
        throw ConfigError("measure: resolution floor must be positive");

    std::vector<std::size_t> order(positions_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return positions_[a] < positions_[b];
    });
    std::vector<double> pos(order.size()), mas(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        pos[i] = positions_[order[i]];
        mas[i] = masses_[order[i]];
    }
    positions_ = std::move(pos);
    masses_ = std::move(mas);

    min_gap_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        if (!std::isfinite(positions_[i]))
            throw ConfigError("measure: non-finite atom position");
        if (!(masses_[i] > 0.0))
            throw ConfigError("measure: atom mass must be strictly positive");
        if (i > 0) {
            const double gap = positions_[i] - positions_[i - 1];
            if (!(gap > 0.0))
                throw ConfigError("measure: duplicate atom position " +
                                  std::to_string(positions_[i]));
            min_gap_ = std::min(min_gap_, gap);
        }
        total_mass_ += masses_[i];
    }
    if (positions_.size() > 1 && resolution_floor_ > min_gap_ * gap_factor)
        throw ConfigError(
            "measure: resolution floor " + std::to_string(resolution_floor_) +
            " exceeds min atom gap " + std::to_string(min_gap_) +
            " times gap factor " + std::to_string(gap_factor));
}

std::pair<std::size_t, std::size_t>
AtomicMeasure::ball_range(const Ball& ball) const {
    if (ball.radius < 0.0) return {0, 0};
    auto lo_it = std::lower_bound(positions_.begin(), positions_.end(),
                                  ball.lo());
    auto hi_it = std::upper_bound(positions_.begin(), positions_.end(),
                                  ball.hi());
    std::size_t lo = static_cast<std::size_t>(lo_it - positions_.begin());
    std::size_t hi = static_cast<std::size_t>(hi_it - positions_.begin());
    // The endpoint arithmetic above rounds; settle boundary atoms with the
    // exact membership predicate.
    while (lo > 0 && ball.contains(positions_[lo - 1])) --lo;
    while (lo < hi && !ball.contains(positions_[lo])) ++lo;
    while (hi < positions_.size() && ball.contains(positions_[hi])) ++hi;
    while (hi > lo && !ball.contains(positions_[hi - 1])) --hi;
    return {lo, hi};
}

double AtomicMeasure::ball_mass(const Ball& ball) const {
    auto [lo, hi] = ball_range(ball);
    return range_mass(lo, hi);
}

double AtomicMeasure::range_mass(std::size_t first, std::size_t last) const {
    double sum = 0.0;
    for (std::size_t i = first; i < last; ++i) sum += masses_[i];
    return sum;
}

std::size_t AtomicMeasure::nearest_atom(double x) const {
    auto it = std::lower_bound(positions_.begin(), positions_.end(), x);
    if (it == positions_.end()) return positions_.size() - 1;
    std::size_t i = static_cast<std::size_t>(it - positions_.begin());
    if (i == 0) return 0;
    return (x - positions_[i - 1] <= positions_[i] - x) ? i - 1 : i;
}

double mu_ball(const AtomicMeasure& mu, const Ball& ball) {
    return mu.ball_mass(ball);
}

double range_weighted_sum(const AtomicMeasure& mu,
                          const std::vector<double>& values,
                          std::size_t first, std::size_t last) {
    double sum = 0.0;
    for (std::size_t i = first; i < last; ++i) sum += values[i] * mu.mass(i);
    return sum;
}

double ball_weighted_sum(const AtomicMeasure& mu,
                         const std::vector<double>& values, const Ball& ball) {
    auto [lo, hi] = mu.ball_range(ball);
    return range_weighted_sum(mu, values, lo, hi);
}

} // namespace nhsl
