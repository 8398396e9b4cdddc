#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace nhsl {

// Closed ball {y : |y - center| <= radius} on the real line.
struct Ball {
    double center = 0.0;
    double radius = 0.0;

    Ball() = default;
    Ball(double c, double r) : center(c), radius(r) {}

    Ball scaled(double factor) const { return {center, radius * factor}; }
    double lo() const { return center - radius; }
    double hi() const { return center + radius; }
    bool contains(double x) const { return std::abs(x - center) <= radius; }
};

// Resolution-limited atomic approximation of a Borel measure on R.
//
// Atoms are sorted by position. Every supremum or infimum over radii and
// truncations elsewhere in the library is restricted to scales >= the
// resolution floor; point masses below that scale are artifacts of the
// discretization and carry no claims.
class AtomicMeasure {
public:
    AtomicMeasure(std::vector<double> positions, std::vector<double> masses,
                  double resolution_floor, double gap_factor = 1.0);

    std::size_t size() const { return positions_.size(); }
    double position(std::size_t i) const { return positions_[i]; }
    double mass(std::size_t i) const { return masses_[i]; }
    const std::vector<double>& positions() const { return positions_; }
    const std::vector<double>& masses() const { return masses_; }

    double total_mass() const { return total_mass_; }
    double resolution_floor() const { return resolution_floor_; }
    double min_gap() const { return min_gap_; }
    double support_lo() const { return positions_.front(); }
    double support_hi() const { return positions_.back(); }
    double diameter() const { return support_hi() - support_lo(); }

    // Index range [first, last) of the atoms inside the closed ball.
    // Membership truth is |position - center| <= radius.
    std::pair<std::size_t, std::size_t> ball_range(const Ball& ball) const;

    double ball_mass(const Ball& ball) const;
    double range_mass(std::size_t first, std::size_t last) const;

    std::size_t nearest_atom(double x) const;

private:
    std::vector<double> positions_;
    std::vector<double> masses_;
    double resolution_floor_;
    double total_mass_ = 0.0;
    double min_gap_;
};

// mu(B): exact sum of the masses of the atoms in the closed ball.
double mu_ball(const AtomicMeasure& mu, const Ball& ball);

// Sum of values[i] * mass(i) over an atom index range / ball.
double range_weighted_sum(const AtomicMeasure& mu,
                          const std::vector<double>& values,
                          std::size_t first, std::size_t last);
double ball_weighted_sum(const AtomicMeasure& mu,
                         const std::vector<double>& values, const Ball& ball);

} // namespace nhsl
