#pragma once

#include "nhsl/measure.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace nhsl {

// The function lambda(x, r) controlling mu(B(x, r)), nondecreasing in r and
// doubling by at most c_lambda when r halves.
//
// Three families: power law c * r^s, a constant, and a tabulated envelope
// over an (x, r) grid. Tabulated values are looked up at the nearest x node
// and interpolated linearly in r (flat beyond the grid ends, which keeps
// monotonicity and never under-reports at small radii).
struct DominatingFunction {
    enum class Family { Power, Constant, Table };

    Family family = Family::Constant;
    double c_lambda = 2.0;

    // power family
    double power_c = 1.0;
    double power_s = 1.0;

    // constant family
    double constant_value = 1.0;

    // table family
    std::vector<double> grid_x;               // sorted
    std::vector<double> grid_r;               // sorted, positive
    std::vector<std::vector<double>> table;   // [x index][r index]

    double eval(double x, double r) const;

    static DominatingFunction power(double c, double s, double c_lambda);
    static DominatingFunction constant(double value, double c_lambda);
};

// Sample layout for regularization and verification.
struct GridSpec {
    double r_min = 0.0;                // defaults to the resolution floor
    double r_max = 0.0;                // defaults to 2 * diameter
    std::size_t radii_per_decade = 8;
};

// Tabulated envelope  inf_z lambda(z, r + |x - z|)  with z ranging over the
// atom positions plus the query point itself. Never larger than lambda,
// keeps monotonicity in r and the halving constant, and gains the locality
// bound lambda(x, r) <= c_lambda * lambda(y, r) for |x - y| <= r.
DominatingFunction regularize_dominating(const DominatingFunction& lambda,
                                         const AtomicMeasure& mu,
                                         const GridSpec& grid = {});

struct UpperDoublingWitness {
    double x = 0.0;
    double y = 0.0;   // second center for the locality check
    double r = 0.0;
    double ratio = 0.0;
};

// Worst-case ratios for the three inequalities defining an upper doubling
// measure. Domination is sampled at one representative radius inside each
// constancy interval of r -> mu(B(x, r)): the midpoint for finite intervals
// and d_max + (mean gap)/2 for the final unbounded one. The left-endpoint
// (breakpoint) ratio is reported separately as `domination_strict`; it is
// the harsher convention and is allowed to exceed 1 near the resolution
// floor, where the atomic discretization overshoots the measure it stands
// in for.
struct UpperDoublingReport {
    UpperDoublingWitness domination;         // mu(B(x,r)) / lambda(x,r)
    UpperDoublingWitness domination_strict;  // same, at breakpoint radii
    UpperDoublingWitness halving;            // lambda(x,r) / lambda(x,r/2)
    UpperDoublingWitness locality;           // lambda(x,r) / lambda(y,r)
    bool pass = false;
    std::string summary() const;
};

UpperDoublingReport verify_upper_doubling(const AtomicMeasure& mu,
                                          const DominatingFunction& lambda,
                                          const GridSpec& grid = {});

// Greedy r-separated counts inside balls of radius R and the fitted
// exponent n with count <= C * (R/r)^n.
struct DoublingDimensionReport {
    struct Sample {
        double R = 0.0;
        double r = 0.0;
        std::size_t count = 0;
    };
    std::vector<Sample> samples;
    double dimension = 0.0;
    double constant = 1.0;
};

struct DimensionScales {
    std::vector<double> radii;           // ball radii R; empty = automatic
    std::vector<double> ratios = {4.0, 16.0, 64.0};  // r = R / ratio
    std::size_t max_centers = 64;
};

DoublingDimensionReport
estimate_doubling_dimension(const AtomicMeasure& mu,
                            const DimensionScales& scales = {});

} // namespace nhsl
