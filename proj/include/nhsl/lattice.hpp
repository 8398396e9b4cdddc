#pragma once

#include "nhsl/dominating.hpp"
#include "nhsl/measure.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace nhsl {

// Construction constants. The strict regime requires A0 > 5000 * C0 and
// alpha >= 200; the relaxed regime drops those inequalities (but keeps
// A0 >= 10, below which the one-dimensional construction loses the ball
// sandwich and cells can go empty) and turns several exact invariants into
// measured reports.
struct LatticeParams {
    double C0 = 200.0;
    double A0 = 10.0;
    double alpha = 8.0;
    int max_level = 4;
    bool relaxed = true;

    // derived
    int l0 = 0;                // largest integer with 100^l0 <= C0 / alpha
    double decay_base = 0.01;  // coefficient base for chain contributions

    void validate() const;
    void derive();

    static LatticeParams relaxed_defaults();
    static LatticeParams paper_defaults();
};

struct Cell {
    int id = -1;
    int level = 0;
    std::size_t center_atom = 0;
    double center = 0.0;
    double radius = 0.0;       // r(Q), in [A0^-k, C0 * A0^-k] * unit scale
    double base_radius = 0.0;  // A0^-k * unit scale
    double extent_lo = 0.0;
    double extent_hi = 0.0;
    std::size_t atom_begin = 0;
    std::size_t atom_end = 0;  // member atoms: contiguous range [begin, end)
    double mass = 0.0;
    bool doubling = false;
    double theta = 0.0;
    int parent = -1;
    std::vector<int> children;

    Ball ball() const { return {center, radius}; }
    Ball dilated(double c) const { return {center, c * radius}; }
    std::size_t atom_count() const { return atom_end - atom_begin; }
    bool contains_atom(std::size_t i) const {
        return i >= atom_begin && i < atom_end;
    }
};

// Per-level construction data: net points, their disjoint extension
// intervals, and the supervising link into the coarser level.
struct LevelNet {
    double base_radius = 0.0;
    std::vector<std::size_t> net_atoms;
    std::vector<double> b4_lo;
    std::vector<double> b4_hi;
    std::vector<int> supervisor;  // index into the coarser net (-1 at level 0)
};

class Lattice {
public:
    LatticeParams params;
    double unit_scale = 1.0;
    std::shared_ptr<const AtomicMeasure> mu;
    std::vector<Cell> cells;
    std::vector<std::vector<int>> levels;     // cell ids per level, in order
    std::vector<LevelNet> nets;
    std::vector<std::vector<int>> atom_cell;  // [level][atom] -> cell id
    int root_id = 0;

    const AtomicMeasure& measure() const { return *mu; }
    const Cell& cell(int id) const { return cells[static_cast<size_t>(id)]; }
    int depth() const { return static_cast<int>(levels.size()); }
    int cell_at(int level, std::size_t atom) const {
        return atom_cell[static_cast<std::size_t>(level)][atom];
    }

    // Cells containing the atom, root first.
    std::vector<int> chain(std::size_t atom) const;
    // DFS order, root of the subtree first.
    std::vector<int> subtree(int id) const;
};

// Greedy left-to-right net: base balls of the given radius whose 5-dilates
// are pairwise disjoint and whose 25-dilates cover every atom; maximal.
std::vector<std::size_t> build_net(const AtomicMeasure& mu,
                                   double base_radius);

// Disjoint extension intervals 5B <= B4 <= 25B. Both endpoints of each 5B
// move outward at speed equal to the base radius until they reach their own
// 25B endpoint or meet a neighboring extension; meeting points are
// closed-form.
struct Extension {
    std::vector<double> lo;
    std::vector<double> hi;
};
Extension extend_intervals(const AtomicMeasure& mu,
                           const std::vector<std::size_t>& net,
                           double base_radius);

// Supervisor of each fine net point: the index of the coarse B4 interval
// containing it. Points on a shared endpoint belong to the left interval.
std::vector<int> supervise(const AtomicMeasure& mu,
                           const std::vector<std::size_t>& fine_net,
                           const Extension& coarse_b4);

Lattice build_lattice(std::shared_ptr<const AtomicMeasure> mu,
                      const DominatingFunction& lambda, LatticeParams params);

// Doubling classification of one cell: scan radii 100^j * base while they
// stay within C0 * base and the ball stays inside the cell; first radius
// with mu(100B) <= C0 mu(B) wins. Returns the chosen radius, the flag, and
// any violations of the non-doubling inequality mu(cB) <= mu(100cB)/C0 at
// geometrically sampled c in [1, C0].
struct DoublingClassification {
    bool doubling = false;
    double radius = 0.0;
    std::vector<double> violating_c;
};
DoublingClassification classify_doubling(const AtomicMeasure& mu,
                                         const Cell& cell,
                                         const LatticeParams& params);

// Theta(Q) = mu(alpha B(Q)) / lambda(z_Q, alpha r(Q)); in (0, 1] whenever
// lambda dominates.
double theta(const AtomicMeasure& mu, const DominatingFunction& lambda,
             const Cell& cell, double alpha);

struct ThetaDecayReport {
    std::vector<double> ratios;     // Theta(Q_k) / Theta(Q_0), k >= 1
    double theoretical_base = 1.0;  // C0^(-l0/2), clamped to <= 1
    double measured_base = 1.0;     // max_k ratio_k^(1/k)
    double implied_constant = 0.0;  // max_k ratio_k / theoretical_base^k
    bool asserted = false;          // false: report only (relaxed constants)
};

// Chain must be nested, cells after position 0 non-doubling.
ThetaDecayReport theta_decay_check(const Lattice& lat,
                                   const std::vector<int>& chain,
                                   const DominatingFunction& lambda);

// Maximal parent-child chains of non-doubling cells, longest first.
std::vector<std::vector<int>> find_nondoubling_chains(const Lattice& lat);

struct LatticeCheckReport {
    bool partition_ok = false;
    bool nesting_ok = false;
    bool disjoint_5b_ok = false;
    bool radius_range_ok = false;
    bool membership_ok = false;
    bool sandwich_ok = false;        // W & B(Q) <= Q <= W & 28 B(Q)
    double sandwich_dilate = 0.0;    // smallest valid upper dilate observed
    bool nested_dilates_ok = false;  // 30B(Q) inside 30B(parent)
    bool theta_ok = false;           // Theta in (0, 1]
    bool doubling_flags_ok = false;  // flags consistent with ball masses
    bool nondoubling_radius_ok = false;
    std::vector<std::string> notes;

    // Exact requirements that hold in every mode.
    bool hard_pass() const {
        return partition_ok && nesting_ok && disjoint_5b_ok &&
               radius_range_ok && membership_ok && theta_ok &&
               doubling_flags_ok && nondoubling_radius_ok;
    }
    // Strict-constants mode additionally asserts the geometric inclusions.
    bool strict_pass() const {
        return hard_pass() && sandwich_ok && nested_dilates_ok;
    }
};

LatticeCheckReport check_lattice(const Lattice& lat);

} // namespace nhsl
