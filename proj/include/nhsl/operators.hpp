#pragma once

#include "nhsl/dominating.hpp"
#include "nhsl/lattice.hpp"
#include "nhsl/measure.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace nhsl {

// Singular kernel with the size bound |K(x,y)| <= C_K / lambda(x, |x-y|)
// and a power modulus of continuity omega(t) = c t^tau.
//
// Built-ins: the Hilbert kernel 1/(x-y), and a mollified variant
// (x-y)/((x-y)^2 + a^2) that stays bounded, hence L2-bounded against any
// finite measure.
struct Kernel {
    enum class Kind { Hilbert, Smooth };

    Kind kind = Kind::Hilbert;
    double c_k = 1.0;
    double omega_c = 2.0;
    double omega_tau = 1.0;
    double smooth_scale = 1e-3;  // the a in the mollified kernel

    double eval(double x, double y) const;
    double omega(double t) const;
    // sum_j omega(2^-j) in closed form
    double dini_norm() const;

    static Kernel hilbert(double c_k, double omega_c, double omega_tau = 1.0);
    static Kernel smooth(double scale, double c_k, double omega_c,
                         double omega_tau = 1.0);
};

// f sampled at the atoms of a measure.
struct FunctionSample {
    std::vector<double> values;
    double l1_norm = 0.0;  // sum |f| * mass

    FunctionSample() = default;
    FunctionSample(const AtomicMeasure& mu, std::vector<double> vals);
};

FunctionSample restrict_to_ball(const AtomicMeasure& mu,
                                const FunctionSample& f, const Ball& ball);

// --------------------------------------------------------------------------
// Pointwise operators. Suprema over continuous parameters are evaluated at
// the finitely many breakpoints where the underlying step functions change,
// which is exact for atomic measures.

// T_eps f(x): sum over atoms with |x - y| > eps of K(x,y) f(y) mass(y).
double truncated(const Kernel& k, const AtomicMeasure& mu,
                 const FunctionSample& f, double x, double eps);

// sup over eps >= resolution floor of |T_eps f(x)|.
double max_truncation(const Kernel& k, const AtomicMeasure& mu,
                      const FunctionSample& f, double x);

// F(x, Q): the tail of the integral outside 30B(Q), for x an atom of Q.
double tail(const Kernel& k, const Lattice& lat, const FunctionSample& f,
            std::size_t atom, int cell_id);

// N_{Q0} f(x): sup over cells P containing x inside Q0 of
// sup_{y in P} |F(y, P)|; zero off Q0.
double grand_maximal(const Kernel& k, const Lattice& lat,
                     const FunctionSample& f, int root_id, std::size_t atom);
std::vector<double> grand_maximal_all(const Kernel& k, const Lattice& lat,
                                      const FunctionSample& f, int root_id);

// M_lambda f(x) = sup_{R >= h} mu-average of |f| over B(x,R) / lambda(x,R).
double maximal_lambda(const AtomicMeasure& mu, const DominatingFunction& lambda,
                      const FunctionSample& f, double x);

// A(f, Q) = int_{30B(Q)} |f| dmu / mu(alpha B(Q)).
double cell_average(const AtomicMeasure& mu, const FunctionSample& f,
                    const Cell& cell, double alpha);

// M_mu f(x) = sup over cells containing x of A(f, Q).
double maximal_mu(const Lattice& lat, const FunctionSample& f,
                  std::size_t atom);
std::vector<double> maximal_mu_all(const Lattice& lat,
                                   const FunctionSample& f);

// Theta-weighted localized variant: sup over the chain inside Q0 of
// Theta(Q) * A(f, Q).
double localized_theta_maximal(const Lattice& lat, const FunctionSample& f,
                               int root_id, std::size_t atom);
std::vector<double> localized_theta_maximal_all(const Lattice& lat,
                                                const FunctionSample& f,
                                                int root_id);

// Same sup taken over every cell of the lattice.
std::vector<double> theta_maximal_global_all(const Lattice& lat,
                                             const FunctionSample& f);

// --------------------------------------------------------------------------
// Measured-constant reports for the comparison inequalities.

struct KernelCheckReport {
    double max_size_ratio = 0.0;    // |K| * lambda / C_K
    double max_smooth_ratio = 0.0;  // smoothness quotient against omega
    bool pass = false;
};
KernelCheckReport verify_kernel(const Kernel& k, const AtomicMeasure& mu,
                                const DominatingFunction& lambda,
                                std::uint64_t seed = 1,
                                std::size_t samples = 2000);

// |T_r f(x) - F(x,Q)| <= C * C_K * M_lambda f(x) at r in {1, 30, 60} r(Q).
struct TruncationComparisonReport {
    double max_constant = 0.0;
    double min_nonzero_constant = 0.0;
    std::vector<double> per_cell;  // indexed by cell id
};
TruncationComparisonReport
truncation_comparison_report(const Kernel& k, const Lattice& lat,
                             const DominatingFunction& lambda,
                             const FunctionSample& f);

// |N_{Q0} f - T# f| <= C (dini + C_K) M_lambda f at the atoms of Q0.
double n_tsharp_constant(const Kernel& k, const Lattice& lat,
                         const DominatingFunction& lambda,
                         const FunctionSample& f, int root_id);

// Consecutive scales: integral of |K||f| over 30B(parent) \ 30B(Q) against
// Theta(parent) * A(f, parent).
double consecutive_scales_constant(const Kernel& k, const Lattice& lat,
                                   const FunctionSample& f);

// sup_t t * mu{ M > t } / ||f||_L1, evaluated at the realized values of M.
double weak11_constant(const AtomicMeasure& mu,
                       const std::vector<double>& maximal_values,
                       double l1_norm);

} // namespace nhsl
