#include "nhsl/operators.hpp"

#include "nhsl/errors.hpp"
#include "nhsl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nhsl {

double Kernel::eval(double x, double y) const {
    const double d = x - y;
    switch (kind) {
    case Kind::Hilbert:
        return d == 0.0 ? 0.0 : 1.0 / d;
    case Kind::Smooth:
        return d / (d * d + smooth_scale * smooth_scale);
    }
    return 0.0;
}

double Kernel::omega(double t) const { return omega_c * std::pow(t, omega_tau); }

double Kernel::dini_norm() const {
    return omega_c / (1.0 - std::pow(2.0, -omega_tau));
}

Kernel Kernel::hilbert(double c_k, double omega_c, double omega_tau) {
    Kernel k;
    k.kind = Kind::Hilbert;
    k.c_k = c_k;
    k.omega_c = omega_c;
    k.omega_tau = omega_tau;
    return k;
}

Kernel Kernel::smooth(double scale, double c_k, double omega_c,
                      double omega_tau) {
    Kernel k;
    k.kind = Kind::Smooth;
    k.smooth_scale = scale;
    k.c_k = c_k;
    k.omega_c = omega_c;
    k.omega_tau = omega_tau;
    return k;
}

FunctionSample::FunctionSample(const AtomicMeasure& mu,
                               std::vector<double> vals)
    : values(std::move(vals)) {
    if (values.size() != mu.size())
        throw ConfigError("function sample: length does not match atom count");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw ConfigError("function sample: non-finite value");
        l1_norm += std::abs(values[i]) * mu.mass(i);
    }
}

FunctionSample restrict_to_ball(const AtomicMeasure& mu,
                                const FunctionSample& f, const Ball& ball) {
    std::vector<double> vals(mu.size(), 0.0);
    auto [lo, hi] = mu.ball_range(ball);
    for (std::size_t i = lo; i < hi; ++i) vals[i] = f.values[i];
    return FunctionSample(mu, std::move(vals));
}

double truncated(const Kernel& k, const AtomicMeasure& mu,
                 const FunctionSample& f, double x, double eps) {
    if (eps < mu.resolution_floor())
        throw ConfigError("truncated: eps below the resolution floor");
    double sum = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double y = mu.position(i);
        if (std::abs(x - y) > eps) sum += k.eval(x, y) * f.values[i] * mu.mass(i);
    }
    return sum;
}

double max_truncation(const Kernel& k, const AtomicMeasure& mu,
                      const FunctionSample& f, double x) {
    // Distance-sorted suffix sums visit exactly the achievable truncation
    // tails: eps in [h, infinity) realizes the sets {|x-y| >= d} for each
    // distinct atom distance d > h, plus the empty tail.
    const double h = mu.resolution_floor();
    struct Term {
        double d;
        double v;
    };
    std::vector<Term> terms;
    terms.reserve(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double d = std::abs(x - mu.position(i));
        terms.push_back({d, k.eval(x, mu.position(i)) * f.values[i] * mu.mass(i)});
    }
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.d > b.d; });
    double best = 0.0;  // the empty tail
    double sum = 0.0;
    std::size_t i = 0;
    while (i < terms.size()) {
        const double d = terms[i].d;
        if (d <= h) break;
        while (i < terms.size() && terms[i].d == d) {
            sum += terms[i].v;
            ++i;
        }
        best = std::max(best, std::abs(sum));
    }
    return best;
}

double tail(const Kernel& k, const Lattice& lat, const FunctionSample& f,
            std::size_t atom, int cell_id) {
    const Cell& cell = lat.cell(cell_id);
    if (!cell.contains_atom(atom))
        throw ConfigError("tail: evaluation atom is not a member of the cell");
    const AtomicMeasure& mu = lat.measure();
    const double x = mu.position(atom);
    auto [lo, hi] = mu.ball_range(cell.dilated(30.0));
    double sum = 0.0;
    for (std::size_t i = 0; i < lo; ++i)
        sum += k.eval(x, mu.position(i)) * f.values[i] * mu.mass(i);
    for (std::size_t i = hi; i < mu.size(); ++i)
        sum += k.eval(x, mu.position(i)) * f.values[i] * mu.mass(i);
    return sum;
}

std::vector<double> grand_maximal_all(const Kernel& k, const Lattice& lat,
                                      const FunctionSample& f, int root_id) {
    const AtomicMeasure& mu = lat.measure();
    std::vector<double> out(mu.size(), 0.0);
    // G(P) = sup_{y in P} |F(y, P)|, then a running max down the tree.
    std::vector<std::pair<int, double>> stack{{root_id, 0.0}};
    while (!stack.empty()) {
        auto [id, inherited] = stack.back();
        stack.pop_back();
        const Cell& cell = lat.cell(id);
        double g = 0.0;
        for (std::size_t a = cell.atom_begin; a < cell.atom_end; ++a)
            g = std::max(g, std::abs(tail(k, lat, f, a, id)));
        const double running = std::max(inherited, g);
        if (cell.children.empty()) {
            for (std::size_t a = cell.atom_begin; a < cell.atom_end; ++a)
                out[a] = running;
        } else {
            for (int kid : cell.children) stack.push_back({kid, running});
        }
    }
    return out;
}

double grand_maximal(const Kernel& k, const Lattice& lat,
                     const FunctionSample& f, int root_id, std::size_t atom) {
    const Cell& root = lat.cell(root_id);
    if (!root.contains_atom(atom)) return 0.0;
    double best = 0.0;
    for (int id : lat.chain(atom)) {
        const Cell& cell = lat.cell(id);
        if (cell.level < root.level) continue;
        if (cell.atom_begin < root.atom_begin || cell.atom_end > root.atom_end)
            continue;
        for (std::size_t a = cell.atom_begin; a < cell.atom_end; ++a)
            best = std::max(best, std::abs(tail(k, lat, f, a, id)));
    }
    return best;
}

double maximal_lambda(const AtomicMeasure& mu,
                      const DominatingFunction& lambda,
                      const FunctionSample& f, double x) {
    const double h = mu.resolution_floor();
    // Candidate radii: h itself plus every atom distance above h. The
    // numerator is a right-continuous step function of R, so the sup over
    // each constancy interval sits at its left endpoint.
    struct Term {
        double d;
        double v;
    };
    std::vector<Term> terms;
    terms.reserve(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        terms.push_back(
            {std::abs(x - mu.position(i)), std::abs(f.values[i]) * mu.mass(i)});
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.d < b.d; });
    double best = 0.0;
    double acc = 0.0;
    std::size_t i = 0;
    // everything within radius h first
    while (i < terms.size() && terms[i].d <= h) acc += terms[i++].v;
    if (acc > 0.0) best = acc / lambda.eval(x, h);
    while (i < terms.size()) {
        const double d = terms[i].d;
        while (i < terms.size() && terms[i].d == d) acc += terms[i++].v;
        best = std::max(best, acc / lambda.eval(x, d));
    }
    return best;
}

double cell_average(const AtomicMeasure& mu, const FunctionSample& f,
                    const Cell& cell, double alpha) {
    auto [lo, hi] = mu.ball_range(cell.dilated(30.0));
    double num = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
        num += std::abs(f.values[i]) * mu.mass(i);
    return num / mu.ball_mass(cell.dilated(alpha));
}

std::vector<double> maximal_mu_all(const Lattice& lat,
                                   const FunctionSample& f) {
    const AtomicMeasure& mu = lat.measure();
    std::vector<double> out(mu.size(), 0.0);
    std::vector<double> cell_val(lat.cells.size(), 0.0);
    for (const Cell& c : lat.cells)
        cell_val[static_cast<std::size_t>(c.id)] =
            cell_average(mu, f, c, lat.params.alpha);
    for (std::size_t a = 0; a < mu.size(); ++a)
        for (int id : lat.chain(a))
            out[a] = std::max(out[a], cell_val[static_cast<std::size_t>(id)]);
    return out;
}

double maximal_mu(const Lattice& lat, const FunctionSample& f,
                  std::size_t atom) {
    double best = 0.0;
    for (int id : lat.chain(atom))
        best = std::max(
            best, cell_average(lat.measure(), f, lat.cell(id), lat.params.alpha));
    return best;
}

std::vector<double> localized_theta_maximal_all(const Lattice& lat,
                                                const FunctionSample& f,
                                                int root_id) {
    const AtomicMeasure& mu = lat.measure();
    const Cell& root = lat.cell(root_id);
    std::vector<double> out(mu.size(), 0.0);
    std::vector<std::pair<int, double>> stack{{root_id, 0.0}};
    while (!stack.empty()) {
        auto [id, inherited] = stack.back();
        stack.pop_back();
        const Cell& cell = lat.cell(id);
        const double v =
            cell.theta * cell_average(mu, f, cell, lat.params.alpha);
        const double running = std::max(inherited, v);
        if (cell.children.empty()) {
            for (std::size_t a = cell.atom_begin; a < cell.atom_end; ++a)
                out[a] = running;
        } else {
            for (int kid : cell.children) stack.push_back({kid, running});
        }
    }
    (void)root;
    return out;
}

double localized_theta_maximal(const Lattice& lat, const FunctionSample& f,
                               int root_id, std::size_t atom) {
    const Cell& root = lat.cell(root_id);
    if (!root.contains_atom(atom)) return 0.0;
    double best = 0.0;
    for (int id : lat.chain(atom)) {
        const Cell& cell = lat.cell(id);
        if (cell.level < root.level) continue;
        if (cell.atom_begin < root.atom_begin || cell.atom_end > root.atom_end)
            continue;
        best = std::max(best, cell.theta * cell_average(lat.measure(), f, cell,
                                                        lat.params.alpha));
    }
    return best;
}

std::vector<double> theta_maximal_global_all(const Lattice& lat,
                                             const FunctionSample& f) {
    return localized_theta_maximal_all(lat, f, lat.root_id);
}

KernelCheckReport verify_kernel(const Kernel& k, const AtomicMeasure& mu,
                                const DominatingFunction& lambda,
                                std::uint64_t seed, std::size_t samples) {
    KernelCheckReport rep;
    Rng rng(seed);
    const double h = mu.resolution_floor();
    const std::size_t n = mu.size();
    for (std::size_t s = 0; s < samples; ++s) {
        const double x = mu.position(rng.index(n));
        const double y = mu.position(rng.index(n));
        const double d = std::abs(x - y);
        if (d < h) continue;
        rep.max_size_ratio = std::max(
            rep.max_size_ratio, std::abs(k.eval(x, y)) * lambda.eval(x, d) / k.c_k);
        const double xp = mu.position(rng.index(n));
        const double dxxp = std::abs(x - xp);
        if (dxxp == 0.0 || dxxp >= 0.5 * d) continue;
        const double delta = std::abs(k.eval(x, y) - k.eval(xp, y)) +
                             std::abs(k.eval(y, x) - k.eval(y, xp));
        rep.max_smooth_ratio =
            std::max(rep.max_smooth_ratio,
                     delta * lambda.eval(x, d) / k.omega(dxxp / d));
    }
    const double tol = 1.0 + 1e-9;
    rep.pass = rep.max_size_ratio <= tol && rep.max_smooth_ratio <= tol;
    return rep;
}

TruncationComparisonReport
truncation_comparison_report(const Kernel& k, const Lattice& lat,
                             const DominatingFunction& lambda,
                             const FunctionSample& f) {
    TruncationComparisonReport rep;
    const AtomicMeasure& mu = lat.measure();
    rep.per_cell.assign(lat.cells.size(), 0.0);
    rep.min_nonzero_constant = std::numeric_limits<double>::infinity();
    for (const Cell& cell : lat.cells) {
        double worst = 0.0;
        for (std::size_t a = cell.atom_begin; a < cell.atom_end; ++a) {
            const double x = mu.position(a);
            const double ml = maximal_lambda(mu, lambda, f, x);
            if (ml == 0.0) continue;
            const double fq = tail(k, lat, f, a, cell.id);
            for (double factor : {1.0, 30.0, 60.0}) {
                const double r = factor * cell.radius;
                if (r < mu.resolution_floor()) continue;
                const double diff = std::abs(truncated(k, mu, f, x, r) - fq);
                worst = std::max(worst, diff / (k.c_k * ml));
            }
        }
        rep.per_cell[static_cast<std::size_t>(cell.id)] = worst;
        rep.max_constant = std::max(rep.max_constant, worst);
        if (worst > 0.0)
            rep.min_nonzero_constant = std::min(rep.min_nonzero_constant, worst);
    }
    if (!std::isfinite(rep.min_nonzero_constant)) rep.min_nonzero_constant = 0.0;
    return rep;
}

double n_tsharp_constant(const Kernel& k, const Lattice& lat,
                         const DominatingFunction& lambda,
                         const FunctionSample& f, int root_id) {
    const AtomicMeasure& mu = lat.measure();
    const Cell& root = lat.cell(root_id);
    const std::vector<double> n_vals = grand_maximal_all(k, lat, f, root_id);
    double worst = 0.0;
    const double scale = k.dini_norm() + k.c_k;
    for (std::size_t a = root.atom_begin; a < root.atom_end; ++a) {
        const double x = mu.position(a);
        const double ml = maximal_lambda(mu, lambda, f, x);
        const double diff = std::abs(n_vals[a] - max_truncation(k, mu, f, x));
        if (ml == 0.0) continue;
        worst = std::max(worst, diff / (scale * ml));
    }
    return worst;
}

double consecutive_scales_constant(const Kernel& k, const Lattice& lat,
                                   const FunctionSample& f) {
    const AtomicMeasure& mu = lat.measure();
    double worst = 0.0;
    for (const Cell& cell : lat.cells) {
        if (cell.parent < 0) continue;
        const Cell& par = lat.cell(cell.parent);
        const double bound =
            par.theta * cell_average(mu, f, par, lat.params.alpha);
        if (bound == 0.0) continue;
        auto [plo, phi] = mu.ball_range(par.dilated(30.0));
        auto [clo, chi] = mu.ball_range(cell.dilated(30.0));
        for (std::size_t a = cell.atom_begin; a < cell.atom_end; ++a) {
            const double x = mu.position(a);
            double integral = 0.0;
            for (std::size_t i = plo; i < phi; ++i) {
                if (i >= clo && i < chi) continue;
                integral += std::abs(k.eval(x, mu.position(i))) *
                            std::abs(f.values[i]) * mu.mass(i);
            }
            worst = std::max(worst, integral / bound);
        }
    }
    return worst;
}

double weak11_constant(const AtomicMeasure& mu,
                       const std::vector<double>& maximal_values,
                       double l1_norm) {
    if (l1_norm <= 0.0) return 0.0;
    std::vector<double> levels = maximal_values;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    double worst = 0.0;
    for (double t : levels) {
        if (t <= 0.0) continue;
        double mass = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            if (maximal_values[i] >= t) mass += mu.mass(i);
        worst = std::max(worst, t * mass / l1_norm);
    }
    return worst;
}

} // namespace nhsl
