#include "nhsl/lattice.hpp"

#include "nhsl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nhsl {

void LatticeParams::validate() const {
    if (!(C0 > 1.0))
        throw LatticeError("lattice params: C0 must exceed 1");
    if (!(A0 >= 10.0))
        throw LatticeError("lattice params: A0 must be at least 10");
    if (!(alpha > 1.0))
        throw LatticeError("lattice params: alpha must exceed 1");
    if (max_level < 1)
        throw LatticeError("lattice params: max_level must be positive");
    if (!relaxed) {
        if (!(A0 > 5000.0 * C0))
            throw LatticeError(
                "lattice params: strict mode requires A0 > 5000 * C0");
        if (!(alpha >= 200.0))
            throw LatticeError("lattice params: strict mode requires alpha >= 200");
    }
}

void LatticeParams::derive() {
    // largest l0 with 100^l0 <= C0 / alpha
    const double target = C0 / alpha;
    int l = static_cast<int>(std::floor(std::log(target) / std::log(100.0)));
    while (std::pow(100.0, l + 1) <= target) ++l;
    while (std::pow(100.0, l) > target) --l;
    l0 = l;
    if (relaxed) {
        const double base = std::pow(C0, -0.5 * static_cast<double>(l0));
        decay_base = std::min(base, 1.0);
    } else {
        decay_base = 0.01;
    }
}

LatticeParams LatticeParams::relaxed_defaults() {
    LatticeParams p;
    p.derive();
    return p;
}

LatticeParams LatticeParams::paper_defaults() {
    LatticeParams p;
    p.C0 = 2.0;
    p.A0 = 10001.0;
    p.alpha = 200.0;
    p.max_level = 2;
    p.relaxed = false;
    p.derive();
    return p;
}

std::vector<int> Lattice::chain(std::size_t atom) const {
    std::vector<int> out;
    out.reserve(atom_cell.size());
    for (const auto& level : atom_cell) out.push_back(level[atom]);
    return out;
}

std::vector<int> Lattice::subtree(int id) const {
    std::vector<int> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        out.push_back(cur);
        const auto& kids = cells[static_cast<std::size_t>(cur)].children;
        for (auto it = kids.rbegin(); it != kids.rend(); ++it)
            stack.push_back(*it);
    }
    return out;
}

std::vector<std::size_t> build_net(const AtomicMeasure& mu,
                                   double base_radius) {
    if (base_radius < mu.resolution_floor())
        throw LatticeError("build_net: base radius " +
                           std::to_string(base_radius) +
                           " below resolution floor " +
                           std::to_string(mu.resolution_floor()));
    std::vector<std::size_t> net;
    double last = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        // closed 5-dilates are disjoint iff centers are > 10 r apart
        if (mu.position(i) - last > 10.0 * base_radius) {
            net.push_back(i);
            last = mu.position(i);
        }
    }
    return net;
}

namespace {

// Where two extensions meet, given the left endpoint a moving right at
// speed va (cap a_cap) and the right endpoint b moving left at speed vb
// (cap b_cap). Returns the meeting coordinate, or NaN if they never touch.
double meeting_point(double a, double va, double a_cap, double b, double vb,
                     double b_cap) {
    const double gap = b - a;
    if (gap <= 0.0) return 0.5 * (a + b);
    const double ta = (a_cap - a) / va;  // time until a stops at its cap
    const double tb = (b - b_cap) / vb;
    const double t_meet = gap / (va + vb);
    if (t_meet <= std::min(ta, tb)) return a + va * t_meet;
    if (ta < tb) {
        // a caps first; b keeps moving toward the frozen endpoint
        if ((b - a_cap) / vb <= tb) return a_cap;
        return std::numeric_limits<double>::quiet_NaN();
    }
    if ((b_cap - a) / va <= ta) return b_cap;
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

Extension extend_intervals(const AtomicMeasure& mu,
                           const std::vector<std::size_t>& net,
                           double base_radius) {
    const double r = base_radius;
    const std::size_t n = net.size();
    Extension ext;
    ext.lo.resize(n);
    ext.hi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mu.position(net[i]);
        ext.lo[i] = x - 25.0 * r;  // cap positions; trimmed below
        ext.hi[i] = x + 25.0 * r;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double x = mu.position(net[i]);
        const double y = mu.position(net[i + 1]);
        const double a = x + 5.0 * r;  // right end of 5B(x)
        const double b = y - 5.0 * r;  // left end of 5B(y)
        // Equal speeds at a fixed level (the base balls share one radius).
        const double m =
            meeting_point(a, r, x + 25.0 * r, b, r, y - 25.0 * r);
        if (!std::isnan(m)) {
            ext.hi[i] = m;
            ext.lo[i + 1] = m;
        }
    }
    return ext;
}

std::vector<int> supervise(const AtomicMeasure& mu,
                           const std::vector<std::size_t>& fine_net,
                           const Extension& coarse_b4) {
    std::vector<int> sup(fine_net.size(), -1);
    for (std::size_t i = 0; i < fine_net.size(); ++i) {
        const double y = mu.position(fine_net[i]);
        for (std::size_t j = 0; j < coarse_b4.lo.size(); ++j) {
            // shared endpoints resolve to the left interval
            if (y >= coarse_b4.lo[j] && y <= coarse_b4.hi[j]) {
                sup[i] = static_cast<int>(j);
                break;
            }
        }
        if (sup[i] < 0)
            throw LatticeError("supervise: net point not covered by any B4 "
                               "interval (construction bug)");
    }
    for (std::size_t i = 0; i + 1 < sup.size(); ++i)
        if (sup[i] > sup[i + 1])
            throw LatticeError("supervise: non-monotone supervision");
    return sup;
}

DoublingClassification classify_doubling(const AtomicMeasure& mu,
                                         const Cell& cell,
                                         const LatticeParams& params) {
    DoublingClassification out;
    const double base = cell.base_radius;
    for (int j = 0;; ++j) {
        const double r = std::pow(100.0, j) * base;
        if (r > params.C0 * base) break;
        auto [lo, hi] = mu.ball_range({cell.center, r});
        if (lo < cell.atom_begin || hi > cell.atom_end) break;  // containment cap
        if (mu.ball_mass({cell.center, 100.0 * r}) <=
            params.C0 * mu.range_mass(lo, hi)) {
            out.doubling = true;
            out.radius = r;
            return out;
        }
    }
    out.doubling = false;
    out.radius = base;
    // Sample c geometrically in [1, C0] and record where the non-doubling
    // inequality mu(cB) <= mu(100 c B) / C0 fails.
    std::vector<double> cs{1.0};
    for (double c = 2.0; c < params.C0; c *= 2.5) cs.push_back(c);
    cs.push_back(params.C0);
    for (double c : cs) {
        const double small = mu.ball_mass({cell.center, c * base});
        const double large = mu.ball_mass({cell.center, 100.0 * c * base});
        if (small * params.C0 > large * (1.0 + 1e-12))
            out.violating_c.push_back(c);
    }
    return out;
}

double theta(const AtomicMeasure& mu, const DominatingFunction& lambda,
             const Cell& cell, double alpha) {
    const double r = alpha * cell.radius;
    if (r < mu.resolution_floor())
        throw LatticeError("theta: alpha * r(Q) below the resolution floor");
    return mu.ball_mass({cell.center, r}) / lambda.eval(cell.center, r);
}

Lattice build_lattice(std::shared_ptr<const AtomicMeasure> mu_ptr,
                      const DominatingFunction& lambda, LatticeParams params) {
    params.validate();
    params.derive();
    const AtomicMeasure& mu = *mu_ptr;

    Lattice lat;
    lat.params = params;
    lat.mu = mu_ptr;

    // Unit scale: level-0 base balls have this radius. Taking the support
    // diameter makes the level-0 net a single point whose ball already
    // contains every atom, so the root is doubling for any C0 > 1.
    const double diam = mu.diameter();
    lat.unit_scale =
        diam > 0.0 ? diam : std::max(1.0, 10.0 * mu.resolution_floor());

    int K = 0;
    while (K + 1 <= params.max_level &&
           lat.unit_scale * std::pow(params.A0, -(K + 1)) >=
               mu.resolution_floor())
        ++K;

    // Nets, extensions, supervision, top-down.
    lat.nets.resize(static_cast<std::size_t>(K) + 1);
    std::vector<Extension> exts(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        LevelNet& net = lat.nets[static_cast<std::size_t>(k)];
        net.base_radius = lat.unit_scale * std::pow(params.A0, -k);
        net.net_atoms = build_net(mu, net.base_radius);
        exts[static_cast<std::size_t>(k)] =
            extend_intervals(mu, net.net_atoms, net.base_radius);
        net.b4_lo = exts[static_cast<std::size_t>(k)].lo;
        net.b4_hi = exts[static_cast<std::size_t>(k)].hi;
        net.supervisor.assign(net.net_atoms.size(), -1);
        if (k > 0)
            net.supervisor = supervise(mu, net.net_atoms,
                                       exts[static_cast<std::size_t>(k - 1)]);
    }
    if (lat.nets[0].net_atoms.size() != 1)
        throw LatticeError("build_lattice: level 0 must be a single net point");

    // Cells bottom-up. Finest level: assign each atom to a B4 interval
    // (shared endpoints go left); coarser cells are unions over supervisees.
    lat.levels.assign(static_cast<std::size_t>(K) + 1, {});
    // per level, per net point: atom range
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> ranges(
        static_cast<std::size_t>(K) + 1);

    {
        const LevelNet& fin = lat.nets[static_cast<std::size_t>(K)];
        auto& rng = ranges[static_cast<std::size_t>(K)];
        rng.assign(fin.net_atoms.size(), {0, 0});
        std::size_t atom = 0;
        for (std::size_t j = 0; j < fin.net_atoms.size(); ++j) {
            const std::size_t begin = atom;
            while (atom < mu.size() && mu.position(atom) <= fin.b4_hi[j] &&
                   mu.position(atom) >= fin.b4_lo[j])
                ++atom;
            rng[j] = {begin, atom};
            if (begin == atom)
                throw LatticeError("build_lattice: empty finest-level cell");
        }
        if (atom != mu.size())
            throw LatticeError("build_lattice: finest level fails to cover");
    }
    for (int k = K - 1; k >= 0; --k) {
        const LevelNet& fine = lat.nets[static_cast<std::size_t>(k + 1)];
        auto& rng = ranges[static_cast<std::size_t>(k)];
        rng.assign(lat.nets[static_cast<std::size_t>(k)].net_atoms.size(),
                   {mu.size(), 0});
        const auto& fine_rng = ranges[static_cast<std::size_t>(k + 1)];
        for (std::size_t j = 0; j < fine.net_atoms.size(); ++j) {
            const int s = fine.supervisor[j];
            auto& r = rng[static_cast<std::size_t>(s)];
            r.first = std::min(r.first, fine_rng[j].first);
            r.second = std::max(r.second, fine_rng[j].second);
        }
        // Monotone supervision keeps every coarse cell contiguous; verify.
        std::size_t expect = 0;
        for (auto& r : rng) {
            if (r.first != expect || r.second < r.first)
                throw LatticeError("build_lattice: non-contiguous cell");
            expect = r.second;
        }
        if (expect != mu.size())
            throw LatticeError("build_lattice: level fails to partition");
    }

    // Materialize cells, link parents, classify, compute theta.
    std::vector<std::vector<int>> ids(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        const LevelNet& net = lat.nets[static_cast<std::size_t>(k)];
        ids[static_cast<std::size_t>(k)].resize(net.net_atoms.size());
        for (std::size_t j = 0; j < net.net_atoms.size(); ++j) {
            Cell c;
            c.id = static_cast<int>(lat.cells.size());
            c.level = k;
            c.center_atom = net.net_atoms[j];
            c.center = mu.position(c.center_atom);
            c.base_radius = net.base_radius;
            c.radius = net.base_radius;
            c.atom_begin = ranges[static_cast<std::size_t>(k)][j].first;
            c.atom_end = ranges[static_cast<std::size_t>(k)][j].second;
            c.mass = mu.range_mass(c.atom_begin, c.atom_end);
            ids[static_cast<std::size_t>(k)][j] = c.id;
            lat.cells.push_back(c);
            lat.levels[static_cast<std::size_t>(k)].push_back(c.id);
        }
    }
    for (int k = 1; k <= K; ++k) {
        const LevelNet& net = lat.nets[static_cast<std::size_t>(k)];
        for (std::size_t j = 0; j < net.net_atoms.size(); ++j) {
            const int id = ids[static_cast<std::size_t>(k)][j];
            const int pid =
                ids[static_cast<std::size_t>(k - 1)]
                   [static_cast<std::size_t>(net.supervisor[j])];
            lat.cells[static_cast<std::size_t>(id)].parent = pid;
            lat.cells[static_cast<std::size_t>(pid)].children.push_back(id);
        }
    }
    lat.root_id = ids[0][0];

    // Extents: span of the constituent finest-level B4 intervals.
    {
        const auto& fin_lo = lat.nets[static_cast<std::size_t>(K)].b4_lo;
        const auto& fin_hi = lat.nets[static_cast<std::size_t>(K)].b4_hi;
        const auto& fin_rng = ranges[static_cast<std::size_t>(K)];
        for (Cell& c : lat.cells) {
            // locate the finest B4 intervals covering the cell's atom range
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t j = 0; j < fin_rng.size(); ++j) {
                if (fin_rng[j].first >= c.atom_end ||
                    fin_rng[j].second <= c.atom_begin)
                    continue;
                lo = std::min(lo, fin_lo[j]);
                hi = std::max(hi, fin_hi[j]);
            }
            c.extent_lo = lo;
            c.extent_hi = hi;
        }
    }

    for (Cell& c : lat.cells) {
        const DoublingClassification dc = classify_doubling(mu, c, params);
        c.doubling = dc.doubling;
        c.radius = dc.radius;
        c.theta = theta(mu, lambda, c, params.alpha);
    }

    // Atom -> cell lookup per level.
    lat.atom_cell.assign(static_cast<std::size_t>(K) + 1,
                         std::vector<int>(mu.size(), -1));
    for (const Cell& c : lat.cells)
        for (std::size_t a = c.atom_begin; a < c.atom_end; ++a)
            lat.atom_cell[static_cast<std::size_t>(c.level)][a] = c.id;

    // Decay base for chain coefficients: strict constants pin it at 1/100;
    // in relaxed mode measure it on the non-doubling chains when any exist.
    if (params.relaxed) {
        double measured = 0.0;
        bool any = false;
        for (const auto& ch : find_nondoubling_chains(lat)) {
            if (ch.size() < 2) continue;
            const ThetaDecayReport rep = theta_decay_check(lat, ch, lambda);
            measured = std::max(measured, rep.measured_base);
            any = true;
        }
        if (any && measured > 0.0)
            lat.params.decay_base = std::min(measured, 1.0);
    }
    return lat;
}

ThetaDecayReport theta_decay_check(const Lattice& lat,
                                   const std::vector<int>& chain,
                                   const DominatingFunction& lambda) {
    if (chain.empty()) throw LatticeError("theta_decay_check: empty chain");
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const Cell& outer = lat.cell(chain[i]);
        const Cell& inner = lat.cell(chain[i + 1]);
        if (inner.atom_begin < outer.atom_begin ||
            inner.atom_end > outer.atom_end)
            throw LatticeError("theta_decay_check: chain is not nested");
    }
    for (std::size_t i = 1; i < chain.size(); ++i)
        if (lat.cell(chain[i]).doubling)
            throw LatticeError(
                "theta_decay_check: doubling cell after position 0");

    ThetaDecayReport rep;
    const Cell& head = lat.cell(chain[0]);
    const double theta0 =
        theta(lat.measure(), lambda, head, lat.params.alpha);
    rep.theoretical_base = std::min(
        std::pow(lat.params.C0, -0.5 * static_cast<double>(lat.params.l0)),
        1.0);
    // The decay lemma needs C0^(l0/2) > c_lambda^ceil(log2 A0); otherwise
    // the bound is reported, not asserted.
    const double lhs =
        std::pow(lat.params.C0, 0.5 * static_cast<double>(lat.params.l0));
    const double rhs =
        std::pow(lambda.c_lambda, std::ceil(std::log2(lat.params.A0)));
    rep.asserted = !lat.params.relaxed && lhs > rhs;

    rep.measured_base = 0.0;
    for (std::size_t k = 1; k < chain.size(); ++k) {
        const double th =
            theta(lat.measure(), lambda, lat.cell(chain[k]), lat.params.alpha);
        const double ratio = th / theta0;
        rep.ratios.push_back(ratio);
        rep.measured_base = std::max(
            rep.measured_base, std::pow(ratio, 1.0 / static_cast<double>(k)));
        rep.implied_constant = std::max(
            rep.implied_constant,
            ratio / std::pow(rep.theoretical_base, static_cast<double>(k)));
    }
    if (rep.ratios.empty()) {
        rep.measured_base = 1.0;
        rep.implied_constant = 1.0;
    }
    return rep;
}

std::vector<std::vector<int>> find_nondoubling_chains(const Lattice& lat) {
    std::vector<std::vector<int>> chains;
    for (const Cell& c : lat.cells) {
        if (c.doubling) continue;
        // chain heads: non-doubling cells whose parent is doubling or absent
        if (c.parent >= 0 && !lat.cell(c.parent).doubling) continue;
        // walk down through non-doubling children, taking the longest path
        std::vector<int> chain;
        int cur = c.id;
        while (cur >= 0) {
            chain.push_back(cur);
            int next = -1;
            std::size_t best_len = 0;
            for (int kid : lat.cell(cur).children) {
                if (lat.cell(kid).doubling) continue;
                std::size_t len = 1;
                int probe = kid;
                while (true) {
                    int deeper = -1;
                    for (int g : lat.cell(probe).children)
                        if (!lat.cell(g).doubling) { deeper = g; break; }
                    if (deeper < 0) break;
                    probe = deeper;
                    ++len;
                }
                if (len >= best_len) {
                    best_len = len;
                    next = kid;
                }
            }
            cur = next;
        }
        chains.push_back(std::move(chain));
    }
    std::sort(chains.begin(), chains.end(),
              [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return chains;
}

LatticeCheckReport check_lattice(const Lattice& lat) {
    LatticeCheckReport rep;
    const AtomicMeasure& mu = lat.measure();
    const LatticeParams& p = lat.params;
    std::ostringstream notes;

    // Per-level partition: contiguous ranges covering all atoms exactly.
    rep.partition_ok = true;
    for (const auto& level : lat.levels) {
        std::size_t expect = 0;
        for (int id : level) {
            const Cell& c = lat.cell(id);
            if (c.atom_begin != expect || c.atom_end <= c.atom_begin)
                rep.partition_ok = false;
            expect = c.atom_end;
        }
        if (expect != mu.size()) rep.partition_ok = false;
    }

    // Exact nesting: children partition the parent's range.
    rep.nesting_ok = true;
    for (const Cell& c : lat.cells) {
        if (c.children.empty()) continue;
        std::size_t expect = c.atom_begin;
        for (int kid : c.children) {
            const Cell& k = lat.cell(kid);
            if (k.atom_begin != expect) rep.nesting_ok = false;
            expect = k.atom_end;
        }
        if (expect != c.atom_end) rep.nesting_ok = false;
    }

    // 5B disjoint per level (closed balls).
    rep.disjoint_5b_ok = true;
    for (const auto& level : lat.levels) {
        for (std::size_t i = 0; i + 1 < level.size(); ++i) {
            const Cell& a = lat.cell(level[i]);
            const Cell& b = lat.cell(level[i + 1]);
            if (a.center + 5.0 * a.base_radius >=
                b.center - 5.0 * b.base_radius)
                rep.disjoint_5b_ok = false;
        }
    }

    rep.radius_range_ok = true;
    for (const Cell& c : lat.cells) {
        if (c.radius < c.base_radius * (1.0 - 1e-12) ||
            c.radius > p.C0 * c.base_radius * (1.0 + 1e-12))
            rep.radius_range_ok = false;
    }

    // Members are exactly the atoms inside the extent (shared endpoints to
    // the left cell).
    rep.membership_ok = true;
    for (const auto& level : lat.levels) {
        for (std::size_t i = 0; i < level.size(); ++i) {
            const Cell& c = lat.cell(level[i]);
            for (std::size_t a = c.atom_begin; a < c.atom_end; ++a) {
                const double x = mu.position(a);
                if (x < c.extent_lo || x > c.extent_hi)
                    rep.membership_ok = false;
            }
            if (c.atom_begin > 0 &&
                mu.position(c.atom_begin - 1) >= c.extent_lo)
                if (i == 0 || mu.position(c.atom_begin - 1) >
                                  lat.cell(level[i - 1]).extent_hi)
                    rep.membership_ok = false;
            if (c.atom_end < mu.size() &&
                mu.position(c.atom_end) <= c.extent_hi)
                rep.membership_ok = false;
        }
    }

    // Ball sandwich: W & B(Q) inside Q inside W & 28 B(Q).
    rep.sandwich_ok = true;
    rep.sandwich_dilate = 0.0;
    for (const Cell& c : lat.cells) {
        auto [blo, bhi] = mu.ball_range(c.ball());
        if (blo < c.atom_begin || bhi > c.atom_end) rep.sandwich_ok = false;
        double d = 0.0;
        for (std::size_t a : {c.atom_begin, c.atom_end - 1})
            d = std::max(d, std::abs(mu.position(a) - c.center) / c.radius);
        rep.sandwich_dilate = std::max(rep.sandwich_dilate, d);
        if (d > 28.0) rep.sandwich_ok = false;
    }

    // 30B(Q) inside 30B(parent).
    rep.nested_dilates_ok = true;
    for (const Cell& c : lat.cells) {
        if (c.parent < 0) continue;
        const Cell& par = lat.cell(c.parent);
        if (c.center - 30.0 * c.radius < par.center - 30.0 * par.radius ||
            c.center + 30.0 * c.radius > par.center + 30.0 * par.radius)
            rep.nested_dilates_ok = false;
    }

    rep.theta_ok = true;
    for (const Cell& c : lat.cells)
        if (!(c.theta > 0.0) || c.theta > 1.0 + 1e-12) rep.theta_ok = false;

    rep.doubling_flags_ok = true;
    rep.nondoubling_radius_ok = true;
    for (const Cell& c : lat.cells) {
        if (c.doubling) {
            if (mu.ball_mass(c.dilated(100.0)) >
                p.C0 * mu.ball_mass(c.ball()) * (1.0 + 1e-12))
                rep.doubling_flags_ok = false;
        } else if (c.radius != c.base_radius) {
            rep.nondoubling_radius_ok = false;
        }
    }

    notes << "cells=" << lat.cells.size() << " levels=" << lat.levels.size()
          << " max_sandwich_dilate=" << rep.sandwich_dilate;
    rep.notes.push_back(notes.str());
    return rep;
}

} // namespace nhsl
