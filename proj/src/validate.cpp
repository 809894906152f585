#include "thincyl/validate.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace thincyl {

namespace {

struct Worst {
    double value = 0.0;
    std::array<double, 3> where{};
    void consider(double v, double s, double x1, double t) {
        if (std::abs(v) > std::abs(value)) {
            value = v;
            where = {s, x1, t};
        }
    }
};

Vec linspace(double a, double b, int n) {
    Vec v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = a + (b - a) * i / static_cast<double>(n - 1);
    return v;
}

} // namespace

bool ValidationReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

const ConditionCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

ValidationReport validate_assumptions(const ModelConfig& cfg, int n, double s_max) {
    ValidationReport rep;
    const double l = cfg.length, T = cfg.horizon, d1 = cfg.delta1;
    const Vec ss = linspace(0.0, s_max, n);
    const Vec xs = linspace(0.0, l, n);
    const Vec ts = linspace(0.0, T, n);
    const auto& vel = cfg.velocity;
    const auto& phi = cfg.interaction;
    const auto& bnd = cfg.boundary;
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, std::min(cfg.grid.nxi, 16));
    const double zero_tol = 1e-12;

    auto add = [&](const std::string& name, bool pass, const Worst& w, const std::string& note) {
        rep.checks.push_back({name, pass, w.value, w.where, note});
    };

    { // (v_1): bounds on v1 and its s-weighted derivatives, and recording
        Worst neg, big;
        bool ok = true;
        for (double s : ss)
            for (double x : xs)
                for (double t : ts) {
                    const double v = vel.v1(s, x, t);
                    rep.C0 = std::max(rep.C0, v);
                    rep.C1 = std::max(rep.C1, std::abs(s * vel.dv1_ds(s, x, t)) +
                                                   std::abs(s * vel.d2v1_dss(s, x, t)));
                    if (v < -zero_tol) {
                        ok = false;
                        neg.consider(v, s, x, t);
                    }
                    if (!std::isfinite(v)) {
                        ok = false;
                        big.consider(v, s, x, t);
                    }
                }
        add("v1-bounds", ok, ok ? Worst{} : (neg.value != 0.0 ? neg : big),
            "0 <= v1 and finite s-weighted derivatives on the sample grid");
    }

    { // A1: transversal velocity vanishes near both ends
        Worst w;
        bool ok = true;
        if (!vel.vbar_zero) {
            for (double x : xs) {
                if (x > d1 && x < l - d1) continue;
                for (double t : ts)
                    for (const auto& node : mesh.nodes) {
                        const auto v = vel.vbar(x, node[0], node[1], t);
                        const double mag = std::hypot(v[0], v[1]);
                        if (mag > zero_tol) {
                            ok = false;
                            w.consider(mag, 0.0, x, t);
                        }
                    }
            }
        }
        add("A1-vbar-support", ok, w, "v2, v3 vanish for x1 in [0,delta1] u [l-delta1,l]");
    }

    { // A2: x-independence near the left end, s-independence and floor at the right
        Worst w;
        bool ok = true;
        for (double s : ss)
            for (double x : xs) {
                if (x > d1) continue;
                for (double t : ts) {
                    if (t > d1) continue;
                    const double diff = vel.v1(s, x, t) - vel.v1(s, 0.0, t);
                    if (std::abs(diff) > zero_tol) {
                        ok = false;
                        w.consider(diff, s, x, t);
                    }
                }
            }
        rep.sigma0 = std::numeric_limits<double>::infinity();
        for (double s : ss)
            for (double x : xs) {
                if (x < l - d1) continue;
                for (double t : ts) {
                    const double v = vel.v1(s, x, t);
                    const double diff = v - vel.v1(0.0, l, t);
                    rep.sigma0 = std::min(rep.sigma0, v);
                    if (std::abs(diff) > zero_tol) {
                        ok = false;
                        w.consider(diff, s, x, t);
                    }
                }
            }
        if (!(rep.sigma0 > 0.0)) {
            ok = false;
            w.consider(rep.sigma0, 0.0, l, 0.0);
        }
        add("A2-structure", ok, w,
            "v1 x1-independent near the left end; v1 = v1(t) >= sigma0 > 0 at the right end");
    }

    { // A3: interaction support and growth
        Worst w;
        bool ok = true;
        for (double s : ss)
            for (double x : xs)
                for (double t : ts) {
                    double bmax = 0.0, smax_dev = 0.0;
                    for (const auto& e : mesh.bedges) {
                        const double p = phi.phi(s, x, e.mid[0], e.mid[1], t);
                        rep.C4 = std::max(rep.C4, std::abs(phi.dphi_ds(s, x, e.mid[0], e.mid[1], t)));
                        const double growth =
                            std::abs(p) + std::abs(phi.dphi_dx1(s, x, e.mid[0], e.mid[1], t)) +
                            std::abs(phi.dphi_dt(s, x, e.mid[0], e.mid[1], t));
                        if (s >= 1.0) rep.C2 = std::max(rep.C2, growth / s);
                        else rep.C3 = std::max(rep.C3, growth);
                        bmax = std::max(bmax, std::abs(p));
                        smax_dev = std::max(
                            smax_dev, std::abs(p - phi.phi(0.0, x, e.mid[0], e.mid[1], t)));
                    }
                    if (x <= d1 && bmax > zero_tol) {
                        ok = false;
                        w.consider(bmax, s, x, t);
                    }
                    if (x >= l - d1 && smax_dev > zero_tol) {
                        ok = false;
                        w.consider(smax_dev, s, x, t);
                    }
                }
        add("A3-interaction-support", ok, w,
            "phi vanishes for x1 <= delta1 and is s-independent for x1 >= l - delta1");
    }

    { // A4: nonnegative Dirichlet datum
        Worst w;
        bool ok = true;
        for (double t : ts) {
            const double q = bnd.q(t);
            if (q < -zero_tol) {
                ok = false;
                w.consider(q, 0.0, l, t);
            }
        }
        add("A4-boundary-datum", ok, w, "q_l >= 0 on [0, T]");
    }

    { // matching conditions at t = 0 (zero and first order)
        Worst w;
        bool ok = true;
        if (std::abs(bnd.q(0.0)) > zero_tol) { ok = false; w.consider(bnd.q(0.0), 0, l, 0); }
        if (std::abs(bnd.dq(0.0)) > zero_tol) { ok = false; w.consider(bnd.dq(0.0), 0, l, 0); }
        for (double s : ss)
            for (double x : xs)
                for (const auto& e : mesh.bedges) {
                    const double p = phi.phi(s, x, e.mid[0], e.mid[1], 0.0);
                    if (std::abs(p) > zero_tol) {
                        ok = false;
                        w.consider(p, s, x, 0.0);
                    }
                }
        add("A5-matching", ok, w, "q(0) = q'(0) = 0 and phi|t=0 = 0");
    }

    { // second-order matching: time derivatives of phi vanish at t = 0
        Worst w;
        bool ok = true;
        for (double s : ss)
            for (double x : xs)
                for (const auto& e : mesh.bedges) {
                    const double p1 = phi.dphi_dt(s, x, e.mid[0], e.mid[1], 0.0);
                    const double p2 = phi.d2phi_dtt(s, x, e.mid[0], e.mid[1], 0.0);
                    if (std::abs(p1) > zero_tol || std::abs(p2) > zero_tol) {
                        ok = false;
                        w.consider(std::abs(p1) + std::abs(p2), s, x, 0.0);
                    }
                }
        add("second-order-matching", ok, w, "dphi/dt and d2phi/dt2 vanish at t = 0");
    }

    { // third-order matching for the second layer term
        Worst w;
        const double q2 = bnd.d2q(0.0);
        const bool ok = std::abs(q2) <= zero_tol;
        if (!ok) w.consider(q2, 0.0, l, 0.0);
        add("third-order-matching", ok, w, "q''(0) = 0");
    }

    { // inflow speed positivity for the characteristic fan
        Worst w;
        bool ok = true;
        for (double s : ss)
            for (double t : ts) {
                const double lam = vel.v1(s, 0.0, t) + s * vel.dv1_ds(s, 0.0, t);
                if (lam <= 0.0) {
                    ok = false;
                    w.consider(lam, s, 0.0, t);
                }
            }
        add("inflow-speed-positive", ok, w, "v1 + s dv1/ds > 0 at x1 = 0");
    }

    { // nonnegativity cone: phi-hat <= 0 and dv1/dx1 <= 0 for s >= 0
        Worst w;
        bool ok = true;
        const double ratio = mesh.phi_ratio;
        for (double s : ss)
            for (double x : xs)
                for (double t : ts) {
                    double hat = phi.phi_mean_part(s, x, t) * ratio;
                    if (!phi.xi_independent) {
                        double acc = 0.0;
                        for (const auto& e : mesh.bedges)
                            acc += e.length * phi.phi(s, x, e.mid[0], e.mid[1], t);
                        hat = acc * mesh.bquad_scale / mesh.area;
                    }
                    const double dv = vel.dv1_dx1(s, x, t);
                    if (hat > zero_tol) {
                        ok = false;
                        w.consider(hat, s, x, t);
                    }
                    if (dv > zero_tol) {
                        ok = false;
                        w.consider(dv, s, x, t);
                    }
                }
        add("nonnegativity-cone", ok, w, "phi-hat <= 0 and dv1/dx1 <= 0 on s >= 0");
    }

    { // supported diffusion scalings
        Worst w;
        const bool ok = cfg.beta == 1.0 || cfg.beta >= 3.0;
        if (!ok) w.consider(cfg.beta, 0, 0, 0);
        add("beta-range", ok, w, "beta = 1 or beta >= 3 (intermediate range unsupported)");
    }

    { // layer domain long enough for the certified decay
        Worst w;
        const double tail = rep.sigma0 > 0.0 ? std::exp(-rep.sigma0 * cfg.grid.lzeta) : 1.0;
        const bool ok = tail < 1e-10;
        if (!ok) w.consider(tail, 0, l, 0);
        add("layer-domain-length", ok, w, "exp(-sigma0 lzeta) < 1e-10");
    }

    return rep;
}

std::string format_report(const ValidationReport& rep) {
    std::ostringstream os;
    for (const auto& c : rep.checks) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-26s %s  worst=%+.3e at (s=%.3g, x1=%.3g, t=%.3g)\n",
                      c.name.c_str(), c.pass ? "PASS" : "FAIL", c.worst_value, c.worst_sample[0],
                      c.worst_sample[1], c.worst_sample[2]);
        os << buf;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "constants: C0=%.4g C1=%.4g C2=%.4g C3=%.4g C4=%.4g sigma0=%.4g\n", rep.C0,
                  rep.C1, rep.C2, rep.C3, rep.C4, rep.sigma0);
    os << buf;
    return os.str();
}

} // namespace thincyl
