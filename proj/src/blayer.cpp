#include "thincyl/blayer.hpp"

#include <algorithm>
#include <cmath>

namespace thincyl {

namespace {

double interp_axis(const UniformAxis& ax, const Vec& f, double t) {
    return interp_cubic(ax, f.data(), std::clamp(t, ax.origin,
                                                 ax.origin + ax.step * double(ax.count - 1)));
}

} // namespace

double LayerData::v1_right(double t) const { return cfg->velocity.v1(0.0, cfg->length, t); }

double LayerData::dv1_right(double t) const {
    const double T = cfg->horizon;
    const double h = 1e-3 * T;
    // five-point first derivative, shifted to stay inside [0, T]
    double base = std::clamp(t - 2.0 * h, 0.0, T - 4.0 * h);
    const double idx = (t - base) / h;
    Vec f(5);
    for (int j = 0; j < 5; ++j) f[j] = v1_right(base + h * j);
    const std::size_t i = static_cast<std::size_t>(std::clamp(std::llround(idx), 0ll, 4ll));
    double acc = 0.0;
    for (const auto& s : deriv1_stencil(i, 5, h))
        acc += s.weight * f[static_cast<std::size_t>(static_cast<long>(i) + s.offset)];
    return acc;
}

double LayerData::Phi0(double t) const { return interp_axis(t_limit, phi0, t); }
double LayerData::dPhi0(double t) const { return interp_axis(t_limit, dphi0, t); }
double LayerData::hatPhi1(double t) const { return interp_axis(t_limit, hat_phi1, t); }

double LayerData::kappa0() const {
    const double l1 = basis->lambda[1];
    return 0.5 * sigma0 + std::sqrt(0.25 * sigma0 * sigma0 + l1);
}

LayerData make_layer_data(const ModelConfig& cfg, const LimitSolution& lim, const W1Solution& w1,
                          const CellField& u1, const CellField& u2,
                          const NeumannEigenbasis& basis) {
    LayerData d;
    d.cfg = &cfg;
    d.mesh = u1.mesh;
    d.basis = &basis;
    d.t_limit = lim.w0.taxis();
    const std::size_t iright = lim.w0.nx() - 1;
    d.phi0.resize(d.t_limit.count);
    d.dphi0.resize(d.t_limit.count);
    d.hat_phi1.resize(d.t_limit.count);
    for (std::size_t k = 0; k < d.t_limit.count; ++k) {
        const double t = d.t_limit.step * static_cast<double>(k);
        d.phi0[k] = cfg.boundary.q(t) - lim.w0.at(iright, k);
        d.dphi0[k] = cfg.boundary.dq(t) - lim.dw0_dt.at(iright, k);
        d.hat_phi1[k] = -w1.w1.at(iright, k);
    }
    d.t_cell = u1.tparams;
    const std::size_t ixc = u1.xparams.count - 1;
    d.phi1_tilde.resize(d.t_cell.count);
    d.phi2.resize(d.t_cell.count);
    for (std::size_t k = 0; k < d.t_cell.count; ++k) {
        const Vec& s1 = u1.at(ixc, k);
        const Vec& s2 = u2.at(ixc, k);
        d.phi1_tilde[k].resize(s1.size());
        d.phi2[k].resize(s2.size());
        for (std::size_t j = 0; j < s1.size(); ++j) {
            d.phi1_tilde[k][j] = -s1[j];
            d.phi2[k][j] = -s2[j];
        }
    }
    d.sigma0 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < d.t_limit.count; ++k)
        d.sigma0 = std::min(d.sigma0, d.v1_right(d.t_limit.step * static_cast<double>(k)));
    if (!(d.sigma0 > 0.0)) throw NumericError("make_layer_data: right-end speed not positive");
    return d;
}

double pi0_eval(double zeta, double t, const LayerData& d) {
    return d.Phi0(t) * std::exp(-d.v1_right(t) * zeta);
}

double pi1_hat_eval(double zeta, double t, const LayerData& d) {
    const double v = d.v1_right(t), dv = d.dv1_right(t);
    const double p0 = d.Phi0(t), dp0 = d.dPhi0(t);
    const double lin = p0 * dv / (v * v) - dp0 / v;
    const double quad = p0 * dv / (2.0 * v);
    return (d.hatPhi1(t) + lin * zeta + quad * zeta * zeta) * std::exp(-v * zeta);
}

void BoundaryLayerTerm::build_ring_views() {
    if (!data_->mesh->is_disk) return;
    const std::size_t P = data_->basis->lambda.size() - 1;
    theta_ring_.resize(P + 1);
    for (std::size_t p = 0; p <= P; ++p)
        theta_ring_[p] = data_->mesh->ring_average(data_->basis->theta[p]);
    tail_ring_.resize(tail_.size());
    for (std::size_t k = 0; k < tail_.size(); ++k)
        tail_ring_[k] = data_->mesh->ring_average(tail_[k]);
}

double BoundaryLayerTerm::mode_coef(std::size_t p, double zeta, double t) const {
    if (analytic_) {
        const double v = data_->v1_right(t);
        const double kappa = 0.5 * v + std::sqrt(0.25 * v * v + data_->basis->lambda[p]);
        return interp_axis(data_->t_cell, a_[p], t) * std::exp(-kappa * zeta);
    }
    if (zeta >= lzeta_) return 0.0;
    return modes_[p].value(zeta, std::clamp(t, 0.0, data_->t_cell.step *
                                                      double(data_->t_cell.count - 1)));
}

double BoundaryLayerTerm::mode_coef_dz(std::size_t p, double zeta, double t) const {
    if (analytic_) {
        const double v = data_->v1_right(t);
        const double kappa = 0.5 * v + std::sqrt(0.25 * v * v + data_->basis->lambda[p]);
        return -kappa * interp_axis(data_->t_cell, a_[p], t) * std::exp(-kappa * zeta);
    }
    if (zeta >= lzeta_) return 0.0;
    return modes_[p].ddx(zeta, std::clamp(t, 0.0, data_->t_cell.step *
                                                    double(data_->t_cell.count - 1)));
}

double BoundaryLayerTerm::mean_value(double zeta, double t) const {
    if (analytic_) return 0.0;
    if (zeta >= lzeta_) return 0.0;
    return mean_.value(zeta,
                       std::clamp(t, 0.0, data_->t_cell.step * double(data_->t_cell.count - 1)));
}

double BoundaryLayerTerm::tail_shape(double zeta, double t) const {
    const double v = data_->v1_right(t);
    const double kappa = 0.5 * v + std::sqrt(0.25 * v * v + tail_lambda_);
    return std::exp(-kappa * zeta);
}

double BoundaryLayerTerm::tail_at(int node, double t) const {
    const UniformAxis& ax = data_->t_cell;
    const double tc = std::clamp(t, 0.0, ax.step * double(ax.count - 1));
    Vec curve(ax.count);
    for (std::size_t k = 0; k < ax.count; ++k) curve[k] = tail_[k][static_cast<std::size_t>(node)];
    return interp_axis(ax, curve, tc);
}

double BoundaryLayerTerm::value_node(double zeta, int node, double t) const {
    if (zeta >= lzeta_) return 0.0;
    double acc = mean_value(zeta, t);
    const std::size_t P = data_->basis->lambda.size() - 1;
    for (std::size_t p = 1; p <= P; ++p)
        acc += mode_coef(p, zeta, t) *
               data_->basis->theta[p][static_cast<std::size_t>(node)];
    acc += tail_at(node, t) * tail_shape(zeta, t);
    return acc;
}

void BoundaryLayerTerm::values_all_nodes(double zeta, double t, Vec& out) const {
    const std::size_t n = data_->mesh->nodes.size();
    out.assign(n, 0.0);
    if (zeta >= lzeta_) return;
    const double mean = mean_value(zeta, t);
    const std::size_t P = data_->basis->lambda.size() - 1;
    Vec coefs(P + 1, 0.0);
    for (std::size_t p = 1; p <= P; ++p) coefs[p] = mode_coef(p, zeta, t);
    const double ts = tail_shape(zeta, t);
    // time-interpolated tail slice
    const UniformAxis& ax = data_->t_cell;
    const double tc = std::clamp(t, 0.0, ax.step * double(ax.count - 1));
    for (std::size_t j = 0; j < n; ++j) {
        double acc = mean;
        for (std::size_t p = 1; p <= P; ++p) acc += coefs[p] * data_->basis->theta[p][j];
        out[j] = acc;
    }
    Vec unit(ax.count, 0.0), wt(ax.count, 0.0);
    for (std::size_t k = 0; k < ax.count; ++k) {
        unit[k] = 1.0;
        wt[k] = interp_cubic(ax, unit.data(), tc);
        unit[k] = 0.0;
    }
    for (std::size_t k = 0; k < ax.count; ++k) {
        if (wt[k] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) out[j] += wt[k] * ts * tail_[k][j];
    }
}

namespace {

Vec interp_ring_slices(const UniformAxis& ax, const std::vector<Vec>& slices, double t) {
    const double tc = std::clamp(t, 0.0, ax.step * double(ax.count - 1));
    Vec unit(ax.count, 0.0);
    Vec out(slices.front().size(), 0.0);
    for (std::size_t k = 0; k < ax.count; ++k) {
        unit[k] = 1.0;
        const double w = interp_cubic(ax, unit.data(), tc);
        unit[k] = 0.0;
        if (w == 0.0) continue;
        for (std::size_t g = 0; g < out.size(); ++g) out[g] += w * slices[k][g];
    }
    return out;
}

} // namespace

Vec BoundaryLayerTerm::ring_values(double zeta, double t) const {
    if (theta_ring_.empty()) {
        Vec nodal;
        values_all_nodes(zeta, t, nodal);
        return data_->mesh->ring_average(nodal);
    }
    const std::size_t P = data_->basis->lambda.size() - 1;
    const std::size_t rings = theta_ring_[0].size();
    Vec out(rings, 0.0);
    if (zeta >= lzeta_) return out;
    const double mean = mean_value(zeta, t);
    for (std::size_t g = 0; g < rings; ++g) out[g] = mean;
    for (std::size_t p = 1; p <= P; ++p) {
        const double c = mode_coef(p, zeta, t);
        if (c == 0.0) continue;
        for (std::size_t g = 0; g < rings; ++g) out[g] += c * theta_ring_[p][g];
    }
    const Vec tail = interp_ring_slices(data_->t_cell, tail_ring_, t);
    const double ts = tail_shape(zeta, t);
    for (std::size_t g = 0; g < rings; ++g) out[g] += ts * tail[g];
    return out;
}

Vec BoundaryLayerTerm::ring_values_dz(double zeta, double t) const {
    const std::size_t rings = theta_ring_.empty() ? data_->mesh->ring_nodes.size()
                                                  : theta_ring_[0].size();
    Vec out(rings, 0.0);
    if (zeta >= lzeta_ || theta_ring_.empty()) return out;
    const std::size_t P = data_->basis->lambda.size() - 1;
    double dmean = 0.0;
    if (!analytic_) {
        const double tc =
            std::clamp(t, 0.0, data_->t_cell.step * double(data_->t_cell.count - 1));
        dmean = mean_.ddx(zeta, tc);
    }
    for (std::size_t g = 0; g < rings; ++g) out[g] = dmean;
    for (std::size_t p = 1; p <= P; ++p) {
        const double c = mode_coef_dz(p, zeta, t);
        if (c == 0.0) continue;
        for (std::size_t g = 0; g < rings; ++g) out[g] += c * theta_ring_[p][g];
    }
    const Vec tail = interp_ring_slices(data_->t_cell, tail_ring_, t);
    const double v = data_->v1_right(t);
    const double kappa = 0.5 * v + std::sqrt(0.25 * v * v + tail_lambda_);
    const double ts = -kappa * tail_shape(zeta, t);
    for (std::size_t g = 0; g < rings; ++g) out[g] += ts * tail[g];
    return out;
}

double BoundaryLayerTerm::max_abs(double zeta) const {
    double worst = 0.0;
    Vec nodal;
    for (std::size_t k = 0; k < data_->t_cell.count; ++k) {
        values_all_nodes(zeta, data_->t_cell.step * static_cast<double>(k), nodal);
        for (double v : nodal) worst = std::max(worst, std::abs(v));
    }
    return worst;
}

BoundaryLayerTerm pi1_tilde_build(const LayerData& data) {
    const auto& basis = *data.basis;
    if (basis.lambda.size() < 2) throw NumericError("pi1_tilde_build: basis too small");
    BoundaryLayerTerm term;
    term.data_ = &data;
    term.analytic_ = true;
    term.lzeta_ = data.cfg->grid.lzeta;
    const std::size_t P = basis.lambda.size() - 1;
    const std::size_t nt = data.t_cell.count;
    term.a_.assign(P + 1, Vec(nt, 0.0));
    term.tail_.assign(nt, Vec(data.mesh->nodes.size(), 0.0));
    for (std::size_t k = 0; k < nt; ++k) {
        Vec residual = data.phi1_tilde[k];
        for (std::size_t p = 1; p <= P; ++p) {
            const double ap = inner_l2(*data.mesh, data.phi1_tilde[k], basis.theta[p]);
            term.a_[p][k] = ap;
            for (std::size_t j = 0; j < residual.size(); ++j) residual[j] -= ap * basis.theta[p][j];
        }
        // remove the (zero) mean component as well so the tail is pure remainder
        const double a0 = inner_l2(*data.mesh, data.phi1_tilde[k], basis.theta[0]);
        for (std::size_t j = 0; j < residual.size(); ++j) residual[j] -= a0 * basis.theta[0][j];
        term.tail_[k] = std::move(residual);
        term.tail_bound_ = std::max(term.tail_bound_, std::abs(term.a_[P][k]));
    }
    term.tail_lambda_ = basis.lambda[P];
    term.kappa_certified_ = data.kappa0();
    term.build_ring_views();
    return term;
}

namespace {

// X'' - mu X = r on [0, L], X(0) = b, X -> 0; exponential-kernel recursions
// (exact for piecewise-linear r)
Vec solve_decaying_mode(double mu, const Vec& r, double b, double h) {
    const std::size_t n = r.size();
    const double kappa = std::sqrt(mu);
    const double E = std::exp(-kappa * h);
    const double J0 = (1.0 - E) / kappa;
    const double J1 = (1.0 - E * (1.0 + kappa * h)) / (kappa * kappa);
    const double wa = J1 / h, wb = J0 - J1 / h;
    Vec Im(n, 0.0), Ip(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) Im[j] = E * Im[j - 1] + wa * r[j - 1] + wb * r[j];
    for (std::size_t j = n - 1; j-- > 0;) Ip[j] = E * Ip[j + 1] + wb * r[j] + wa * r[j + 1];
    Vec X(n);
    const double xpart0 = -(Im[0] + Ip[0]) / (2.0 * kappa);
    for (std::size_t j = 0; j < n; ++j) {
        const double xp = -(Im[j] + Ip[j]) / (2.0 * kappa);
        X[j] = (b - xpart0) * std::exp(-kappa * h * static_cast<double>(j)) + xp;
    }
    return X;
}

// X'' + v X' = r on [0, L], X(0) = b, X -> 0
Vec solve_mean_mode(double v, const Vec& r, double b, double h) {
    const std::size_t n = r.size();
    const double E = std::exp(-v * h);
    const double J0 = (1.0 - E) / v;
    const double J1 = (1.0 - E * (1.0 + v * h)) / (v * v);
    const double wa = J1 / h, wb = J0 - J1 / h;
    Vec Im(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) Im[j] = E * Im[j - 1] + wa * r[j - 1] + wb * r[j];
    double rint = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) rint += 0.5 * h * (r[j] + r[j + 1]);
    const double g0 = -v * b - rint;
    Vec X(n);
    X[0] = b;
    double gprev = g0;
    for (std::size_t j = 1; j < n; ++j) {
        const double g = std::exp(-v * h * static_cast<double>(j)) * g0 + Im[j];
        X[j] = X[j - 1] + 0.5 * h * (gprev + g);
        gprev = g;
    }
    return X;
}

} // namespace

BoundaryLayerTerm pi2_build(const LayerData& data, const BoundaryLayerTerm& pi1t) {
    const auto& basis = *data.basis;
    const std::size_t P = basis.lambda.size() - 1;
    const std::size_t nt = data.t_cell.count;
    const double L = data.cfg->grid.lzeta;
    const std::size_t nz = 1201;
    const double h = L / static_cast<double>(nz - 1);
    const UniformAxis zax{0.0, h, nz};

    BoundaryLayerTerm term;
    term.data_ = &data;
    term.analytic_ = false;
    term.lzeta_ = L;
    term.tail_lambda_ = basis.lambda[P];
    term.mean_ = GridField2D(zax, data.t_cell);
    term.modes_.assign(P + 1, GridField2D());
    for (std::size_t p = 1; p <= P; ++p) term.modes_[p] = GridField2D(zax, data.t_cell);
    term.tail_.assign(nt, Vec(data.mesh->nodes.size(), 0.0));

    // time-derivative stencils on the cell grid; the t = 0 slice of the
    // right-hand side vanishes when the matching conditions hold
    auto time_derivative = [&](std::size_t k, auto&& sample) {
        Vec out(nz, 0.0);
        if (k == 0 && data.matched) return out;
        for (const auto& s : deriv1_stencil(k, nt, data.t_cell.step)) {
            const std::size_t kk = static_cast<std::size_t>(static_cast<long>(k) + s.offset);
            const double t = data.t_cell.step * static_cast<double>(kk);
            for (std::size_t j = 0; j < nz; ++j)
                out[j] += s.weight * sample(h * static_cast<double>(j), t, kk);
        }
        return out;
    };

    Vec rhs(nz), scaled(nz);
    for (std::size_t k = 0; k < nt; ++k) {
        const double t = data.t_cell.step * static_cast<double>(k);
        const double v = data.v1_right(t);
        // mean component: coefficient of the constant mode in d/dt Pi1 is
        // exactly d/dt of the hat part
        rhs = time_derivative(k, [&](double zeta, double tt, std::size_t) {
            return pi1_hat_eval(zeta, tt, data);
        });
        const double b_mean = data.mesh->integrate(data.phi2[k]) / data.mesh->area;
        Vec X0 = solve_mean_mode(v, rhs, b_mean, h);
        for (std::size_t j = 0; j < nz; ++j) term.mean_.at(j, k) = X0[j];

        Vec residual = data.phi2[k];
        for (std::size_t j = 0; j < residual.size(); ++j) residual[j] -= b_mean;
        for (std::size_t p = 1; p <= P; ++p) {
            // coefficient of Theta_p in d/dt Pi1-tilde
            rhs = time_derivative(k, [&](double zeta, double tt, std::size_t) {
                return pi1t.mode_coef(p, zeta, tt);
            });
            const double mu = 0.25 * v * v + basis.lambda[p];
            for (std::size_t j = 0; j < nz; ++j)
                scaled[j] = std::exp(0.5 * v * h * static_cast<double>(j)) * rhs[j];
            const double bp = inner_l2(*data.mesh, data.phi2[k], basis.theta[p]);
            Vec X = solve_decaying_mode(mu, scaled, bp, h);
            for (std::size_t j = 0; j < nz; ++j)
                term.modes_[p].at(j, k) = std::exp(-0.5 * v * h * static_cast<double>(j)) * X[j];
            for (std::size_t j = 0; j < residual.size(); ++j)
                residual[j] -= bp * basis.theta[p][j];
            term.tail_bound_ = std::max(term.tail_bound_, std::abs(bp));
        }
        term.tail_[k] = std::move(residual);
    }
    term.kappa_certified_ = std::min(data.sigma0, data.kappa0());
    term.build_ring_views();
    return term;
}

DecayFit decay_rate(const std::function<double(double)>& amplitude, double lo, double hi,
                    int samples) {
    if (samples < 10) throw NumericError("decay_rate: need at least 10 samples");
    Vec zs, ls;
    DecayFit fit;
    for (int i = 0; i < samples; ++i) {
        const double z = lo + (hi - lo) * i / static_cast<double>(samples - 1);
        const double a = amplitude(z);
        if (a < 1e-14) continue;
        zs.push_back(z);
        ls.push_back(std::log(a));
    }
    fit.samples_used = static_cast<int>(zs.size());
    if (zs.size() < 2) {
        fit.numerically_zero = true;
        return fit;
    }
    const LineFit lf = fit_line(zs, ls);
    fit.rate = -lf.slope;
    fit.fit_residual = lf.max_residual;
    return fit;
}

} // namespace thincyl
