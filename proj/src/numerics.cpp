#include "thincyl/numerics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace thincyl {

Vec deriv1_uniform(const Vec& f, double h) {
    const std::size_t n = f.size();
    if (n < 6) throw NumericError("deriv1_uniform: need at least 6 samples");
    Vec d(n);
    const double s = 1.0 / (12.0 * h);
    d[0] = s * (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]);
    d[1] = s * (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]);
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = s * (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]);
    d[n - 2] = -s * (-3 * f[n - 1] - 10 * f[n - 2] + 18 * f[n - 3] - 6 * f[n - 4] + f[n - 5]);
    d[n - 1] = -s * (-25 * f[n - 1] + 48 * f[n - 2] - 36 * f[n - 3] + 16 * f[n - 4] - 3 * f[n - 5]);
    return d;
}

Vec deriv2_uniform(const Vec& f, double h) {
    const std::size_t n = f.size();
    if (n < 6) throw NumericError("deriv2_uniform: need at least 6 samples");
    Vec d(n);
    const double s = 1.0 / (12.0 * h * h);
    d[0] = s * (45 * f[0] - 154 * f[1] + 214 * f[2] - 156 * f[3] + 61 * f[4] - 10 * f[5]);
    d[1] = s * (10 * f[0] - 15 * f[1] - 4 * f[2] + 14 * f[3] - 6 * f[4] + f[5]);
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = s * (-f[i - 2] + 16 * f[i - 1] - 30 * f[i] + 16 * f[i + 1] - f[i + 2]);
    d[n - 2] = s * (10 * f[n - 1] - 15 * f[n - 2] - 4 * f[n - 3] + 14 * f[n - 4] - 6 * f[n - 5] + f[n - 6]);
    d[n - 1] = s * (45 * f[n - 1] - 154 * f[n - 2] + 214 * f[n - 3] - 156 * f[n - 4] + 61 * f[n - 5] - 10 * f[n - 6]);
    return d;
}

std::vector<StencilTerm> deriv1_stencil(std::size_t idx, std::size_t count, double h) {
    const double s = 1.0 / (12.0 * h);
    if (count < 5) throw NumericError("deriv1_stencil: need at least 5 samples");
    if (idx == 0) return {{0, -25 * s}, {1, 48 * s}, {2, -36 * s}, {3, 16 * s}, {4, -3 * s}};
    if (idx == 1) return {{-1, -3 * s}, {0, -10 * s}, {1, 18 * s}, {2, -6 * s}, {3, 1 * s}};
    if (idx == count - 1)
        return {{0, 25 * s}, {-1, -48 * s}, {-2, 36 * s}, {-3, -16 * s}, {-4, 3 * s}};
    if (idx == count - 2)
        return {{1, 3 * s}, {0, 10 * s}, {-1, -18 * s}, {-2, 6 * s}, {-3, -1 * s}};
    return {{-2, s}, {-1, -8 * s}, {1, 8 * s}, {2, -s}};
}

BandMatrix::BandMatrix(std::size_t n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), rows_(n, Vec(static_cast<std::size_t>(kl + ku + 1), 0.0)) {}

double& BandMatrix::at(std::size_t row, std::size_t col) {
    const long off = static_cast<long>(col) - static_cast<long>(row) + kl_;
    assert(off >= 0 && off <= kl_ + ku_);
    return rows_[row][static_cast<std::size_t>(off)];
}

void BandMatrix::solve(Vec& rhs) {
    assert(rhs.size() == n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const double piv = rows_[i][static_cast<std::size_t>(kl_)];
        if (piv == 0.0) throw NumericError("BandMatrix: zero pivot");
        const std::size_t jmax = std::min(n_ - 1, i + static_cast<std::size_t>(kl_));
        for (std::size_t j = i + 1; j <= jmax && j < n_; ++j) {
            const long off = static_cast<long>(i) - static_cast<long>(j) + kl_;
            double& lij = rows_[j][static_cast<std::size_t>(off)];
            if (lij == 0.0) continue;
            const double fac = lij / piv;
            lij = 0.0;
            for (int k = 1; k <= ku_; ++k) {
                rows_[j][static_cast<std::size_t>(off + k)] -=
                    fac * rows_[i][static_cast<std::size_t>(kl_ + k)];
            }
            rhs[j] -= fac * rhs[i];
        }
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        double acc = rhs[ii];
        const std::size_t jmax = std::min(n_ - 1, ii + static_cast<std::size_t>(ku_));
        for (std::size_t j = ii + 1; j <= jmax; ++j) {
            const long off = static_cast<long>(j) - static_cast<long>(ii) + kl_;
            acc -= rows_[ii][static_cast<std::size_t>(off)] * rhs[j];
        }
        rhs[ii] = acc / rows_[ii][static_cast<std::size_t>(kl_)];
    }
}

CubicSpline::CubicSpline(Vec x, Vec y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n != y_.size() || n < 4) throw NumericError("CubicSpline: need >= 4 nodes");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(x_[i + 1] > x_[i])) throw NumericError("CubicSpline: nodes not increasing");

    BandMatrix A(n, 2, 2);
    Vec rhs(n, 0.0);
    auto h = [&](std::size_t i) { return x_[i + 1] - x_[i]; };
    // not-a-knot: continuous third derivative across the second and
    // second-to-last nodes
    A.at(0, 0) = h(1);
    A.at(0, 1) = -(h(0) + h(1));
    A.at(0, 2) = h(0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        A.at(i, i - 1) = h(i - 1) / 6.0;
        A.at(i, i) = (h(i - 1) + h(i)) / 3.0;
        A.at(i, i + 1) = h(i) / 6.0;
        rhs[i] = (y_[i + 1] - y_[i]) / h(i) - (y_[i] - y_[i - 1]) / h(i - 1);
    }
    A.at(n - 1, n - 3) = h(n - 2);
    A.at(n - 1, n - 2) = -(h(n - 3) + h(n - 2));
    A.at(n - 1, n - 1) = h(n - 3);
    A.solve(rhs);
    m_ = std::move(rhs);
}

std::size_t CubicSpline::interval(double x) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double CubicSpline::value(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i], a = x_[i + 1] - x, b = x - x_[i];
    return m_[i] * a * a * a / (6 * h) + m_[i + 1] * b * b * b / (6 * h) +
           (y_[i] / h - m_[i] * h / 6) * a + (y_[i + 1] / h - m_[i + 1] * h / 6) * b;
}

double CubicSpline::deriv(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i], a = x_[i + 1] - x, b = x - x_[i];
    return -m_[i] * a * a / (2 * h) + m_[i + 1] * b * b / (2 * h) +
           (y_[i + 1] - y_[i]) / h - (m_[i + 1] - m_[i]) * h / 6;
}

double CubicSpline::deriv2(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    return m_[i] * (x_[i + 1] - x) / h + m_[i + 1] * (x - x_[i]) / h;
}

namespace {

struct CubicWeights {
    std::size_t base;
    double w[4];
};

CubicWeights cubic_weights(const UniformAxis& ax, double x, bool deriv) {
    assert(ax.count >= 4);
    double u = (x - ax.origin) / ax.step;
    long i = static_cast<long>(std::floor(u));
    i = std::clamp<long>(i, 1, static_cast<long>(ax.count) - 3);
    const double s = u - static_cast<double>(i - 1); // in [~1, ~2] interior
    CubicWeights cw;
    cw.base = static_cast<std::size_t>(i - 1);
    if (!deriv) {
        cw.w[0] = -(s - 1) * (s - 2) * (s - 3) / 6.0;
        cw.w[1] = s * (s - 2) * (s - 3) / 2.0;
        cw.w[2] = -s * (s - 1) * (s - 3) / 2.0;
        cw.w[3] = s * (s - 1) * (s - 2) / 6.0;
    } else {
        cw.w[0] = -(3 * s * s - 12 * s + 11) / 6.0 / ax.step;
        cw.w[1] = (3 * s * s - 10 * s + 6) / 2.0 / ax.step;
        cw.w[2] = -(3 * s * s - 8 * s + 3) / 2.0 / ax.step;
        cw.w[3] = (3 * s * s - 6 * s + 2) / 6.0 / ax.step;
    }
    return cw;
}

} // namespace

double interp_cubic(const UniformAxis& ax, const double* f, double x) {
    const auto cw = cubic_weights(ax, x, false);
    return cw.w[0] * f[cw.base] + cw.w[1] * f[cw.base + 1] + cw.w[2] * f[cw.base + 2] +
           cw.w[3] * f[cw.base + 3];
}

double interp_cubic_deriv(const UniformAxis& ax, const double* f, double x) {
    const auto cw = cubic_weights(ax, x, true);
    return cw.w[0] * f[cw.base] + cw.w[1] * f[cw.base + 1] + cw.w[2] * f[cw.base + 2] +
           cw.w[3] * f[cw.base + 3];
}

GridField2D::GridField2D(UniformAxis x, UniformAxis t)
    : ax_(x), at_(t), data_(x.count * t.count, 0.0) {}

namespace {

template <typename Eval>
double tensor_eval(const UniformAxis& tax, double t, Eval row_eval, bool tderiv) {
    const auto cw = cubic_weights(tax, t, tderiv);
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) acc += cw.w[k] * row_eval(cw.base + static_cast<std::size_t>(k));
    return acc;
}

} // namespace

double GridField2D::value(double x, double t) const {
    return tensor_eval(at_, t, [&](std::size_t k) { return interp_cubic(ax_, slice(k), x); },
                       false);
}

double GridField2D::ddx(double x, double t) const {
    return tensor_eval(at_, t,
                       [&](std::size_t k) { return interp_cubic_deriv(ax_, slice(k), x); },
                       false);
}

double GridField2D::ddt(double x, double t) const {
    return tensor_eval(at_, t, [&](std::size_t k) { return interp_cubic(ax_, slice(k), x); },
                       true);
}

double GridField2D::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double smoothstep5(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}
double smoothstep5_d1(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double v = u * (1.0 - u);
    return 30.0 * v * v;
}
double smoothstep5_d2(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}
double smoothstep9(double u) {
    u = std::clamp(u, 0.0, 1.0);
    const double u5 = u * u * u * u * u;
    return u5 * (126.0 + u * (-420.0 + u * (540.0 + u * (-315.0 + 70.0 * u))));
}
double smoothstep9_d1(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double a = u * (1.0 - u);
    return 630.0 * a * a * a * a;
}
double smoothstep9_d2(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double a = u * (1.0 - u);
    return 2520.0 * a * a * a * (1.0 - 2.0 * u);
}

LineFit fit_line(const Vec& x, const Vec& y) {
    if (x.size() != y.size() || x.size() < 2) throw NumericError("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) throw NumericError("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    for (std::size_t i = 0; i < x.size(); ++i)
        fit.max_residual =
            std::max(fit.max_residual, std::abs(y[i] - fit.intercept - fit.slope * x[i]));
    return fit;
}

} // namespace thincyl
