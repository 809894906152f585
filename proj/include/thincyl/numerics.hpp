#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace thincyl {

using Vec = std::vector<double>;

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Fourth-order finite differences on a uniform grid, one-sided at the ends.
// Requires at least 6 samples.
Vec deriv1_uniform(const Vec& f, double h);
Vec deriv2_uniform(const Vec& f, double h);

// The first-derivative stencil row used above, exposed for differencing
// structured data in place.
struct StencilTerm {
    long offset;
    double weight;
};
std::vector<StencilTerm> deriv1_stencil(std::size_t idx, std::size_t count, double h);

// Banded linear solve, in-place Gaussian elimination without pivoting.
// `band[i][k]` holds the matrix entry A(i, i + k - kl) for k in [0, kl+ku].
class BandMatrix {
public:
    BandMatrix(std::size_t n, int kl, int ku);
    double& at(std::size_t row, std::size_t col);
    void solve(Vec& rhs); // destroys the factor state; one-shot
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    int kl_, ku_;
    std::vector<Vec> rows_;
};

// Not-a-knot cubic spline on strictly increasing nodes.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(Vec x, Vec y);

    double value(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;
    bool empty() const { return x_.empty(); }

private:
    std::size_t interval(double x) const;
    Vec x_, y_, m_; // nodes, values, second derivatives
};

// Local 4-point Lagrange interpolation on a uniform grid (O(h^4) values,
// O(h^3) derivatives). Cheap enough for inner loops.
struct UniformAxis {
    double origin = 0.0;
    double step = 1.0;
    std::size_t count = 0; // number of nodes
};

double interp_cubic(const UniformAxis& ax, const double* f, double x);
double interp_cubic_deriv(const UniformAxis& ax, const double* f, double x);

// Dense tensor-grid field sampled on uniform (x, t) axes; row-major in time
// (slice k is contiguous over x).
class GridField2D {
public:
    GridField2D() = default;
    GridField2D(UniformAxis x, UniformAxis t);

    double& at(std::size_t i, std::size_t k) { return data_[k * ax_.count + i]; }
    double at(std::size_t i, std::size_t k) const { return data_[k * ax_.count + i]; }
    const double* slice(std::size_t k) const { return data_.data() + k * ax_.count; }
    double* slice(std::size_t k) { return data_.data() + k * ax_.count; }

    double value(double x, double t) const;
    double ddx(double x, double t) const;
    double ddt(double x, double t) const;

    const UniformAxis& xaxis() const { return ax_; }
    const UniformAxis& taxis() const { return at_; }
    std::size_t nx() const { return ax_.count; }
    std::size_t nt() const { return at_.count; }
    double max_abs() const;

private:
    UniformAxis ax_, at_;
    Vec data_;
};

// C^2 quintic smoothstep on [0,1] and a C^4 ninth-degree variant.
double smoothstep5(double u);
double smoothstep5_d1(double u);
double smoothstep5_d2(double u);
double smoothstep9(double u);
double smoothstep9_d1(double u);
double smoothstep9_d2(double u);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0; // max abs deviation in y units
};

LineFit fit_line(const Vec& x, const Vec& y);

} // namespace thincyl
