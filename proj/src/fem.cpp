#include "thincyl/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace thincyl {

void SparseCSR::multiply(const double* x, double* y) const {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = ptr[i]; k < ptr[i + 1]; ++k) acc += val[static_cast<std::size_t>(k)] * x[col[static_cast<std::size_t>(k)]];
        y[i] = acc;
    }
}

namespace {

SparseCSR from_triplets(std::size_t n, std::vector<std::array<int, 2>>& idx, Vec& v) {
    std::vector<std::size_t> order(idx.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return idx[a] < idx[b];
    });
    SparseCSR A;
    A.n = n;
    A.ptr.assign(n + 1, 0);
    int last_r = -1, last_c = -1;
    for (std::size_t o : order) {
        const int r = idx[o][0], c = idx[o][1];
        if (r == last_r && c == last_c) {
            A.val.back() += v[o];
        } else {
            A.col.push_back(c);
            A.val.push_back(v[o]);
            ++A.ptr[static_cast<std::size_t>(r) + 1];
            last_r = r;
            last_c = c;
        }
    }
    for (std::size_t i = 0; i < n; ++i) A.ptr[i + 1] += A.ptr[i];
    return A;
}

void element_matrices(const CrossSectionMesh& mesh, bool stiffness,
                      std::vector<std::array<int, 2>>& idx, Vec& v) {
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const auto& tr = mesh.tris[t];
        const double A = mesh.tri_area[t];
        double ke[3][3];
        if (stiffness) {
            const auto& p0 = mesh.nodes[tr[0]];
            const auto& p1 = mesh.nodes[tr[1]];
            const auto& p2 = mesh.nodes[tr[2]];
            const double bx[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
            const double by[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) ke[a][b] = (bx[a] * bx[b] + by[a] * by[b]) / (4.0 * A);
        } else {
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) ke[a][b] = (a == b ? 2.0 : 1.0) * A / 12.0;
        }
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                idx.push_back({tr[a], tr[b]});
                v.push_back(ke[a][b]);
            }
    }
}

} // namespace

SparseCSR assemble_stiffness(const CrossSectionMesh& mesh) {
    std::vector<std::array<int, 2>> idx;
    Vec v;
    element_matrices(mesh, true, idx, v);
    return from_triplets(mesh.nodes.size(), idx, v);
}

SparseCSR assemble_mass(const CrossSectionMesh& mesh) {
    std::vector<std::array<int, 2>> idx;
    Vec v;
    element_matrices(mesh, false, idx, v);
    return from_triplets(mesh.nodes.size(), idx, v);
}

FemContext::FemContext(const CrossSectionMesh& mesh)
    : mesh_(&mesh), K_(assemble_stiffness(mesh)) {}

double FemContext::mean(const Vec& u) const { return mesh_->integrate(u) / mesh_->area; }

NeumannSolve FemContext::solve_neumann(const Vec& f_nodes, const Vec& g_edges, double compat_tol,
                                       const Vec* warm_start) const {
    const std::size_t n = mesh_->nodes.size();
    if (f_nodes.size() != n) throw NumericError("solve_neumann: bad source size");
    if (g_edges.size() != mesh_->bedges.size()) throw NumericError("solve_neumann: bad flux size");

    NeumannSolve out;
    Vec b(n, 0.0);
    // weak form: (grad u, grad v) = <g, v>_boundary - (f, v)
    for (std::size_t t = 0; t < mesh_->tris.size(); ++t) {
        const auto& tr = mesh_->tris[t];
        const double A = mesh_->tri_area[t];
        for (int a = 0; a < 3; ++a) {
            double acc = 0.0;
            for (int c = 0; c < 3; ++c) acc += (a == c ? 2.0 : 1.0) * f_nodes[tr[c]];
            b[tr[a]] -= A / 12.0 * acc;
        }
    }
    double flux_total = 0.0;
    for (std::size_t e = 0; e < mesh_->bedges.size(); ++e) {
        const auto& be = mesh_->bedges[e];
        const double load = be.length * g_edges[e] * 0.5;
        b[be.a] += load;
        b[be.b] += load;
        flux_total += be.length * g_edges[e];
    }
    const double interior_total = mesh_->integrate(f_nodes);
    out.defect = flux_total - interior_total;
    const double scale = std::abs(flux_total) + std::abs(interior_total) + 1.0;
    out.rel_defect = std::abs(out.defect) / scale;
    if (out.rel_defect > compat_tol)
        throw NumericError("solve_neumann: compatibility defect " + std::to_string(out.defect) +
                           " exceeds tolerance");

    // project the right-hand side onto the range (all-ones is the nullspace)
    const double shift = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    for (double& bi : b) bi -= shift;

    Vec x(n, 0.0);
    if (warm_start && warm_start->size() == n) x = *warm_start;
    Vec r(n), p(n), q(n);
    K_.multiply(x.data(), r.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    auto deflate = [&](Vec& w) {
        const double s = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
        for (double& wi : w) wi -= s;
    };
    deflate(r);
    const double b2 = std::inner_product(b.begin(), b.end(), b.begin(), 0.0);
    const double tol2 = 1e-20 * std::max(b2, 1e-300);
    double r2 = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    p = r;
    const int max_iter = static_cast<int>(40 * n);
    int it = 0;
    while (r2 > tol2 && b2 > 0.0) {
        if (++it > max_iter) throw NumericError("solve_neumann: CG did not converge");
        K_.multiply(p.data(), q.data());
        const double pq = std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
        const double alpha = r2 / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        deflate(r);
        const double r2n = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
        const double beta = r2n / r2;
        r2 = r2n;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    out.iterations = it;
    const double mu = mean(x);
    for (double& xi : x) xi -= mu;
    out.u = std::move(x);
    return out;
}

NeumannSolve solve_neumann(const CrossSectionMesh& mesh, const Vec& f_nodes, const Vec& g_edges,
                           double compat_tol) {
    FemContext ctx(mesh);
    return ctx.solve_neumann(f_nodes, g_edges, compat_tol);
}

double inner_l2(const CrossSectionMesh& mesh, const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const auto& tr = mesh.tris[t];
        const double A = mesh.tri_area[t];
        double local = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) local += (i == j ? 2.0 : 1.0) * a[tr[i]] * b[tr[j]];
        acc += A / 12.0 * local;
    }
    return acc;
}

double NeumannEigenbasis::project(const Vec& nodal, int p) const {
    return inner_l2(*mesh, nodal, theta[static_cast<std::size_t>(p)]);
}

NeumannEigenbasis neumann_eigenbasis(const CrossSectionMesh& mesh, int P) {
    if (P < 1) throw NumericError("neumann_eigenbasis: need P >= 1");
    const std::size_t n = mesh.nodes.size();
    const SparseCSR Kcsr = assemble_stiffness(mesh);
    const SparseCSR Mcsr = assemble_mass(mesh);

    using SpMat = Eigen::SparseMatrix<double>;
    using Dense = Eigen::MatrixXd;
    auto to_eigen = [&](const SparseCSR& A) {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(A.val.size());
        for (std::size_t i = 0; i < A.n; ++i)
            for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k)
                trip.emplace_back(static_cast<int>(i), A.col[static_cast<std::size_t>(k)],
                                  A.val[static_cast<std::size_t>(k)]);
        SpMat S(static_cast<int>(A.n), static_cast<int>(A.n));
        S.setFromTriplets(trip.begin(), trip.end());
        return S;
    };
    const SpMat K = to_eigen(Kcsr);
    const SpMat M = to_eigen(Mcsr);
    const double sigma = 1.0 / (mesh.area); // modest positive shift
    SpMat A = K + sigma * M;
    Eigen::SimplicialLDLT<SpMat> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw NumericError("neumann_eigenbasis: factorization failed");

    const int want = P; // nonconstant modes; the constant mode is pinned
    const int block = std::min<int>(static_cast<int>(n) - 1, want + 6);
    Dense X(n, block);
    std::uint64_t state = 0x2545F4914F6CDD1Dull;
    auto next_unit = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state % 2000001ull) / 1000000.0 - 1.0;
    };
    for (int j = 0; j < block; ++j)
        for (std::size_t i = 0; i < n; ++i) X(static_cast<int>(i), j) = next_unit();

    Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<int>(n));
    const double area = ones.dot(M * ones);
    Eigen::VectorXd theta0 = ones / std::sqrt(area);

    auto m_orthonormalize = [&](Dense& Y) {
        // deflate the constant mode, then modified Gram-Schmidt in the M inner
        // product (two passes)
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < Y.cols(); ++j) {
                Eigen::VectorXd yj = Y.col(j);
                yj -= theta0 * (theta0.dot(M * yj));
                for (int k = 0; k < j; ++k) {
                    const Eigen::VectorXd yk = Y.col(k);
                    yj -= yk * (yk.dot(M * yj));
                }
                const double nrm = std::sqrt(yj.dot(M * yj));
                if (nrm < 1e-14) throw NumericError("neumann_eigenbasis: block degenerated");
                Y.col(j) = yj / nrm;
            }
        }
    };

    m_orthonormalize(X);
    Eigen::VectorXd evals_prev = Eigen::VectorXd::Zero(block);
    Dense V;
    Eigen::VectorXd evals(block);
    for (int iter = 0; iter < 200; ++iter) {
        Dense Y(n, block);
        for (int j = 0; j < block; ++j) Y.col(j) = ldlt.solve(M * X.col(j));
        m_orthonormalize(Y);
        const Dense Kr = Y.transpose() * (K * Y);
        Eigen::SelfAdjointEigenSolver<Dense> es(0.5 * (Kr + Kr.transpose()));
        evals = es.eigenvalues();
        V = es.eigenvectors();
        X = Y * V;
        double change = 0.0;
        for (int j = 0; j < want; ++j)
            change = std::max(change, std::abs(evals[j] - evals_prev[j]) / (1.0 + std::abs(evals[j])));
        evals_prev = evals;
        if (iter > 3 && change < 1e-13) break;
        if (iter == 199) throw NumericError("neumann_eigenbasis: iteration did not converge");
    }

    NeumannEigenbasis basis;
    basis.mesh = &mesh;
    basis.lambda.resize(static_cast<std::size_t>(P) + 1);
    basis.theta.resize(static_cast<std::size_t>(P) + 1);
    basis.lambda[0] = 0.0;
    basis.theta[0].assign(n, 1.0 / std::sqrt(area));
    for (int p = 1; p <= P; ++p) {
        Eigen::VectorXd v = X.col(p - 1);
        const double vmax = v.cwiseAbs().maxCoeff();
        for (int i = 0; i < v.size(); ++i)
            if (std::abs(v[i]) > 1e-8 * vmax) {
                if (v[i] < 0) v = -v;
                break;
            }
        basis.lambda[static_cast<std::size_t>(p)] = evals[p - 1];
        basis.theta[static_cast<std::size_t>(p)].assign(v.data(), v.data() + v.size());
    }
    return basis;
}

} // namespace thincyl
