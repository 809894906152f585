#include "thincyl/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace thincyl {

namespace {

double signed_area(const std::array<double, 2>& a, const std::array<double, 2>& b,
                   const std::array<double, 2>& c) {
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

void push_tri(CrossSectionMesh& m, int a, int b, int c) {
    if (signed_area(m.nodes[a], m.nodes[b], m.nodes[c]) < 0.0) std::swap(b, c);
    m.tris.push_back({a, b, c});
}

void finalize(CrossSectionMesh& m) {
    m.tri_area.resize(m.tris.size());
    m.node_weight.assign(m.nodes.size(), 0.0);
    m.area = 0.0;
    m.max_edge = 0.0;
    for (std::size_t t = 0; t < m.tris.size(); ++t) {
        const auto& tr = m.tris[t];
        const double A = signed_area(m.nodes[tr[0]], m.nodes[tr[1]], m.nodes[tr[2]]);
        if (A <= 0.0) throw NumericError("build_mesh: degenerate or inverted triangle");
        m.tri_area[t] = A;
        m.area += A;
        for (int k = 0; k < 3; ++k) {
            m.node_weight[tr[k]] += A / 3.0;
            const auto& p = m.nodes[tr[k]];
            const auto& q = m.nodes[tr[(k + 1) % 3]];
            m.max_edge = std::max(m.max_edge, std::hypot(q[0] - p[0], q[1] - p[1]));
        }
    }
    m.perimeter = 0.0;
    std::vector<char> on_boundary(m.nodes.size(), 0);
    for (auto& e : m.bedges) {
        const auto& a = m.nodes[e.a];
        const auto& b = m.nodes[e.b];
        e.length = std::hypot(b[0] - a[0], b[1] - a[1]);
        e.mid = {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
        double nx = (b[1] - a[1]) / e.length, ny = -(b[0] - a[0]) / e.length;
        if (nx * e.mid[0] + ny * e.mid[1] < 0.0) {
            nx = -nx;
            ny = -ny;
        }
        e.normal = {nx, ny};
        m.perimeter += e.length;
        on_boundary[e.a] = on_boundary[e.b] = 1;
    }
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
        if (on_boundary[i]) m.boundary_nodes.push_back(static_cast<int>(i));
    if (m.is_disk) {
        m.phi_ratio = 2.0 / m.disk_radius;
        m.bquad_scale = m.phi_ratio * m.area / m.perimeter;
    } else {
        m.phi_ratio = m.perimeter / m.area;
        m.bquad_scale = 1.0;
    }
}

CrossSectionMesh build_disk(double r0, int nxi) {
    const int m = std::max(2, (nxi + 1) / 2); // rings; max edge ~ r0/m
    CrossSectionMesh mesh;
    mesh.is_disk = true;
    mesh.disk_radius = r0;
    mesh.nodes.push_back({0.0, 0.0});
    mesh.ring_of_node.push_back(0);
    mesh.ring_nodes.resize(static_cast<std::size_t>(m) + 1);
    mesh.ring_nodes[0] = {0};
    mesh.ring_radius.assign(static_cast<std::size_t>(m) + 1, 0.0);
    for (int j = 1; j <= m; ++j) {
        const double r = r0 * j / m;
        mesh.ring_radius[j] = r;
        const int n = 6 * j;
        for (int k = 0; k < n; ++k) {
            const double th = 2.0 * M_PI * k / n;
            mesh.nodes.push_back({r * std::cos(th), r * std::sin(th)});
            mesh.ring_of_node.push_back(j);
            mesh.ring_nodes[j].push_back(static_cast<int>(mesh.nodes.size()) - 1);
        }
    }
    auto ring_node = [&](int j, int k) {
        const int n = 6 * j;
        return mesh.ring_nodes[j][static_cast<std::size_t>(((k % n) + n) % n)];
    };
    // sextant-wise strip triangulation between ring j-1 and ring j
    for (int j = 1; j <= m; ++j) {
        if (j == 1) {
            for (int k = 0; k < 6; ++k) push_tri(mesh, 0, ring_node(1, k), ring_node(1, k + 1));
            continue;
        }
        for (int s = 0; s < 6; ++s) {
            int o = 0, i = 0;
            const int no = j, ni = j - 1;
            while (o < no || i < ni) {
                const bool advance_outer =
                    i >= ni ||
                    (o < no && (o + 1) * ni <= (i + 1) * no);
                if (advance_outer) {
                    push_tri(mesh, ring_node(j, s * no + o), ring_node(j, s * no + o + 1),
                             ring_node(j - 1, s * ni + i));
                    ++o;
                } else {
                    push_tri(mesh, ring_node(j - 1, s * ni + i), ring_node(j, s * no + o),
                             ring_node(j - 1, s * ni + i + 1));
                    ++i;
                }
            }
        }
    }
    for (int k = 0; k < 6 * m; ++k) {
        BoundaryEdge e;
        e.a = ring_node(m, k);
        e.b = ring_node(m, k + 1);
        mesh.bedges.push_back(e);
    }
    finalize(mesh);
    return mesh;
}

CrossSectionMesh build_polygon(std::vector<std::array<double, 2>> verts, int nxi) {
    // orient CCW
    double a2 = 0.0;
    for (std::size_t k = 0; k < verts.size(); ++k) {
        const auto& p = verts[k];
        const auto& q = verts[(k + 1) % verts.size()];
        a2 += p[0] * q[1] - q[0] * p[1];
    }
    if (a2 == 0.0) throw NumericError("build_mesh: degenerate polygon");
    if (a2 < 0.0) std::reverse(verts.begin(), verts.end());

    CrossSectionMesh mesh;
    mesh.nodes.push_back({0.0, 0.0});
    std::vector<int> vid;
    double diam = 0.0, emax = 0.0;
    for (const auto& v : verts) {
        mesh.nodes.push_back(v);
        vid.push_back(static_cast<int>(mesh.nodes.size()) - 1);
        diam = std::max(diam, 2.0 * std::hypot(v[0], v[1]));
    }
    std::vector<std::array<int, 3>> tris;
    std::vector<std::array<int, 2>> bedges;
    for (std::size_t k = 0; k < vid.size(); ++k) {
        const int a = vid[k], b = vid[(k + 1) % vid.size()];
        tris.push_back({0, a, b});
        bedges.push_back({a, b});
        const auto& p = mesh.nodes[a];
        const auto& q = mesh.nodes[b];
        emax = std::max({emax, std::hypot(q[0] - p[0], q[1] - p[1]), std::hypot(p[0], p[1])});
    }
    int levels = 0;
    const double target = diam / std::max(2, nxi);
    while (emax / std::pow(2.0, levels) > target && levels < 8) ++levels;

    for (int l = 0; l < levels; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find({key.first, key.second});
            if (it != midpoint.end()) return it->second;
            const auto& p = mesh.nodes[a];
            const auto& q = mesh.nodes[b];
            mesh.nodes.push_back({0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])});
            const int id = static_cast<int>(mesh.nodes.size()) - 1;
            midpoint[{key.first, key.second}] = id;
            return id;
        };
        std::vector<std::array<int, 3>> next;
        for (const auto& t : tris) {
            const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({ab, t[1], bc});
            next.push_back({ca, bc, t[2]});
            next.push_back({ab, bc, ca});
        }
        tris = std::move(next);
        std::vector<std::array<int, 2>> nb;
        for (const auto& e : bedges) {
            const int c = mid(e[0], e[1]);
            nb.push_back({e[0], c});
            nb.push_back({c, e[1]});
        }
        bedges = std::move(nb);
    }
    for (const auto& t : tris) push_tri(mesh, t[0], t[1], t[2]);
    for (const auto& e : bedges) {
        BoundaryEdge be;
        be.a = e[0];
        be.b = e[1];
        mesh.bedges.push_back(be);
    }
    finalize(mesh);
    return mesh;
}

} // namespace

double CrossSectionMesh::integrate(const Vec& nodal) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodal.size(); ++i) acc += node_weight[i] * nodal[i];
    return acc;
}

double CrossSectionMesh::boundary_integral(const Vec& edge_mid_values) const {
    double acc = 0.0;
    for (std::size_t e = 0; e < bedges.size(); ++e) acc += bedges[e].length * edge_mid_values[e];
    return acc * bquad_scale;
}

double CrossSectionMesh::boundary_integral_nodal(const Vec& nodal) const {
    double acc = 0.0;
    for (const auto& e : bedges) acc += e.length * 0.5 * (nodal[e.a] + nodal[e.b]);
    return acc * bquad_scale;
}

Vec CrossSectionMesh::ring_average(const Vec& nodal) const {
    Vec avg(ring_nodes.size(), 0.0);
    for (std::size_t j = 0; j < ring_nodes.size(); ++j) {
        double acc = 0.0;
        for (int id : ring_nodes[j]) acc += nodal[static_cast<std::size_t>(id)];
        avg[j] = acc / static_cast<double>(ring_nodes[j].size());
    }
    return avg;
}

CrossSectionMesh build_mesh(const CrossSectionSpec& spec, int nxi) {
    if (spec.kind == CrossSectionSpec::Kind::disk) {
        if (spec.radius <= 0.0) throw NumericError("build_mesh: disk radius must be positive");
        return build_disk(spec.radius, nxi);
    }
    return build_polygon(spec.vertices, nxi);
}

} // namespace thincyl
