#include "thincyl/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace thincyl {

namespace {

void csv_row(std::ofstream& out, std::initializer_list<double> vals) {
    char buf[64];
    bool first = true;
    for (double v : vals) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (!first) out << ',';
        out << buf;
        first = false;
    }
    out << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw NumericError("cannot open output file " + path);
    return out;
}

} // namespace

void write_field_csv(const std::string& path, const GridField2D& field) {
    auto out = open_out(path);
    out << "x1,t,value\n";
    for (std::size_t k = 0; k < field.nt(); ++k)
        for (std::size_t i = 0; i < field.nx(); ++i)
            csv_row(out, {field.xaxis().origin + field.xaxis().step * double(i),
                          field.taxis().origin + field.taxis().step * double(k),
                          field.at(i, k)});
}

void write_cell_csv(const std::string& path, const CellField& field, int x_stride,
                    int t_stride) {
    auto out = open_out(path);
    out << "x1,t,xi2,xi3,value\n";
    for (std::size_t k = 0; k < field.tparams.count; k += static_cast<std::size_t>(t_stride))
        for (std::size_t i = 0; i < field.xparams.count; i += static_cast<std::size_t>(x_stride)) {
            const Vec& u = field.at(i, k);
            for (std::size_t j = 0; j < u.size(); ++j)
                csv_row(out, {field.xparams.step * double(i), field.tparams.step * double(k),
                              field.mesh->nodes[j][0], field.mesh->nodes[j][1], u[j]});
        }
}

void write_eigen_csv(const std::string& path, const NeumannEigenbasis& basis) {
    auto out = open_out(path);
    out << "p,lambda\n";
    for (std::size_t p = 0; p < basis.lambda.size(); ++p)
        csv_row(out, {double(p), basis.lambda[p]});
}

void write_reference_csv(const std::string& path, const ReferenceSolution& sol) {
    auto out = open_out(path);
    out << "x1,r,t,u\n";
    for (std::size_t s = 0; s < sol.snapshots.size(); ++s)
        for (std::size_t i = 0; i < sol.xs.size(); ++i)
            for (std::size_t j = 0; j < sol.rs.size(); ++j)
                csv_row(out, {sol.xs[i], sol.rs[j], sol.snapshot_times[s],
                              sol.snapshots[s][sol.index(i, j)]});
}

void write_layer_csv(const std::string& path, const Vec& zetas, const Vec& times,
                     const Vec& values) {
    auto out = open_out(path);
    out << "zeta1,t,value\n";
    std::size_t idx = 0;
    for (double t : times)
        for (double z : zetas) csv_row(out, {z, t, values[idx++]});
}

namespace {

constexpr std::uint32_t kMagic = 0x54435931; // "TCY1"

struct Writer {
    std::ofstream out;
    explicit Writer(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw ArtifactError("cannot open artifact " + path);
    }
    void u32(std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
    void u64(std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
    void real(double v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
    void vec(const Vec& v) {
        u64(v.size());
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
    }
};

struct Reader {
    std::ifstream in;
    explicit Reader(const std::string& path) : in(path, std::ios::binary) {
        if (!in) throw ArtifactError("cannot open artifact " + path);
    }
    std::uint32_t u32() {
        std::uint32_t v;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    }
    double real() {
        double v;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    }
    Vec vec() {
        Vec v(u64());
        in.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(v.size() * sizeof(double)));
        if (!in) throw ArtifactError("truncated artifact");
        return v;
    }
};

void write_field(Writer& w, const GridField2D& f) {
    w.u64(f.nx());
    w.u64(f.nt());
    w.real(f.xaxis().origin);
    w.real(f.xaxis().step);
    w.real(f.taxis().origin);
    w.real(f.taxis().step);
    Vec flat;
    flat.reserve(f.nx() * f.nt());
    for (std::size_t k = 0; k < f.nt(); ++k)
        for (std::size_t i = 0; i < f.nx(); ++i) flat.push_back(f.at(i, k));
    w.vec(flat);
}

GridField2D read_field_fixed(Reader& r) {
    const std::size_t nx = r.u64(), nt = r.u64();
    const double xo = r.real(), xs = r.real(), to = r.real(), ts = r.real();
    GridField2D f(UniformAxis{xo, xs, nx}, UniformAxis{to, ts, nt});
    const Vec flat = r.vec();
    if (flat.size() != nx * nt) throw ArtifactError("field size mismatch");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < nt; ++k)
        for (std::size_t i = 0; i < nx; ++i) f.at(i, k) = flat[idx++];
    return f;
}

void check_header(Reader& r, std::uint32_t kind, const ModelConfig& cfg) {
    if (r.u32() != kMagic) throw ArtifactError("not a thincyl artifact");
    if (r.u32() != kind) throw ArtifactError("artifact kind mismatch");
    const std::uint64_t key = r.u64();
    if (key != fnv1a(config_signature(cfg)))
        throw ArtifactError("artifact was produced from a different configuration");
}

} // namespace

void save_limit_artifact(const std::string& path, const ModelConfig& cfg,
                         const LimitSolution& lim) {
    Writer w(path);
    w.u32(kMagic);
    w.u32(1);
    w.u64(fnv1a(config_signature(cfg)));
    w.real(lim.T1_observed);
    write_field(w, lim.w0);
    write_field(w, lim.dw0_dx);
    write_field(w, lim.dw0_dt);
    write_field(w, lim.d2w0_dxx);
    w.u64(lim.fan.curves.size());
    w.u64(lim.fan.dividing_curve);
    for (const auto& c : lim.fan.curves) {
        w.real(c.y0);
        w.real(c.t0);
        w.u32(c.from_boundary ? 1 : 0);
        w.u64(c.first_level);
        w.vec(c.y);
        w.vec(c.w);
    }
}

LimitSolution load_limit_artifact(const std::string& path, const ModelConfig& cfg) {
    Reader r(path);
    check_header(r, 1, cfg);
    LimitSolution lim;
    lim.T1_observed = r.real();
    lim.w0 = read_field_fixed(r);
    lim.dw0_dx = read_field_fixed(r);
    lim.dw0_dt = read_field_fixed(r);
    lim.d2w0_dxx = read_field_fixed(r);
    const std::size_t nc = r.u64();
    lim.fan.dividing_curve = r.u64();
    lim.fan.curves.resize(nc);
    for (auto& c : lim.fan.curves) {
        c.y0 = r.real();
        c.t0 = r.real();
        c.from_boundary = r.u32() != 0;
        c.first_level = r.u64();
        c.y = r.vec();
        c.w = r.vec();
    }
    return lim;
}

void save_cell_artifact(const std::string& path, const ModelConfig& cfg, const W1Solution& w1,
                        const CellField& u1, const CellField& u2) {
    Writer w(path);
    w.u32(kMagic);
    w.u32(2);
    w.u64(fnv1a(config_signature(cfg)));
    write_field(w, w1.w1);
    write_field(w, w1.f1);
    write_field(w, w1.lam);
    write_field(w, w1.dlam_dx);
    for (const CellField* f : {&u1, &u2}) {
        w.real(f->xparams.origin);
        w.real(f->xparams.step);
        w.u64(f->xparams.count);
        w.real(f->tparams.origin);
        w.real(f->tparams.step);
        w.u64(f->tparams.count);
        w.u64(f->values.size());
        for (const Vec& v : f->values) w.vec(v);
    }
}

CellArtifact load_cell_artifact(const std::string& path, const ModelConfig& cfg,
                                const CrossSectionMesh& mesh) {
    Reader r(path);
    check_header(r, 2, cfg);
    CellArtifact art;
    art.w1.w1 = read_field_fixed(r);
    art.w1.f1 = read_field_fixed(r);
    art.w1.lam = read_field_fixed(r);
    art.w1.dlam_dx = read_field_fixed(r);
    for (CellField* f : {&art.u1, &art.u2}) {
        f->mesh = &mesh;
        f->xparams.origin = r.real();
        f->xparams.step = r.real();
        f->xparams.count = r.u64();
        f->tparams.origin = r.real();
        f->tparams.step = r.real();
        f->tparams.count = r.u64();
        const std::size_t nv = r.u64();
        f->values.resize(nv);
        for (auto& v : f->values) {
            v = r.vec();
            if (v.size() != mesh.nodes.size())
                throw ArtifactError("cell artifact does not match the mesh");
        }
    }
    return art;
}

bool file_exists(const std::string& path) {
    std::ifstream in(path);
    return static_cast<bool>(in);
}

} // namespace thincyl
