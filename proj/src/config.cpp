#include "thincyl/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace thincyl {

using nlohmann::json;

namespace {

Params parse_params(const json& j, const std::string& owner) {
    Params p;
    if (!j.is_object()) throw ConfigError(owner + ".params: expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_number())
            throw ConfigError(owner + ".params." + it.key() + ": expected a number");
        p[it.key()] = it.value().get<double>();
    }
    return p;
}

CatalogRef parse_catalog_ref(const json& j, const std::string& owner) {
    if (!j.is_object() || !j.contains("catalog"))
        throw ConfigError(owner + ": expected {catalog, params}");
    CatalogRef ref;
    ref.catalog = j.at("catalog").get<std::string>();
    if (j.contains("params")) ref.params = parse_params(j.at("params"), owner);
    return ref;
}

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("config: missing key '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError("config: key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

void instantiate(ModelConfig& cfg) {
    cfg.velocity = make_velocity(cfg.velocity_ref.catalog, cfg.velocity_ref.params);
    cfg.interaction = make_interaction(cfg.interaction_ref.catalog, cfg.interaction_ref.params);
    cfg.boundary = make_boundary(cfg.boundary_ref.catalog, cfg.boundary_ref.params);
}

void apply_document(ModelConfig& cfg, const json& doc, bool require_all) {
    if (require_all || doc.contains("length")) cfg.length = require_number(doc, "length");
    if (require_all || doc.contains("horizon")) cfg.horizon = require_number(doc, "horizon");
    if (require_all || doc.contains("delta1")) cfg.delta1 = require_number(doc, "delta1");
    if (doc.contains("cross_section")) {
        const json& cs = doc.at("cross_section");
        const std::string kind = cs.value("kind", "disk");
        if (kind == "disk") {
            cfg.cross_section.kind = CrossSectionSpec::Kind::disk;
            cfg.cross_section.radius = require_number(cs, "radius");
            if (cfg.cross_section.radius <= 0.0)
                throw ConfigError("config: cross_section.radius must be positive");
        } else if (kind == "polygon") {
            cfg.cross_section.kind = CrossSectionSpec::Kind::polygon;
            cfg.cross_section.vertices.clear();
            if (!cs.contains("vertices") || !cs.at("vertices").is_array())
                throw ConfigError("config: cross_section.vertices must be an array");
            for (const auto& v : cs.at("vertices"))
                cfg.cross_section.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
            if (cfg.cross_section.vertices.size() < 3)
                throw ConfigError("config: polygon needs at least 3 vertices");
        } else {
            throw ConfigError("config: unknown cross_section.kind '" + kind + "'");
        }
    } else if (require_all) {
        throw ConfigError("config: missing key 'cross_section'");
    }
    if (doc.contains("velocity")) cfg.velocity_ref = parse_catalog_ref(doc.at("velocity"), "velocity");
    else if (require_all) throw ConfigError("config: missing key 'velocity'");
    if (doc.contains("interaction"))
        cfg.interaction_ref = parse_catalog_ref(doc.at("interaction"), "interaction");
    else if (require_all) throw ConfigError("config: missing key 'interaction'");
    if (doc.contains("boundary")) cfg.boundary_ref = parse_catalog_ref(doc.at("boundary"), "boundary");
    else if (require_all) throw ConfigError("config: missing key 'boundary'");
    if (doc.contains("epsilons")) {
        if (!doc.at("epsilons").is_array()) throw ConfigError("config: 'epsilons' must be an array");
        cfg.epsilons = doc.at("epsilons").get<std::vector<double>>();
    } else if (require_all) {
        throw ConfigError("config: missing key 'epsilons'");
    }
    if (doc.contains("beta")) cfg.beta = require_number(doc, "beta");
    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        cfg.grid.nx = static_cast<int>(g.value("nx", double(cfg.grid.nx)));
        cfg.grid.nt = static_cast<int>(g.value("nt", double(cfg.grid.nt)));
        cfg.grid.nxi = static_cast<int>(g.value("nxi", double(cfg.grid.nxi)));
        cfg.grid.modes = static_cast<int>(g.value("modes", double(cfg.grid.modes)));
        cfg.grid.lzeta = g.value("lzeta", cfg.grid.lzeta);
    }
}

void check_basic(const ModelConfig& cfg) {
    if (cfg.length <= 0.0) throw ConfigError("config: 'length' must be positive");
    if (cfg.horizon <= 0.0) throw ConfigError("config: 'horizon' must be positive");
    if (cfg.delta1 <= 0.0 || cfg.delta1 >= std::min(cfg.length / 2.0, cfg.horizon))
        throw ConfigError("config: 'delta1' must lie in (0, min(length/2, horizon))");
    if (cfg.epsilons.empty()) throw ConfigError("config: 'epsilons' must not be empty");
    for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
        if (cfg.epsilons[i] <= 0.0 || cfg.epsilons[i] >= 1.0)
            throw ConfigError("config: 'epsilons' entries must lie in (0, 1)");
        if (i > 0 && cfg.epsilons[i] >= cfg.epsilons[i - 1])
            throw ConfigError("config: 'epsilons' must be strictly decreasing");
    }
    if (cfg.beta < 1.0) throw ConfigError("config: 'beta' must be >= 1");
    if (cfg.grid.nx < 8 || cfg.grid.nt < 8 || cfg.grid.nxi < 4 || cfg.grid.modes < 1)
        throw ConfigError("config: grid counts too small");
    if (cfg.grid.lzeta <= 0.0) throw ConfigError("config: grid.lzeta must be positive");
}

} // namespace

ModelConfig load_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");

    ModelConfig cfg;
    if (doc.contains("scenario")) {
        cfg = builtin_scenarios(doc.at("scenario").get<std::string>());
        apply_document(cfg, doc, /*require_all=*/false);
    } else {
        apply_document(cfg, doc, /*require_all=*/true);
    }
    instantiate(cfg);
    check_basic(cfg);
    return cfg;
}

ModelConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

ModelConfig builtin_scenarios(const std::string& name) {
    ModelConfig cfg;
    cfg.scenario = name;
    cfg.cross_section.kind = CrossSectionSpec::Kind::disk;
    cfg.cross_section.radius = 1.0;
    cfg.epsilons = {0.2, 0.1, 0.05, 0.025};

    if (name == "linear-advection") {
        // Uniform axial speed and an s-independent interaction on a wide,
        // gentle window: derivative scales stay O(1), nothing reaches the
        // right end before the horizon, and the limit fields have closed
        // characteristic-integral forms.
        cfg.length = 6.3;
        cfg.horizon = 1.3;
        cfg.delta1 = 0.5;
        cfg.velocity_ref = {"constant", {{"c", 1.0}}};
        cfg.interaction_ref = {"window",
                               {{"k0", 0.55}, {"k1", 0.0}, {"a", 0.5}, {"b", 4.5}, {"t0", 0.35}}};
        cfg.boundary_ref = {"zero", {}};
        cfg.beta = 1.0;
    } else if (name == "saturating-flux") {
        // Genuinely quasilinear flux; forcing strong enough to steepen the
        // fan but (by default) not to cross before the horizon.
        cfg.length = 1.0;
        cfg.horizon = 0.35;
        cfg.delta1 = 0.1;
        cfg.velocity_ref = {"saturating", {{"c", 1.0}, {"c0", 0.6}, {"xa", 0.6}, {"xb", 0.85}}};
        cfg.interaction_ref = {"window",
                               {{"k0", 1.5}, {"k1", 0.5}, {"a", 0.1}, {"b", 0.6}, {"t0", 0.12}}};
        cfg.boundary_ref = {"zero", {}};
        cfg.beta = 1.0;
    } else if (name == "high-peclet-beta3") {
        cfg = builtin_scenarios("linear-advection");
        cfg.scenario = name;
        cfg.beta = 3.0;
    } else if (name == "axisym-robin") {
        // Interaction active up to the right end (s-independent there) and a
        // nonzero Dirichlet datum: exercises the boundary-layer machinery.
        cfg.length = 1.0;
        cfg.horizon = 0.35;
        cfg.delta1 = 0.1;
        cfg.velocity_ref = {"constant", {{"c", 1.0}}};
        cfg.interaction_ref = {"right-plateau",
                               {{"k0", 1.0}, {"a", 0.2}, {"b", 0.8}, {"t0", 0.12}}};
        cfg.boundary_ref = {"ramp", {{"q_inf", 0.3}, {"t0", 0.12}}};
        cfg.beta = 1.0;
    } else {
        throw ConfigError("builtin_scenarios: unknown scenario '" + name + "'");
    }
    instantiate(cfg);
    check_basic(cfg);
    return cfg;
}

std::vector<std::string> builtin_scenario_names() {
    return {"linear-advection", "saturating-flux", "high-peclet-beta3", "axisym-robin"};
}

std::string config_signature(const ModelConfig& cfg) {
    std::ostringstream os;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << ';';
    };
    os << "v1;";
    num(cfg.length);
    num(cfg.horizon);
    num(cfg.delta1);
    num(cfg.beta);
    os << (cfg.cross_section.kind == CrossSectionSpec::Kind::disk ? "disk" : "polygon") << ';';
    num(cfg.cross_section.radius);
    for (const auto& v : cfg.cross_section.vertices) {
        num(v[0]);
        num(v[1]);
    }
    for (const CatalogRef* ref : {&cfg.velocity_ref, &cfg.interaction_ref, &cfg.boundary_ref}) {
        os << ref->catalog << '{';
        for (const auto& [k, v] : ref->params) {
            os << k << '=';
            num(v);
        }
        os << '}';
    }
    for (double e : cfg.epsilons) num(e);
    os << cfg.grid.nx << ',' << cfg.grid.nt << ',' << cfg.grid.nxi << ',' << cfg.grid.modes << ',';
    num(cfg.grid.lzeta);
    return os.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace thincyl
