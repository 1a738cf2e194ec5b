#include "vsflow/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vsflow/mfd.hpp"
#include "vsflow/tpfa.hpp"

namespace vsflow {

std::string format_shortest(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::logic_error("format_shortest: conversion failed");
    return std::string(buf, p);
}

namespace {

std::string fmt(double v) { return format_shortest(v); }

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

double to_double(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::runtime_error("config line " + std::to_string(line) + ": bad number '" + s +
                                 "'");
    }
}

long to_long(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::runtime_error("config line " + std::to_string(line) + ": bad integer '" + s +
                                 "'");
    }
}

[[noreturn]] void bad(int line, const std::string& what) {
    throw std::runtime_error("config line " + std::to_string(line) + ": " + what);
}

BoundarySideSpec parse_side(const std::vector<std::string>& tok, int line) {
    if (tok.size() != 2) bad(line, "expected '<dirichlet|neumann> <value>'");
    BoundarySideSpec s;
    if (tok[0] == "dirichlet")
        s.kind = BcKind::Dirichlet;
    else if (tok[0] == "neumann")
        s.kind = BcKind::Neumann;
    else
        bad(line, "unknown boundary kind '" + tok[0] + "'");
    s.value = to_double(tok[1], line);
    return s;
}

int material_id(const ScenarioConfig& cfg, const std::string& name, int line) {
    for (std::size_t i = 0; i < cfg.materials.size(); ++i)
        if (cfg.materials[i].name == name) return static_cast<int>(i);
    bad(line, "region rule references unknown material '" + name + "'");
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::Tpfa ? "tpfa" : "mfd"; }

ScenarioConfig parse_config(std::istream& in) {
    ScenarioConfig cfg;
    cfg.materials.clear();
    std::string section;
    std::string raw;
    int line = 0;
    bool saw_material = false;

    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string s = raw;
        // trim
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = s.find_last_not_of(" \t\r");
        s = s.substr(b, e - b + 1);

        if (s.front() == '[') {
            if (s.back() != ']') bad(line, "unterminated section header");
            section = s.substr(1, s.size() - 2);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) bad(line, "expected 'key = value'");
        std::string key = s.substr(0, eq);
        std::string val = s.substr(eq + 1);
        const auto ke = key.find_last_not_of(" \t");
        key = key.substr(0, ke + 1);
        const auto vb = val.find_first_not_of(" \t");
        if (vb == std::string::npos) bad(line, "missing value for '" + key + "'");
        val = val.substr(vb);

        const std::vector<std::string> tok = tokenize(val);

        if (section == "mesh") {
            if (key == "nx") cfg.nx = static_cast<std::size_t>(to_long(val, line));
            else if (key == "nz") cfg.nz = static_cast<std::size_t>(to_long(val, line));
            else if (key == "Lx") cfg.Lx = to_double(val, line);
            else if (key == "Lz") cfg.Lz = to_double(val, line);
            else if (key == "shear") cfg.shear = to_double(val, line);
            else if (key == "jitter") cfg.jitter = to_double(val, line);
            else if (key == "seed") cfg.seed = static_cast<unsigned>(to_long(val, line));
            else bad(line, "unknown mesh key '" + key + "'");
        } else if (section == "materials") {
            if (tok.size() != 5)
                bad(line, "material '" + key + "' needs 5 values: K alpha n theta_r theta_s");
            cfg.materials.push_back(make_vgm(key, to_double(tok[0], line), to_double(tok[1], line),
                                             to_double(tok[2], line), to_double(tok[3], line),
                                             to_double(tok[4], line)));
            saw_material = true;
        } else if (section == "regions") {
            if (key != "rule") bad(line, "regions section only supports 'rule = ...'");
            if (tok.size() < 2) bad(line, "rule needs '<material> <all|band|box> ...'");
            RegionSpec r;
            r.material = tok[0];
            if (tok[1] == "all") {
                if (tok.size() != 2) bad(line, "'all' takes no arguments");
                r.kind = RegionSpec::Kind::All;
            } else if (tok[1] == "band") {
                if (tok.size() != 4) bad(line, "'band' needs <emin> <emax>");
                r.kind = RegionSpec::Kind::Band;
                r.emin = to_double(tok[2], line);
                r.emax = to_double(tok[3], line);
            } else if (tok[1] == "box") {
                if (tok.size() != 6) bad(line, "'box' needs <xmin> <xmax> <emin> <emax>");
                r.kind = RegionSpec::Kind::Box;
                r.xmin = to_double(tok[2], line);
                r.xmax = to_double(tok[3], line);
                r.emin = to_double(tok[4], line);
                r.emax = to_double(tok[5], line);
            } else {
                bad(line, "unknown region kind '" + tok[1] + "'");
            }
            cfg.regions.push_back(r);
        } else if (section == "boundary") {
            if (key == "left") cfg.left = parse_side(tok, line);
            else if (key == "right") cfg.right = parse_side(tok, line);
            else if (key == "bottom") cfg.bottom = parse_side(tok, line);
            else if (key == "top") cfg.top = parse_side(tok, line);
            else bad(line, "unknown boundary side '" + key + "'");
        } else if (section == "source") {
            if (key == "uniform") cfg.uniform_source = to_double(val, line);
            else bad(line, "unknown source key '" + key + "'");
        } else if (section == "solver") {
            if (key == "scheme") {
                if (val == "tpfa") cfg.scheme = Scheme::Tpfa;
                else if (val == "mfd") cfg.scheme = Scheme::Mfd;
                else bad(line, "scheme must be tpfa or mfd");
            } else if (key == "face_approx") {
                if (val == "upwind") cfg.face_approx = FaceApproximation::Upwind;
                else if (val == "central") cfg.face_approx = FaceApproximation::Central;
                else bad(line, "face_approx must be upwind or central");
            } else if (key == "continuation") {
                if (val == "power") cfg.continuation = ContinuationKind::Power;
                else if (val == "linear") cfg.continuation = ContinuationKind::Linear;
                else bad(line, "continuation must be power or linear");
            } else if (key == "kr_model") {
                if (val == "vgm") cfg.kr_model = RelpermModel::Vgm;
                else if (val == "unit") cfg.kr_model = RelpermModel::Unit;
                else bad(line, "kr_model must be vgm or unit");
            } else if (key == "predictor") {
                const long p = to_long(val, line);
                if (p != 0 && p != 1) bad(line, "predictor must be 0 or 1");
                cfg.predictor = static_cast<int>(p);
            } else if (key == "eps_rel") cfg.eps_rel = to_double(val, line);
            else if (key == "eps_abs") cfg.eps_abs = to_double(val, line);
            else if (key == "maxit") cfg.maxit = static_cast<int>(to_long(val, line));
            else if (key == "linesearch_skip")
                cfg.linesearch_skip = static_cast<int>(to_long(val, line));
            else if (key == "dq_min") cfg.dq_min = to_double(val, line);
            else if (key == "delta") cfg.delta = to_double(val, line);
            else if (key == "mfd_stab_scale") cfg.mfd_stab_scale = to_double(val, line);
            else bad(line, "unknown solver key '" + key + "'");
        } else if (section == "output") {
            if (key == "name") cfg.name = val;
            else if (key == "dir") cfg.out_dir = val;
            else bad(line, "unknown output key '" + key + "'");
        } else if (section.empty()) {
            bad(line, "key before any [section]");
        } else {
            bad(line, "unknown section '" + section + "'");
        }
    }
    if (!saw_material) throw std::runtime_error("config: no materials defined");
    if (cfg.regions.empty()) throw std::runtime_error("config: no region rules defined");
    for (const RegionSpec& r : cfg.regions) material_id(cfg, r.material, 0);
    return cfg;
}

ScenarioConfig parse_config_string(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream os;
    os << "[mesh]\n";
    os << "nx = " << cfg.nx << "\n";
    os << "nz = " << cfg.nz << "\n";
    os << "Lx = " << fmt(cfg.Lx) << "\n";
    os << "Lz = " << fmt(cfg.Lz) << "\n";
    os << "shear = " << fmt(cfg.shear) << "\n";
    os << "jitter = " << fmt(cfg.jitter) << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "\n[materials]\n";
    for (const VgmMaterial& m : cfg.materials)
        os << m.name << " = " << fmt(m.K[0]) << " " << fmt(m.alpha) << " " << fmt(m.n) << " "
           << fmt(m.theta_r) << " " << fmt(m.theta_s) << "\n";
    os << "\n[regions]\n";
    for (const RegionSpec& r : cfg.regions) {
        os << "rule = " << r.material;
        switch (r.kind) {
            case RegionSpec::Kind::All: os << " all"; break;
            case RegionSpec::Kind::Band:
                os << " band " << fmt(r.emin) << " " << fmt(r.emax);
                break;
            case RegionSpec::Kind::Box:
                os << " box " << fmt(r.xmin) << " " << fmt(r.xmax) << " " << fmt(r.emin) << " "
                   << fmt(r.emax);
                break;
        }
        os << "\n";
    }
    auto side = [&](const char* name, const BoundarySideSpec& s) {
        os << name << " = " << (s.kind == BcKind::Dirichlet ? "dirichlet" : "neumann") << " "
           << fmt(s.value) << "\n";
    };
    os << "\n[boundary]\n";
    side("left", cfg.left);
    side("right", cfg.right);
    side("bottom", cfg.bottom);
    side("top", cfg.top);
    os << "\n[source]\n";
    os << "uniform = " << fmt(cfg.uniform_source) << "\n";
    os << "\n[solver]\n";
    os << "scheme = " << to_string(cfg.scheme) << "\n";
    os << "face_approx = "
       << (cfg.face_approx == FaceApproximation::Upwind ? "upwind" : "central") << "\n";
    os << "continuation = " << (cfg.continuation == ContinuationKind::Power ? "power" : "linear")
       << "\n";
    os << "kr_model = " << (cfg.kr_model == RelpermModel::Vgm ? "vgm" : "unit") << "\n";
    os << "predictor = " << cfg.predictor << "\n";
    os << "eps_rel = " << fmt(cfg.eps_rel) << "\n";
    os << "eps_abs = " << fmt(cfg.eps_abs) << "\n";
    os << "maxit = " << cfg.maxit << "\n";
    os << "linesearch_skip = " << cfg.linesearch_skip << "\n";
    os << "dq_min = " << fmt(cfg.dq_min) << "\n";
    os << "delta = " << fmt(cfg.delta) << "\n";
    os << "mfd_stab_scale = " << fmt(cfg.mfd_stab_scale) << "\n";
    os << "\n[output]\n";
    os << "name = " << cfg.name << "\n";
    os << "dir = " << cfg.out_dir << "\n";
    return os.str();
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file '" + path + "'");
    out << serialize_config(cfg);
}

const std::vector<VgmMaterial>& material_library() {
    static const std::vector<VgmMaterial> lib = {
        make_vgm("capillary-sand", 18.144, 3.9, 5.74, 0.154, 0.39),
        make_vgm("capillary-gravel", 8640.0, 490.0, 2.19, 0.011, 0.42),
        make_vgm("clay", 0.048, 0.8, 1.09, 0.068, 0.38),
        make_vgm("soil", 0.1, 5.9, 3.0, 0.1, 0.35),
        make_vgm("gravel", 100.0, 6.0, 3.0, 0.04, 0.3),
        make_vgm("clay-loam", 0.2496, 3.6, 1.56, 0.078, 0.43),
        make_vgm("sand", 7.128, 14.5, 2.68, 0.045, 0.43),
        make_vgm("repository", 0.1, 14.5, 3.0, 0.045, 0.4),
    };
    return lib;
}

ScenarioConfig scenario_capillary_barrier(double scale) {
    if (scale <= 0.0) throw std::invalid_argument("scenario scale must be positive");
    ScenarioConfig cfg;
    cfg.name = "capillary";
    cfg.nx = 100;
    cfg.nz = static_cast<std::size_t>(std::lround(32.0 * scale));
    if (cfg.nz < 4) cfg.nz = 4;
    cfg.Lx = 100.0;
    cfg.Lz = 6.0;
    cfg.shear = -0.05;  // layers dip toward the right-hand drain
    cfg.jitter = 0.0;
    cfg.seed = 1;
    cfg.materials = {make_vgm("sand", 18.144, 3.9, 5.74, 0.154, 0.39),
                     make_vgm("gravel", 8640.0, 490.0, 2.19, 0.011, 0.42)};
    cfg.regions = {RegionSpec{RegionSpec::Kind::Band, "sand", 5.5, 6.0, 0.0, 0.0},
                   RegionSpec{RegionSpec::Kind::Band, "gravel", 5.0, 5.5, 0.0, 0.0},
                   RegionSpec{RegionSpec::Kind::All, "sand", 0.0, 0.0, 0.0, 0.0}};
    cfg.top = {BcKind::Neumann, 0.0048};
    cfg.bottom = {BcKind::Dirichlet, 0.0};
    cfg.right = {BcKind::Dirichlet, 0.0};
    cfg.left = {BcKind::Neumann, 0.0};
    cfg.uniform_source = 0.0;
    cfg.eps_rel = 1e-5;
    cfg.eps_abs = 1e-5;
    cfg.maxit = 25;
    return cfg;
}

ScenarioConfig scenario_realistic(double scale) {
    if (scale <= 0.0) throw std::invalid_argument("scenario scale must be positive");
    ScenarioConfig cfg;
    cfg.name = "realistic";
    cfg.nx = static_cast<std::size_t>(std::lround(70.0 * scale));
    cfg.nz = static_cast<std::size_t>(std::lround(40.0 * scale));
    if (cfg.nx < 4) cfg.nx = 4;
    if (cfg.nz < 4) cfg.nz = 4;
    cfg.Lx = 90.0;
    cfg.Lz = 12.0;
    cfg.shear = 0.0;
    cfg.jitter = 0.1;  // non-K-orthogonal grid
    cfg.seed = 7;
    cfg.materials = {make_vgm("clay", 0.048, 0.8, 1.09, 0.068, 0.38),
                     make_vgm("gravel", 100.0, 6.0, 3.0, 0.04, 0.3),
                     make_vgm("clay-loam", 0.2496, 3.6, 1.56, 0.078, 0.43),
                     make_vgm("sand", 7.128, 14.5, 2.68, 0.045, 0.43),
                     make_vgm("soil", 0.1, 5.9, 3.0, 0.1, 0.35),
                     make_vgm("repository", 0.1, 14.5, 3.0, 0.045, 0.4)};
    // bottom-up layering with the repository box embedded in the sand layer
    cfg.regions = {RegionSpec{RegionSpec::Kind::Box, "repository", 8.0, 9.5, 30.0, 60.0},
                   RegionSpec{RegionSpec::Kind::Band, "soil", 9.5, 13.0, 0.0, 0.0},
                   RegionSpec{RegionSpec::Kind::Band, "sand", 7.0, 9.5, 0.0, 0.0},
                   RegionSpec{RegionSpec::Kind::Band, "clay-loam", 4.5, 7.0, 0.0, 0.0},
                   RegionSpec{RegionSpec::Kind::Band, "gravel", 2.5, 4.5, 0.0, 0.0},
                   RegionSpec{RegionSpec::Kind::Band, "clay", -1.0, 2.5, 0.0, 0.0}};
    cfg.top = {BcKind::Neumann, 0.0001};
    cfg.bottom = {BcKind::Dirichlet, 0.5};
    cfg.left = {BcKind::Dirichlet, 0.5};
    cfg.right = {BcKind::Dirichlet, 0.5};
    cfg.uniform_source = 0.0;
    cfg.eps_rel = 1e-4;
    cfg.eps_abs = 1e-4;
    cfg.maxit = 20;
    return cfg;
}

Mesh build_mesh(const ScenarioConfig& cfg) {
    return build_grid(cfg.nx, cfg.nz, cfg.Lx, cfg.Lz, cfg.shear, cfg.jitter, cfg.seed);
}

std::vector<RegionRule> make_region_rules(const ScenarioConfig& cfg) {
    std::vector<RegionRule> rules;
    const double shear = cfg.shear;
    for (const RegionSpec& r : cfg.regions) {
        const int mat = material_id(cfg, r.material, 0);
        RegionRule rule;
        rule.material = mat;
        switch (r.kind) {
            case RegionSpec::Kind::All:
                rule.contains = [](const Point&) { return true; };
                break;
            case RegionSpec::Kind::Band:
                rule.contains = [shear, r](const Point& p) {
                    const double eta = p.z - shear * p.x;
                    return r.emin <= eta && eta < r.emax;
                };
                break;
            case RegionSpec::Kind::Box:
                rule.contains = [shear, r](const Point& p) {
                    const double eta = p.z - shear * p.x;
                    return r.xmin <= p.x && p.x < r.xmax && r.emin <= eta && eta < r.emax;
                };
                break;
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

BoundarySpec make_boundary(const ScenarioConfig& cfg) {
    BoundarySpec bc;
    auto convert = [](const BoundarySideSpec& s) {
        return s.kind == BcKind::Dirichlet ? BoundarySpec::dirichlet(s.value)
                                           : BoundarySpec::neumann(s.value);
    };
    bc.sides[Side::Left] = convert(cfg.left);
    bc.sides[Side::Right] = convert(cfg.right);
    bc.sides[Side::Bottom] = convert(cfg.bottom);
    bc.sides[Side::Top] = convert(cfg.top);
    return bc;
}

std::unique_ptr<DiscreteSystem> make_system(const ScenarioConfig& cfg) {
    Mesh mesh = build_mesh(cfg);
    std::vector<int> cmat = assign_materials(mesh, make_region_rules(cfg));
    SourceField src(mesh.cells.size(), cfg.uniform_source);
    if (cfg.scheme == Scheme::Tpfa)
        return std::make_unique<TpfaSystem>(std::move(mesh), cfg.materials, std::move(cmat),
                                            make_boundary(cfg), std::move(src), cfg.face_approx,
                                            cfg.continuation, cfg.kr_model);
    return std::make_unique<MfdSystem>(std::move(mesh), cfg.materials, std::move(cmat),
                                       make_boundary(cfg), std::move(src), cfg.face_approx,
                                       cfg.continuation, cfg.kr_model, cfg.mfd_stab_scale);
}

ContinuationParams make_continuation_params(const ScenarioConfig& cfg) {
    ContinuationParams p;
    p.predictor_order = cfg.predictor;
    p.dq_min = cfg.dq_min;
    p.delta = cfg.delta;
    p.kind = cfg.continuation;
    p.newton.eps_rel = cfg.eps_rel;
    p.newton.eps_abs = cfg.eps_abs;
    p.newton.maxit = cfg.maxit;
    p.newton.linesearch_skip = cfg.linesearch_skip;
    return p;
}

}  // namespace vsflow
