#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmalab/barrier.hpp"
#include "cmalab/grid.hpp"
#include "cmalab/kernel.hpp"
#include "cmalab/radial.hpp"

namespace cmalab {

using json = nlohmann::json;

/// Shortest round-trip decimal form, locale-independent (byte-stable output).
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) throw config_error("parse_double: bad number '" + std::string(s) + "'");
    return v;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << text;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- domain / kernel / profile descriptors ---------------------------------

inline json cmatrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.n; ++i) {
        json row = json::array();
        for (int k = 0; k < m.n; ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
        rows.push_back(row);
    }
    return rows;
}

inline CMatrix cmatrix_from_json(const json& rows) {
    const int n = static_cast<int>(rows.size());
    CMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            m(i, k) = cplx{rows.at(i).at(k).at(0).get<double>(), rows.at(i).at(k).at(1).get<double>()};
    return m;
}

inline json taylor_data_to_json(const TaylorData& t) {
    json a = json::array();
    for (const auto& v : t.a) a.push_back({v.real(), v.imag()});
    return json{{"n", t.n}, {"a", a}, {"b", cmatrix_to_json(t.b)}, {"c", cmatrix_to_json(t.c)}, {"r0", t.r0}};
}

inline TaylorData taylor_data_from_json(const json& j) {
    TaylorData t;
    t.n = j.at("n");
    for (const auto& v : j.at("a")) t.a.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    t.b = cmatrix_from_json(j.at("b"));
    t.c = cmatrix_from_json(j.at("c"));
    t.r0 = j.value("r0", 1.0);
    if (static_cast<int>(t.a.size()) != t.n || t.b.n != t.n || t.c.n != t.n)
        throw config_error("taylor_data_from_json: dimension mismatch");
    return t;
}

inline json domain_to_json(const Domain& dom) {
    json j;
    if (const auto* b = std::get_if<BallShape>(&dom.shape)) {
        j["kind"] = "ball";
        j["center"] = b->center;
        j["radius"] = b->radius;
        return j;
    }
    const auto& t = std::get<TaylorShape>(dom.shape);
    j["kind"] = "taylor";
    j["c0"] = t.f.c0;
    json a = json::array();
    for (const auto& v : t.f.a) a.push_back({v.real(), v.imag()});
    j["a"] = a;
    j["b"] = cmatrix_to_json(t.f.b);
    j["c"] = cmatrix_to_json(t.f.c);
    j["box_min"] = t.box_min;
    j["box_max"] = t.box_max;
    return j;
}

inline Domain domain_from_json(const json& j) {
    const std::string kind = j.at("kind");
    if (kind == "ball") return Domain::ball(j.at("center").get<std::vector<double>>(), j.at("radius"));
    if (kind != "taylor") throw config_error("domain_from_json: unknown kind '" + kind + "'");
    std::vector<cplx> a;
    for (const auto& v : j.at("a")) a.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    const int n = static_cast<int>(a.size());
    QuadraticDefining f(n, j.at("c0"), std::move(a), cmatrix_from_json(j.at("b")),
                        cmatrix_from_json(j.at("c")));
    return Domain::taylor(std::move(f), j.at("box_min").get<std::vector<double>>(),
                          j.at("box_max").get<std::vector<double>>());
}

inline json kernel_to_json(const Kernel& k) {
    const char* kind = k.kind == KernelKind::BallIndicator ? "ball"
                       : k.kind == KernelKind::SmoothBump  ? "smooth_bump"
                                                           : "plateau_bump";
    return json{{"kind", kind}, {"support_radius", k.R}, {"dim", k.dim}};
}

inline Kernel kernel_from_json(const json& j) {
    const std::string kind = j.at("kind");
    KernelKind kk;
    if (kind == "ball")
        kk = KernelKind::BallIndicator;
    else if (kind == "smooth_bump")
        kk = KernelKind::SmoothBump;
    else if (kind == "plateau_bump")
        kk = KernelKind::PlateauBump;
    else
        throw config_error("kernel_from_json: unknown kind '" + kind + "'");
    return Kernel::make(kk, j.value("dim", 2), j.value("support_radius", 1.0));
}

inline json profile_to_json(const RadialProfile& p, int mesh_size = 0, double S = 1.0) {
    const char* kind = p.kind == ProfileKind::Power       ? "power"
                       : p.kind == ProfileKind::Quadratic ? "quadratic"
                                                          : "tabulated";
    json j{{"n", p.n}, {"kind", kind}, {"S", S}};
    if (p.kind == ProfileKind::Power) j["beta"] = p.beta;
    if (mesh_size > 0) j["mesh_size"] = mesh_size;
    return j;
}

inline RadialProfile profile_from_json(const json& j) {
    const std::string kind = j.at("kind");
    const int n = j.at("n");
    if (kind == "power") return RadialProfile::power(n, j.at("beta"));
    if (kind == "quadratic") return RadialProfile::quadratic(n);
    throw config_error("profile_from_json: unknown kind '" + kind + "'");
}

// ---- grid functions: flat CSV + JSON header --------------------------------

inline const char* class_name(PointClass c) {
    switch (c) {
        case PointClass::Interior: return "interior";
        case PointClass::Boundary: return "boundary";
        case PointClass::Exterior: return "exterior";
    }
    return "?";
}

/// One row per grid point: coordinates, classification, value.
inline std::string grid_to_csv(const GridFn& f) {
    const auto& g = *f.geom;
    std::string out;
    out.reserve(static_cast<size_t>(g.total) * 24);
    for (int k = 0; k < g.dim; ++k) {
        out += "x";
        out += std::to_string(k);
        out += ',';
    }
    out += "class,value\n";
    for (long i = 0; i < g.total; ++i) {
        for (int k = 0; k < g.dim; ++k) {
            out += format_double(g.coord(i, k));
            out += ',';
        }
        out += class_name(g.cls[i]);
        out += ',';
        out += format_double(f.values[i]);
        out += '\n';
    }
    return out;
}

inline json grid_meta_to_json(const GridFn& f) {
    json j;
    j["n"] = f.geom->dim / 2;
    j["resolution"] = f.geom->resolution;
    j["shape"] = domain_to_json(f.geom->domain);
    j["masked"] = f.masked;
    return j;
}

inline void write_grid_fn(const GridFn& f, const std::string& csv_path, const std::string& meta_path) {
    write_text_file(csv_path, grid_to_csv(f));
    write_text_file(meta_path, grid_meta_to_json(f).dump(2) + "\n");
}

inline GridFn read_grid_fn(const std::string& csv_path, const std::string& meta_path) {
    const json meta = json::parse(read_text_file(meta_path));
    const Domain dom = domain_from_json(meta.at("shape"));
    GridFn f = build_grid(dom, meta.at("resolution"));
    if (meta.contains("masked")) f.masked = meta.at("masked").get<std::vector<int>>();
    const std::string csv = read_text_file(csv_path);
    size_t pos = csv.find('\n');
    if (pos == std::string::npos) throw config_error("read_grid_fn: empty CSV");
    ++pos;
    const int d = f.geom->dim;
    for (long i = 0; i < f.geom->total; ++i) {
        size_t eol = csv.find('\n', pos);
        if (eol == std::string::npos) throw config_error("read_grid_fn: row count mismatch");
        std::string_view row(csv.data() + pos, eol - pos);
        // value sits after the last comma
        const size_t last = row.rfind(',');
        if (last == std::string_view::npos) throw config_error("read_grid_fn: malformed row");
        f.values[i] = parse_double(row.substr(last + 1));
        // light sanity check on the classification column
        size_t cstart = 0;
        for (int k = 0; k < d; ++k) cstart = row.find(',', cstart) + 1;
        const std::string_view cls = row.substr(cstart, last - cstart);
        if (cls != class_name(f.geom->cls[i]))
            throw config_error("read_grid_fn: classification mismatch at row " + std::to_string(i));
        pos = eol + 1;
    }
    return f;
}

// ---- radial functions -------------------------------------------------------

inline std::string radial_to_csv(const RadialFn& f) {
    std::string out = "s,value\n";
    for (size_t i = 0; i < f.s.size(); ++i) {
        out += format_double(f.s[i]);
        out += ',';
        out += format_double(f.values[i]);
        out += '\n';
    }
    return out;
}

inline json radial_meta_to_json(const RadialFn& f) {
    return json{{"radial", true}, {"n", f.n}, {"S", f.S()}, {"mesh_size", f.s.size()}};
}

inline RadialFn radial_from_csv(const std::string& csv, int n) {
    RadialFn f;
    f.n = n;
    size_t pos = csv.find('\n');
    if (pos == std::string::npos) throw config_error("radial_from_csv: empty CSV");
    ++pos;
    while (pos < csv.size()) {
        size_t eol = csv.find('\n', pos);
        if (eol == std::string::npos) eol = csv.size();
        std::string_view row(csv.data() + pos, eol - pos);
        if (!row.empty()) {
            const size_t comma = row.find(',');
            if (comma == std::string_view::npos) throw config_error("radial_from_csv: malformed row");
            f.s.push_back(parse_double(row.substr(0, comma)));
            f.values.push_back(parse_double(row.substr(comma + 1)));
        }
        pos = eol + 1;
    }
    return f;
}

}  // namespace cmalab
