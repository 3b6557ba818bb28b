#include "intertwiner/json_io.hpp"

#include <cmath>
#include <fstream>

namespace intertwiner {

using nlohmann::json;

namespace {

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InputError(std::string(what) + ": expected [re, im]");
    const Complex z(j[0].get<double>(), j[1].get<double>());
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InputError(std::string(what) + ": non-finite entry");
    return z;
}

int dimension_of(const json& j, const char* what) {
    if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer())
        throw InputError(std::string(what) + ": missing integer field \"n\"");
    const int n = j["n"].get<int>();
    if (n <= 0) throw InputError(std::string(what) + ": \"n\" must be positive");
    return n;
}

}  // namespace

json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return json{{"n", m.rows()}, {"data", std::move(rows)}};
}

CMatrix matrix_from_json(const json& j) {
    const int n = dimension_of(j, "matrix");
    if (!j.contains("data") || !j["data"].is_array() || j["data"].size() != size_t(n))
        throw InputError("matrix: \"data\" must hold n rows");
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        const json& row = j["data"][i];
        if (!row.is_array() || row.size() != size_t(n))
            throw InputError("matrix: each row must hold n entries");
        for (int k = 0; k < n; ++k) m(i, k) = complex_from_json(row[k], "matrix entry");
    }
    return m;
}

json vector_to_json(const CVector& v) {
    json data = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(complex_to_json(v(i)));
    return json{{"n", v.size()}, {"data", std::move(data)}};
}

CVector vector_from_json(const json& j) {
    const int n = dimension_of(j, "vector");
    if (!j.contains("data") || !j["data"].is_array() || j["data"].size() != size_t(n))
        throw InputError("vector: \"data\" must hold n entries");
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = complex_from_json(j["data"][i], "vector entry");
    return v;
}

json relation_to_json(const Relation& rel) {
    switch (rel.kind) {
        case Relation::Kind::intertwine:
            return json{{"kind", "intertwine"}, {"phi", rel.phi}};
        case Relation::Kind::anticommute:
            return json{{"kind", "anticommute"}};
        default:
            return json{{"kind", "stroboscopic"}};
    }
}

Relation relation_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw InputError("relation: missing \"kind\"");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "intertwine") return Relation::intertwine(j.value("phi", 0.0));
    if (kind == "anticommute") return Relation::anticommute();
    if (kind == "stroboscopic") return Relation::stroboscopic();
    throw InputError("relation: unknown kind \"" + kind + "\"");
}

json etaset_to_json(const IntertwinerSet& set) {
    json etas = json::array();
    for (size_t i = 0; i < set.etas.elements.size(); ++i) {
        json entry{{"matrix", matrix_to_json(set.etas.elements[i])}};
        if (i < set.residuals.size()) entry["residual"] = set.residuals[i];
        etas.push_back(std::move(entry));
    }
    const char* route = set.construction == Construction::spectral    ? "spectral"
                        : set.construction == Construction::recursive ? "recursive"
                                                                      : "nullspace";
    json out{{"relation", relation_to_json(set.relation)},
             {"construction", route},
             {"count", independent_count(set.etas.elements, set.etas.tolerance)},
             {"tolerance", set.etas.tolerance},
             {"etas", std::move(etas)}};
    if (set.coefficients) out["coefficients"] = *set.coefficients;
    return out;
}

IntertwinerSet etaset_from_json(const json& j) {
    if (!j.is_object() || !j.contains("etas") || !j["etas"].is_array())
        throw InputError("eta set: missing \"etas\" array");
    IntertwinerSet set;
    if (j.contains("relation")) set.relation = relation_from_json(j["relation"]);
    if (j.contains("tolerance")) set.etas.tolerance = j["tolerance"].get<double>();
    const std::string route = j.value("construction", "nullspace");
    set.construction = route == "spectral"    ? Construction::spectral
                       : route == "recursive" ? Construction::recursive
                                              : Construction::nullspace;
    for (const json& entry : j["etas"]) {
        if (!entry.contains("matrix")) throw InputError("eta set: entry missing \"matrix\"");
        set.etas.elements.push_back(matrix_from_json(entry["matrix"]));
        set.residuals.push_back(entry.value("residual", 0.0));
    }
    return set;
}

json symmetry_to_json(const SymmetryDescriptor& sym) {
    json out{{"class", to_string(sym.cls)}, {"phi", sym.phi}};
    if (sym.linear_part) out["linear_part"] = matrix_to_json(*sym.linear_part);
    return out;
}

FloquetDrive drive_from_json(const json& j) {
    if (!j.is_object() || !j.contains("segments") || !j["segments"].is_array())
        throw InputError("drive: missing \"segments\" array");
    std::vector<FloquetSegment> segs;
    for (const json& s : j["segments"]) {
        if (!s.is_object() || !s.contains("h") || !s.contains("tau") || !s["tau"].is_number())
            throw InputError("drive: each segment needs \"h\" and \"tau\"");
        segs.push_back({matrix_from_json(s["h"]), s["tau"].get<double>()});
    }
    return FloquetDrive(std::move(segs));
}

json drive_to_json(const FloquetDrive& drive) {
    json segs = json::array();
    for (const auto& s : drive.segments)
        segs.push_back(json{{"h", matrix_to_json(s.h)}, {"tau", s.tau}});
    return json{{"segments", std::move(segs)}, {"period", drive.period()}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InputError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << text;
}

}  // namespace intertwiner
