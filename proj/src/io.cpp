#include "smld/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace smld {

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(e.what());
    }
}

namespace {

std::string render_number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    // Keep a marker that this is a real number.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

void render(const Json& j, int indent, int depth, std::ostringstream& out) {
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* colon = indent > 0 ? ": " : ":";
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out << "{}";
            return;
        }
        out << "{";
        bool first = true;
        // nlohmann::json keeps object keys sorted.
        for (auto it = j.begin(); it != j.end(); ++it) {
            out << (first ? "" : ",") << pad << Json(it.key()).dump() << colon;
            render(it.value(), indent, depth + 1, out);
            first = false;
        }
        out << close << "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out << "[]";
            return;
        }
        // Arrays of scalars stay on one line.
        const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
        out << "[";
        bool first = true;
        for (const auto& e : j) {
            out << (first ? "" : ",");
            if (flat)
                out << (first || indent == 0 ? "" : " ");
            else
                out << pad;
            render(e, indent, depth + 1, out);
            first = false;
        }
        out << (flat ? "" : close) << "]";
        return;
    }
    case Json::value_t::number_float:
        out << render_number(j.get<double>());
        return;
    default:
        out << j.dump();
    }
}

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& array_at(const Json& j, const std::string& path) {
    if (!j.is_array()) throw ValidationError(path, "expected an array");
    return j;
}

} // namespace

std::string render_json(const Json& j, int indent) {
    std::ostringstream out;
    render(j, indent, 0, out);
    return out.str();
}

double number_from_json(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ValidationError(path, "expected a finite number");
    return v;
}

long integer_from_json(const Json& j, const std::string& path) {
    if (j.is_number_integer()) return j.get<long>();
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<long>(v);
    }
    throw ValidationError(path, "expected an integer");
}

const Json& field(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ValidationError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(at(path, key), "required field is missing");
    return *it;
}

Json to_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        out.push_back(row);
    }
    return out;
}

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
    array_at(j, path);
    const std::size_t n = j.size();
    if (n == 0) throw ValidationError(path, "matrix must be non-empty");
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Json& row = array_at(j[i], at(path, i));
        if (row.size() != n) throw ValidationError(at(path, i), "matrix must be square");
        for (std::size_t k = 0; k < n; ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                number_from_json(row[k], at(at(path, i), k));
    }
    return m;
}

Vector vector_from_json(const Json& j, const std::string& path) {
    array_at(j, path);
    if (j.empty()) throw ValidationError(path, "vector must be non-empty");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_from_json(j[i], at(path, i));
    return v;
}

Json to_json(const Germ& g) {
    // Trailing zeros are dropped; the order is implied.
    auto c = g.coefficients();
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    return Json(c);
}

Germ germ_from_json(const Json& j, const std::string& path) {
    array_at(j, path);
    std::vector<double> c;
    for (std::size_t i = 0; i < j.size(); ++i) c.push_back(number_from_json(j[i], at(path, i)));
    return Germ(c, default_germ_order);
}

Json to_json(const MonomialMap& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.exponents().rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.exponents().cols(); ++k) row.push_back(m.exponents()(i, k));
        rows.push_back(row);
    }
    return {{"M", rows}, {"lambda", to_json(m.scale())}};
}

MonomialMap monomial_map_from_json(const Json& j, const std::string& path) {
    const Json& rows = array_at(field(j, "M", path), at(path, "M"));
    std::vector<std::vector<long>> m;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Json& row = array_at(rows[i], at(at(path, "M"), i));
        if (row.size() != rows.size()) throw ValidationError(at(at(path, "M"), i), "exponent matrix must be square");
        std::vector<long> r;
        for (std::size_t k = 0; k < row.size(); ++k)
            r.push_back(integer_from_json(row[k], at(at(at(path, "M"), i), k)));
        m.push_back(r);
    }
    if (m.empty()) throw ValidationError(at(path, "M"), "exponent matrix must be non-empty");
    const Vector lambda = vector_from_json(field(j, "lambda", path), at(path, "lambda"));
    if (lambda.size() != static_cast<Eigen::Index>(m.size()))
        throw ValidationError(at(path, "lambda"), "length must match the exponent matrix");
    return MonomialMap::from_rows(m, std::vector<double>(lambda.data(), lambda.data() + lambda.size()));
}

Json to_json(const Factor& f) {
    if (const auto* u = std::get_if<UnivariateFactor>(&f)) return {{"kind", "germ"}, {"coeffs", to_json(u->germ)}};
    if (const auto* m = std::get_if<MonomialFactor>(&f)) {
        Json out = to_json(m->map);
        out["kind"] = "monomial";
        return out;
    }
    return {{"kind", "projective"}, {"h", to_json(std::get<ProjectiveFactor>(f).h)}};
}

Factor factor_from_json(const Json& j, const std::string& path) {
    const Json& kind = field(j, "kind", path);
    if (!kind.is_string()) throw ValidationError(at(path, "kind"), "expected a string");
    const std::string k = kind.get<std::string>();
    if (k == "germ") return UnivariateFactor{germ_from_json(field(j, "coeffs", path), at(path, "coeffs"))};
    if (k == "monomial") return MonomialFactor{monomial_map_from_json(j, path)};
    if (k == "projective") return ProjectiveFactor{matrix_from_json(field(j, "h", path), at(path, "h"))};
    throw ValidationError(at(path, "kind"), "unknown factor kind '" + k + "'");
}

Json to_json(const ProductSystem& s, const Vector* a) {
    Json factors = Json::array();
    for (const auto& f : s.factors()) factors.push_back(to_json(f));
    Json out = {{"factors", factors}};
    if (a) out["a"] = to_json(*a);
    return out;
}

ProductSystem system_from_json(const Json& j, const std::string& path) {
    const Json& fs = array_at(field(j, "factors", path), at(path, "factors"));
    if (fs.empty()) throw ValidationError(at(path, "factors"), "at least one factor is required");
    std::vector<Factor> factors;
    for (std::size_t i = 0; i < fs.size(); ++i) factors.push_back(factor_from_json(fs[i], at(at(path, "factors"), i)));
    return ProductSystem(std::move(factors));
}

Json to_json(const ExpPoly& ep) {
    Json out = Json::array();
    for (const auto& t : ep.terms()) out.push_back({{"c", t.c}, {"mu", t.mu}, {"d", t.d}});
    return out;
}

ExpPoly exp_poly_from_json(const Json& j, const std::string& path) {
    array_at(j, path);
    std::vector<ExpTerm> terms;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = at(path, i);
        const long d = integer_from_json(field(j[i], "d", p), at(p, "d"));
        if (d < 0) throw ValidationError(at(p, "d"), "degree must be nonnegative");
        terms.push_back({number_from_json(field(j[i], "c", p), at(p, "c")),
                         number_from_json(field(j[i], "mu", p), at(p, "mu")), static_cast<int>(d), {}, {}});
    }
    return ExpPoly(std::move(terms));
}

Json to_json(const Recurrence& r) { return {{"coeffs", r.coeffs}, {"init", r.init}}; }

Recurrence recurrence_from_json(const Json& j, const std::string& path) {
    Recurrence r;
    const Json& c = array_at(field(j, "coeffs", path), at(path, "coeffs"));
    const Json& init = array_at(field(j, "init", path), at(path, "init"));
    for (std::size_t i = 0; i < c.size(); ++i) r.coeffs.push_back(number_from_json(c[i], at(at(path, "coeffs"), i)));
    for (std::size_t i = 0; i < init.size(); ++i)
        r.init.push_back(number_from_json(init[i], at(at(path, "init"), i)));
    if (r.coeffs.empty()) throw ValidationError(at(path, "coeffs"), "at least one coefficient is required");
    if (r.init.size() != r.coeffs.size()) throw ValidationError(at(path, "init"), "length must match coeffs");
    return r;
}

Json to_json(const Variety& H) {
    Json terms = Json::array();
    for (const auto& t : H.terms()) terms.push_back({{"exponents", t.exponents}, {"c", t.c}});
    Json out = {{"terms", terms}};
    if (H.scale() != 0.0) out["scale"] = H.scale();
    return out;
}

Variety variety_from_json(const Json& j, const std::string& path) {
    const Json& ts = array_at(field(j, "terms", path), at(path, "terms"));
    if (ts.empty()) throw ValidationError(at(path, "terms"), "at least one term is required");
    std::vector<VarietyTerm> terms;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const std::string p = at(at(path, "terms"), i);
        const Json& e = array_at(field(ts[i], "exponents", p), at(p, "exponents"));
        VarietyTerm t;
        for (std::size_t k = 0; k < e.size(); ++k) {
            const long v = integer_from_json(e[k], at(at(p, "exponents"), k));
            if (v < 0) throw ValidationError(at(at(p, "exponents"), k), "exponents must be nonnegative");
            t.exponents.push_back(static_cast<int>(v));
        }
        t.c = number_from_json(field(ts[i], "c", p), at(p, "c"));
        terms.push_back(std::move(t));
    }
    const double scale = j.contains("scale") ? number_from_json(j["scale"], at(path, "scale")) : 0.0;
    return Variety(std::move(terms), scale);
}

Json to_json(const ClassVerdict& v) {
    Json out = {{"residue", v.residue}, {"first", v.first},     {"kind", to_string(v.kind)},
                {"method", v.method},   {"zeros", v.zeros},     {"certified", v.certified},
                {"sign_changes", v.sign_changes}};
    if (v.kind != VerdictKind::Finite) out["start"] = v.start;
    return out;
}

Json to_json(const ReturnSetDecomposition& d) {
    Json progs = Json::array();
    bool certified = true;
    for (const auto& p : d.progressions) {
        progs.push_back({{"residue", p.residue}, {"start", p.start}, {"certified", p.certified}});
        certified = certified && p.certified;
    }
    return {{"modulus", d.modulus},
            {"n_max", d.n_max},
            {"exceptional", d.exceptional},
            {"progressions", progs},
            {"certified", certified}};
}

ReturnSetDecomposition decomposition_from_json(const Json& j, const std::string& path) {
    ReturnSetDecomposition d;
    d.modulus = integer_from_json(field(j, "modulus", path), at(path, "modulus"));
    if (d.modulus < 1) throw ValidationError(at(path, "modulus"), "must be positive");
    d.n_max = j.contains("n_max") ? integer_from_json(j["n_max"], at(path, "n_max")) : 0;
    const Json& ex = array_at(field(j, "exceptional", path), at(path, "exceptional"));
    for (std::size_t i = 0; i < ex.size(); ++i)
        d.exceptional.push_back(integer_from_json(ex[i], at(at(path, "exceptional"), i)));
    const Json& ps = array_at(field(j, "progressions", path), at(path, "progressions"));
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string p = at(at(path, "progressions"), i);
        Progression pr;
        pr.residue = integer_from_json(field(ps[i], "residue", p), at(p, "residue"));
        pr.start = integer_from_json(field(ps[i], "start", p), at(p, "start"));
        pr.certified = ps[i].contains("certified") && ps[i]["certified"].is_boolean() && ps[i]["certified"].get<bool>();
        d.progressions.push_back(pr);
    }
    return d;
}

} // namespace smld
