#include "smld/cli.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "log.hpp"
#include "smld/germs.hpp"
#include "smld/matrix_power.hpp"

namespace smld::cli {

std::string to_string(Mode m) {
    switch (m) {
    case Mode::MatPow: return "matpow";
    case Mode::Linearize: return "linearize";
    case Mode::Orbit: return "orbit";
    case Mode::ReturnSet: return "returnset";
    case Mode::RecSeqZeros: return "recseq-zeros";
    case Mode::Trichotomy: return "trichotomy";
    }
    return "?";
}

namespace {

Mode mode_from(const Json& j) {
    if (!j.is_string()) throw ValidationError(".mode", "expected a string");
    const std::string s = j.get<std::string>();
    for (Mode m : {Mode::MatPow, Mode::Linearize, Mode::Orbit, Mode::ReturnSet, Mode::RecSeqZeros, Mode::Trichotomy})
        if (to_string(m) == s) return m;
    throw ValidationError(".mode", "unknown mode '" + s + "'");
}

double positive(const Json& j, const std::string& path) {
    const double v = number_from_json(j, path);
    if (!(v > 0)) throw ValidationError(path, "must be positive");
    return v;
}

long positive_integer(const Json& j, const std::string& path) {
    const long v = integer_from_json(j, path);
    if (v <= 0) throw ValidationError(path, "must be a positive integer");
    return v;
}

} // namespace

JobConfig parse_config(const std::string& text) {
    const Json j = parse_json(text);
    if (!j.is_object()) throw ValidationError("", "the config must be a JSON object");
    JobConfig c;
    c.mode = mode_from(field(j, "mode", ""));

    if (j.contains("n_max")) c.n_max = positive_integer(j["n_max"], ".n_max");
    if (j.contains("x_max")) c.x_max = positive(j["x_max"], ".x_max");
    if (j.contains("tol")) c.tol = positive(j["tol"], ".tol");
    if (j.contains("samples_per_unit"))
        c.samples_per_unit = static_cast<int>(positive_integer(j["samples_per_unit"], ".samples_per_unit"));
    if (j.contains("seed")) c.seed = static_cast<unsigned long>(integer_from_json(j["seed"], ".seed"));

    const bool needs_system = c.mode == Mode::Orbit || c.mode == Mode::ReturnSet || c.mode == Mode::Trichotomy;
    const bool needs_variety = c.mode == Mode::ReturnSet || c.mode == Mode::Trichotomy;
    if (needs_system || j.contains("system")) {
        c.system = system_from_json(field(j, "system", ""), ".system");
        // The point may live at the top level or inside the system object.
        const Json& sys = j["system"];
        if (j.contains("a"))
            c.a = vector_from_json(j["a"], ".a");
        else if (sys.contains("a"))
            c.a = vector_from_json(sys["a"], ".system.a");
        else
            field(j, "a", "");
        if (c.a->size() != c.system->dimension())
            throw ValidationError(".a", "length " + std::to_string(c.a->size()) + " does not match the system dimension " +
                                            std::to_string(c.system->dimension()));
    }
    if (needs_variety || j.contains("variety")) {
        c.variety = variety_from_json(field(j, "variety", ""), ".variety");
        if (c.system && c.variety->dimension() != c.system->dimension())
            throw ValidationError(".variety", "exponent length does not match the system dimension");
    }
    switch (c.mode) {
    case Mode::MatPow:
        c.g = matrix_from_json(field(j, "g", ""), ".g");
        c.x = number_from_json(field(j, "x", ""), ".x");
        break;
    case Mode::Linearize:
        c.germ = germ_from_json(field(j, "germ", ""), ".germ");
        if (j.contains("rational")) {
            if (!j["rational"].is_boolean()) throw ValidationError(".rational", "expected a boolean");
            c.rational = j["rational"].get<bool>();
        }
        break;
    case Mode::RecSeqZeros:
        c.recurrence = recurrence_from_json(field(j, "recurrence", ""), ".recurrence");
        break;
    default:
        break;
    }
    return c;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return 2;
    if (dynamic_cast<const ValidationError*>(&e)) return 3;
    if (dynamic_cast<const ContractError*>(&e)) return 4;
    if (dynamic_cast<const InvariantError*>(&e)) return 5;
    return 1;
}

namespace {

Json strings(const RationalMatrix& m) {
    Json out = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < m.cols(); ++k) row.push_back(smld::to_string(m(i, k)));
        out.push_back(row);
    }
    return out;
}

Json strings(const RationalGerm& g) {
    auto c = g.coefficients();
    while (!c.empty() && c.back() == 0) c.pop_back();
    Json out = Json::array();
    for (const auto& v : c) out.push_back(smld::to_string(v));
    return out;
}

Json run_matpow(const JobConfig& c) {
    const JordanDecomposition jd = jordan_real(*c.g);
    Json out = {{"power", to_json(real_power(jd, c.x))},
                {"partition", jd.partition},
                {"eigenvalues", jd.eigenvalues},
                {"exact", false}};
    if (jd.exact && c.x >= 0 && c.x == std::floor(c.x) && c.x < 1e6) {
        out["power_exact"] = strings(exact_power(jd, static_cast<long>(c.x)));
        out["exact"] = true;
    }
    return out;
}

// Largest coefficient of alpha o f - target through the germ order,
// relative to the largest target coefficient.
double defect(const Germ& alpha, const Germ& f, const Germ& target) {
    const Germ lhs = compose(alpha, f, f.order());
    double worst = 0.0, size = 1.0;
    for (int k = 1; k <= f.order(); ++k) {
        worst = std::max(worst, std::abs(lhs[k] - target[k]));
        size = std::max(size, std::abs(target[k]));
    }
    return worst / size;
}

Json abel_side(const Germ& f, int side) {
    if (!side_attracting(f, side)) return {{"side", side}, {"attracting", false}};
    const AbelCoordinate psi(f, side);
    double worst = 0.0;
    for (int i = 1; i <= 32; ++i) worst = std::max(worst, psi.defect(side * psi.x_max() * i / 32.0));
    return {{"side", side},
            {"attracting", true},
            {"contact_order", psi.contact_order()},
            {"leading", psi.leading()},
            {"log_coefficient", psi.log_coefficient()},
            {"x_max", psi.x_max()},
            {"defect", worst}};
}

Json run_linearize(const JobConfig& c) {
    const Germ& f = *c.germ;
    const FixedPointClass cls = classify_germ(f);
    Json out = {{"class", smld::to_string(cls.kind)}};
    switch (cls.kind) {
    case FixedPointClass::Kind::IdenticallyZero:
        break;
    case FixedPointClass::Kind::Hyperbolic: {
        out["lambda"] = cls.lambda;
        const Germ alpha = koenigs(f);
        Germ target = alpha;
        for (int k = 1; k <= target.order(); ++k) target.at(k) *= cls.lambda;
        out["koenigs"] = to_json(alpha);
        out["defect"] = defect(alpha, f, target);
        if (c.rational) out["koenigs_exact"] = strings(koenigs(to_rational(f)));
        break;
    }
    case FixedPointClass::Kind::Superattracting: {
        const auto b = boettcher(f);
        out["degree"] = b.degree;
        out["sigma"] = b.sigma;
        out["rho"] = b.rho;
        out["boettcher"] = to_json(b.alpha);
        const Germ target = compose(Germ::monomial(static_cast<double>(b.sigma), b.degree, f.order()), b.alpha,
                                    f.order());
        out["defect"] = defect(b.alpha, f, target);
        if (c.rational) {
            const auto exact = boettcher(to_rational(f));
            out["boettcher_exact"] = strings(exact.alpha);
            out["rho_exact"] = smld::to_string(exact.rho);
        }
        break;
    }
    case FixedPointClass::Kind::Indifferent: {
        out["sigma"] = cls.sigma;
        // sigma = -1: work with the parabolic square.
        const Germ p = cls.sigma == 1 ? f : square_germ(f);
        if (cls.sigma == -1) out["square"] = to_json(p);
        Json sides = Json::array();
        for (int side : {1, -1}) sides.push_back(abel_side(p, side));
        out["abel"] = sides;
        break;
    }
    }
    return out;
}

// Rows (n, coordinates..., H) along the interpolated orbit: integers before
// the transient, then samples_per_unit points per unit of n.
void write_orbit_csv(const std::string& path, const InterpolationBundle& b, const Variety* H, const Vector& a,
                     long n_max, int per_unit) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.precision(17);
    out << "n";
    for (int i = 0; i < b.system().dimension(); ++i) out << ",x" << i + 1;
    if (H) out << ",H";
    out << "\n";
    auto row = [&](double n, const Vector& p) {
        out << n;
        for (Eigen::Index i = 0; i < p.size(); ++i) out << "," << p[i];
        if (H) out << "," << (*H)(p);
        out << "\n";
    };
    Vector p = a;
    for (long n = 0; n < b.transient() && n <= n_max; ++n) {
        row(static_cast<double>(n), p);
        p = step(b.system(), p);
    }
    const long N = b.modulus();
    for (long i = static_cast<long>(b.transient()) * per_unit; i <= n_max * per_unit; ++i) {
        const double n = static_cast<double>(i) / per_unit;
        const double rel = n - b.transient();
        const long j = static_cast<long>(std::floor(rel)) % N;
        row(n, b(j, (rel - static_cast<double>(j)) / static_cast<double>(N)));
    }
}

Json run_orbit(const JobConfig& c, const RunOptions& o) {
    BundleOptions bo;
    const InterpolationBundle b = build_bundle(*c.system, *c.a, bo);
    const long N = b.modulus();
    const long m_max = std::max(0L, (c.n_max - b.transient()) / N);
    const BundleReport rep = verify_bundle(b, *c.system, *c.a, m_max, 1e-8);

    // Functional equation G_j(x + 1) = Phi^N(G_j(x)) at seeded random x.
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> ux(0.0, c.x_max.value_or(std::max<double>(1.0, static_cast<double>(m_max))));
    double fe = 0.0;
    for (int k = 0; k < 16; ++k) {
        const double x = ux(rng);
        for (long j = 0; j < N; ++j) {
            Vector y = b(j, x);
            for (long i = 0; i < N; ++i) y = step(*c.system, y);
            fe = std::max(fe, (b(j, x + 1) - y).cwiseAbs().maxCoeff());
        }
    }
    Json methods = Json::array();
    for (const auto& e : b.evaluators()) methods.push_back(e->method());
    if (!o.orbit_out.empty())
        write_orbit_csv(o.orbit_out, b, c.variety ? &*c.variety : nullptr, *c.a, c.n_max, c.samples_per_unit);
    return {{"modulus", N},
            {"transient", b.transient()},
            {"methods", methods},
            {"base_point", to_json(b.base_point())},
            {"n_max", c.n_max},
            {"max_deviation", rep.max_deviation},
            {"functional_equation_residual", fe},
            {"pass", rep.pass}};
}

ReturnSetOptions return_set_options(const JobConfig& c) {
    ReturnSetOptions o;
    o.classes.tol = c.tol;
    return o;
}

Json report_json(const ReturnSetReport& r) {
    Json out = to_json(r.decomposition);
    Json verdicts = Json::array();
    for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
    out["transient"] = r.transient;
    out["hits"] = r.hits;
    out["verdicts"] = verdicts;
    // Exceptional sets are only known on the computed range.
    out["range_limited"] = true;
    return out;
}

void maybe_write_orbit(const JobConfig& c, const RunOptions& o) {
    if (o.orbit_out.empty()) return;
    const InterpolationBundle b = build_bundle(*c.system, *c.a);
    write_orbit_csv(o.orbit_out, b, c.variety ? &*c.variety : nullptr, *c.a, c.n_max, c.samples_per_unit);
}

Json run_returnset(const JobConfig& c, const RunOptions& o) {
    const auto r = analyze_return_set(*c.system, *c.a, *c.variety, c.n_max, return_set_options(c));
    maybe_write_orbit(c, o);
    return report_json(r);
}

Json run_trichotomy(const JobConfig& c, const RunOptions& o) {
    const auto t = trichotomy_check(*c.system, *c.a, *c.variety, c.n_max, return_set_options(c));
    maybe_write_orbit(c, o);
    Json out = report_json(t.report);
    out["label"] = smld::to_string(t.label);
    return out;
}

Json run_recseq(const JobConfig& c) {
    const auto zeros = recurrence_zero_set(*c.recurrence, c.n_max, c.tol);
    return {{"zeros", zeros}, {"n_max", c.n_max}, {"exp_poly", to_json(recurrence_exp_poly(*c.recurrence))}};
}

} // namespace

RunResult run(const JobConfig& c, const RunOptions& options) {
    RunResult r;
    try {
        log::info("mode " + to_string(c.mode));
        switch (c.mode) {
        case Mode::MatPow: r.report = run_matpow(c); break;
        case Mode::Linearize: r.report = run_linearize(c); break;
        case Mode::Orbit: r.report = run_orbit(c, options); break;
        case Mode::ReturnSet: r.report = run_returnset(c, options); break;
        case Mode::RecSeqZeros: r.report = run_recseq(c); break;
        case Mode::Trichotomy: r.report = run_trichotomy(c, options); break;
        }
        r.report["mode"] = to_string(c.mode);
    } catch (const Error& e) {
        r.exit_code = exit_code_for(e);
        r.report = {{"mode", to_string(c.mode)}, {"error", {{"kind", e.kind()}, {"message", e.what()}}}};
        log::info(e.what());
    }
    return r;
}

} // namespace smld::cli
