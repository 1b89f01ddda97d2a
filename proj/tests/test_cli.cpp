#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "golden_systems.hpp"
#include "smld/cli.hpp"

using namespace smld;
using namespace smld::cli;

namespace {

const char* evens_job = R"({"mode": "returnset",
  "system": {"factors": [{"kind": "germ", "coeffs": [-1]}]},
  "a": [0.3],
  "variety": {"terms": [{"exponents": [1], "c": 1}, {"exponents": [0], "c": -0.3}]},
  "n_max": 40})";

struct Process {
    int code;
    std::string out;
};

Process run_binary(const std::string& args, const std::string& input) {
    const std::string in_path = "cli_test_input.json";
    std::ofstream(in_path) << input;
    const std::string cmd = std::string(SMLD_BINARY) + " " + args + " < " + in_path + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

} // namespace

TEST_CASE("parse_config examples") {
    const JobConfig c = parse_config(evens_job);
    CHECK(c.mode == Mode::ReturnSet);
    CHECK(c.n_max == 40);
    REQUIRE(c.system);
    CHECK(c.system->dimension() == 1);

    try {
        parse_config(R"({"mode": "returnset", "system": {"factors": [{"kind": "germ", "coeffs": [0.5]}]},
                         "variety": {"terms": [{"exponents": [1], "c": 1}]}})");
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.path() == ".a");
    }
    CHECK_THROWS_AS(parse_config("{not json"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"mode": "nope"})"), ValidationError);
    try {
        parse_config(R"({"mode": "matpow", "g": [[1, 2], [3]], "x": 1})");
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.path() == ".g[1]");
    }
    try {
        parse_config(R"({"mode": "recseq-zeros", "recurrence": {"coeffs": [1, 2], "init": [1]}, "n_max": -3})");
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.path() == ".n_max");
    }
}

TEST_CASE("run examples") {
    auto r = run(parse_config(evens_job));
    CHECK(r.exit_code == 0);
    CHECK(r.report["modulus"] == 2);
    CHECK(r.report["exceptional"] == Json::array());
    REQUIRE(r.report["progressions"].size() == 1);
    CHECK(r.report["progressions"][0]["residue"] == 0);
    CHECK(r.report["progressions"][0]["start"] == 0);

    auto m = run(parse_config(R"({"mode": "matpow", "g": [[2, 1], [0, 2]], "x": 3})"));
    CHECK(m.report["power_exact"] == Json::parse(R"([["8", "12"], ["0", "8"]])"));
    CHECK(m.report["power"] == Json::parse("[[8.0, 12.0], [0.0, 8.0]]"));

    // a_n = 8 - 2^n: a_n = 3 a_{n-1} - 2 a_{n-2}, a_0 = 7, a_1 = 6.
    auto z = run(parse_config(R"({"mode": "recseq-zeros", "recurrence": {"coeffs": [3, -2], "init": [7, 6]}, "n_max": 60})"));
    CHECK(z.report["zeros"] == Json::parse("[3]"));

    auto t = run(parse_config(R"({"mode": "trichotomy", "system": {"factors": [{"kind": "germ", "coeffs": [0.5]}]},
        "a": [1], "variety": {"terms": [{"exponents": [1], "c": 1}, {"exponents": [0], "c": -1}]}, "n_max": 50})"));
    CHECK(t.report["label"] == "finite");
    CHECK(t.report["exceptional"] == Json::parse("[0]"));

    auto lin = run(parse_config(R"({"mode": "linearize", "germ": [0.5, 1], "rational": true})"));
    CHECK(lin.report["koenigs_exact"][1] == "4");
    CHECK(lin.report["defect"].get<double>() <= 1e-14);

    auto orb = run(parse_config(R"({"mode": "orbit", "system": {"factors": [{"kind": "germ", "coeffs": [0.5, 1]}]},
        "a": [0.1], "n_max": 20})"));
    CHECK(orb.report["pass"] == true);

    // Contract errors map to exit 4 with an error report.
    auto bad = run(parse_config(R"({"mode": "matpow", "g": [[0, -1], [1, 0]], "x": 1})"));
    CHECK(bad.exit_code == 4);
    CHECK(bad.report["error"]["kind"] == "SpectrumError");
    auto esc = run(parse_config(R"({"mode": "returnset", "system": {"factors": [{"kind": "germ", "coeffs": [2, 1]}]},
        "a": [0.1], "variety": {"terms": [{"exponents": [1], "c": 1}]}})"));
    CHECK(esc.exit_code == 4);
}

TEST_CASE("reports are deterministic") {
    const JobConfig c = parse_config(evens_job);
    CHECK(render_json(run(c).report) == render_json(run(c).report));
    const JobConfig o = parse_config(R"({"mode": "orbit", "seed": 7,
        "system": {"factors": [{"kind": "germ", "coeffs": [1, -1]}]}, "a": [0.3], "n_max": 30})");
    CHECK(render_json(run(o).report) == render_json(run(o).report));
    // Keys sorted, 17 significant digits.
    CHECK(render_json(Json{{"b", 0.1}, {"a", 1}}, 0) == R"({"a":1,"b":0.10000000000000001})");
}

TEST_CASE("serialized domain objects round-trip") {
    for (const auto& g : smld::testing::golden_return_systems()) {
        CAPTURE(g.name);
        const Json sj = parse_json(render_json(to_json(g.system, &g.a)));
        const ProductSystem back = system_from_json(sj, "");
        CHECK(render_json(to_json(back, &g.a)) == render_json(to_json(g.system, &g.a)));
        CHECK(vector_from_json(sj["a"], ".a") == g.a);
        const Variety hv = variety_from_json(parse_json(render_json(to_json(g.H))), "");
        REQUIRE(hv.terms().size() == g.H.terms().size());
        for (std::size_t i = 0; i < hv.terms().size(); ++i) {
            CHECK(hv.terms()[i].c == g.H.terms()[i].c);
            CHECK(hv.terms()[i].exponents == g.H.terms()[i].exponents);
        }
        const auto d = analyze_return_set(g.system, g.a, g.H, 60).decomposition;
        const auto dd = decomposition_from_json(parse_json(render_json(to_json(d))), "");
        CHECK(dd.modulus == d.modulus);
        CHECK(dd.exceptional == d.exceptional);
        CHECK(dd.reconstruct() == d.reconstruct());
    }
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int k = 0; k < 20; ++k) {
        Germ f({u(rng), u(rng), u(rng)}, default_germ_order);
        CHECK(germ_from_json(parse_json(render_json(to_json(f))), "") == f);
        Matrix m = Matrix::Random(3, 3);
        CHECK(matrix_from_json(parse_json(render_json(to_json(m))), "") == m);
        ExpPoly ep({{u(rng), u(rng), 1, {}, {}}, {u(rng), u(rng) + 7, 0, {}, {}}});
        const ExpPoly back = exp_poly_from_json(parse_json(render_json(to_json(ep))), "");
        REQUIRE(back.terms().size() == ep.terms().size());
        for (std::size_t i = 0; i < ep.terms().size(); ++i) {
            CHECK(back.terms()[i].c == ep.terms()[i].c);
            CHECK(back.terms()[i].mu == ep.terms()[i].mu);
            CHECK(back.terms()[i].d == ep.terms()[i].d);
        }
        Recurrence r{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const Recurrence rb = recurrence_from_json(parse_json(render_json(to_json(r))), "");
        CHECK(rb.coeffs == r.coeffs);
        CHECK(rb.init == r.init);
    }
    IntMatrix cat(2, 2);
    cat << 2, 1, 1, 1;
    const MonomialMap mm(cat, smld::testing::vec({-2, 0.5}));
    CHECK(monomial_map_from_json(parse_json(render_json(to_json(mm))), "") == mm);
}

TEST_CASE("binary exit codes and flags") {
    auto ok = run_binary("", evens_job);
    CHECK(ok.code == 0);
    CHECK(Json::parse(ok.out)["modulus"] == 2);
    CHECK(run_binary("", "garbage").code == 2);
    CHECK(run_binary("", R"({"mode": "returnset"})").code == 3);
    CHECK(run_binary("", R"({"mode": "matpow", "g": [[-1]], "x": 1})").code == 4);
    CHECK(run_binary("--bogus-flag", evens_job).code == 2);
    // --n-max overrides the config.
    auto shorter = run_binary("--n-max 10", evens_job);
    CHECK(Json::parse(shorter.out)["hits"] == Json::parse("[0, 2, 4, 6, 8, 10]"));
    // Orbit CSV: header plus one row per sample.
    const std::string csv = "cli_test_orbit.csv";
    auto orb = run_binary("--orbit-out " + csv,
                          R"({"mode": "orbit", "system": {"factors": [{"kind": "germ", "coeffs": [0.5]}]}, "a": [1],
                              "variety": {"terms": [{"exponents": [1], "c": 1}]}, "n_max": 5, "samples_per_unit": 2})");
    CHECK(orb.code == 0);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,x1,H");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 11);
    // Identical invocations give byte-identical output.
    CHECK(run_binary("", evens_job).out == ok.out);
}
