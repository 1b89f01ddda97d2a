#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "log.hpp"
#include "smld/cli.hpp"

namespace {

std::string read_all(std::istream& in) {
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

int main(int argc, char** argv) {
    using namespace smld;
    CLI::App app{"Orbit interpolation and return-set analysis"};
    std::string config_path;
    cli::RunOptions options;
    std::optional<double> tol;
    std::optional<long> n_max;
    std::optional<unsigned long> seed;
    app.add_option("--config", config_path, "job config (JSON); standard input when omitted");
    app.add_option("--orbit-out", options.orbit_out, "write the orbit table as CSV");
    app.add_option("--tol", tol, "override the config tolerance")->check(CLI::PositiveNumber);
    app.add_option("--n-max", n_max, "override the config n_max")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for randomized checks");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        std::string text;
        if (config_path.empty() || config_path == "-") {
            text = read_all(std::cin);
        } else {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "smld: cannot read " << config_path << "\n";
                return 2;
            }
            text = read_all(in);
        }
        cli::JobConfig config = cli::parse_config(text);
        if (tol) config.tol = *tol;
        if (n_max) config.n_max = *n_max;
        if (seed) config.seed = *seed;
        cli::log::debug("config parsed");
        const cli::RunResult r = cli::run(config, options);
        std::cout << render_json(r.report) << "\n";
        if (r.exit_code != 0) std::cerr << "smld: " << r.report["error"]["message"].get<std::string>() << "\n";
        return r.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "smld: " << e.what() << "\n";
        return cli::exit_code_for(e);
    }
}
