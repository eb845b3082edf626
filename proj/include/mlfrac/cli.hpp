#pragma once

// Command-line front end. Needs CLI11 on the include path.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mlfrac/ab_core.hpp"
#include "mlfrac/acceptance.hpp"
#include "mlfrac/catalog.hpp"
#include "mlfrac/csv.hpp"
#include "mlfrac/errors.hpp"
#include "mlfrac/fode.hpp"
#include "mlfrac/heat.hpp"
#include "mlfrac/specfun.hpp"
#include "mlfrac/types.hpp"

namespace mlfrac::cli {

/// Everything the subcommands read from the command line.
struct RunConfig {
    std::string subcommand;
    std::string op;  ///< deriv kind or heat mode
    double alpha = 0.5;
    std::string norm = "unit";
    std::size_t n = 1024;
    double t0 = 0.0;
    double t_end = 1.0;
    std::string fn;
    std::string input;
    std::string output = "-";
    // mlf
    double beta = 1.0;
    std::vector<double> z;
    std::string hyper;
    double x = 0.0;
    std::optional<double> harmonic;
    std::optional<double> gamma;
    // heat
    double r1 = 1.0;
    double r2 = 2.0;
    double length = 1.0;
    double k = 1.0;
    double q_dot = 1.0;
    double area = 1.0;
    // verify
    std::optional<double> verify_alpha;
    std::string verify_norm = "both";
    std::vector<int> criteria;
};

namespace detail {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Normalization normalization(const std::string& s) {
    const auto n = parse_normalization(s);
    if (!n) throw UsageError("unknown normalization '" + s + "' (expected unit or gamma-corrected)");
    return *n;
}

/// Output sink: stdout for "-", otherwise a file opened in binary mode.
class Sink {
public:
    Sink(const std::string& path, std::ostream& out) : stream_(&out) {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
            if (!*file_) throw UsageError("cannot open '" + path + "' for writing");
            stream_ = file_.get();
        }
    }
    std::ostream& stream() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

inline SampledFunction load_function(const RunConfig& cfg, bool with_derivs) {
    if (cfg.fn.empty() == cfg.input.empty()) throw UsageError("give exactly one of --fn and --input");
    if (!cfg.input.empty()) {
        std::ifstream in(cfg.input, std::ios::binary);
        if (!in) throw UsageError("cannot open '" + cfg.input + "'");
        return csv::read_sampled(in);
    }
    if (cfg.n < 2) throw DomainError("--n must be at least 2");
    return CatalogFunction::parse(cfg.fn).sample(cfg.t0, cfg.t_end, cfg.n, with_derivs);
}

inline std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto v = csv::detail::parse_number(item);
        if (!v) throw UsageError("malformed number '" + item + "' in '" + s + "'");
        out.push_back(*v);
    }
    return out;
}

inline int run_mlf(const RunConfig& cfg, std::ostream& out) {
    if (cfg.gamma) {
        out << csv::format_double(specfun::gamma_fn(*cfg.gamma)) << '\n';
    } else if (cfg.harmonic) {
        out << csv::format_double(specfun::harmonic_number(*cfg.harmonic)) << '\n';
    } else if (!cfg.hyper.empty()) {
        const auto slash = cfg.hyper.find('/');
        if (slash == std::string::npos) throw UsageError("--hyper expects a1,a2,a3/b1,b2");
        const auto up = parse_numbers(cfg.hyper.substr(0, slash));
        const auto lo = parse_numbers(cfg.hyper.substr(slash + 1));
        if (up.size() != 3 || lo.size() != 2) throw UsageError("--hyper expects three upper and two lower parameters");
        out << csv::format_double(specfun::hyper_3f2({{up[0], up[1], up[2]}, {lo[0], lo[1]}, cfg.x})) << '\n';
    } else {
        if (cfg.z.empty()) throw UsageError("mlf needs --z, --hyper, --harmonic or --gamma");
        for (double z : cfg.z) out << csv::format_double(specfun::mittag_leffler2(cfg.alpha, cfg.beta, z)) << '\n';
    }
    return 0;
}

inline int run_deriv(const RunConfig& cfg, std::ostream& out) {
    const AlphaParam p(cfg.alpha, normalization(cfg.norm));
    const auto f = load_function(cfg, true);
    OperatorResult r;
    if (cfg.op == "abc") {
        r = ab_core::abc_derivative(f, p);
    } else if (cfg.op == "abr") {
        r = ab_core::abr_derivative(f, p);
    } else if (cfg.op == "abr-direct") {
        r = ab_core::abr_derivative_direct(f, p);
    } else if (cfg.op == "cf") {
        r = ab_core::cf_derivative(f, p);
    } else {
        throw UsageError("unknown derivative '" + cfg.op + "' (expected abc, abr, abr-direct or cf)");
    }
    Sink sink(cfg.output, out);
    csv::write_result(sink.stream(), r);
    return 0;
}

inline int run_integral(const RunConfig& cfg, std::ostream& out) {
    const AlphaParam p(cfg.alpha, normalization(cfg.norm));
    const auto r = ab_core::ab_integral(load_function(cfg, false), p);
    Sink sink(cfg.output, out);
    csv::write_result(sink.stream(), r);
    return 0;
}

inline int run_solve(const RunConfig& cfg, std::ostream& out) {
    const AlphaParam p(cfg.alpha, normalization(cfg.norm));
    const auto f = fode::solve_abc_ode({load_function(cfg, false), p});
    Sink sink(cfg.output, out);
    csv::write_sampled(sink.stream(), f);
    return 0;
}

inline int run_heat(const RunConfig& cfg, std::ostream& out) {
    const Normalization norm = normalization(cfg.norm);
    if (cfg.op == "drop") {
        const heat::HeatShellSpec s{cfg.r1, cfg.r2, cfg.length, cfg.k, cfg.q_dot, cfg.alpha, norm};
        out << csv::format_double(heat::shell_temperature_drop(s)) << '\n';
        return 0;
    }
    if (cfg.op != "flux") throw UsageError("unknown heat mode '" + cfg.op + "' (expected drop or flux)");
    RunConfig radial = cfg;
    if (cfg.input.empty()) {
        radial.t0 = cfg.r1;
        radial.t_end = cfg.r2;
    }
    const auto temp = load_function(radial, false);
    heat::RadialProfile prof{temp.grid(), temp.values(), cfg.alpha, cfg.k, cfg.area, norm};
    Sink sink(cfg.output, out);
    csv::write_sampled(sink.stream(), heat::heat_flux(prof));
    return 0;
}

inline int run_verify(const RunConfig& cfg, std::ostream& out) {
    std::vector<Normalization> norms;
    if (cfg.verify_norm == "both") {
        norms = {Normalization::unit, Normalization::gamma_corrected};
    } else {
        norms = {normalization(cfg.verify_norm)};
    }
    if (cfg.verify_alpha) AlphaParam(*cfg.verify_alpha).require_open("verify");
    std::vector<const acceptance::Criterion*> selected;
    if (cfg.criteria.empty()) {
        for (const auto& c : acceptance::criteria()) selected.push_back(&c);
    } else {
        for (int id : cfg.criteria) {
            const auto* c = acceptance::find_criterion(id);
            if (!c) throw UsageError("no verification check numbered " + std::to_string(id));
            selected.push_back(c);
        }
    }

    std::vector<std::pair<Normalization, VerificationReport>> rows;
    bool all = true;
    for (auto norm : norms) {
        acceptance::SuiteConfig sc;
        sc.norm = norm;
        sc.alpha = cfg.verify_alpha;
        for (const auto* c : selected) {
            rows.emplace_back(norm, c->run(sc));
            all = all && rows.back().second.passed;
        }
    }

    if (cfg.output != "-") {
        char line[160];
        std::snprintf(line, sizeof line, "%-20s %-16s %-6s %-12s %-12s %s\n", "check", "norm", "result",
                      "max_abs_err", "max_rel_err", "tolerance");
        out << line;
        for (const auto& [norm, r] : rows) {
            std::snprintf(line, sizeof line, "%-20s %-16s %-6s %-12.3e %-12.3e %.3e\n", r.name.c_str(),
                          std::string(to_string(norm)).c_str(), r.passed ? "PASS" : "FAIL", r.max_abs_err,
                          r.max_rel_err, r.tolerance);
            out << line;
            if (!r.passed) out << "    " << r.detail << '\n';
        }
    }
    if (!cfg.output.empty()) {
        Sink sink(cfg.output, out);
        acceptance::write_reports_csv(sink.stream(), rows);
    }
    return all ? 0 : 1;
}

inline void add_function_options(CLI::App* app, RunConfig& cfg) {
    app->add_option("--alpha", cfg.alpha, "fractional order")->required();
    app->add_option("--norm", cfg.norm, "normalization: unit | gamma-corrected");
    app->add_option("--fn", cfg.fn, "builtin function: const:c, poly:c0,c1,..., exp:l, sin:w");
    app->add_option("--input", cfg.input, "CSV file with t,value rows on a uniform grid");
    app->add_option("--n", cfg.n, "number of grid intervals");
    app->add_option("--t0", cfg.t0, "left end of the interval");
    app->add_option("--T", cfg.t_end, "right end of the interval");
    app->add_option("-o,--output", cfg.output, "output CSV path, - for stdout");
}

}  // namespace detail

/// Runs the command line (without the program name). Exit codes: 0 success,
/// 1 failed verification, 2 usage or domain error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Fractional operators with Mittag-Leffler kernels", "mlfrac"};
    app.require_subcommand(1);

    auto* mlf = app.add_subcommand("mlf", "evaluate E_alpha,beta(z), 3F2, H(alpha) or Gamma");
    mlf->add_option("--alpha", cfg.alpha, "order alpha in (0, 2]");
    mlf->add_option("--beta", cfg.beta, "second parameter (default 1)");
    mlf->add_option("--z", cfg.z, "argument(s)");
    mlf->add_option("--hyper", cfg.hyper, "3F2 parameters a1,a2,a3/b1,b2");
    mlf->add_option("--x", cfg.x, "3F2 argument");
    mlf->add_option("--harmonic", cfg.harmonic, "fractional harmonic number H(alpha)");
    mlf->add_option("--gamma", cfg.gamma, "Gamma function");

    auto* deriv = app.add_subcommand("deriv", "fractional derivative of a function, CSV out");
    deriv->add_option("kind", cfg.op, "abc | abr | abr-direct | cf")->required();
    detail::add_function_options(deriv, cfg);

    auto* integral = app.add_subcommand("integral", "fractional integral, CSV out");
    detail::add_function_options(integral, cfg);

    auto* solve = app.add_subcommand("solve", "solve ABC D^alpha f = u, CSV out");
    detail::add_function_options(solve, cfg);

    auto* heat_cmd = app.add_subcommand("heat", "cylindrical shell: temperature drop or radial heat flux");
    heat_cmd->add_option("mode", cfg.op, "drop | flux")->required();
    detail::add_function_options(heat_cmd, cfg);
    heat_cmd->add_option("--r1", cfg.r1, "inner radius (m)");
    heat_cmd->add_option("--r2", cfg.r2, "outer radius (m)");
    heat_cmd->add_option("--L", cfg.length, "length (m)");
    heat_cmd->add_option("--k", cfg.k, "thermal conductivity (W/m K)");
    heat_cmd->add_option("--q", cfg.q_dot, "heat rate (W)");
    heat_cmd->add_option("--area", cfg.area, "area A (m^2) for the flux");

    auto* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("--alpha", cfg.verify_alpha, "use this alpha in place of each check's alpha set");
    verify->add_option("--norm", cfg.verify_norm, "unit | gamma-corrected | both");
    verify->add_option("--check", cfg.criteria, "run only these numbered checks");
    verify->add_option("-o,--output", cfg.output, "CSV report path, - for stdout");

    if (!args.empty() && !args.front().empty() && args.front()[0] != '-' && !app.get_subcommand_no_throw(args.front())) {
        err << "mlfrac: unknown subcommand '" << args.front() << "' (expected mlf, deriv, integral, solve, heat or verify)\n";
        return 2;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        cfg.subcommand = app.get_subcommands().front()->get_name();
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        for (char& c : msg) {
            if (c == '\n') c = ' ';
        }
        err << "mlfrac: " << msg << '\n';
        return 2;
    }

    try {
        if (verify->parsed()) {
            if (verify->count("--output") == 0) cfg.output.clear();
            return detail::run_verify(cfg, out);
        }
        if (mlf->parsed()) return detail::run_mlf(cfg, out);
        if (deriv->parsed()) return detail::run_deriv(cfg, out);
        if (integral->parsed()) return detail::run_integral(cfg, out);
        if (solve->parsed()) return detail::run_solve(cfg, out);
        if (heat_cmd->parsed()) return detail::run_heat(cfg, out);
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& c : msg) {
            if (c == '\n') c = ' ';
        }
        err << "mlfrac: " << msg << '\n';
        return 2;
    }
    return 2;
}

}  // namespace mlfrac::cli
