#pragma once

// Command implementations behind the ncbateman executable. Each command
// renders its whole artifact into memory first, so a failing run never
// leaves a partial file behind.

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "params.hpp"
#include "spectra.hpp"
#include "verify.hpp"

namespace ncbateman::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int { ok = 0, usage_error = 1, verification_failure = 2, domain_error = 3 };

enum class Format { json, csv };

struct Options {
    std::string command;
    std::optional<std::string> config_path;
    std::optional<std::string> out_path;
    std::optional<std::string> plot_path;
    std::optional<Format> format;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
};

/// Signals a usage problem detected after option parsing (exit code 1).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Artifact {
    std::string body;
    std::string plot; ///< SVG, empty unless requested
    int exit_code = ok;
};

namespace detail {

inline json complex_json(const cplx& z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json params_json(const SystemParams& p)
{
    return json{{"gamma", p.gamma}, {"omega", p.omega}, {"epsilon", p.epsilon}, {"eta", p.eta}, {"theta", p.theta}, {"hbar", p.hbar}};
}

inline std::string fmt(double v) { return io::format_double(v); }

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

} // namespace detail

inline Artifact cmd_derive(const RunConfig& cfg, Format format)
{
    const auto vp = validate(cfg.params);
    const auto d = derive(vp);
    const auto dual = duality(cfg.params);
    const auto [lp, lm] = bateman_roots(cfg.params.gamma, cfg.params.omega);
    const auto [rp, rm] = bateman_roots(dual.gamma_R, cfg.params.omega);

    std::optional<double> bracket;
    std::string bracket_note;
    try {
        bracket = dirac_bracket(cfg.params);
    } catch (const SingularityError& e) {
        bracket_note = e.what();
    }
    std::vector<std::string> notes;
    if (cfg.params.gamma == 0.0 && dual.gamma_R != 0.0)
        notes.push_back("NC-induced damping: gamma = 0 but gamma_R = theta omega^2 / hbar = " + detail::fmt(dual.gamma_R));
    if (!vp.positive_regime()) notes.push_back("outside the positive regime (eta > 1, epsilon > omega^2): derived values may be complex");

    const std::pair<const char*, cplx> fields[] = {
        {"mu", d.mu},         {"omega1_sq", d.omega1_sq}, {"omega2_sq", d.omega2_sq}, {"gamma1", d.gamma1}, {"gamma2", d.gamma2},
        {"mu1", d.mu1},       {"mu2", d.mu2},             {"nu1_sq", d.nu1_sq},       {"nu2_sq", d.nu2_sq}};

    Artifact a;
    if (format == Format::csv) {
        std::ostringstream os;
        io::CsvWriter w(os, {"quantity", "re", "im"});
        for (const auto& [name, z] : fields) w.row({name, detail::fmt(z.real()), detail::fmt(z.imag())});
        w.row({"gamma_R", detail::fmt(dual.gamma_R), "0"});
        w.row({"theta_star", dual.theta_star.value ? detail::fmt(*dual.theta_star.value) : "", ""});
        w.row({"critical_ratio", detail::fmt(dual.critical_ratio), "0"});
        w.row({"dirac_bracket", bracket ? detail::fmt(*bracket) : "", ""});
        w.row({"lambda_plus", detail::fmt(lp.real()), detail::fmt(lp.imag())});
        w.row({"lambda_minus", detail::fmt(lm.real()), detail::fmt(lm.imag())});
        w.row({"lambda_plus_R", detail::fmt(rp.real()), detail::fmt(rp.imag())});
        w.row({"lambda_minus_R", detail::fmt(rm.real()), detail::fmt(rm.imag())});
        a.body = os.str();
        return a;
    }

    json derived = json::object();
    for (const auto& [name, z] : fields) derived[name] = detail::complex_json(z);
    json j{{"command", "derive"},
           {"params", detail::params_json(cfg.params)},
           {"positive_regime", vp.positive_regime()},
           {"derived", derived},
           {"max_relative_imag", d.max_relative_imag()},
           {"gamma_R", dual.gamma_R},
           {"theta_star", dual.theta_star.value ? json(*dual.theta_star.value) : json(nullptr)},
           {"theta_star_note", dual.theta_star.reason},
           {"critical_ratio", std::isfinite(dual.critical_ratio) ? json(dual.critical_ratio) : json("inf")},
           {"regime", to_string(dual.regime)},
           {"bateman_roots", {{"lambda_plus", detail::complex_json(lp)}, {"lambda_minus", detail::complex_json(lm)}}},
           {"renormalized_roots", {{"lambda_plus", detail::complex_json(rp)}, {"lambda_minus", detail::complex_json(rm)}}},
           {"dirac_bracket", bracket ? json(*bracket) : json(nullptr)},
           {"dirac_bracket_note", bracket_note},
           {"notes", notes}};
    a.body = detail::dump(j);
    return a;
}

inline Artifact cmd_spectrum(const RunConfig& cfg, Format format)
{
    const auto vp = validate(cfg.params);
    if (!vp.positive_regime())
        throw DomainError("regime violation: spectrum requires eta > 1 and epsilon > omega^2 (got eta = " + detail::fmt(cfg.params.eta) +
                          ", epsilon - omega^2 = " + detail::fmt(cfg.params.epsilon - cfg.params.omega * cfg.params.omega) + ")");
    const auto d = derive(vp);
    const auto rep = spectrum_report(vp, d);
    const auto& pi = rep.pathintegral;

    Artifact a;
    if (!rep.canonical) a.exit_code = domain_error;
    else if (!(*rep.agreement_error <= cfg.tol.agreement)) a.exit_code = verification_failure;

    if (format == Format::csv) {
        std::ostringstream os;
        io::CsvWriter w(os, {"omega_plus_re", "omega_plus_im", "omega_minus_re", "omega_minus_im", "omega_tilde1", "omega_tilde2",
                             "ratio_ab", "u", "lambda_residual", "agreement_error"});
        const auto& c = rep.canonical;
        w.row({detail::fmt(pi.omega_plus.real()), detail::fmt(pi.omega_plus.imag()), detail::fmt(pi.omega_minus.real()),
               detail::fmt(pi.omega_minus.imag()), c ? detail::fmt(c->omega_tilde1) : "", c ? detail::fmt(c->omega_tilde2) : "",
               c ? detail::fmt(c->ratio_ab) : "", c ? detail::fmt(c->u) : "", c ? detail::fmt(c->lambda_residual) : "",
               c ? detail::fmt(*rep.agreement_error) : ""});
        a.body = os.str();
        return a;
    }

    json canonical = nullptr;
    if (rep.canonical) {
        const auto& c = *rep.canonical;
        canonical = json{{"ratio_ab", c.ratio_ab},
                         {"u", c.u},
                         {"k1_sq", c.coeffs.k1_sq},
                         {"k2_sq", c.coeffs.k2_sq},
                         {"sigma1_sq", c.coeffs.sigma1_sq},
                         {"sigma2_sq", c.coeffs.sigma2_sq},
                         {"lambda1", c.coeffs.lambda1},
                         {"lambda2", c.coeffs.lambda2},
                         {"lambda_residual", c.lambda_residual},
                         {"omega_tilde1", c.omega_tilde1},
                         {"omega_tilde2", c.omega_tilde2},
                         {"already_diagonal", c.already_diagonal},
                         {"quarter_turn", c.quarter_turn}};
    }
    json j{{"command", "spectrum"},
           {"params", detail::params_json(cfg.params)},
           {"pathintegral",
            {{"omega_plus", detail::complex_json(pi.omega_plus)},
             {"omega_minus", detail::complex_json(pi.omega_minus)},
             {"omega_plus_sq", detail::complex_json(pi.omega_plus_sq)},
             {"omega_minus_sq", detail::complex_json(pi.omega_minus_sq)},
             {"unstable", pi.unstable}}},
           {"canonical", canonical},
           {"canonical_unavailable", rep.canonical_unavailable},
           {"agreement_error", rep.agreement_error ? json(*rep.agreement_error) : json(nullptr)},
           {"tolerance", cfg.tol.agreement},
           {"passed", a.exit_code == ok}};
    a.body = detail::dump(j);
    return a;
}

inline Artifact cmd_simulate(const RunConfig& cfg, bool want_plot)
{
    const auto variant = parse_variant(cfg.variant);
    if (!variant) throw UsageError("unknown model variant '" + cfg.variant + "'");
    const auto vp = validate(cfg.params);
    std::optional<DerivedParams> d;
    if (*variant == ModelVariant::nc_effective || *variant == ModelVariant::commutative_limit) d = derive(vp);
    const auto model = build_model(*variant, vp, d ? &*d : nullptr);
    const auto times = uniform_grid(cfg.t_end, cfg.samples);
    const auto tr = propagate(model, Vec4(cfg.u1, cfg.u2, cfg.v1, cfg.v2), times);

    Artifact a;
    std::ostringstream os;
    io::CsvWriter w(os, {"t", "u1", "u2", "v1", "v2"});
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const auto& s = tr.states[i];
        w.row({detail::fmt(tr.times[i]), detail::fmt(s[0]), detail::fmt(s[1]), detail::fmt(s[2]), detail::fmt(s[3])});
    }
    a.body = os.str();
    if (want_plot) {
        std::vector<io::Series> series{{"u1", "#1f77b4", {}}, {"u2", "#d62728", {}}};
        for (const auto& s : tr.states) {
            series[0].y.push_back(s[0]);
            series[1].y.push_back(s[1]);
        }
        std::ostringstream svg;
        io::write_svg_plot(svg, tr.times, series, to_string(*variant));
        a.plot = svg.str();
    }
    return a;
}

namespace detail {

struct SweepRow {
    SystemParams p;
    std::vector<std::string> fields;
};

inline std::vector<std::string> sweep_header()
{
    return {"gamma",          "omega",          "epsilon",         "eta",          "theta",          "hbar",
            "gamma_R",        "theta_star",     "critical_ratio",  "regime",       "positive_regime", "omega_plus_re",
            "omega_plus_im",  "omega_minus_re", "omega_minus_im",  "omega_tilde1", "omega_tilde2",   "agreement_error",
            "status",         "valid"};
}

inline std::vector<std::string> sweep_row(const SystemParams& p)
{
    std::vector<std::string> f{fmt(p.gamma), fmt(p.omega), fmt(p.epsilon), fmt(p.eta), fmt(p.theta), fmt(p.hbar)};
    const auto dual = duality(p);
    f.push_back(fmt(dual.gamma_R));
    f.push_back(dual.theta_star.value ? fmt(*dual.theta_star.value) : "");
    f.push_back(fmt(dual.critical_ratio));
    f.push_back(to_string(dual.regime));

    std::string status = "ok";
    bool positive = false;
    std::optional<SpectrumReport> rep;
    try {
        const auto vp = validate(p);
        positive = vp.positive_regime();
        rep = spectrum_report(vp, derive(vp));
        if (!positive) status = "outside_positive_regime";
        else if (!rep->canonical) status = "no_canonical_route";
    } catch (const SingularityError&) {
        status = "singular";
    } catch (const InvalidParameter&) {
        status = "invalid_parameter";
    } catch (const DomainError&) {
        status = "domain_error";
    }
    f.push_back(positive ? "1" : "0");
    if (rep) {
        const auto& pi = rep->pathintegral;
        for (double v : {pi.omega_plus.real(), pi.omega_plus.imag(), pi.omega_minus.real(), pi.omega_minus.imag()}) f.push_back(fmt(v));
    } else {
        f.insert(f.end(), 4, "");
    }
    const bool canonical = rep && rep->canonical;
    f.push_back(canonical ? fmt(rep->canonical->omega_tilde1) : "");
    f.push_back(canonical ? fmt(rep->canonical->omega_tilde2) : "");
    f.push_back(canonical ? fmt(*rep->agreement_error) : "");
    bool finite = canonical;
    if (canonical) {
        const auto& pi = rep->pathintegral;
        for (double v : {pi.omega_plus.real(), pi.omega_plus.imag(), pi.omega_minus.real(), pi.omega_minus.imag(), rep->canonical->omega_tilde1,
                         rep->canonical->omega_tilde2, *rep->agreement_error, dual.gamma_R})
            finite = finite && std::isfinite(v);
        if (!finite) status = "non_finite";
    }
    f.push_back(status);
    f.push_back(finite && status == "ok" ? "1" : "0");
    return f;
}

} // namespace detail

inline Artifact cmd_sweep(const RunConfig& cfg)
{
    if (cfg.grids.empty()) throw ConfigError(0, "grid", "sweep needs at least one grid.<param> entry");
    std::size_t total = 1;
    for (const auto& g : cfg.grids) {
        if (g.values.empty()) throw ConfigError(0, "grid." + g.parameter, "empty grid");
        total *= g.values.size();
    }

    std::ostringstream os;
    io::CsvWriter w(os, detail::sweep_header());
    std::vector<std::size_t> index(cfg.grids.size(), 0);
    for (std::size_t row = 0; row < total; ++row) {
        SystemParams p = cfg.params;
        for (std::size_t g = 0; g < cfg.grids.size(); ++g) {
            const double v = cfg.grids[g].values[index[g]];
            const std::string& name = cfg.grids[g].parameter;
            if (name == "gamma") p.gamma = v;
            else if (name == "omega") p.omega = v;
            else if (name == "epsilon") p.epsilon = v;
            else if (name == "eta") p.eta = v;
            else if (name == "theta") p.theta = v;
        }
        w.row(detail::sweep_row(p));
        // odometer: last grid varies fastest
        for (std::size_t g = cfg.grids.size(); g-- > 0;) {
            if (++index[g] < cfg.grids[g].values.size()) break;
            index[g] = 0;
        }
    }
    return {os.str(), {}, ok};
}

inline Artifact cmd_verify(const RunConfig& cfg, Format format)
{
    const auto rep = run_verify(cfg);
    Artifact a;
    a.exit_code = rep.passed() ? ok : verification_failure;
    if (format == Format::csv) {
        std::ostringstream os;
        io::CsvWriter w(os, {"name", "module", "passed", "residual", "tolerance"});
        for (const auto& c : rep.checks) w.row({c.name, c.module, c.passed ? "1" : "0", detail::fmt(c.residual), detail::fmt(c.tolerance)});
        a.body = os.str();
        return a;
    }
    json checks = json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"name", c.name},
                          {"module", c.module},
                          {"passed", c.passed},
                          {"residual", std::isfinite(c.residual) ? json(c.residual) : json("inf")},
                          {"tolerance", c.tolerance},
                          {"detail", c.detail}});
    }
    json j{{"command", "verify"},
           {"seed", rep.seed},
           {"samples", rep.samples},
           {"rejected_samples", rep.rejected_samples},
           {"injected_flip_gamma2", rep.injected_flip_gamma2},
           {"passed", rep.passed()},
           {"checks", checks}};
    a.body = detail::dump(j);
    return a;
}

namespace detail {

inline void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw UsageError("failed writing '" + path + "'");
}

} // namespace detail

/// Runs one command end to end and maps every error class to its exit code.
inline int run(const Options& opt, std::ostream& out, std::ostream& err)
{
    try {
        RunConfig cfg = opt.config_path ? load_config(*opt.config_path) : RunConfig{};
        if (opt.seed) cfg.seed = *opt.seed;
        if (opt.tol) {
            if (!(*opt.tol > 0.0)) throw UsageError("--tol must be positive");
            cfg.tol.agreement = *opt.tol;
        }
        if (opt.plot_path && opt.command != "simulate") throw UsageError("--plot applies to simulate only");
        const Format format = opt.format.value_or(opt.command == "simulate" || opt.command == "sweep" ? Format::csv : Format::json);

        Artifact a;
        if (opt.command == "derive") a = cmd_derive(cfg, format);
        else if (opt.command == "spectrum") a = cmd_spectrum(cfg, format);
        else if (opt.command == "verify") a = cmd_verify(cfg, format);
        else if (opt.command == "simulate" || opt.command == "sweep") {
            if (format != Format::csv) throw UsageError(opt.command + " emits CSV only");
            a = opt.command == "simulate" ? cmd_simulate(cfg, opt.plot_path.has_value()) : cmd_sweep(cfg);
        } else {
            throw UsageError("unknown command '" + opt.command + "'");
        }

        if (opt.out_path) detail::write_file(*opt.out_path, a.body);
        else out << a.body;
        if (opt.plot_path) detail::write_file(*opt.plot_path, a.plot);
        if (a.exit_code == verification_failure) err << "verification failed\n";
        if (a.exit_code == domain_error) err << "error: result outside the numerical domain (see report)\n";
        return a.exit_code;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    } catch (const InvalidParameter& e) {
        err << "error: invalid parameter: " << e.what() << "\n";
        return usage_error;
    } catch (const SingularityError& e) {
        err << "error: singularity: " << e.what() << "\n";
        return domain_error;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return domain_error;
    }
}

} // namespace ncbateman::cli
