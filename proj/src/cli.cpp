#include "mtf/cli.hpp"

#include "mtf/eos.hpp"
#include "mtf/errors.hpp"
#include "mtf/fields.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace mtf::cli {

namespace {

namespace pt = boost::property_tree;
using json = nlohmann::ordered_json;

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"eos", {"mu", "T", "B"}},
    {"physical", {"Z", "B", "T", "mu", "z", "W_strength", "W_power"}},
    {"scaled", {"mu", "T", "beta", "z", "W_strength", "W_power"}},
    {"grid", {"n", "r_min", "r_max"}},
    {"solver", {"damping", "tol", "max_iter", "anderson", "anderson_depth"}},
    {"scan", {"betas", "mode"}},
    {"output", {"dir", "emit_unscaled"}},
    {"selftest", {"tolerance_scale", "inject_sommerfeld_error"}},
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_number(const std::string& section, const std::string& key, const std::string& text) {
    const auto t = trim(text);
    if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": not a number: '" + t + "'");
    }
}

std::vector<double> to_list(const std::string& section, const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!trim(item).empty()) out.push_back(to_number(section, key, item));
    }
    return out;
}

bool to_bool(const std::string& section, const std::string& key, const std::string& text) {
    const auto t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("[" + section + "] " + key + ": expected true or false, got '" + t + "'");
}

class Section {
public:
    Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

    bool present() const { return tree_ != nullptr; }
    std::optional<std::string> raw(const std::string& key) const {
        if (!tree_) return std::nullopt;
        const auto v = tree_->get_optional<std::string>(key);
        if (!v) return std::nullopt;
        return *v;
    }
    double number(const std::string& key, double fallback) const {
        const auto v = raw(key);
        return v ? to_number(name_, key, *v) : fallback;
    }
    std::optional<double> maybe_number(const std::string& key) const {
        const auto v = raw(key);
        if (!v) return std::nullopt;
        return to_number(name_, key, *v);
    }
    std::vector<double> list(const std::string& key) const {
        const auto v = raw(key);
        return v ? to_list(name_, key, *v) : std::vector<double>{};
    }
    bool flag(const std::string& key, bool fallback) const {
        const auto v = raw(key);
        return v ? to_bool(name_, key, *v) : fallback;
    }

private:
    std::string name_;
    const pt::ptree* tree_;
};

Section section(const pt::ptree& root, const std::string& name) {
    const auto child = root.get_child_optional(name);
    return Section(name, child ? &*child : nullptr);
}

Confinement read_confinement(const Section& s) {
    Confinement W;
    W.strength = s.number("W_strength", 1.0);
    W.power = s.number("W_power", 2.0);
    if (!(W.strength > 0.0) || !(W.power > 0.0)) {
        throw ConfigError("confinement W_strength and W_power must be > 0");
    }
    return W;
}

void check_charge(double z, const std::string& where) {
    if (z > 1.0) throw ConfigError("[" + where + "] z must be <= 1 (got " + std::to_string(z) + ")");
    if (!(z >= 0.0)) throw ConfigError("[" + where + "] z must be >= 0 (got " + std::to_string(z) + ")");
}

void check_temperature(double T, const std::string& where) {
    if (!(T > 0.0)) throw ConfigError("[" + where + "] T must be > 0 (got " + std::to_string(T) + ")");
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::filesystem::path out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.output.dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("output directory not writable: " + dir.string());
    }
    return dir;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + p.string());
    return f;
}

double beta_number(const Beta& b) {
    return b.is_infinite() ? std::numeric_limits<double>::infinity() : b.value();
}

json number_or_string(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

// ---------------------------------------------------------------- config

RunConfig parse_config(std::istream& in, const std::string& command) {
    static const std::set<std::string> commands{"eos-table", "solve", "scan", "selftest"};
    if (!commands.count(command)) throw ConfigError("unknown command '" + command + "'");

    pt::ptree root;
    try {
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    for (const auto& [name, child] : root) {
        const auto known = kKnownKeys.find(name);
        if (known == kKnownKeys.end()) throw ConfigError("unknown section [" + name + "]");
        for (const auto& kv : child) {
            if (!known->second.count(kv.first)) {
                throw ConfigError("unknown key '" + kv.first + "' in [" + name + "]");
            }
        }
    }

    RunConfig cfg;
    cfg.command = command;

    const auto eos = section(root, "eos");
    cfg.eos = EosBlock{eos.list("mu"), eos.list("T"), eos.list("B")};
    for (double T : cfg.eos.T) check_temperature(T, "eos");
    for (double B : cfg.eos.B) {
        if (!(B >= 0.0)) throw ConfigError("[eos] B must be >= 0");
    }

    const auto phys = section(root, "physical");
    const auto scl = section(root, "scaled");
    if (phys.present()) {
        PhysicalParams p;
        p.Z = phys.number("Z", 1.0);
        p.B = phys.number("B", 0.0);
        p.T = phys.number("T", 1.0);
        p.mu = phys.number("mu", 0.0);
        p.nuclei = {Nucleus{phys.number("z", 1.0), {0.0, 0.0, 0.0}}};
        p.W = read_confinement(phys);
        if (!(p.Z > 0.0)) throw ConfigError("[physical] Z must be > 0 (got " + std::to_string(p.Z) + ")");
        if (!(p.B >= 0.0) || std::isinf(p.B)) throw ConfigError("[physical] B must be finite and >= 0");
        check_temperature(p.T, "physical");
        check_charge(p.nuclei.front().charge, "physical");
        cfg.physical = p;
    }
    if (scl.present()) {
        ScaledBlock s;
        s.mu = scl.number("mu", 0.0);
        s.T = scl.number("T", 1.0);
        const double beta = scl.number("beta", 0.0);
        if (!(beta >= 0.0)) throw ConfigError("[scaled] beta must be >= 0");
        s.beta = std::isinf(beta) ? Beta::infinite() : Beta::finite(beta);
        s.z = scl.number("z", 1.0);
        s.W = read_confinement(scl);
        check_temperature(s.T, "scaled");
        check_charge(s.z, "scaled");
        cfg.scaled = s;
    }
    const bool needs_problem = command == "solve" || command == "scan";
    if (needs_problem && cfg.physical.has_value() == cfg.scaled.has_value()) {
        throw ConfigError("exactly one of [physical] or [scaled] is required");
    }

    const auto grid = section(root, "grid");
    const double n = grid.number("n", 2000.0);
    if (!(n >= 16.0) || n != std::floor(n)) {
        throw ConfigError("[grid] n must be an integer >= 16 (got " + std::to_string(n) + ")");
    }
    cfg.grid.n = static_cast<std::size_t>(n);
    cfg.grid.r_min = grid.maybe_number("r_min");
    cfg.grid.r_max = grid.maybe_number("r_max");
    if (cfg.grid.r_min.has_value() != cfg.grid.r_max.has_value()) {
        throw ConfigError("[grid] give both r_min and r_max or neither");
    }
    if (cfg.grid.r_min && !(*cfg.grid.r_min > 0.0 && *cfg.grid.r_max > *cfg.grid.r_min)) {
        throw ConfigError("[grid] need 0 < r_min < r_max");
    }

    const auto solver = section(root, "solver");
    cfg.solver.damping = solver.number("damping", cfg.solver.damping);
    cfg.solver.tol = solver.number("tol", cfg.solver.tol);
    cfg.solver.max_iter = static_cast<int>(solver.number("max_iter", cfg.solver.max_iter));
    cfg.solver.anderson = solver.flag("anderson", cfg.solver.anderson);
    cfg.solver.anderson_depth = static_cast<int>(solver.number("anderson_depth", cfg.solver.anderson_depth));
    if (!(cfg.solver.damping > 0.0) || cfg.solver.damping > 1.0) throw ConfigError("[solver] damping must lie in (0, 1]");
    if (!(cfg.solver.tol > 0.0)) throw ConfigError("[solver] tol must be > 0");
    if (cfg.solver.max_iter < 0) throw ConfigError("[solver] max_iter must be >= 0");
    if (cfg.solver.anderson_depth < 1) throw ConfigError("[solver] anderson_depth must be >= 1");

    const auto scan = section(root, "scan");
    cfg.scan.betas = scan.list("betas");
    const auto mode = scan.raw("mode").value_or("beta_to_inf");
    if (mode == "beta_to_inf" || mode == "beta_to_infinity") {
        cfg.scan.mode = scaling::LimitMode::beta_to_infinity;
    } else if (mode == "beta_to_zero") {
        cfg.scan.mode = scaling::LimitMode::beta_to_zero;
    } else {
        throw ConfigError("[scan] mode must be beta_to_inf or beta_to_zero");
    }
    for (std::size_t i = 1; i < cfg.scan.betas.size(); ++i) {
        const double d0 = cfg.scan.betas[1] - cfg.scan.betas[0];
        const double d = cfg.scan.betas[i] - cfg.scan.betas[i - 1];
        if (d == 0.0 || (d > 0.0) != (d0 > 0.0)) {
            throw ConfigError("[scan] betas must be strictly monotone");
        }
    }
    for (double b : cfg.scan.betas) {
        if (!(b >= 0.0) || std::isinf(b)) throw ConfigError("[scan] betas must be finite and >= 0");
    }
    if (command == "scan" && cfg.scan.betas.empty()) throw ConfigError("[scan] betas is required");

    const auto output = section(root, "output");
    cfg.output.dir = output.raw("dir").value_or(".");
    cfg.output.emit_unscaled = output.flag("emit_unscaled", false);

    const auto st = section(root, "selftest");
    cfg.selftest.tolerance_scale = st.number("tolerance_scale", 1.0);
    cfg.selftest.inject_sommerfeld_error = st.flag("inject_sommerfeld_error", false);
    if (!(cfg.selftest.tolerance_scale >= 0.0)) throw ConfigError("[selftest] tolerance_scale must be >= 0");
    return cfg;
}

RunConfig load_config(const std::string& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    return parse_config(in, command);
}

ScaledProblem make_problem(const RunConfig& cfg) {
    ScaledProblem prob;
    if (cfg.physical) {
        const auto s = scaling::scale_params(*cfg.physical);
        prob.mu_tilde = s.mu_tilde;
        prob.T_tilde = s.T_tilde;
        prob.beta = Beta::finite(s.beta);
        prob.z = cfg.physical->nuclei.front().charge;
        prob.W = cfg.physical->W;
    } else if (cfg.scaled) {
        prob.mu_tilde = cfg.scaled->mu;
        prob.T_tilde = cfg.scaled->T;
        prob.beta = cfg.scaled->beta;
        prob.z = cfg.scaled->z;
        prob.W = cfg.scaled->W;
    } else {
        throw ConfigError("no problem parameters given");
    }
    if (cfg.grid.r_min) {
        prob.grid = fields::make_grid(fields::RadialGrid::logarithmic(*cfg.grid.r_min, *cfg.grid.r_max, cfg.grid.n));
    } else {
        prob.grid = default_grid(prob.mu_tilde, prob.T_tilde, prob.W, cfg.grid.n);
    }
    try {
        prob.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return prob;
}

// ---------------------------------------------------------------- drivers

int run_eos_table(const RunConfig& cfg, std::ostream& diag) {
    auto mu = cfg.eos.mu, T = cfg.eos.T, B = cfg.eos.B;
    std::sort(mu.begin(), mu.end());
    std::sort(T.begin(), T.end());
    std::sort(B.begin(), B.end());
    auto f = open_out(out_dir(cfg) / "eos_table.csv");
    f << "mu,T,B,pressure,density,lower_bound,upper_bound\n";
    f.precision(17);
    if (mu.empty() || T.empty() || B.empty()) {
        diag << "warning: empty mu, T or B range; table has no rows\n";
        return kOk;
    }
    for (double m : mu) {
        for (double t : T) {
            for (double b : B) {
                const eos::GasState s{m, t, b};
                const auto pb = eos::pressure_bounds(s);
                f << m << ',' << t << ',' << b << ',' << pb.value << ',' << eos::landau_density(s) << ','
                  << pb.lower << ',' << pb.upper << '\n';
            }
        }
    }
    return kOk;
}

int run_solve(const RunConfig& cfg, std::ostream& diag) {
    const auto prob = make_problem(cfg);
    const auto dir = out_dir(cfg);
    const auto rep = scf_solve(prob, cfg.solver);

    {
        auto f = open_out(dir / "density.csv");
        fields::write_csv(f, *rep.density.grid, rep.density.values);
    }

    const double free_energy = eval_free_energy_functional(rep.density, prob);
    const double dual = prob.mu_tilde * rep.particle_number - rep.pressure;

    json j;
    j["spec_version"] = 1;
    j["command"] = "solve";
    j["timestamp"] = timestamp();
    j["parameters"] = {{"mu_tilde", prob.mu_tilde},
                       {"T_tilde", prob.T_tilde},
                       {"beta", number_or_string(beta_number(prob.beta))},
                       {"z", prob.z},
                       {"W_strength", prob.W.strength},
                       {"W_power", prob.W.power},
                       {"grid_n", prob.grid->size()},
                       {"r_min", prob.grid->r(1)},
                       {"r_max", prob.grid->r_max()}};
    j["solver"] = {{"damping", cfg.solver.damping},
                   {"tol", cfg.solver.tol},
                   {"max_iter", cfg.solver.max_iter},
                   {"anderson", cfg.solver.anderson}};
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["pressure"] = rep.pressure;
    j["functional_terms"] = {{"pressure_integral", rep.functional_terms.pressure_integral},
                             {"hartree", rep.functional_terms.hartree}};
    j["particle_number"] = rep.particle_number;
    j["duality"] = {{"free_energy", free_energy},
                    {"mu_N_minus_pressure", dual},
                    {"rel_error", std::abs(free_energy - dual) / std::max(std::abs(dual), 1e-300)}};
    j["residual_history"] = rep.residual_history;

    if (cfg.output.emit_unscaled) {
        if (!cfg.physical) {
            diag << "warning: --emit-unscaled needs a [physical] block; skipped\n";
        } else {
            const auto s = scaling::scale_params(*cfg.physical);
            const double factor = cfg.physical->Z * cfg.physical->Z / s.ell;
            j["unscaled"] = {{"ell", s.ell},
                             {"pressure", factor * rep.pressure},
                             {"particle_number", cfg.physical->Z * rep.particle_number}};
            const auto rho = scaling::scale_density(rep.density, *cfg.physical);
            auto f = open_out(dir / "density_unscaled.csv");
            fields::write_csv(f, *rho.grid, rho.values);
        }
    }

    auto f = open_out(dir / "report.json");
    f << std::setprecision(17) << j.dump(2) << '\n';
    if (!rep.converged) {
        diag << "solve did not converge: residual " << rep.residual_history.back() << " after "
             << rep.iterations << " iterations\n";
        return kNotConverged;
    }
    return kOk;
}

int run_scan(const RunConfig& cfg, std::ostream& diag) {
    const auto base = make_problem(cfg);
    const auto dir = out_dir(cfg);
    const auto scan = scaling::limit_scan(base, cfg.scan.betas, cfg.scan.mode, cfg.solver);
    {
        auto f = open_out(dir / "scan.csv");
        scaling::write_scan_csv(f, scan);
    }
    json j;
    j["spec_version"] = 1;
    j["command"] = "scan";
    j["timestamp"] = timestamp();
    j["mode"] = cfg.scan.mode == scaling::LimitMode::beta_to_infinity ? "beta_to_inf" : "beta_to_zero";
    j["limit_pressure"] = scan.limit.pressure;
    j["limit_ok"] = scan.limit.ok;
    json rows = json::array();
    bool decreasing = true;
    for (std::size_t i = 0; i < scan.rows.size(); ++i) {
        const auto& r = scan.rows[i];
        rows.push_back({{"beta", r.beta}, {"pressure", r.pressure}, {"rel_gap", r.rel_gap}, {"ok", r.ok},
                        {"error", r.error}});
        if (i > 0 && !(r.rel_gap < scan.rows[i - 1].rel_gap)) decreasing = false;
    }
    j["rows"] = rows;
    if (scan.decay_exponent) {
        j["decay_exponent"] = *scan.decay_exponent;
    } else {
        j["decay_exponent"] = nullptr;
        j["note"] = "insufficient points for an exponent fit (need >= 3 successful rows)";
    }
    j["gaps_decreasing"] = scan.rows.size() > 1 ? json(decreasing) : json(nullptr);
    auto f = open_out(dir / "scan_summary.json");
    f << std::setprecision(17) << j.dump(2) << '\n';
    if (!scan.all_ok()) {
        for (const auto& r : scan.rows) {
            if (!r.ok) diag << "scan member beta=" << r.beta << " failed: " << r.error << '\n';
        }
        if (!scan.limit.ok) diag << "limit branch failed: " << scan.limit.error << '\n';
        return kPartialScan;
    }
    return kOk;
}

// ---------------------------------------------------------------- self-test

namespace {

class Battery {
public:
    explicit Battery(double scale) : scale_(scale) {}

    void check(const std::string& module, const std::string& name, double err, double tol) {
        std::ostringstream d;
        d << std::setprecision(3) << "err=" << err << " tol=" << tol * scale_;
        results_.push_back({module, name, std::isfinite(err) && err <= tol * scale_, d.str()});
    }
    void fail(const std::string& module, const std::string& name, const std::string& why) {
        results_.push_back({module, name, false, why});
    }
    template <class F>
    void guarded(const std::string& module, const std::string& name, F&& f) {
        try {
            f();
        } catch (const std::exception& e) {
            fail(module, name, std::string("exception: ") + e.what());
        }
    }
    std::vector<CheckResult> take() { return std::move(results_); }

private:
    double scale_;
    std::vector<CheckResult> results_;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

long double fermi_oracle(double k, double x) {
    auto f = [&](long double y) {
        const long double p = std::pow(y, static_cast<long double>(k));
        const long double s = y - x;
        return s > 0 ? p * std::exp(-s) / (1 + std::exp(-s)) : p / (1 + std::exp(s));
    };
    boost::math::quadrature::tanh_sinh<long double> inner;
    boost::math::quadrature::exp_sinh<long double> outer;
    const long double lx = x;
    return inner.integrate(f, 0.0L, lx) + outer.integrate([&](long double u) { return f(lx + u); });
}

void fermi_checks(Battery& b, const SelftestBlock& opts) {
    using fermi::Order;
    const Order orders[] = {Order::minus_half(), Order::half(), Order::three_halves()};
    b.guarded("fermi", "monotonicity", [&] {
        double violations = 0;
        for (auto k : orders) {
            double prev = fermi::integral(k, -30.0);
            for (double x = -29.5; x <= 60.0; x += 0.5) {
                const double v = fermi::integral(k, x);
                if (!(v > prev)) violations += 1;
                prev = v;
            }
        }
        b.check("fermi", "monotonicity", violations, 0.0);
    });
    b.guarded("fermi", "derivative identity", [&] {
        double worst = 0;
        for (auto k : {Order::half(), Order::three_halves()}) {
            for (double x : {-20.0, -1.0, 0.0, 1.0, 20.0, 100.0}) {
                const double h = 1e-5 * std::max(1.0, std::abs(x));
                const double fd = (fermi::integral(k, x + h) - fermi::integral(k, x - h)) / (2 * h);
                worst = std::max(worst, std::abs(fermi::integral_prime(k, x) - fd) /
                                            std::max(1.0, fermi::integral(k, x)));
            }
        }
        b.check("fermi", "derivative identity", worst, 1e-6);
    });
    b.guarded("fermi", "nondegenerate limit", [&] {
        double worst = 0;
        for (auto k : orders) {
            worst = std::max(worst, std::abs(fermi::integral(k, -30.0) /
                                                 (fermi::gamma_k_plus_one(k) * std::exp(-30.0)) - 1.0));
        }
        b.check("fermi", "nondegenerate limit", worst, 1e-3);
    });
    b.guarded("fermi", "degenerate limit", [&] {
        double worst = 0;
        for (auto k : orders) {
            const double kv = k.value();
            worst = std::max(worst,
                             std::abs(fermi::integral(k, 400.0) / (std::pow(400.0, kv + 1) / (kv + 1)) - 1.0));
        }
        b.check("fermi", "degenerate limit", worst, 1e-2);
    });
    b.guarded("fermi", "asymptotic branch vs quadrature", [&] {
        auto table = fermi::SommerfeldTable::exact();
        if (opts.inject_sommerfeld_error) table.eta_even[0] *= 1.01;
        double worst = 0;
        for (double x : {40.0, 100.0}) {
            for (auto k : orders) {
                const double ref = static_cast<double>(fermi_oracle(k.value(), x));
                worst = std::max(worst, rel(fermi::integral(k, x, table), ref));
            }
        }
        b.check("fermi", "asymptotic branch vs quadrature", worst, 1e-10);
    });
}

void eos_checks(Battery& b) {
    b.guarded("eos", "thermodynamic consistency", [&] {
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> mu_d(-20, 20), t_d(0.1, 10), b_d(0, 100);
        double worst = 0;
        for (int i = 0; i < 8; ++i) {
            const eos::GasState s{mu_d(rng), t_d(rng), b_d(rng)};
            const double h = 1e-4 * s.T;
            const double fd = (eos::landau_pressure({s.mu + h, s.T, s.B}) -
                               eos::landau_pressure({s.mu - h, s.T, s.B})) / (2 * h);
            worst = std::max(worst, rel(fd, eos::landau_density(s)));
        }
        b.check("eos", "thermodynamic consistency", worst, 1e-6);
    });
    b.guarded("eos", "Landau sum vs DOS quadrature", [&] {
        double worst = 0;
        for (const eos::GasState& s : {eos::GasState{1, 1, 1}, eos::GasState{5, 0.5, 0.3}, eos::GasState{-2, 2, 4}}) {
            worst = std::max(worst, rel(eos::landau_pressure(s), eos::dos_pressure(s)));
        }
        b.check("eos", "Landau sum vs DOS quadrature", worst, 1e-8);
    });
    b.guarded("eos", "sandwich 5x5x5", [&] {
        double violations = 0;
        for (double mu : {-10.0, -1.0, 0.5, 5.0, 50.0}) {
            for (double T : {0.01, 0.1, 1.0, 5.0, 20.0}) {
                for (double B : {0.0, 0.1, 1.0, 10.0, 100.0}) {
                    const eos::GasState s{mu, T, B};
                    if (!eos::pressure_bounds(s).contained()) violations += 1;
                    if (!eos::density_bounds(s).contained()) violations += 1;
                }
            }
        }
        b.check("eos", "sandwich 5x5x5", violations, 0.0);
    });
    b.guarded("eos", "T -> 0 continuity", [&] {
        b.check("eos", "T -> 0 continuity",
                rel(eos::landau_pressure({1.0, 1e-3, 5.0}), eos::zero_t_pressure(1.0, 5.0)), 1e-3);
    });
    b.guarded("eos", "B -> 0 continuity", [&] {
        b.check("eos", "B -> 0 continuity",
                rel(eos::landau_pressure({5.0, 1.0, 0.01}), eos::landau_pressure({5.0, 1.0, 0.0})), 1e-3);
    });
}

fields::DensityField ball(fields::GridPtr g, double R, double Q) {
    const double rho0 = Q / (4.0 * std::numbers::pi * R * R * R / 3.0);
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = g->r(i);
        v[i] = std::abs(r - R) < 1e-12 * R ? rho0 / 2 : (r < R ? rho0 : 0.0);
    }
    return fields::DensityField(g, v);
}

void fields_checks(Battery& b) {
    b.guarded("fields", "uniform ball", [&] {
        auto g = fields::make_grid(fields::RadialGrid::uniform(4.0, 8001));
        const auto rho = ball(g, 1.0, 1.0);
        const auto v = fields::coulomb_potential(rho);
        const double err = std::max({rel(v.values[0], 1.5), rel(v.values[1000], 1.375),
                                     rel(fields::hartree_energy(rho), 0.6)});
        b.check("fields", "uniform ball", err, 1e-5);
        b.check("fields", "Newton exterior law", rel(v.values[4000] * 2.0, rho.total()), 1e-10);
    });
    b.guarded("fields", "bilinearity", [&] {
        auto g = fields::make_grid(fields::RadialGrid::logarithmic(1e-4, 10.0, 500));
        std::vector<double> a(g->size()), c(g->size()), s(g->size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double r = g->r(i);
            a[i] = std::exp(-r * r);
            c[i] = r * r * std::exp(-2 * r);
            s[i] = a[i] + c[i];
        }
        const fields::DensityField ra(g, a), rc(g, c), rs(g, s);
        const double lhs = fields::hartree_energy(rs);
        const double rhs = fields::hartree_energy(ra) + 2 * fields::hartree_energy(ra, rc) + fields::hartree_energy(rc);
        b.check("fields", "bilinearity", rel(lhs, rhs), 1e-10);
    });
    b.guarded("fields", "mollifier preserves constants", [&] {
        auto g = fields::make_grid(fields::RadialGrid::logarithmic(1e-4, 10.0, 400));
        const fields::PotentialField c{g, std::vector<double>(g->size(), 2.5), 0.0};
        const auto m = fields::mollify(c, fields::Mollifier{0.2});
        double worst = 0;
        for (double x : m.values) worst = std::max(worst, rel(x, 2.5));
        b.check("fields", "mollifier preserves constants", worst, 1e-12);
    });
}

void mtf_checks(Battery& b) {
    b.guarded("mtf", "solver", [&] {
        ScaledProblem p;
        p.mu_tilde = 0.0;
        p.T_tilde = 0.5;
        p.z = 1.0;
        p.beta = Beta::finite(0.0);
        p.grid = default_grid(p.mu_tilde, p.T_tilde, p.W, 400);
        SolveOptions o;
        o.tol = 1e-9;
        const auto rep = scf_solve(p, o);
        if (!rep.converged) {
            b.fail("mtf", "solver converges", "not converged");
            return;
        }
        b.check("mtf", "residual at minimizer", tf_residual(rep.density, p).sup_norm, 1e-6);
        const double F = eval_free_energy_functional(rep.density, p);
        b.check("mtf", "grand-canonical duality", rel(F, p.mu_tilde * rep.particle_number - rep.pressure), 1e-5);
        double violations = 0;
        const auto zero = fields::DensityField::zero(p.grid);
        const double P0 = eval_pressure_functional(zero, p);
        for (double t : {0.25, 0.5, 0.75}) {
            std::vector<double> mix(rep.density.values);
            for (auto& x : mix) x *= t;
            const double lhs = eval_pressure_functional(fields::DensityField(p.grid, mix), p);
            if (lhs > t * rep.pressure + (1 - t) * P0 + 1e-10) violations += 1;
        }
        b.check("mtf", "convexity along a segment", violations, 0.0);
    });
    b.guarded("mtf", "Legendre involution", [&] {
        const auto gas = LocalGas::plain(1.0, 1.0);
        double worst = 0;
        for (double mu : {-5.0, 0.0, 5.0}) {
            worst = std::max(worst, std::abs(gas.chemical_potential(gas.density(mu)) - mu) / std::max(1.0, std::abs(mu)));
        }
        b.check("mtf", "Legendre involution", worst, 1e-6);
    });
}

double ulps(double a, double b) {
    if (a == b) return 0.0;
    const double gap = std::nextafter(std::max(std::abs(a), std::abs(b)), HUGE_VAL) - std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) / gap;
}

void scaling_checks(Battery& b) {
    b.guarded("scaling", "algebraic identities", [&] {
        double worst = 0;
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                PhysicalParams p;
                p.Z = std::pow(10.0, 6.0 * i / 9.0);
                p.B = j == 0 ? 0.0 : std::pow(10.0, 10.0 * j / 9.0);
                const auto s = scaling::scale_params(p);
                worst = std::max(worst, ulps(s.h * s.b, s.B_tilde));
                const long double ref = std::pow(1.0L + static_cast<long double>(s.beta), 0.6L) / p.Z;
                worst = std::max(worst, ulps(s.h * s.h * s.h, static_cast<double>(ref)));
            }
        }
        b.check("scaling", "algebraic identities (ulp)", worst, 4.0);
    });
    b.guarded("scaling", "rescale exactness", [&] {
        PhysicalParams p;
        p.Z = 2.0;
        p.B = std::pow(2.0, 4.0 / 3.0);
        p.T = 0.5 * scaling::scale_params(p).energy;
        auto g = default_grid(0.0, 0.5, p.W, 300);
        const auto rho = ball(g, 1.0, 0.5);
        b.check("scaling", "rescale exactness", scaling::pressure_rescale_check(rho, p).discrepancy, 1e-8);
        const auto back = scaling::unscale_density(scaling::scale_density(rho, p), p);
        double worst = 0;
        for (std::size_t i = 0; i < rho.values.size(); ++i) {
            worst = std::max(worst, std::abs(back.values[i] - rho.values[i]) / std::max(1.0, rho.values[i]));
        }
        b.check("scaling", "density round trip", worst, 1e-12);
    });
}

}  // namespace

std::vector<CheckResult> selftest_battery(const SelftestBlock& opts) {
    Battery b(opts.tolerance_scale);
    fermi_checks(b, opts);
    eos_checks(b);
    fields_checks(b);
    mtf_checks(b);
    scaling_checks(b);
    return b.take();
}

int run_selftest(const RunConfig& cfg, std::ostream& out) {
    const auto results = selftest_battery(cfg.selftest);
    int failed = 0;
    for (const auto& r : results) {
        out << std::left << std::setw(5) << (r.passed ? "ok" : "FAIL") << std::setw(9) << r.module
            << std::setw(36) << r.name << r.detail << '\n';
        if (!r.passed) ++failed;
    }
    out << results.size() - failed << '/' << results.size() << " checks passed\n";
    return failed == 0 ? kOk : kSelftestFailed;
}

// ---------------------------------------------------------------- entry

int main_entry(int argc, char** argv) {
    CLI::App app{"Finite-temperature magnetic Thomas-Fermi theory"};
    std::string command;
    std::string config;
    std::optional<std::string> out;
    bool emit_unscaled = false;
    app.add_option("command", command, "eos-table | solve | scan | selftest")
        ->required()
        ->check(CLI::IsMember({"eos-table", "solve", "scan", "selftest"}));
    app.add_option("--config", config, "INI configuration file");
    app.add_option("--out", out, "output directory");
    app.add_flag("--emit-unscaled", emit_unscaled, "also write unscaled quantities");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        RunConfig cfg;
        if (config.empty()) {
            if (command != "selftest") throw ConfigError("--config is required for " + command);
            std::istringstream none;
            cfg = parse_config(none, command);
        } else {
            cfg = load_config(config, command);
        }
        if (out) cfg.output.dir = *out;
        if (emit_unscaled) cfg.output.emit_unscaled = true;

        if (command == "eos-table") return run_eos_table(cfg, std::cerr);
        if (command == "solve") return run_solve(cfg, std::cerr);
        if (command == "scan") return run_scan(cfg, std::cerr);
        return run_selftest(cfg, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace mtf::cli
