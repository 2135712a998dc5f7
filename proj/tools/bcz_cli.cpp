#include "bcz/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace bcz;
using nlohmann::json;

Rational parse_rational_arg(const std::string& s) { return StepFunction::parse_rational(s); }

std::vector<std::int64_t> parse_grid(const std::string& spec) {
    if (spec.empty() || spec == "default") return default_sweep_grid();
    if (spec.rfind("geometric:", 0) == 0) {
        std::stringstream ss(spec.substr(10));
        std::string field;
        std::vector<double> vals;
        while (std::getline(ss, field, ':')) vals.push_back(std::stod(field));
        if (vals.size() != 3 || vals[0] < 1 || vals[1] < vals[0] || vals[2] <= 1.0)
            throw CLI::ValidationError("--grid", "expected geometric:<start>:<end>:<ratio>");
        std::vector<std::int64_t> grid;
        for (double v = vals[0]; v <= vals[1]; v = std::llround(v * vals[2])) {
            const auto n = static_cast<std::int64_t>(v);
            if (grid.empty() || grid.back() != n) grid.push_back(n);
        }
        const auto end = static_cast<std::int64_t>(vals[1]);
        if (grid.empty() || grid.back() != end) grid.push_back(end);
        return grid;
    }
    std::vector<std::int64_t> grid;
    std::stringstream ss(spec);
    std::string field;
    while (std::getline(ss, field, ',')) grid.push_back(std::stoll(field));
    return grid;
}

FunctionSpec parse_function(const std::string& name) {
    FunctionSpec fn;
    if (name == "khat") {
        fn.kind = FunctionSpec::Kind::khat;
    } else if (name == "R" || name == "r") {
        fn.kind = FunctionSpec::Kind::r;
    } else if (name.rfind("g-lambda=", 0) == 0) {
        fn.kind = FunctionSpec::Kind::g_lambda;
        fn.lambda = parse_rational_arg(name.substr(9));
    } else if (name.rfind("step=", 0) == 0) {
        fn.kind = FunctionSpec::Kind::step;
        fn.step = StepFunction::parse(name.substr(5));
    } else {
        throw CLI::ValidationError("--function",
                                   "expected khat | R | g-lambda=<rational> | step=<spec>");
    }
    return fn;
}

struct Options {
    bool json = false;
    bool csv = false;
};

int cmd_farey(std::int64_t n, const Options& opt) {
    FareyStream fs(n);
    if (opt.json) {
        json rows = json::array();
        while (auto f = fs.next()) rows.push_back({{"index", f->index}, {"p", f->p}, {"q", f->q}});
        std::cout << json{{"n", n}, {"A_n", farey_length(n).a_n}, {"fractions", rows}}.dump(2)
                  << "\n";
        return 0;
    }
    if (opt.csv) std::cout << "index,p,q\n";
    while (auto f = fs.next()) {
        if (opt.csv)
            std::cout << f->index << ',' << f->p << ',' << f->q << '\n';
        else
            std::cout << f->p << '/' << f->q << '\n';
    }
    return 0;
}

int cmd_orbit(std::int64_t a_num, std::int64_t b_num, std::int64_t den, std::int64_t steps,
              const Options& opt) {
    OrbitStream orbit(FareyPoint(a_num, b_num, den), steps);
    if (opt.csv) std::cout << "i,a,b,k,k_t,k_hat,R\n";
    json rows = json::array();
    std::int64_t i = 0;
    while (auto rec = orbit.next()) {
        if (opt.json) {
            rows.push_back({{"i", i},
                            {"a", rec->point.x().to_string()},
                            {"b", rec->point.y().to_string()},
                            {"k", rec->k},
                            {"k_t", rec->k_t},
                            {"k_hat", rec->k_hat.to_string()},
                            {"R", rec->r.to_string()}});
        } else if (opt.csv) {
            std::cout << i << ',' << rec->point.x().to_string() << ','
                      << rec->point.y().to_string() << ',' << rec->k << ',' << rec->k_t << ','
                      << rec->k_hat.to_string() << ',' << rec->r.to_string() << '\n';
        } else {
            std::cout << "T^" << i << " = " << rec->point.to_string() << "  k=" << rec->k
                      << " k^T=" << rec->k_t << " k_hat=" << rec->k_hat.to_string()
                      << " R=" << rec->r.to_string() << '\n';
        }
        ++i;
    }
    if (opt.json) std::cout << json{{"steps", rows}}.dump(2) << "\n";
    return 0;
}

int cmd_series(std::int64_t n, bool theta, const Options& opt) {
    if (opt.csv) std::cout << "i,value\n";
    json rows = json::array();
    auto emit = [&](std::int64_t i, const std::string& value) {
        if (opt.json)
            rows.push_back({{"i", i}, {"value", value}});
        else if (opt.csv)
            std::cout << i << ',' << value << '\n';
        else
            std::cout << (theta ? "theta_" : "iota_") << i << " = " << value << '\n';
    };
    if (theta) {
        const auto series = theta_series(n);
        for (std::size_t i = 0; i < series.theta_terms.size(); ++i)
            emit(static_cast<std::int64_t>(i) + 1, series.theta_terms[i].to_string());
        if (!opt.json && !opt.csv)
            std::cout << "sum |theta_i| = " << theta_abs_sum(n).to_string() << "\n";
    } else {
        const auto series = iota_series(n);
        for (std::size_t i = 0; i < series.rational_terms.size(); ++i)
            emit(static_cast<std::int64_t>(i) + 1, series.rational_terms[i].to_string());
        if (!opt.json && !opt.csv)
            std::cout << "sum |iota_i| = " << iota_abs_sum(n).to_string() << "\n";
    }
    if (opt.json) {
        std::cout << json{{"n", n}, {"kind", theta ? "theta" : "iota"}, {"terms", rows}}.dump(2)
                  << "\n";
    }
    return 0;
}

int cmd_excursion(const std::string& a, const std::string& b, bool verify_interior,
                  const Options& opt) {
    const ModuliPoint m(parse_rational_arg(a), parse_rational_arg(b));
    BuildOptions bopts;
    bopts.verify_interior = verify_interior;
    const Excursion e = build_excursion(m, bopts);
    const ResetCheck reset = reset_sum_check(e);
    const bool mono = e.length() >= 4 ? monotonicity_check(e) : true;
    if (opt.json) {
        json points = json::array();
        if (e.materialized)
            for (const auto& pt : e.points)
                points.push_back({{"a", pt.x().to_string()}, {"b", pt.y().to_string()}});
        json zeta = json::array();
        if (e.materialized)
            for (const auto& z : e.zeta) zeta.push_back(z.to_string());
        std::cout << json{{"moduli", {{"a", m.a.to_string()}, {"b", m.b.to_string()}}},
                          {"length", e.length()},
                          {"zeta_s", e.summary.zeta_s.to_string()},
                          {"reset_lower", reset.lower.to_string()},
                          {"reset_upper", reset.upper.to_string()},
                          {"monotone", mono},
                          {"energy", e.energy().to_string()},
                          {"points", points},
                          {"zeta", zeta}}
                         .dump(2)
                  << "\n";
        return 0;
    }
    std::cout << "excursion " << m.to_string() << "\n";
    std::cout << "  s = " << e.length() << "\n";
    if (e.materialized && e.length() <= 50) {
        for (std::size_t i = 0; i < e.points.size(); ++i) {
            std::cout << "  T^" << i << " = " << e.points[i].to_string();
            if (i >= 1) std::cout << "   zeta_" << i << " = " << e.zeta[i - 1].to_string();
            std::cout << "\n";
        }
    }
    std::cout << "  zeta_s = " << reset.value.to_string() << " in (" << reset.lower.to_string()
              << ", " << reset.upper.to_string() << ")\n";
    if (e.length() >= 4) std::cout << "  monotone interior: " << (mono ? "yes" : "NO") << "\n";
    std::cout << "  E(khat-3) = " << e.energy().to_string() << "\n";
    return 0;
}

int cmd_energy(const std::string& a, const std::string& b, const std::string& function,
               const Options& opt) {
    const ModuliPoint m(parse_rational_arg(a), parse_rational_arg(b));
    Rational value;
    std::string name = function;
    if (function == "khat") {
        value = energy_khat(m);  // f = khat - 3, the excursion energy proper
        name = "khat-3";
    } else {
        const FunctionSpec fn = parse_function(function);
        value = energy(fn.make(), m);
    }
    if (opt.json) {
        std::cout << json{{"moduli", {{"a", m.a.to_string()}, {"b", m.b.to_string()}}},
                          {"function", name},
                          {"energy", value.to_string()},
                          {"energy_float", value.to_double()}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << "E(" << name << "; " << m.a.to_string() << ", " << m.b.to_string()
                  << ") = " << value.to_string() << " ~= " << value.to_double() << "\n";
    }
    return 0;
}

int cmd_sweep(const SweepConfig& cfg, bool json_out) {
    const SweepResult res = run_sweep(cfg);
    const std::string payload = json_out ? sweep_json(res).dump(2) + "\n" : sweep_csv(res);
    if (!cfg.output_path.empty())
        write_text_file(cfg.output_path, payload);
    else
        std::cout << payload;
    if (res.fit) {
        std::cerr << "fit: exponent=" << res.fit->exponent << " intercept=" << res.fit->intercept
                  << " max_residual=" << res.fit->max_residual << "\n";
    }
    return 0;
}

int cmd_equidist(std::int64_t p, std::int64_t q, const std::string& fspec,
                 const std::string& function, const std::string& grid_spec, const Options& opt) {
    std::vector<std::int64_t> grid = parse_grid(grid_spec);
    const std::int64_t floor = std::max(p, q);
    std::erase_if(grid, [floor](std::int64_t n) { return n <= floor; });
    if (grid.empty()) throw CLI::ValidationError("--grid", "no grid entries exceed max(p, q)");

    if (!fspec.empty()) {
        const StepFunction f = StepFunction::parse(fspec);
        const auto rep = equidistribution_check(f, p, q, grid);
        if (opt.json) {
            json rows = json::array();
            for (const auto& row : rep.rows)
                rows.push_back({{"n", row.n},
                                {"scaled_sum", row.scaled_sum.to_string()},
                                {"scaled_sum_float", row.scaled_sum.to_double()},
                                {"error", row.error}});
            std::cout << json{{"p", p},
                              {"q", q},
                              {"integral", rep.integral.to_string()},
                              {"integral_float", rep.integral.to_double()},
                              {"rows", rows}}
                             .dump(2)
                      << "\n";
            return 0;
        }
        std::cout << "exact integral f dm = " << rep.integral.to_string() << " ~= "
                  << rep.integral.to_double() << "\n";
        if (opt.csv) std::cout << "n,scaled_sum,scaled_sum_float,error\n";
        for (const auto& row : rep.rows) {
            if (opt.csv)
                std::cout << row.n << ',' << row.scaled_sum.to_string() << ','
                          << row.scaled_sum.to_double() << ',' << row.error << '\n';
            else
                std::cout << "n=" << row.n << "  (pq/A_n) sum f = " << row.scaled_sum.to_double()
                          << "  |err| = " << row.error << "\n";
        }
        return 0;
    }

    // khat / R averages: reference limits 3 and pi^2/3.
    const FunctionSpec fn = parse_function(function.empty() ? "khat" : function);
    const double reference = fn.kind == FunctionSpec::Kind::r ? 3.2898681336964524 : 3.0;
    if (opt.csv) std::cout << "n,scaled_sum_float,reference\n";
    for (std::int64_t n : grid) {
        const Rational v = excursion_scaled_sum(fn.make(), p, q, n);
        if (opt.csv)
            std::cout << n << ',' << v.to_double() << ',' << reference << '\n';
        else
            std::cout << "n=" << n << "  (pq/A_n) sum " << fn.name() << " = " << v.to_double()
                      << "  (limit " << reference << ")\n";
    }
    return 0;
}

int cmd_verify(std::int64_t n_max, const std::string& mutate, std::uint64_t seed) {
    Fault fault = Fault::none;
    if (mutate == "itinerary-plus-one")
        fault = Fault::itinerary_plus_one;
    else if (!mutate.empty())
        throw CLI::ValidationError("--mutate", "unknown fault: " + mutate);
    const VerifyReport rep = verify_all(n_max, fault, seed);
    std::cout << verify_json(rep).dump(2) << "\n";
    if (!rep.passed) {
        json witnesses = json::array();
        for (const auto& c : rep.checks)
            if (!c.passed) witnesses.push_back({{"check", c.name}, {"witness", c.detail}});
        std::cerr << witnesses.dump(2) << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact BCZ-map dynamics: Farey orbits, excursions, and growth experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_flag("--json", opt.json, "emit JSON");
    app.add_flag("--csv", opt.csv, "emit CSV");

    std::int64_t n = 3, steps = 0, a_num = 1, b_num = 1, den = 1;
    std::int64_t p = 1, q = 1, n_max = 50, drop_below = 30;
    int parallel = 1;
    std::uint64_t seed = 0x5eed;
    bool verify_interior = false;
    std::string a_str, b_str, function = "khat", grid_spec = "default", out_path, fspec, mutate;

    auto* farey = app.add_subcommand("farey", "stream the Farey sequence of order n");
    farey->add_option("n", n, "Farey order")->required();

    auto* orbit = app.add_subcommand("orbit", "iterate the BCZ map from (a_num/den, b_num/den)");
    orbit->add_option("a_num", a_num)->required();
    orbit->add_option("b_num", b_num)->required();
    orbit->add_option("den", den)->required();
    orbit->add_option("steps", steps)->required();

    auto* theta = app.add_subcommand("theta", "theta series along the order-n periodic orbit");
    theta->add_option("n", n)->required();

    auto* iota = app.add_subcommand("iota", "iota series (Franel-Landau displacements) at order n");
    iota->add_option("n", n)->required();

    auto* excursion = app.add_subcommand("excursion", "build the unique excursion of (a, b)");
    excursion->add_option("a", a_str, "rational like 1/3")->required();
    excursion->add_option("b", b_str, "rational like 1/3")->required();
    excursion->add_flag("--verify-interior", verify_interior, "check interior depth exhaustively");

    auto* energy = app.add_subcommand("energy", "energy of an excursion");
    energy->add_option("a", a_str)->required();
    energy->add_option("b", b_str)->required();
    energy->add_option("--function", function, "khat | R | g-lambda=<rational> | step=<spec>");

    auto* sweep = app.add_subcommand("sweep", "exact sweep over a grid of Farey orders");
    std::string mode = "theta";
    sweep->add_option("--mode", mode, "theta | iota | f-n | energy-diagonal")->required();
    sweep->add_option("--grid", grid_spec, "default | geometric:<a>:<b>:<r> | n1,n2,...");
    sweep->add_option("--out", out_path, "output file (stdout when omitted)");
    sweep->add_option("--function", function, "function for f-n / energy-diagonal modes");
    sweep->add_option("--parallel", parallel, "worker threads");
    sweep->add_option("--drop-below", drop_below, "exclude n below this from the fit");

    auto* equidist = app.add_subcommand("equidist", "excursion averages vs the dm-integral");
    equidist->add_option("--p", p)->required();
    equidist->add_option("--q", q)->required();
    equidist->add_option("--f", fspec, "step function x0,x1,y0,y1,value;...");
    equidist->add_option("--function", function, "khat | R (when --f is omitted)");
    equidist->add_option("--grid", grid_spec);

    auto* verify = app.add_subcommand("verify", "run the full invariant suite");
    verify->add_option("--n-max", n_max, "largest Farey order checked")->required();
    verify->add_option("--seed", seed, "seed for the sampled checks");
    verify->add_option("--mutate", mutate,
                       "inject a deliberate fault (itinerary-plus-one) to test the harness");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // 2 = usage error
    }

    try {
        if (farey->parsed()) return cmd_farey(n, opt);
        if (orbit->parsed()) return cmd_orbit(a_num, b_num, den, steps, opt);
        if (theta->parsed()) return cmd_series(n, true, opt);
        if (iota->parsed()) return cmd_series(n, false, opt);
        if (excursion->parsed()) return cmd_excursion(a_str, b_str, verify_interior, opt);
        if (energy->parsed()) return cmd_energy(a_str, b_str, function, opt);
        if (sweep->parsed()) {
            SweepConfig cfg;
            cfg.n_values = parse_grid(grid_spec);
            cfg.output_path = out_path;
            cfg.parallelism = parallel;
            cfg.drop_below = drop_below;
            cfg.function = parse_function(function);
            if (mode == "theta")
                cfg.mode = SweepMode::theta_sum;
            else if (mode == "iota")
                cfg.mode = SweepMode::iota_sum;
            else if (mode == "f-n")
                cfg.mode = SweepMode::f_n;
            else if (mode == "energy-diagonal")
                cfg.mode = SweepMode::energy_diagonal;
            else
                throw CLI::ValidationError("--mode", "unknown mode: " + mode);
            return cmd_sweep(cfg, opt.json);
        }
        if (equidist->parsed()) return cmd_equidist(p, q, fspec, function, grid_spec, opt);
        if (verify->parsed()) return cmd_verify(n_max, mutate, seed);
    } catch (const CLI::Error& e) {
        app.exit(e);
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"violation", e.what()}}.dump() << "\n";
        return 1;
    }
    return 2;
}
