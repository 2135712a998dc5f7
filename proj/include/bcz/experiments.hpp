#pragma once

#include "bcz/dynamics.hpp"
#include "bcz/excursion.hpp"
#include "bcz/farey.hpp"
#include "bcz/fit.hpp"
#include "bcz/gas.hpp"
#include "bcz/step_function.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace bcz {

// ---------------------------------------------------------------------------
// Scalar function selection
// ---------------------------------------------------------------------------

/// The g_lambda family: lambda (a1/a0 + a0/a1) + (1-lambda)(a_-1/a0 + a2/a1) - 3
/// along the orbit. With a_-1 and a2 expressed through the itinerary values
/// this collapses to the context-free closed form
///   (2 lambda - 1)(a/b + b/a - 3) + (2 - 2 lambda)(k_hat(a,b) - 3),
/// which is what we evaluate. lambda = 1/2 gives k_hat - 3 itself.
inline TriangleFunction g_lambda(const Rational& lambda) {
    return [lambda](const FareyPoint& p) {
        const Rational a = p.x();
        const Rational b = p.y();
        const Rational ratio = a / b + b / a - Rational(3);
        const Rational khat = p.k_hat().to_rational() - Rational(3);
        return (Rational(2) * lambda - Rational(1)) * ratio +
               (Rational(2) - Rational(2) * lambda) * khat;
    };
}

struct FunctionSpec {
    enum class Kind { r, khat, g_lambda, step };
    Kind kind = Kind::khat;
    Rational lambda = Rational(1);
    StepFunction step;

    TriangleFunction make() const {
        switch (kind) {
            case Kind::r:
                return [](const FareyPoint& p) { return p.return_time(); };
            case Kind::khat:
                return [](const FareyPoint& p) { return p.k_hat().to_rational(); };
            case Kind::g_lambda:
                return g_lambda(lambda);
            case Kind::step: {
                StepFunction f = step;
                return [f](const FareyPoint& p) { return f(p); };
            }
        }
        throw std::logic_error("unreachable");
    }

    std::string name() const {
        switch (kind) {
            case Kind::r:
                return "R";
            case Kind::khat:
                return "khat";
            case Kind::g_lambda:
                return "g_lambda(" + lambda.to_string() + ")";
            case Kind::step:
                return "step";
        }
        return "?";
    }
};

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

enum class SweepMode { theta_sum, iota_sum, f_n, energy_diagonal };

inline std::string sweep_mode_name(SweepMode m) {
    switch (m) {
        case SweepMode::theta_sum:
            return "theta_sum";
        case SweepMode::iota_sum:
            return "iota_sum";
        case SweepMode::f_n:
            return "f_n";
        case SweepMode::energy_diagonal:
            return "energy_diagonal";
    }
    return "?";
}

struct SweepConfig {
    std::vector<std::int64_t> n_values;
    FunctionSpec function;  // used by f_n and energy_diagonal
    SweepMode mode = SweepMode::theta_sum;
    std::string output_path;  // empty: no file written
    int parallelism = 1;
    std::int64_t drop_below = 30;  // smallest n admitted to the fit
};

/// The default grid: geometric with ratio ~1.5 from 32 to 2048.
inline std::vector<std::int64_t> default_sweep_grid() {
    std::vector<std::int64_t> grid;
    for (std::int64_t n = 32; n <= 2048; n = std::llround(static_cast<double>(n) * 1.5))
        grid.push_back(n);
    if (grid.back() != 2048) grid.push_back(2048);
    return grid;
}

struct SweepRow {
    std::int64_t n = 0;
    std::int64_t a_n = 0;
    Rational value;
};

struct SweepResult {
    SweepMode mode = SweepMode::theta_sum;
    std::string function_name;
    std::int64_t drop_below = 30;
    std::vector<SweepRow> rows;
    std::optional<FitReport> fit;
};

namespace detail {

inline Rational sweep_value(SweepMode mode, const FunctionSpec& fn, std::int64_t n) {
    switch (mode) {
        case SweepMode::theta_sum:
            return theta_abs_sum(n);
        case SweepMode::iota_sum:
            return iota_abs_sum(n);
        case SweepMode::f_n:
            return f_n_functional(fn.make(), n);
        case SweepMode::energy_diagonal:
            if (fn.kind == FunctionSpec::Kind::khat) return theta_abs_sum(n);
            return energy(fn.make(), ModuliPoint(Rational(1, n), Rational(1, n)));
    }
    throw std::logic_error("unreachable");
}

}  // namespace detail

/// Run the sweep: the selected quantity is computed exactly per n; floats
/// appear only in the fit. Rows are ordered by n regardless of which worker
/// finished first, so results are deterministic for a given config.
inline SweepResult run_sweep(const SweepConfig& cfg) {
    if (cfg.n_values.empty()) throw std::domain_error("empty sweep grid");
    for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
        if (cfg.n_values[i] < 1) throw std::domain_error("sweep grid entries must be >= 1");
        if (i > 0 && cfg.n_values[i] <= cfg.n_values[i - 1])
            throw std::domain_error("sweep grid must be strictly increasing");
    }

    SweepResult result;
    result.mode = cfg.mode;
    result.function_name = cfg.function.name();
    result.drop_below = cfg.drop_below;
    result.rows.resize(cfg.n_values.size());

    const int workers = std::max(1, cfg.parallelism);
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&]() {
        for (;;) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= cfg.n_values.size()) return;
            try {
                const std::int64_t n = cfg.n_values[idx];
                result.rows[idx] =
                    SweepRow{n, farey_length(n).a_n, detail::sweep_value(cfg.mode, cfg.function, n)};
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<std::pair<double, double>> pts;
    for (const auto& row : result.rows)
        if (row.n >= cfg.drop_below && row.value.is_positive())
            pts.emplace_back(static_cast<double>(row.n), row.value.to_double());
    if (pts.size() >= 2) result.fit = fit_power_law(pts);
    return result;
}

/// CSV emission: header then one row per n; exact value carried as
/// numerator/denominator columns so nothing is lost in round-tripping.
inline std::string sweep_csv(const SweepResult& r) {
    std::ostringstream out;
    out << "n,A_n,value_num,value_den,value_float\n";
    for (const auto& row : r.rows) {
        out << row.n << ',' << row.a_n << ',' << row.value.num().str() << ','
            << row.value.den().str() << ',';
        out.precision(17);
        out << row.value.to_double() << '\n';
    }
    return out.str();
}

inline nlohmann::json sweep_json(const SweepResult& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"n", row.n},
                        {"A_n", row.a_n},
                        {"value_num", row.value.num().str()},
                        {"value_den", row.value.den().str()},
                        {"value_float", row.value.to_double()}});
    }
    nlohmann::json j{{"mode", sweep_mode_name(r.mode)},
                     {"function", r.function_name},
                     {"drop_below", r.drop_below},
                     {"rows", rows}};
    if (r.fit) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& [x, y] : r.fit->points) pts.push_back({{"log_x", x}, {"log_y", y}});
        j["fit"] = {{"exponent", r.fit->exponent},
                    {"intercept", r.fit->intercept},
                    {"max_residual", r.fit->max_residual},
                    {"points", pts}};
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Section 6 condition probe
// ---------------------------------------------------------------------------

struct ConditionProbeReport {
    double alpha = 0.0;
    double c1 = 1.0;
    std::int64_t violations = 0;
    std::int64_t samples = 0;
};

/// Empirically fit the smallest alpha such that the reset condition
/// |zeta_s| < C1 ((a0/as)^alpha + (as/a0)^alpha) holds over sampled
/// excursions. C1 is calibrated on the near-balanced samples (ratio <= 2),
/// alpha on the rest; the violation count at the fitted pair is reported.
inline ConditionProbeReport condition_probe_alpha(const TriangleFunction& g,
                                                  std::int64_t samples, std::uint64_t seed,
                                                  double alpha_min = 0.25) {
    if (samples < 1) throw std::domain_error("samples must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> den_dist(1, 500);

    std::vector<std::pair<double, double>> data;  // (ratio >= 1, |zeta_s|)
    data.reserve(static_cast<std::size_t>(samples));
    for (std::int64_t i = 0; i < samples; ++i) {
        const std::int64_t qa = den_dist(rng);
        const std::int64_t qb = den_dist(rng);
        std::uniform_int_distribution<std::int64_t> pa(1, qa), pb(1, qb);
        const ModuliPoint m{Rational(pa(rng), qa), Rational(pb(rng), qb)};
        Rational zeta(0);
        walk_excursion(m, [&](std::int64_t, const StepRecord& rec, HalfInteger, const FareyPoint&) {
            zeta += g(rec.point);
        });
        const Rational ratio = m.a < m.b ? m.b / m.a : m.a / m.b;
        data.emplace_back(ratio.to_double(), zeta.abs().to_double());
    }

    ConditionProbeReport report;
    report.samples = samples;
    double c1 = 1.0;
    for (const auto& [r, z] : data)
        if (r <= 2.0 && 2.0 * z > c1) c1 = 2.0 * z;
    report.c1 = c1;

    double alpha = alpha_min;
    for (const auto& [r, z] : data)
        if (r > 2.0 && z > c1) alpha = std::max(alpha, std::log(z / c1) / std::log(r));
    report.alpha = alpha;

    for (const auto& [r, z] : data)
        if (z >= c1 * (std::pow(r, alpha) + std::pow(r, -alpha))) ++report.violations;
    return report;
}

// ---------------------------------------------------------------------------
// Equidistribution along excursions
// ---------------------------------------------------------------------------

/// (pq / A_n) * sum of g over the excursion points T^0..T^{s-1} of
/// (q/n, p/n). Exact for exact-valued g.
inline Rational excursion_scaled_sum(const TriangleFunction& g, std::int64_t p, std::int64_t q,
                                     std::int64_t n) {
    if (std::gcd(p, q) != 1) throw std::domain_error("p and q must be coprime");
    if (n <= std::max(p, q)) throw std::domain_error("n must exceed max(p, q)");
    Rational sum(0);
    walk_excursion(ModuliPoint(Rational(q, n), Rational(p, n)),
                   [&](std::int64_t, const StepRecord& rec, HalfInteger, const FareyPoint&) {
                       sum += g(rec.point);
                   });
    return sum * Rational(p * q) / Rational(farey_length(n).a_n);
}

struct EquidistRow {
    std::int64_t n = 0;
    Rational scaled_sum;  // (pq/A_n) sum f over the excursion
    double error = 0.0;   // |scaled_sum - integral|
};

struct EquidistReport {
    std::int64_t p = 1, q = 1;
    Rational integral;  // exact integral of f dm over the triangle
    std::vector<EquidistRow> rows;
};

inline EquidistReport equidistribution_check(const StepFunction& f, std::int64_t p, std::int64_t q,
                                             const std::vector<std::int64_t>& n_values) {
    if (std::gcd(p, q) != 1) throw std::domain_error("p and q must be coprime");
    EquidistReport report;
    report.p = p;
    report.q = q;
    report.integral = f.integral_dm();
    TriangleFunction g = [&f](const FareyPoint& pt) { return f(pt); };
    for (std::int64_t n : n_values) {
        EquidistRow row;
        row.n = n;
        row.scaled_sum = excursion_scaled_sum(g, p, q, n);
        row.error = (row.scaled_sum - report.integral).abs().to_double();
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------
// verify_all: the aggregated invariant checkers
// ---------------------------------------------------------------------------

/// Deliberate corruption hooks for harness-integrity testing.
enum class Fault { none, itinerary_plus_one };

struct VerifyCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::int64_t n_max = 0;
    bool passed = false;
    std::vector<VerifyCheck> checks;
};

namespace detail {

/// One BCZ step under an optional injected fault; the faulty map is applied
/// without triangle validation so the damage shows up in the invariants.
inline FareyPoint stepper(const FareyPoint& p, Fault fault) {
    if (fault == Fault::none) return bcz_step(p);
    if (p.y_num <= 0) throw std::logic_error("orbit left the triangle");
    const std::int64_t k = (p.den + p.x_num) / p.y_num + 1;
    return FareyPoint(p.y_num, checked_sub(checked_mul(k, p.y_num), p.x_num), p.den);
}

inline HalfInteger k_hat_checked(const FareyPoint& p) {
    if (p.x_num <= 0 || p.y_num <= 0) throw std::logic_error("orbit left the triangle");
    return p.k_hat();
}

template <typename Fn>
void run_check(VerifyReport& report, const std::string& name, Fn&& fn) {
    VerifyCheck check;
    check.name = name;
    try {
        fn(check);
        check.passed = true;
    } catch (const std::exception& e) {
        check.passed = false;
        check.detail = e.what();
    }
    report.checks.push_back(std::move(check));
}

}  // namespace detail

/// Run the full invariant suite up to n_max. Exit-code semantics are the
/// caller's job; this returns the structured report.
inline VerifyReport verify_all(std::int64_t n_max, Fault fault = Fault::none,
                               std::uint64_t seed = 0x5eed) {
    if (n_max < 3) throw std::domain_error("n_max must be >= 3");
    VerifyReport report;
    report.n_max = n_max;

    // Farey stream: unimodularity, count vs sieve, symmetry q_i = q_{A_n - i}.
    detail::run_check(report, "farey-stream", [&](VerifyCheck&) {
        for (std::int64_t n = 1; n <= n_max; ++n) {
            FareyStream fs(n);
            std::vector<std::int64_t> qs;
            std::optional<FareyFraction> prev;
            std::int64_t count = 0;
            while (auto f = fs.next()) {
                if (prev && BigInt(prev->q) * f->p - BigInt(prev->p) * f->q != 1)
                    throw std::logic_error("unimodularity failed at n=" + std::to_string(n));
                qs.push_back(f->q);
                prev = f;
                ++count;
            }
            const std::int64_t a_n = farey_length(n).a_n;
            if (count != a_n + 1)
                throw std::logic_error("stream count != A_n + 1 at n=" + std::to_string(n));
            for (std::size_t i = 0; i < qs.size(); ++i)
                if (qs[i] != qs[qs.size() - 1 - i])
                    throw std::logic_error("q-symmetry failed at n=" + std::to_string(n));
        }
    });

    // Orbit/Farey correspondence and periodicity (runs through the stepper,
    // so an injected fault surfaces here).
    detail::run_check(report, "orbit-farey-correspondence", [&](VerifyCheck&) {
        for (std::int64_t n = 1; n <= n_max; ++n) {
            const std::int64_t a_n = farey_length(n).a_n;
            DenominatorStream ds(n);
            FareyPoint p(1, n, n);
            for (std::int64_t i = 0; i < a_n; ++i) {
                auto q = ds.next();
                if (!q || p.x_num != *q)
                    throw std::logic_error("orbit x-numerator != q_" + std::to_string(i) +
                                           " at n=" + std::to_string(n));
                if (!in_farey_triangle(p))
                    throw std::logic_error("orbit left the triangle at n=" + std::to_string(n));
                p = detail::stepper(p, fault);
            }
            if (!(p == FareyPoint(1, n, n)))
                throw std::logic_error("orbit not periodic with period A_n at n=" +
                                       std::to_string(n));
        }
    });

    // theta_{A_n} = -1 exactly.
    detail::run_check(report, "theta-terminal", [&](VerifyCheck&) {
        for (std::int64_t n = 1; n <= n_max; ++n) {
            const std::int64_t a_n = farey_length(n).a_n;
            FareyPoint p(1, n, n);
            HalfInteger theta;
            for (std::int64_t i = 0; i < a_n; ++i) {
                if (!in_farey_triangle(p))
                    throw std::logic_error("orbit left the triangle at n=" + std::to_string(n));
                theta += detail::k_hat_checked(p) - HalfInteger::from_integer(3);
                p = detail::stepper(p, fault);
            }
            if (theta != HalfInteger::from_integer(-1))
                throw std::logic_error("theta_{A_n} != -1 at n=" + std::to_string(n) +
                                       " (got " + theta.to_string() + ")");
        }
    });

    // iota_{A_n} = 0 exactly (term-wise closed form).
    detail::run_check(report, "iota-terminal", [&](VerifyCheck&) {
        for (std::int64_t n = 1; n <= n_max; ++n) {
            const auto series = iota_series(n);
            if (!series.rational_terms.back().is_zero())
                throw std::logic_error("iota_{A_n} != 0 at n=" + std::to_string(n));
        }
    });

    // h_hat of the Farey denominators: direct window sum and full elimination
    // must both give exactly -1.
    detail::run_check(report, "gas-hhat-farey", [&](VerifyCheck&) {
        for (std::int64_t n = 1; n <= n_max; ++n) {
            std::vector<std::int64_t> qs;
            DenominatorStream ds(n);
            ds.next();  // q_0 = 1 duplicates q_{A_n}; keep q_1..q_{A_n}
            while (auto q = ds.next()) qs.push_back(*q);
            const BigInt direct = h_hat_cyclic_direct(qs);
            const BigInt eliminated = h_hat_cyclic_by_elimination(qs);
            if (direct != -1 || eliminated != -1)
                throw std::logic_error("h_hat(q_1..q_{A_n}) != -1 at n=" + std::to_string(n));
        }
    });

    // Reset control + monotonicity + depth + length bound + primitive-point
    // correspondence over every moduli point with denominators <= 40 (capped
    // by n_max).
    detail::run_check(report, "excursions-exhaustive", [&](VerifyCheck& check) {
        const std::int64_t dmax = std::min<std::int64_t>(n_max, 40);
        std::vector<Rational> fractions;
        for (std::int64_t q = 1; q <= dmax; ++q)
            for (std::int64_t p = 1; p <= q; ++p)
                if (std::gcd(p, q) == 1) fractions.emplace_back(p, q);
        std::int64_t n_checked = 0;
        for (const auto& a : fractions) {
            for (const auto& b : fractions) {
                const ModuliPoint m(a, b);
                const auto pairs = primitive_points(m);
                const auto sm = detail::scale_moduli(m);
                std::size_t idx = 0;
                bool correspondence_ok = true;
                detail::SummaryCollector collector;
                const std::int64_t s = walk_excursion(
                    m,
                    [&](std::int64_t i, const StepRecord&, HalfInteger zeta_i,
                        const FareyPoint& next) {
                        collector.feed(i, zeta_i);
                        if (next.x_num <= sm.b_num) return;  // endpoint, not interior
                        if (idx >= pairs.size() ||
                            pairs[idx].first * sm.a_num + pairs[idx].second * sm.b_num !=
                                next.x_num)
                            correspondence_ok = false;
                        ++idx;
                    },
                    /*verify_interior=*/true);
                const ExcursionSummary summary = collector.finish(s);
                if (!correspondence_ok || idx != pairs.size())
                    throw std::logic_error("primitive-point correspondence failed at " +
                                           m.to_string());
                // s <= 1/(ab) with equality only at (1,1).
                const Rational bound = Rational(1) / (m.a * m.b);
                if (Rational(s) > bound ||
                    (Rational(s) == bound && !(m.a == Rational(1) && m.b == Rational(1))))
                    throw std::logic_error("length bound violated at " + m.to_string());
                reset_check_summary(m, summary);
                if (s >= 4 && !monotonicity_check_summary(m, summary))
                    throw std::logic_error("monotonicity violated at " + m.to_string());
                ++n_checked;
            }
        }
        check.detail = std::to_string(n_checked) + " moduli points";
    });

    // theta reset terms against the (i + 1/i - 4, i + 1/i - 2) window.
    detail::run_check(report, "theta-resets", [&](VerifyCheck&) {
        for (std::int64_t n : {n_max, std::max<std::int64_t>(3, n_max / 2)}) {
            for (std::int64_t i = 1; i <= std::min<std::int64_t>(n, 20); ++i)
                theta_reset_at_r_i(n, i);
        }
    });

    // R - k_hat bounds on random samples (asserts global and per-case bands).
    detail::run_check(report, "r-minus-khat", [&](VerifyCheck& check) {
        const auto rep = r_minus_khat_bounds_check(10'000, seed);
        check.detail = std::to_string(rep.cases.size()) + " itinerary classes";
    });

    // GAS bridge: orbit segments validate (through the stepper), closure and
    // the h / h_hat identities hold under elimination.
    detail::run_check(report, "gas-orbit-bridge", [&](VerifyCheck&) {
        TriangleSampler sampler(seed ^ 0xbc2u);
        for (int trial = 0; trial < 200; ++trial) {
            FareyPoint p = sampler.next();
            std::vector<Rational> xs;
            for (int i = 0; i < 12; ++i) {
                xs.push_back(p.x());
                if (!in_farey_triangle(p))
                    throw std::logic_error("orbit left the triangle in GAS bridge");
                p = detail::stepper(p, fault);
            }
            xs.push_back(p.x());
            GasSeq seq = validate_gas(xs, false);
            // Scaling by a positive rational preserves validity.
            std::vector<Rational> scaled;
            for (const auto& t : xs) scaled.push_back(t * Rational(3, 7));
            validate_gas(scaled, false);
            for (std::size_t m : find_local_maxima(seq)) {
                GasSeq shorter = eliminate(seq, m);  // closure must hold
                if (m >= 3 && m + 3 < seq.size()) {
                    if (!(h_value(shorter.terms) == h_value(seq.terms)))
                        throw std::logic_error("h identity violated under elimination");
                }
            }
        }
    });

    report.passed = true;
    for (const auto& c : report.checks) report.passed = report.passed && c.passed;
    return report;
}

inline nlohmann::json verify_json(const VerifyReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return nlohmann::json{{"n_max", r.n_max}, {"passed", r.passed}, {"checks", checks}};
}

}  // namespace bcz
