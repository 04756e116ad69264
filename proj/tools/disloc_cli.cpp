#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "disloc/dislocation.hpp"
#include "disloc/error.hpp"
#include "disloc/io.hpp"
#include "disloc/oracle.hpp"
#include "disloc/transfer.hpp"

using namespace disloc;
namespace fs = std::filesystem;

namespace {

struct Config {
    std::string potential_file;
    std::string builtin;
    std::vector<double> window{-10, 10};
    bool window_given = false;
    std::optional<double> t;
    std::vector<double> t_range;
    std::string gaps = "all";
    std::string out;
    int jobs = 1;
    unsigned seed = 1;
    double tol_root = 1e-9;
    std::optional<double> tol_invariant;
    double tol_oracle = 1e-6;
};

std::vector<double> split_numbers(const std::string& s, char sep) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error("invalid_argument", fmt::format("not a number: '{}'", item));
        }
    }
    return out;
}

// name:arg1,arg2,... for the named constructors
Potential builtin_potential(const std::string& text) {
    auto colon = text.find(':');
    std::string name = text.substr(0, colon);
    auto args = colon == std::string::npos ? std::vector<double>{} : split_numbers(text.substr(colon + 1), ',');
    auto arg = [&](std::size_t i, double def) { return i < args.size() ? args[i] : def; };
    if (name == "zero") return Potential::zero();
    if (name == "constant") return Potential::constant(arg(0, 1.0), arg(1, 0.0));
    if (name == "two_step") return Potential::two_step(arg(0, 2.0), arg(1, 0.0));
    if (name == "edge_mass") return Potential::edge_mass(arg(0, 12.0), arg(1, 0.01), arg(2, 2.0));
    throw Error("invalid_argument", fmt::format("unknown built-in potential '{}'", name));
}

Potential load(const Config& cfg) {
    if (!cfg.builtin.empty()) return builtin_potential(cfg.builtin);
    require(!cfg.potential_file.empty(), "invalid_argument", "--potential or --builtin is required");
    return load_potential(cfg.potential_file);
}

std::vector<GapInfo> selected_gaps(const Potential& v, const Config& cfg, bool open_only) {
    require(cfg.window.size() == 2 && cfg.window[0] < cfg.window[1], "invalid_argument",
            "--window needs LO < HI");
    double lo = cfg.window[0], hi = cfg.window[1];
    // the default window is moved outward onto a band; an explicit one is taken as is
    if (!cfg.window_given) {
        while (std::abs(monodromy(v, lo).delta()) > 1) lo -= 0.01;
        while (std::abs(monodromy(v, hi).delta()) > 1) hi += 0.01;
    }
    auto all = band_edges(v, lo, hi);
    std::vector<GapInfo> out;
    if (cfg.gaps == "all") {
        for (const auto& g : all)
            if (!open_only || !g.closed) out.push_back(g);
        return out;
    }
    for (double n : split_numbers(cfg.gaps, ',')) {
        auto g = find_gap(all, int(n));
        require(!open_only || !g.closed, "closed_gap", fmt::format("gap {} is closed", g.n));
        out.push_back(g);
    }
    return out;
}

// Runs fn over items with at most `jobs` tasks in flight; results keep input order.
template <class T, class F>
auto parallel_map(const std::vector<T>& items, int jobs, F fn) {
    using R = decltype(fn(items[0]));
    std::vector<R> out;
    out.reserve(items.size());
    std::size_t i = 0;
    while (i < items.size()) {
        std::vector<std::future<R>> batch;
        for (int k = 0; k < std::max(1, jobs) && i < items.size(); ++k, ++i)
            batch.push_back(std::async(std::launch::async, fn, std::cref(items[i])));
        for (auto& f : batch) out.push_back(f.get());
    }
    return out;
}

void emit(const Config& cfg, const std::string& name, const Json& j) {
    if (cfg.out.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    fs::create_directories(cfg.out);
    std::ofstream f(fs::path(cfg.out) / name);
    require(bool(f), "io_error", fmt::format("cannot write {}", (fs::path(cfg.out) / name).string()));
    f << j.dump(2) << "\n";
}

void write_text(const Config& cfg, const std::string& name, const std::string& text) {
    fs::create_directories(cfg.out);
    std::ofstream f(fs::path(cfg.out) / name);
    require(bool(f), "io_error", fmt::format("cannot write {}", (fs::path(cfg.out) / name).string()));
    f << text;
}

int cmd_bands(const Config& cfg) {
    auto v = load(cfg);
    Json arr = Json::array();
    for (const auto& g : selected_gaps(v, cfg, false)) arr.push_back(to_json(g));
    emit(cfg, "bands.json", arr);
    return 0;
}

int cmd_states(const Config& cfg) {
    require(cfg.t.has_value(), "invalid_argument", "states needs --t");
    auto v = load(cfg);
    double t = *cfg.t;
    auto gaps = selected_gaps(v, cfg, true);
    auto rows = parallel_map(gaps, cfg.jobs, [&](const GapInfo& g) {
        Json j;
        j["gap"] = g.n;
        j["t"] = t;
        j["mu"] = to_json(dirichlet_point(v, g, t));
        Json st = Json::array();
        for (const auto& s : locate_states(v, g, t)) {
            require(s.residual < cfg.tol_root, "residual",
                    fmt::format("state residual {} above --tol-root in gap {}", s.residual, g.n));
            st.push_back(to_json(s));
        }
        j["states"] = st;
        return j;
    });
    emit(cfg, "states.json", Json(rows));
    return 0;
}

int cmd_track(const Config& cfg) {
    require(cfg.t_range.size() == 3, "invalid_argument", "track needs --t-range T0 T1 STEPS");
    double t0 = cfg.t_range[0], t1 = cfg.t_range[1];
    int steps = int(cfg.t_range[2]);
    require(t1 > t0, "invalid_argument", "--t-range needs T0 < T1");
    require(steps >= 2, "invalid_argument", "--t-range needs STEPS >= 2");
    auto v = load(cfg);
    auto gaps = selected_gaps(v, cfg, true);
    TrackControl ctrl;
    ctrl.samples = steps;
    auto results = parallel_map(gaps, cfg.jobs, [&](const GapInfo& g) { return track_states(v, g, t0, t1, ctrl); });
    Json summary = Json::array();
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        for (const auto& s : results[i].samples)
            require(s.plus.residual < cfg.tol_root && s.minus.residual < cfg.tol_root, "residual",
                    fmt::format("trajectory residual above --tol-root in gap {} at t = {}", gaps[i].n, s.t));
        summary.push_back(track_summary(gaps[i], results[i]));
        if (!cfg.out.empty()) {
            std::ostringstream os;
            write_track_csv(os, results[i]);
            write_text(cfg, fmt::format("track_n{}.csv", gaps[i].n), os.str());
        }
    }
    emit(cfg, "track_summary.json", summary);
    return 0;
}

struct CheckRow {
    std::string name;
    double value;
    double tol;
    bool pass;
};

Json check_json(const CheckRow& c) {
    return Json{{"check", c.name}, {"value", c.value}, {"tolerance", c.tol}, {"pass", c.pass}};
}

std::vector<CheckRow> invariant_suite(const Potential& v, const Config& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> ux(0, 2), ul(-15, 15), ut(-1, 1), u01(0.05, 0.95);
    double tol_det = cfg.tol_invariant.value_or(1e-10);
    double tol_conj = cfg.tol_invariant.value_or(1e-9);
    double tol_alg = cfg.tol_invariant.value_or(1e-9);
    std::vector<CheckRow> rows;

    double det = 0, conj = 0;
    for (int k = 0; k < 200; ++k) {
        double x = ux(rng), lam = ul(rng), t = ut(rng);
        det = std::max(det, std::abs(fundamental(v, x, lam, t).det() - 1));
        auto p = fundamental(v, t - std::floor(t), lam);
        conj = std::max(conj, max_abs_diff(p * monodromy(v, lam).psi * p.adjugate(), monodromy(v, lam, t).psi));
    }
    rows.push_back({"wronskian", det, tol_det, det < tol_det});
    rows.push_back({"conjugation", conj, tol_conj, conj < tol_conj});

    auto gaps = selected_gaps(v, cfg, true);
    double norm = 0, alg = 0, order_dev = 0;
    int sign_fail = 0, sign_total = 0;
    for (const auto& g : gaps) {
        for (int k = 0; k < 10; ++k) {
            double t = 0.1 * k + 0.03;
            auto mu = dirichlet_point(v, g, t);
            auto m = monodromy(v, mu.lambda, t);
            double n2 = phi_norm_sq(v, mu.lambda, t);
            norm = std::max(norm, std::abs(n2 + m.phi2() * m.dpsi.b) / n2);
            for (int i = 1; i < 20; ++i) {
                double lam = g.alpha_minus + g.width() * i / 20.0;
                auto mm = monodromy(v, lam, t);
                double b = b_sheeted(v, g, {lam, 1, 0});
                alg = std::max(alg, std::abs(mm.a() * mm.a() - b * b + mm.phi1() * mm.theta2()));
            }
            for (const auto& s : locate_states(v, g, t)) {
                ++sign_total;
                sign_fail += !check_sign_lemma(v, g, s, t).ok;
            }
        }
        // second-order convergence of the finite-difference Riccati check
        int done = 0;
        for (int tries = 0; tries < 200 && done < 4; ++tries) {
            double lam = g.alpha_minus + u01(rng) * g.width(), t = u01(rng);
            double h = 2e-3;
            if (v.breakpoint_distance(t) < 3 * h) continue;
            SurfacePoint p{lam, 1, 0};
            auto m0 = m_plus(v, g, p, t);
            if (m0.pole || std::abs(m0.value) > 20) continue;
            auto [q1, q2] = v.value_at(t);
            double e[2];
            bool bad = false;
            for (int j = 0; j < 2; ++j) {
                double hh = h / (1 << j);
                auto a = m_plus(v, g, p, t + hh), b = m_plus(v, g, p, t - hh);
                bad = bad || a.pole || b.pole;
                e[j] = std::abs((a.value - b.value) / (2 * hh) - riccati_rhs(m0.value, lam, q1, q2));
            }
            if (bad) continue;
            ++done;
            if (e[1] > 1e-9) order_dev = std::max(order_dev, std::abs(std::log2(e[0] / e[1]) - 2));
        }
    }
    if (!gaps.empty()) {
        rows.push_back({"norm_identity", norm, 1e-7, norm < 1e-7});
        rows.push_back({"algebraic_identity", alg, tol_alg, alg < tol_alg});
        rows.push_back({"sign_lemmas", double(sign_fail), 0, sign_fail == 0 && sign_total > 0});
        rows.push_back({"riccati_order", order_dev, 0.25, order_dev < 0.25});
    }
    return rows;
}

int cmd_validate(const Config& cfg) {
    auto v = load(cfg);
    auto rows = invariant_suite(v, cfg);
    Json report = Json::array();
    bool ok = true;
    for (const auto& r : rows) {
        report.push_back(check_json(r));
        ok = ok && r.pass;
        spdlog::info("{:<20} {:.3e} (tol {:.1e}) {}", r.name, r.value, r.tol, r.pass ? "pass" : "FAIL");
    }
    emit(cfg, "validate.json", Json{{"pass", ok}, {"checks", report}});
    if (!ok) throw Error("validation_failed", "one or more invariant checks failed");
    return 0;
}

Json oracle_table(const Potential& v, const std::vector<GapInfo>& gaps, double t, double tol, int jobs, bool& ok) {
    auto rows = parallel_map(gaps, jobs, [&](const GapInfo& g) {
        Json out = Json::array();
        auto eig = eigenvalue_oracle(v, g, t), res = resonance_oracle(v, g, t);
        std::vector<bool> used_e(eig.size()), used_r(res.size());
        for (const auto& s : locate_states(v, g, t)) {
            Json row{{"gap", g.n}, {"t", t}, {"kind", kind_name(s.kind)}, {"lambda", s.point.lambda}};
            if (s.point.is_edge()) {
                row["oracle"] = nullptr;
                row["pass"] = true;
            } else {
                const auto& list = s.kind == StateKind::eigenvalue ? eig : res;
                auto& used = s.kind == StateKind::eigenvalue ? used_e : used_r;
                double best = INFINITY;
                std::size_t bi = 0;
                for (std::size_t i = 0; i < list.size(); ++i)
                    if (std::abs(list[i] - s.point.lambda) < best) best = std::abs(list[i] - s.point.lambda), bi = i;
                row["oracle"] = list.empty() ? Json(nullptr) : Json(list[bi]);
                row["deviation"] = best;
                row["pass"] = best < tol;
                if (!list.empty()) used[bi] = true;
            }
            out.push_back(row);
        }
        // oracle zeros with no located partner
        for (std::size_t i = 0; i < eig.size(); ++i)
            if (!used_e[i]) out.push_back(Json{{"gap", g.n}, {"t", t}, {"kind", "eigenvalue"}, {"lambda", nullptr},
                                              {"oracle", eig[i]}, {"pass", false}});
        for (std::size_t i = 0; i < res.size(); ++i)
            if (!used_r[i]) out.push_back(Json{{"gap", g.n}, {"t", t}, {"kind", "resonance"}, {"lambda", nullptr},
                                              {"oracle", res[i]}, {"pass", false}});
        return out;
    });
    Json table = Json::array();
    for (const auto& r : rows)
        for (const auto& x : r) {
            ok = ok && x["pass"].get<bool>();
            table.push_back(x);
        }
    return table;
}

int cmd_oracle_check(const Config& cfg) {
    auto v = load(cfg);
    std::vector<double> ts;
    if (cfg.t) ts.push_back(*cfg.t);
    if (cfg.t_range.size() == 3) {
        int steps = int(cfg.t_range[2]);
        require(steps >= 2, "invalid_argument", "--t-range needs STEPS >= 2");
        for (int k = 0; k < steps; ++k) ts.push_back(cfg.t_range[0] + (cfg.t_range[1] - cfg.t_range[0]) * k / (steps - 1));
    }
    require(!ts.empty(), "invalid_argument", "oracle-check needs --t or --t-range");
    auto gaps = selected_gaps(v, cfg, true);
    bool ok = true;
    Json table = Json::array();
    for (double t : ts)
        for (auto& row : oracle_table(v, gaps, t, cfg.tol_oracle, cfg.jobs, ok)) table.push_back(row);
    for (const auto& r : table) {
        std::string lam = r["lambda"].is_null() ? "-" : fmt::format("{:.12f}", r["lambda"].get<double>());
        std::string orc = r["oracle"].is_null() ? "-" : fmt::format("{:.12f}", r["oracle"].get<double>());
        std::cerr << fmt::format("{:>4} {:>8.4f} {:<10} {:>18} {:>18} {}\n", r["gap"].get<int>(), r["t"].get<double>(),
                                 r["kind"].get<std::string>(), lam, orc, r["pass"].get<bool>() ? "PASS" : "FAIL");
    }
    emit(cfg, "oracle_check.json", Json{{"pass", ok}, {"rows", table}});
    if (!ok) throw Error("validation_failed", "oracle and located states disagree");
    return 0;
}

// Built-in experiment suite: monotone winding, eigenvalue/resonance split, same-sheet instance, mass gap.
int cmd_examples(Config cfg) {
    if (cfg.out.empty()) cfg.out = "examples_out";
    Json index = Json::array();
    bool all_ok = true;
    auto add = [&](const std::string& name, bool ok, const std::string& file) {
        index.push_back(Json{{"experiment", name}, {"pass", ok}, {"file", file}});
        all_ok = all_ok && ok;
    };

    {  // monotone winding: |n|/2 revolutions over one period
        auto v = Potential::two_step(1.0);
        auto gaps = band_edges(v, -12, 12);
        Json s = Json::array();
        bool ok = true;
        for (int n : {-1, 1}) {
            auto g = find_gap(gaps, n);
            auto tr = track_states(v, g, 0.0, 1.0, {});
            std::ostringstream os;
            write_track_csv(os, tr);
            write_text(cfg, fmt::format("winding_n{}.csv", n), os.str());
            double target = (g.alpha_plus > 0 ? 0.5 : -0.5) * std::abs(n);
            ok = ok && std::abs(tr.winding_plus - target) < 0.02 && std::abs(tr.winding_minus - target) < 0.02;
            s.push_back(track_summary(g, tr));
        }
        emit(cfg, "winding_summary.json", s);
        add("monotone_winding", ok, "winding_summary.json");
    }
    {  // one eigenvalue and one resonance per gap for small t
        auto v = Potential::two_step(2.0);
        Json s = Json::array();
        bool ok = true;
        for (const auto& g : band_edges(v, -12, 12)) {
            if (g.closed) continue;
            for (double t : {0.01, 0.02, 0.05}) {
                auto st = locate_states(v, g, t);
                int e = 0;
                Json row{{"gap", g.n}, {"t", t}, {"states", Json::array()}};
                for (const auto& x : st) {
                    e += x.kind == StateKind::eigenvalue;
                    row["states"].push_back(to_json(x));
                }
                ok = ok && e == 1;
                s.push_back(row);
            }
        }
        emit(cfg, "split.json", s);
        add("eigenvalue_resonance_split", ok, "split.json");
    }
    {  // both states on one sheet, chosen by the order of mu and nu
        double c = 12;
        auto v = Potential::edge_mass(c, 0.01, 2.0);
        Json s = Json::array();
        bool ok = true;
        for (const auto& g : band_edges(v, -c + 0.5, c - 0.5)) {
            if (g.closed || g.alpha_minus <= -c || g.alpha_plus >= c) continue;
            int want = g.mu.lambda < g.nu ? 1 : 2;
            double t = 1e-3;
            Json row{{"gap", g.n}, {"t", t}, {"expected_sheet", want}, {"states", Json::array()}};
            for (const auto& x : locate_states(v, g, t)) {
                ok = ok && !x.point.is_edge() && x.point.sheet == want;
                row["states"].push_back(to_json(x));
            }
            s.push_back(row);
        }
        emit(cfg, "same_sheet.json", s);
        add("same_sheet_instance", ok, "same_sheet.json");
    }
    {  // constant mass with odd q2: virtual states +-m for every t
        double m = 0.7;
        auto v = Potential::two_step(2.0, m);
        auto g = find_gap(band_edges(v, -12, 12), 0);
        Json s = Json::array();
        bool ok = std::abs(g.alpha_minus + m) < 1e-10 && std::abs(g.alpha_plus - m) < 1e-10;
        for (int k = 0; k <= 10; ++k) {
            double t = 0.1 * k;
            Json row{{"t", t}, {"states", Json::array()}};
            for (const auto& x : locate_states(v, g, t)) {
                ok = ok && x.kind == StateKind::virtual_state;
                row["states"].push_back(to_json(x));
            }
            s.push_back(row);
        }
        emit(cfg, "mass_gap.json", s);
        add("mass_gap_virtual_states", ok, "mass_gap.json");
    }
    std::cout << Json{{"pass", all_ok}, {"out", cfg.out}, {"experiments", index}}.dump(2) << "\n";
    if (!all_ok) throw Error("validation_failed", "an experiment did not reproduce");
    return 0;
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("disloc");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* lvl = std::getenv("DISLOC_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Eigenvalues and resonances in the gaps of a periodic Dirac system cut and shifted at the origin"};
    app.require_subcommand(1);
    app.fallthrough();
    Config cfg;
    app.add_option("--potential", cfg.potential_file, "Potential JSON file {breakpoints, q1, q2}");
    app.add_option("--builtin", cfg.builtin, "Built-in potential, e.g. two_step:2 or edge_mass:12,0.01,2");
    auto* window_opt = app.add_option("--window", cfg.window, "Spectral window LO HI")->expected(2);
    app.add_option("--t", cfg.t, "Dislocation parameter");
    app.add_option("--t-range", cfg.t_range, "T0 T1 STEPS")->expected(3);
    app.add_option("--gaps", cfg.gaps, "all or a comma list of gap indices");
    app.add_option("--out", cfg.out, "Output directory (stdout when omitted)");
    app.add_option("--jobs", cfg.jobs, "Gaps processed in parallel")->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "Seed for randomised checks");
    app.add_option("--tol-root", cfg.tol_root, "State residual tolerance");
    app.add_option("--tol-invariant", cfg.tol_invariant, "Identity check tolerance");
    app.add_option("--tol-oracle", cfg.tol_oracle, "Oracle agreement tolerance");

    std::function<int(const Config&)> action;
    app.add_subcommand("bands", "Band edges and gap data")->callback([&] { action = cmd_bands; });
    app.add_subcommand("states", "Two states per gap at fixed t")->callback([&] { action = cmd_states; });
    app.add_subcommand("track", "Continuation of the states in t")->callback([&] { action = cmd_track; });
    app.add_subcommand("validate", "Invariant suite")->callback([&] { action = cmd_validate; });
    app.add_subcommand("oracle-check", "Compare with the shooting oracle")->callback([&] { action = cmd_oracle_check; });
    app.add_subcommand("examples", "Regenerate the built-in experiments")->callback([&] { action = cmd_examples; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    cfg.window_given = window_opt->count() > 0;
    try {
        return action(cfg);
    } catch (const Error& e) {
        std::cout << Json{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump() << "\n";
        return e.code() == "validation_failed" ? 1 : 2;
    } catch (const std::exception& e) {
        std::cout << Json{{"error", {{"code", "internal"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    }
}
