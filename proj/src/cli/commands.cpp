#include "hetcycle/cli/commands.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hetcycle/dynamics.hpp"
#include "hetcycle/empirics.hpp"
#include "hetcycle/numerics.hpp"
#include "hetcycle/spectra.hpp"

namespace hetcycle::cli {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

class Artifacts {
public:
    explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

    std::ofstream open(const std::string& name) {
        std::ofstream os(dir_ / name);
        if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
        names_.push_back(name);
        return os;
    }

    void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }

    const std::vector<std::string>& names() const { return names_; }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> names_;
};

json config_to_json(const RawConfig& effective) {
    json j = json::object();
    for (const auto& [sec, keys] : effective)
        for (const auto& [key, value] : keys) j[sec][key] = value;
    return j;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

CycleSpec cycle_by_name(const std::string& name) {
    if (name == "C2") return cycle_c2();
    if (name == "C2_hat") return cycle_c2_hat();
    if (name == "C2_check") return cycle_c2_check();
    throw std::invalid_argument("unknown cycle '" + name + "'");
}

Word initial_word(const std::string& configured, int M) {
    if (!configured.empty()) return Word(configured);
    return M == 4 ? Word("SDSS") : cycle_c2().equilibria.front();
}

json params_json(const RunConfig& cfg) {
    const ModelParams& p = cfg.model;
    return {{"M", p.M}, {"N", p.N}, {"alpha", p.alpha}, {"K", p.K}, {"r", p.r},
            {"a", p.a}, {"omega", p.omega}, {"delta", p.delta},
            {"kind", cfg.kind == FieldKind::FullPhaseShift ? "full" : "nonpairwise"}};
}

// ---- eigen ----

struct EigenRow {
    Word word;
    int coord;
    double closed, fd;
};

std::vector<EigenRow> eigen_table(const RunConfig& cfg) {
    const ModelParams& p = cfg.model;
    if (p.N != 2) throw UnsupportedError("eigen: closed-form spectra are defined for N = 2");
    const ReducedFieldN2 field(p, cfg.kind);
    std::vector<EigenRow> rows;
    for (const Word& w : Word::all(p.M)) {
        const auto closed = eigenvalues_closed_form(w, p, cfg.kind);
        const auto x = w.point();
        const EigenData fd = eigen_small(jacobian_fd(field, x, cfg.eigen.fd_step));
        std::vector<double> by_coord(closed.size(), std::nan(""));
        for (int k = 0; k < fd.dimension; ++k) {
            Eigen::Index coord = 0;
            fd.vectors.col(k).cwiseAbs().maxCoeff(&coord);
            by_coord[static_cast<std::size_t>(coord)] = fd.values(k).real();
        }
        for (std::size_t i = 0; i < closed.size(); ++i)
            rows.push_back({w, static_cast<int>(i) + 1, closed[i], by_coord[i]});
    }
    return rows;
}

double max_diff(const std::vector<EigenRow>& rows) {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, std::isnan(r.fd) ? HUGE_VAL : std::abs(r.closed - r.fd));
    return m;
}

int run_eigen(const RunConfig& cfg, Artifacts& out, std::ostream& log) {
    const auto rows = eigen_table(cfg);
    auto os = out.open("eigen.csv");
    os << "word,coord,closed_form,finite_difference,abs_diff\n";
    for (const auto& r : rows)
        os << r.word.str() << ',' << r.coord << ',' << num(r.closed) << ',' << num(r.fd) << ','
           << num(std::abs(r.closed - r.fd)) << '\n';
    log << "eigen: " << rows.size() << " eigenvalues, max |closed - fd| = " << max_diff(rows) << '\n';
    return kExitOk;
}

// ---- indices ----

json network_json(const NetworkReport& n) {
    return {{"class", to_string(n.cls)}, {"rule", n.rule}};
}

int run_indices(const RunConfig& cfg, Artifacts& out, std::ostream& log) {
    json j;
    j["params"] = params_json(cfg);
    bool applicable = true;
    if (cfg.model.M == 3) {
        const StabilityReport r = classify_m3(cfg.model);
        j["reports"] = json::array({report_to_json(r)});
        applicable = r.cls != StabilityClass::NotApplicable;
        log << "indices: " << r.cycle << " " << to_string(r.cls) << '\n';
    } else {
        const NetworkReport n = network_report(cfg.model);
        j["reports"] = json::array({report_to_json(n.hat), report_to_json(n.check)});
        j["network"] = network_json(n);
        applicable = n.hat.cls != StabilityClass::NotApplicable || n.check.cls != StabilityClass::NotApplicable;
        log << "indices: " << n.hat.cycle << " " << to_string(n.hat.cls) << ", " << n.check.cycle << " "
            << to_string(n.check.cls) << ", network " << to_string(n.cls) << '\n';
    }
    out.write_json("indices.json", j);
    if (!applicable) {
        log << "indices: existence or nonresonance conditions are not met\n";
        return kExitPrecondition;
    }
    return kExitOk;
}

// ---- simulate ----

struct SimulationResult {
    Trajectory reduced;
    Itinerary itinerary;
    std::vector<Word> vocabulary;
};

SimulationResult simulate(const RunConfig& cfg, bool keep_trajectory) {
    const ModelParams& p = cfg.model;
    if (p.N != 2) throw UnsupportedError("simulate: initial words and itineraries require N = 2");
    const Word w0 = initial_word(cfg.simulate.initial, p.M);
    const PhaseField f(p, cfg.kind);
    std::vector<double> x = lift(equilibrium_state(w0), std::vector<double>(static_cast<std::size_t>(p.M), 0.0)).theta;

    SimulationResult res;
    res.vocabulary = noisy_vocabulary(p.M);
    ItineraryTracker tracker(res.vocabulary, cfg.simulate.eps_near, cfg.simulate.eps_leave);
    const long long stride = cfg.simulate.stride > 0
                                 ? cfg.simulate.stride
                                 : std::max(1LL, static_cast<long long>(std::llround(0.1 / cfg.sim.dt)));
    res.reduced.dt = cfg.sim.dt;
    res.reduced.eta = cfg.sim.eta;
    res.reduced.seed = cfg.sim.seed;
    std::vector<double> psi(static_cast<std::size_t>(p.M));
    auto observe = [&](long long s, double t, const std::vector<double>& th) {
        if (s % stride != 0) return true;
        for (std::size_t k = 0; k < psi.size(); ++k) psi[k] = wrap_angle(th[2 * k + 1] - th[2 * k]);
        tracker.feed(t, psi);
        if (keep_trajectory) {
            res.reduced.times.push_back(t);
            res.reduced.states.push_back(psi);
        }
        return true;
    };
    if (cfg.sim.eta > 0.0)
        integrate_em_observe(f, x, cfg.sim.dt, cfg.sim.T, cfg.sim.eta, cfg.sim.seed, observe, true);
    else
        integrate_rk4_observe(f, x, cfg.sim.dt, cfg.sim.T, observe, true);
    res.itinerary = tracker.finish(cfg.sim.T);
    return res;
}

json itinerary_json(const SimulationResult& s, const RunConfig& cfg) {
    json sym = json::array(), voc = json::array();
    for (const auto& w : s.itinerary.symbols) sym.push_back(w.str());
    for (const auto& w : s.vocabulary) voc.push_back(w.str());
    return {{"symbols", sym},
            {"entry", s.itinerary.entry},
            {"exit", s.itinerary.exit},
            {"vocabulary", voc},
            {"eps_near", cfg.simulate.eps_near},
            {"eps_leave", cfg.simulate.eps_leave},
            {"seed", cfg.sim.seed},
            {"eta", cfg.sim.eta}};
}

int run_simulate(const RunConfig& cfg, Artifacts& out, std::ostream& log) {
    const SimulationResult s = simulate(cfg, true);
    {
        auto os = out.open("trajectory.csv");
        write_trajectory_csv(os, s.reduced, "psi");
    }
    out.write_json("itinerary.json", itinerary_json(s, cfg));
    log << "simulate: " << s.reduced.size() << " samples, " << s.itinerary.symbols.size() << " itinerary symbols\n";
    return kExitOk;
}

// ---- basin ----

BasinOptions basin_options(const RunConfig& cfg, int workers) {
    BasinOptions o;
    o.connection = cfg.basin.connection - 1;
    o.epsilon = cfg.basin.epsilon;
    o.n = static_cast<std::size_t>(cfg.basin.n);
    o.T_max = cfg.basin.T_max;
    o.seed = cfg.sim.seed;
    o.dt = cfg.basin.dt;
    o.max_distance = cfg.basin.max_distance;
    o.workers = static_cast<unsigned>(workers);
    o.kind = cfg.kind;
    return o;
}

json estimate_json(const BasinEstimate& e) {
    return {{"target", e.target},   {"connection", e.connection + 1}, {"epsilon", e.epsilon},
            {"n", e.n},             {"attracted", e.attracted},       {"fraction", e.fraction},
            {"ci95", {e.ci95.first, e.ci95.second}},                  {"seed", e.seed},
            {"T_max", e.T_max},     {"base_point", e.base_point}};
}

int run_basin(const RunConfig& cfg, Artifacts& out, std::ostream& log) {
    const CycleSpec cycle = cycle_by_name(cfg.basin.cycle);
    if (cfg.basin.connection > static_cast<int>(cycle.length()))
        throw std::invalid_argument("basin.connection exceeds the cycle length");
    const BasinOptions opt = basin_options(cfg, cfg.basin.workers);
    const BasinEstimate est = basin_fraction(cfg.model, cycle, opt);
    json j = estimate_json(est);
    j["params"] = params_json(cfg);
    j["note"] = "sign-level evidence only; magnitudes of stability indices are not estimated";
    if (!cfg.basin.ladder.empty()) {
        const IndexSignEstimate s = empirical_index_sign(cfg.model, cycle, opt.connection, cfg.basin.ladder, opt);
        json ladder = json::array();
        for (const auto& e : s.ladder) ladder.push_back(estimate_json(e));
        j["index_sign"] = {{"sign", to_string(s.sign)}, {"slope", s.slope}, {"t_stat", s.t_stat},
                           {"note", s.note},            {"ladder", ladder}};
    }
    out.write_json("basin.json", j);
    log << "basin: " << est.attracted << "/" << est.n << " attracted (" << est.fraction << ")\n";
    return kExitOk;
}

// ---- wedge ----

WedgeOptions wedge_options(const RunConfig& cfg, int workers) {
    WedgeOptions o;
    o.resolution = cfg.wedge.resolution;
    o.T_max = cfg.wedge.T_max;
    o.dt = cfg.wedge.dt;
    o.tol = cfg.wedge.tol;
    o.workers = static_cast<unsigned>(workers);
    return o;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int run_wedge(const RunConfig& cfg, Artifacts& out, std::ostream& log) {
    if (cfg.model.M != 4) throw UnsupportedError("wedge: the S D psi3 psi4 subspace exists for M = 4");
    const WedgeGrid g = wedge_map(cfg.model, wedge_options(cfg, cfg.wedge.workers));
    {
        auto os = out.open("wedge.csv");
        os << "psi3,psi4,class\n";
        for (int i3 = 0; i3 < g.resolution; ++i3)
            for (int i4 = 0; i4 < g.resolution; ++i4)
                os << num(g.center(i3)) << ',' << num(g.center(i4)) << ',' << to_string(g.at(i3, i4)) << '\n';
    }
    const auto [top, right] = wedge_edge_transitions(g);
    json saddles = json::array();
    for (const auto& [a, b] : g.saddles) saddles.push_back({a, b});
    out.write_json("wedge_summary.json",
                   {{"params", params_json(cfg)},
                    {"resolution", g.resolution},
                    {"share", {{"SDDS", g.share(WedgeClass::SDDS)},
                               {"SDSD", g.share(WedgeClass::SDSD)},
                               {"SDDD", g.share(WedgeClass::SDDD)},
                               {"Unresolved", g.share(WedgeClass::Unresolved)}}},
                    {"saddles", saddles},
                    {"edge_transition_psi3", optional_json(top)},
                    {"edge_transition_psi4", optional_json(right)}});
    log << "wedge: SDDS " << g.share(WedgeClass::SDDS) << ", SDSD " << g.share(WedgeClass::SDSD) << ", SDDD "
        << g.share(WedgeClass::SDDD) << '\n';
    return kExitOk;
}

// ---- freq ----

FrequencyProfile frequencies(const RunConfig& cfg) {
    const ModelParams& p = cfg.model;
    if (p.N != 2) throw UnsupportedError("freq: initial words require N = 2");
    const Word w0 = initial_word(cfg.freq.initial, p.M);
    const PhaseState x0 = lift(equilibrium_state(w0), std::vector<double>(static_cast<std::size_t>(p.M), 0.0));
    return average_frequencies(p, x0, cfg.freq.T, cfg.sim.dt, cfg.kind);
}

int run_freq(const RunConfig& cfg, Artifacts& out, std::ostream& log) {
    const FrequencyProfile prof = frequencies(cfg);
    {
        auto os = out.open("freq.csv");
        os << "sigma,k,Omega\n";
        for (int s = 0; s < prof.M; ++s)
            for (int k = 0; k < prof.N; ++k) os << s + 1 << ',' << k + 1 << ',' << num(prof.at(s, k)) << '\n';
    }
    const SynchronyResult sync = detect_localized_frequency_synchrony(prof, cfg.freq.tol);
    json part = json::array();
    for (const auto& grp : sync.partition) {
        json g = json::array();
        for (int s : grp) g.push_back(s + 1);
        part.push_back(g);
    }
    std::vector<double> means;
    for (int s = 0; s < prof.M; ++s) means.push_back(prof.population_mean(s));
    out.write_json("freq_summary.json", {{"params", params_json(cfg)},
                                         {"initial", initial_word(cfg.freq.initial, prof.M).str()},
                                         {"T", prof.T},
                                         {"population_mean", means},
                                         {"localized", sync.localized},
                                         {"partition", part},
                                         {"diagnostic", sync.diagnostic}});
    log << "freq: " << sync.diagnostic << '\n';
    return kExitOk;
}

// ---- sweep ----

struct SweepPoint {
    std::vector<double> values;
    std::string status = "ok";
    std::string message;
    int code = kExitOk;
    Row row;
};

int run_sweep(const RunConfig& cfg, const RawConfig& raw, Artifacts& out, std::ostream& log) {
    const SweepSection& sw = cfg.sweep;
    if (sw.axes.empty()) throw ConfigError({"[sweep]: missing section or param1"});
    std::vector<std::vector<double>> grid;
    for (double v1 : sw.axes[0].values()) {
        if (sw.axes.size() == 1) {
            grid.push_back({v1});
            continue;
        }
        for (double v2 : sw.axes[1].values()) grid.push_back({v1, v2});
    }
    std::vector<SweepPoint> points(grid.size());
    const int inner = sw.workers == 1 ? 0 : 1;
    parallel_for(grid.size(), static_cast<unsigned>(sw.workers), [&](std::size_t i) {
        SweepPoint& pt = points[i];
        pt.values = grid[i];
        try {
            RawConfig local = raw;
            local.erase("sweep");
            for (std::size_t a = 0; a < sw.axes.size(); ++a)
                local[sw.axes[a].section][sw.axes[a].key] = num(grid[i][a]);
            pt.row = summarize(sw.command, build_config(local), inner);
        } catch (...) {
            const auto e = std::current_exception();
            pt.code = exit_code_for(e);
            pt.status = pt.code == kExitConfig ? "config_error"
                        : pt.code == kExitPrecondition ? "precondition"
                                                         : "numerical_error";
            try {
                std::rethrow_exception(e);
            } catch (const std::exception& ex) {
                pt.message = ex.what();
            }
        }
    });

    std::vector<std::string> metrics;
    for (const auto& pt : points)
        if (pt.status == "ok") {
            for (const auto& [k, v] : pt.row) metrics.push_back(k);
            break;
        }
    int code = kExitOk;
    {
        auto os = out.open("sweep.csv");
        for (const auto& ax : sw.axes) os << ax.section << '.' << ax.key << ',';
        os << "status";
        for (const auto& m : metrics) os << ',' << m;
        os << ",message\n";
        for (const auto& pt : points) {
            for (double v : pt.values) os << num(v) << ',';
            os << pt.status;
            for (const auto& m : metrics) {
                os << ',';
                for (const auto& [k, v] : pt.row)
                    if (k == m) os << v;
            }
            std::string msg = pt.message;
            for (char& c : msg)
                if (c == '\n' || c == ',') c = ';';
            os << ',' << msg << '\n';
            code = std::max(code, pt.code);
        }
    }
    log << "sweep: " << points.size() << " points of '" << sw.command << "'\n";
    return code;
}

void add_sigma(Row& row, const std::string& prefix, const StabilityReport& r) {
    row.emplace_back(prefix + "class", to_string(r.cls));
    for (std::size_t q = 0; q < r.sigma.size(); ++q)
        row.emplace_back(prefix + "sigma_" + std::to_string(q + 1), r.sigma[q].to_string());
}

}  // namespace

int exit_code_for(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const ConfigError&) {
        return kExitConfig;
    } catch (const PreconditionError&) {
        return kExitPrecondition;
    } catch (const std::domain_error&) {
        return kExitPrecondition;
    } catch (const std::invalid_argument&) {
        return kExitConfig;
    } catch (...) {
        return kExitNumerical;
    }
}

json index_to_json(const IndexValue& v) {
    if (v.is_pos_inf()) return "inf";
    if (v.is_neg_inf()) return "-inf";
    return v.value();
}

json report_to_json(const StabilityReport& r) {
    json sigma = json::array();
    for (const auto& s : r.sigma) sigma.push_back(index_to_json(s));
    json j = {{"cycle", r.cycle}, {"class", to_string(r.cls)}, {"sigma", sigma},
              {"mu", r.mu},       {"nu", r.nu},                {"boundary", r.boundary},
              {"notes", r.notes}};
    if (r.abc) {
        j["abc"] = {{"A", r.abc->A},
                    {"B", r.abc->B},
                    {"C", r.abc->C},
                    {"boundary", r.abc->boundary},
                    {"lambda_max", {r.abc->lambda_max.real(), r.abc->lambda_max.imag()}}};
    } else {
        j["abc"] = nullptr;
    }
    return j;
}

Row summarize(const std::string& command, const RunConfig& cfg, int inner_workers) {
    Row row;
    if (command == "eigen") {
        row.emplace_back("max_abs_diff", num(max_diff(eigen_table(cfg))));
    } else if (command == "indices") {
        if (cfg.model.M == 3) {
            add_sigma(row, "", classify_m3(cfg.model));
        } else {
            const NetworkReport n = network_report(cfg.model);
            row.emplace_back("network_class", to_string(n.cls));
            add_sigma(row, "hat_", n.hat);
            add_sigma(row, "check_", n.check);
        }
    } else if (command == "simulate") {
        const SimulationResult s = simulate(cfg, false);
        std::string syms;
        for (const auto& w : s.itinerary.symbols) syms += (syms.empty() ? "" : " ") + w.str();
        row.emplace_back("n_symbols", std::to_string(s.itinerary.symbols.size()));
        row.emplace_back("itinerary", syms);
    } else if (command == "basin") {
        const BasinEstimate e =
            basin_fraction(cfg.model, cycle_by_name(cfg.basin.cycle), basin_options(cfg, inner_workers));
        row.emplace_back("attracted", std::to_string(e.attracted));
        row.emplace_back("fraction", num(e.fraction));
        row.emplace_back("ci95_low", num(e.ci95.first));
        row.emplace_back("ci95_high", num(e.ci95.second));
    } else if (command == "wedge") {
        if (cfg.model.M != 4) throw UnsupportedError("wedge: the S D psi3 psi4 subspace exists for M = 4");
        const WedgeGrid g = wedge_map(cfg.model, wedge_options(cfg, inner_workers));
        const auto [top, right] = wedge_edge_transitions(g);
        for (auto c : {WedgeClass::SDDS, WedgeClass::SDSD, WedgeClass::SDDD, WedgeClass::Unresolved})
            row.emplace_back("share_" + to_string(c), num(g.share(c)));
        row.emplace_back("edge_transition_psi3", top ? num(*top) : "");
        row.emplace_back("edge_transition_psi4", right ? num(*right) : "");
    } else if (command == "freq") {
        const FrequencyProfile prof = frequencies(cfg);
        row.emplace_back("localized", detect_localized_frequency_synchrony(prof, cfg.freq.tol).localized ? "true"
                                                                                                        : "false");
        for (int s = 0; s < prof.M; ++s) row.emplace_back("Omega_" + std::to_string(s + 1), num(prof.population_mean(s)));
    } else {
        throw ConfigError({"unknown command '" + command + "'"});
    }
    return row;
}

int dispatch(const std::string& command, const RunConfig& cfg, const RawConfig& raw,
             const std::filesystem::path& out_dir, std::ostream& log) {
    Artifacts out(out_dir);
    int code = kExitOk;
    std::string error;
    try {
        if (command == "eigen")
            code = run_eigen(cfg, out, log);
        else if (command == "indices")
            code = run_indices(cfg, out, log);
        else if (command == "simulate")
            code = run_simulate(cfg, out, log);
        else if (command == "basin")
            code = run_basin(cfg, out, log);
        else if (command == "wedge")
            code = run_wedge(cfg, out, log);
        else if (command == "freq")
            code = run_freq(cfg, out, log);
        else if (command == "sweep")
            code = run_sweep(cfg, raw, out, log);
        else
            throw ConfigError({"unknown subcommand '" + command + "'"});
    } catch (const std::exception& e) {
        code = exit_code_for(std::current_exception());
        error = e.what();
        log << "error: " << error << '\n';
    }
    json manifest = {{"command", command},
                     {"artifacts", out.names()},
                     {"config", config_to_json(cfg.effective)},
                     {"exit_code", code},
                     {"timestamp", timestamp_utc()}};
    if (!error.empty()) manifest["error"] = error;
    std::ofstream(out.dir() / "manifest.json") << manifest.dump(2) << '\n';
    return code;
}

}  // namespace hetcycle::cli
