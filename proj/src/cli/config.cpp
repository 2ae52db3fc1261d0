#include "hetcycle/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace hetcycle::cli {

namespace {

std::string join_lines(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& s : items) out += "\n  " + s;
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        s = s.substr(1, s.size() - 2);
    return s;
}

std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"model", {"M", "N", "alpha", "K", "r", "a", "omega", "delta", "kind"}},
        {"sim", {"dt", "T", "eta", "seed"}},
        {"eigen", {"fd_step"}},
        {"indices", {}},
        {"simulate", {"initial", "stride", "eps_near", "eps_leave"}},
        {"basin", {"cycle", "connection", "epsilon", "n", "T_max", "dt", "max_distance", "ladder", "workers"}},
        {"wedge", {"resolution", "T_max", "dt", "tol", "workers"}},
        {"freq", {"initial", "T", "tol"}},
        {"sweep", {"command", "param1", "from1", "to1", "points1", "param2", "from2", "to2", "points2", "workers"}},
    };
    return s;
}

// Typed access with defaults; problems are collected rather than thrown.
class Reader {
public:
    explicit Reader(const RawConfig& raw) : raw_(raw) {}

    std::optional<std::string> text(const std::string& sec, const std::string& key) const {
        const auto s = raw_.find(sec);
        if (s == raw_.end()) return std::nullopt;
        const auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        return k->second;
    }

    double real(const std::string& sec, const std::string& key, std::optional<double> def, bool angle = false) {
        const auto t = text(sec, key);
        if (!t) {
            if (!def) {
                problem(sec, key, "missing required key");
                return 0.0;
            }
            record(sec, key, format_double(*def));
            return *def;
        }
        std::optional<double> v;
        if (angle) {
            try {
                v = parse_angle(*t);
            } catch (const std::invalid_argument&) {
            }
        } else {
            v = parse_double(*t);
        }
        if (!v) {
            problem(sec, key, "expected a number, got '" + *t + "'");
            return def.value_or(0.0);
        }
        record(sec, key, format_double(*v));
        return *v;
    }

    long long integer(const std::string& sec, const std::string& key, std::optional<long long> def) {
        const auto t = text(sec, key);
        if (!t) {
            if (!def) {
                problem(sec, key, "missing required key");
                return 0;
            }
            record(sec, key, std::to_string(*def));
            return *def;
        }
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
        if (ec != std::errc() || ptr != t->data() + t->size()) {
            problem(sec, key, "expected an integer, got '" + *t + "'");
            return def.value_or(0);
        }
        record(sec, key, std::to_string(v));
        return v;
    }

    std::string word(const std::string& sec, const std::string& key, const std::string& def) {
        const std::string v = text(sec, key).value_or(def);
        record(sec, key, v);
        return v;
    }

    void check(bool ok, const std::string& sec, const std::string& key, const std::string& what) {
        if (!ok) problem(sec, key, what);
    }

    void problem(const std::string& sec, const std::string& key, const std::string& what) {
        problems_.push_back("[" + sec + "] " + key + ": " + what);
    }

    void record(const std::string& sec, const std::string& key, const std::string& v) { effective_[sec][key] = v; }

    std::vector<std::string>& problems() { return problems_; }
    RawConfig& effective() { return effective_; }

private:
    const RawConfig& raw_;
    std::vector<std::string> problems_;
    RawConfig effective_;
};

std::pair<std::string, std::string> split_param(const std::string& p) {
    const auto dot = p.find('.');
    if (dot == std::string::npos) return {"model", p};
    return {p.substr(0, dot), p.substr(dot + 1)};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_lines(problems)), problems_(std::move(problems)) {}

double parse_angle(const std::string& text) {
    const std::string s = unquote(text);
    if (auto v = parse_double(s)) return *v;
    static const std::regex re(R"(^\s*([+-]?)\s*(\d*\.?\d*(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+(?:[eE][+-]?\d+)?))?\s*$)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw std::invalid_argument("not a number or multiple of pi: '" + s + "'");
    double coef = 1.0;
    if (m[2].matched && m[2].length() > 0) {
        const auto c = parse_double(m[2].str());
        if (!c) throw std::invalid_argument("bad coefficient in '" + s + "'");
        coef = *c;
    }
    double den = 1.0;
    if (m[3].matched) {
        const auto d = parse_double(m[3].str());
        if (!d || *d == 0.0) throw std::invalid_argument("bad divisor in '" + s + "'");
        den = *d;
    }
    const double sign = m[1].str() == "-" ? -1.0 : 1.0;
    return sign * coef * kPi / den;
}

std::vector<double> SweepAxis::values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        v[static_cast<std::size_t>(i)] = points == 1 ? from : from + (to - from) * i / (points - 1);
    return v;
}

RawConfig parse_raw(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError({"line " + std::to_string(e.line()) + ": " + e.message()});
    }
    RawConfig raw;
    std::vector<std::string> problems;
    for (const auto& [sec, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            problems.push_back("key '" + sec + "' outside of any [section]");
            continue;
        }
        raw[sec];
        for (const auto& [key, value] : body) raw[sec][key] = unquote(value.data());
    }
    if (!problems.empty()) throw ConfigError(problems);
    return raw;
}

RunConfig build_config(const RawConfig& raw) {
    Reader rd(raw);
    for (const auto& [sec, keys] : raw) {
        const auto known = schema().find(sec);
        if (known == schema().end()) {
            rd.problems().push_back("[" + sec + "]: unknown section");
            continue;
        }
        for (const auto& [key, value] : keys)
            if (!known->second.count(key)) rd.problem(sec, key, "unknown key");
    }

    RunConfig cfg;
    ModelParams& p = cfg.model;
    p.M = static_cast<int>(rd.integer("model", "M", std::nullopt));
    p.N = static_cast<int>(rd.integer("model", "N", 2));
    p.alpha = rd.real("model", "alpha", std::nullopt, true);
    p.K = rd.real("model", "K", std::nullopt);
    p.r = rd.real("model", "r", std::nullopt);
    p.a = static_cast<int>(rd.integer("model", "a", 2));
    p.omega = rd.real("model", "omega", 0.0);
    p.delta = rd.real("model", "delta", 0.0);
    const std::string kind = rd.word("model", "kind", "nonpairwise");
    if (kind == "nonpairwise")
        cfg.kind = FieldKind::NonpairwiseApprox;
    else if (kind == "full")
        cfg.kind = FieldKind::FullPhaseShift;
    else
        rd.problem("model", "kind", "expected 'nonpairwise' or 'full', got '" + kind + "'");
    rd.check(p.M == 3 || p.M == 4, "model", "M", "built-in coupling exists for M = 3 and M = 4 only");
    rd.check(p.N >= 2, "model", "N", "must be >= 2");
    rd.check(p.a >= 1, "model", "a", "must be a positive integer");
    rd.check(p.K >= 0.0, "model", "K", "must be >= 0");
    rd.check(std::abs(p.delta) <= 1.0, "model", "delta", "out of range, |delta| <= 1 required");
    rd.check(p.M == 4 || p.delta == 0.0, "model", "delta", "only the M = 4 coupling has an asymmetry parameter");

    cfg.sim.dt = rd.real("sim", "dt", 0.01);
    cfg.sim.T = rd.real("sim", "T", 100.0);
    cfg.sim.eta = rd.real("sim", "eta", 0.0);
    const long long seed = rd.integer("sim", "seed", 0);
    cfg.sim.seed = static_cast<std::uint64_t>(seed);
    rd.check(cfg.sim.dt > 0.0, "sim", "dt", "must be > 0");
    rd.check(cfg.sim.T >= cfg.sim.dt, "sim", "T", "must be >= dt");
    rd.check(cfg.sim.eta >= 0.0, "sim", "eta", "must be >= 0");
    rd.check(seed >= 0, "sim", "seed", "must be >= 0");

    cfg.eigen.fd_step = rd.real("eigen", "fd_step", 1e-6);
    rd.check(cfg.eigen.fd_step > 0.0, "eigen", "fd_step", "must be > 0");

    cfg.simulate.initial = rd.word("simulate", "initial", "");
    cfg.simulate.stride = rd.integer("simulate", "stride", 0);
    cfg.simulate.eps_near = rd.real("simulate", "eps_near", 1.2);
    cfg.simulate.eps_leave = rd.real("simulate", "eps_leave", 1.4);
    rd.check(cfg.simulate.stride >= 0, "simulate", "stride", "must be >= 0");
    rd.check(cfg.simulate.eps_near > 0.0 && cfg.simulate.eps_near < cfg.simulate.eps_leave, "simulate", "eps_near",
             "0 < eps_near < eps_leave required");

    BasinSection& b = cfg.basin;
    b.cycle = rd.word("basin", "cycle", p.M == 4 ? "C2_hat" : "C2");
    b.connection = static_cast<int>(rd.integer("basin", "connection", 1));
    b.epsilon = rd.real("basin", "epsilon", 1e-3);
    b.n = rd.integer("basin", "n", 1000);
    b.T_max = rd.real("basin", "T_max", 500.0);
    b.dt = rd.real("basin", "dt", 0.01);
    b.max_distance = rd.real("basin", "max_distance", 0.5);
    b.workers = static_cast<int>(rd.integer("basin", "workers", 0));
    if (const auto ladder = rd.text("basin", "ladder")) {
        std::string canon;
        for (const auto& item : split_list(*ladder)) {
            const auto v = parse_double(item);
            if (!v) {
                rd.problem("basin", "ladder", "expected a comma-separated list of numbers, got '" + item + "'");
                continue;
            }
            b.ladder.push_back(*v);
            canon += (canon.empty() ? "" : ",") + format_double(*v);
        }
        rd.record("basin", "ladder", canon);
        rd.check(b.ladder.size() >= 3, "basin", "ladder", "needs at least 3 values");
        rd.check(std::is_sorted(b.ladder.rbegin(), b.ladder.rend()) &&
                     std::adjacent_find(b.ladder.begin(), b.ladder.end()) == b.ladder.end(),
                 "basin", "ladder", "must be strictly decreasing");
    }
    rd.check(b.cycle == "C2" || b.cycle == "C2_hat" || b.cycle == "C2_check", "basin", "cycle",
             "expected C2, C2_hat or C2_check");
    rd.check((b.cycle == "C2") == (p.M == 3), "basin", "cycle", "C2 lives in M = 3, C2_hat and C2_check in M = 4");
    rd.check(b.connection >= 1 && b.connection <= 6, "basin", "connection", "must be in 1..Q");
    rd.check(b.epsilon > 0.0, "basin", "epsilon", "must be > 0");
    rd.check(b.n >= 1, "basin", "n", "must be >= 1");
    rd.check(b.T_max >= b.dt && b.dt > 0.0, "basin", "T_max", "need dt > 0 and T_max >= dt");
    rd.check(b.max_distance > 0.0, "basin", "max_distance", "must be > 0");
    rd.check(b.workers >= 0, "basin", "workers", "must be >= 0");

    WedgeSection& w = cfg.wedge;
    w.resolution = static_cast<int>(rd.integer("wedge", "resolution", 200));
    w.T_max = rd.real("wedge", "T_max", 2000.0);
    w.dt = rd.real("wedge", "dt", 0.05);
    w.tol = rd.real("wedge", "tol", 0.05);
    w.workers = static_cast<int>(rd.integer("wedge", "workers", 0));
    rd.check(w.resolution >= 2, "wedge", "resolution", "must be >= 2");
    rd.check(w.dt > 0.0 && w.T_max >= w.dt, "wedge", "T_max", "need dt > 0 and T_max >= dt");
    rd.check(w.tol > 0.0, "wedge", "tol", "must be > 0");
    rd.check(w.workers >= 0, "wedge", "workers", "must be >= 0");

    cfg.freq.initial = rd.word("freq", "initial", p.M == 4 ? "SDSS" : "DSS");
    cfg.freq.T = rd.real("freq", "T", 1000.0);
    cfg.freq.tol = rd.real("freq", "tol", 1e-2);
    rd.check(cfg.freq.T > 0.0, "freq", "T", "must be > 0");
    rd.check(cfg.freq.tol > 0.0, "freq", "tol", "must be > 0");

    auto check_word = [&](const std::string& sec, const std::string& value) {
        if (value.empty()) return;
        const bool ok = static_cast<int>(value.size()) == p.M &&
                        value.find_first_not_of("SD") == std::string::npos;
        rd.check(ok, sec, "initial", "expected a word of M letters S/D, got '" + value + "'");
        rd.check(p.N == 2, sec, "initial", "S/D words require N = 2");
    };
    check_word("simulate", cfg.simulate.initial);
    check_word("freq", cfg.freq.initial);

    if (raw.count("sweep")) {
        SweepSection& sw = cfg.sweep;
        sw.command = rd.word("sweep", "command", "");
        static const std::set<std::string> commands{"eigen", "indices", "simulate", "basin", "wedge", "freq"};
        rd.check(commands.count(sw.command) > 0, "sweep", "command",
                 "expected one of eigen, indices, simulate, basin, wedge, freq");
        sw.workers = static_cast<int>(rd.integer("sweep", "workers", 0));
        rd.check(sw.workers >= 0, "sweep", "workers", "must be >= 0");
        for (int axis = 1; axis <= 2; ++axis) {
            const std::string sfx = std::to_string(axis);
            const auto param = rd.text("sweep", "param" + sfx);
            if (!param) {
                rd.check(axis == 2, "sweep", "param1", "missing required key");
                continue;
            }
            SweepAxis ax;
            std::tie(ax.section, ax.key) = split_param(*param);
            rd.record("sweep", "param" + sfx, ax.section + "." + ax.key);
            const auto known = schema().find(ax.section);
            rd.check(known != schema().end() && known->second.count(ax.key) > 0, "sweep", "param" + sfx,
                     "unknown parameter '" + *param + "'");
            ax.from = rd.real("sweep", "from" + sfx, std::nullopt, true);
            ax.to = rd.real("sweep", "to" + sfx, std::nullopt, true);
            ax.points = static_cast<int>(rd.integer("sweep", "points" + sfx, std::nullopt));
            rd.check(ax.points >= 1, "sweep", "points" + sfx, "must be >= 1");
            sw.axes.push_back(ax);
        }
    }

    if (rd.problems().empty()) {
        try {
            cfg.model = ModelParams::builtin(p.M, p.alpha, p.K, p.r, p.delta);
            cfg.model.N = p.N;
            cfg.model.a = p.a;
            cfg.model.omega = p.omega;
            cfg.model.validate();
        } catch (const std::invalid_argument& e) {
            rd.problems().push_back(std::string("[model]: ") + e.what());
        }
    }
    if (!rd.problems().empty()) throw ConfigError(rd.problems());
    cfg.effective = rd.effective();
    return cfg;
}

RunConfig parse_config(const std::string& text) { return build_config(parse_raw(text)); }

void apply_override(RawConfig& raw, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError({"override '" + assignment + "' is not of the form key=value"});
    const auto [sec, key] = split_param(trim(assignment.substr(0, eq)));
    raw[sec][key] = unquote(assignment.substr(eq + 1));
}

}  // namespace hetcycle::cli
