#include "minority/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "minority/engine.hpp"
#include "minority/errors.hpp"
#include "minority/kpr.hpp"
#include "minority/payoff.hpp"
#include "minority/solver.hpp"
#include "minority/stats.hpp"

#ifndef MINORITY_VERSION
#define MINORITY_VERSION "0.0.0"
#endif

namespace minority::cli {

using nlohmann::json;

namespace {

struct HelpRequested {
    std::string text;
};

struct Setting {
    const char* key;
    json fallback;
    const char* help;
};

const std::map<std::string, std::vector<Setting>>& settings() {
    static const std::map<std::string, std::vector<Setting>> table = [] {
        const std::vector<Setting> population = {
            {"n", 2001, "number of agents (odd)"},
            {"epsilon", 0.5, "reset exponent in [0, 1]"},
            {"steps", 10000, "recorded days per run"},
            {"seed", 0, "master seed"},
            {"wait_t", 0, "days the marginal state is held before a reset"},
            {"reset_prefactor", 0.5, "reset probability prefactor c in c * M^(epsilon-1)"},
            {"lambda_source", "poisson", "switch rule: poisson | finite-m"},
            {"delta_max", 0, "largest tabulated excess (0: ceil(3 sqrt N) + 10)"},
            {"burn_in", 0, "days dropped before statistics"},
        };
        std::map<std::string, std::vector<Setting>> t;
        t["solve-lambda"] = {{"delta_max", 50, "largest delta to solve"},
                             {"tolerance", kDefaultSolverTolerance, "residual tolerance"}};
        t["payoff-table"] = {{"delta_max", 50, "largest delta in the table"}};
        auto sim = population;
        sim.push_back({"mode", "strategy", "strategy | baseline"});
        sim.push_back({"record_choices", false, "keep the per-agent choice record"});
        sim.push_back({"stats", false, "emit histogram and autocorrelation tables"});
        sim.push_back({"tau_max", 100, "largest autocorrelation lag"});
        t["simulate"] = sim;
        auto sweep = population;
        sweep.push_back({"epsilons", "0.1:0.9:0.1", "epsilon grid, a:b:step or comma list"});
        sweep.push_back({"seeds", 20, "runs per epsilon (seeds seed..seed+k-1)"});
        t["sweep"] = sweep;
        t["kpr"] = {{"n", 64, "agents and restaurants"},
                    {"seeds", 200, "independent runs"},
                    {"max_steps", 10000, "day limit per run"},
                    {"seed", 0, "master seed"}};
        return t;
    }();
    return table;
}

std::string flag_of(const std::string& key) {
    std::string f = key;
    std::replace(f.begin(), f.end(), '_', '-');
    return "--" + f;
}

json convert_text(const std::string& key, const json& fallback, const std::string& text) {
    try {
        std::size_t used = 0;
        if (fallback.is_number_integer()) {
            const long long v = std::stoll(text, &used);
            if (used == text.size()) return v;
        } else if (fallback.is_number()) {
            const double v = std::stod(text, &used);
            if (used == text.size()) return v;
        } else {
            return text;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError(key, "cannot parse '" + text + "'");
}

json check_file_value(const std::string& key, const json& fallback, const json& value) {
    const bool ok = fallback.is_boolean()          ? value.is_boolean()
                    : fallback.is_number_integer() ? value.is_number_integer()
                    : fallback.is_number()         ? value.is_number()
                                                   : value.is_string();
    if (!ok) throw ConfigError(key, "wrong type in config file: " + value.dump());
    return value;
}

std::int64_t get_int(const json& cfg, const char* key) { return cfg.at(key).get<std::int64_t>(); }
double get_num(const json& cfg, const char* key) { return cfg.at(key).get<double>(); }

StrategyConfig strategy_from(const json& cfg) {
    StrategyConfig c;
    c.population = get_int(cfg, "n");
    c.epsilon = get_num(cfg, "epsilon");
    c.wait_t = get_int(cfg, "wait_t");
    c.reset_prefactor = get_num(cfg, "reset_prefactor");
    c.lambda_source = parse_lambda_source(cfg.at("lambda_source").get<std::string>());
    c.delta_max = get_int(cfg, "delta_max");
    if (get_int(cfg, "seed") < 0) throw ConfigError("seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(get_int(cfg, "seed"));
    if (cfg.contains("mode")) c.mode = parse_mode(cfg.at("mode").get<std::string>());
    c.validate();
    return c;
}

void validate(const std::string& sub, const json& cfg) {
    auto at_least = [&](const char* key, std::int64_t lo) {
        if (get_int(cfg, key) < lo) throw ConfigError(key, "must be >= " + std::to_string(lo));
    };
    if (sub == "solve-lambda" || sub == "payoff-table") {
        at_least("delta_max", 1);
        if (cfg.contains("tolerance") && !(get_num(cfg, "tolerance") > 0.0))
            throw ConfigError("tolerance", "must be > 0");
        return;
    }
    if (sub == "kpr") {
        at_least("n", 1);
        at_least("seeds", 1);
        at_least("max_steps", 0);
        at_least("seed", 0);
        return;
    }
    strategy_from(cfg);
    at_least("steps", 1);
    at_least("burn_in", 0);
    if (get_int(cfg, "burn_in") >= get_int(cfg, "steps"))
        throw ConfigError("burn_in", "must be smaller than steps");
    if (sub == "simulate") {
        at_least("tau_max", 0);
        if (cfg.at("stats").get<bool>() &&
            get_int(cfg, "tau_max") >= get_int(cfg, "steps") - get_int(cfg, "burn_in"))
            throw ConfigError("tau_max", "must be smaller than steps - burn_in");
    } else {
        at_least("seeds", 1);
        for (double e : parse_range(cfg.at("epsilons").get<std::string>()))
            if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("epsilons", "values must lie in [0, 1]");
    }
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string num(double v, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

class Outputs {
public:
    explicit Outputs(RunManifest& m) : m_(m) { std::filesystem::create_directories(m.out_dir); }

    void csv(const std::string& name, const std::string& columns, const std::vector<std::string>& rows) {
        std::ostringstream body;
        body << "# minority " << m_.subcommand << " " << m_.artifact_version << "\n";
        body << "# manifest " << m_.hash() << "\n";
        body << columns << "\n";
        for (const auto& r : rows) body << r << "\n";
        write(name, body.str());
    }

    // JSON has no comments, so the hash leads the document as its first key.
    void document(const std::string& name, const json& body) {
        nlohmann::ordered_json doc;
        doc["manifest_hash"] = m_.hash();
        for (const auto& [k, v] : body.items()) doc[k] = v;
        doc["manifest"] = m_.to_json();
        write(name, doc.dump(2) + "\n");
    }

private:
    void write(const std::string& name, const std::string& content) {
        std::ofstream f(m_.out_dir / name, std::ios::binary | std::ios::trunc);
        if (!f) throw UsageError("cannot write " + (m_.out_dir / name).string());
        f << content;
        if (std::find(m_.outputs.begin(), m_.outputs.end(), name) == m_.outputs.end())
            m_.outputs.push_back(name);
    }

    RunManifest& m_;
};

// Runs f(i) for i in [0, count) across hardware threads; results land by index.
template <class F>
void parallel_for(std::size_t count, F&& f) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

void cmd_solve_lambda(const RunManifest& m, Outputs& out, json& summary) {
    const auto table = LambdaTable::build(get_int(m.config, "delta_max"), get_num(m.config, "tolerance"));
    std::vector<std::string> rows;
    for (std::int64_t d = 1; d <= table.delta_max(); ++d)
        rows.push_back(std::to_string(d) + "," + fixed(table.lambda(d), 8));
    out.csv("lambda_table.csv", "delta,lambda", rows);
    summary["rows"] = table.delta_max();
    summary["max_gap"] = table.lambda(table.delta_max()) - static_cast<double>(table.delta_max());
}

void cmd_payoff_table(const RunManifest& m, Outputs& out, json& summary) {
    std::vector<std::string> rows;
    for (const auto& r : payoff_curve(get_int(m.config, "delta_max"))) {
        rows.push_back(std::to_string(r.delta) + "," + fixed(r.lambda, 8) + "," +
                       fixed(r.payoffs.minority_stay, 10) + "," + fixed(r.payoffs.minority_switch, 10) + "," +
                       fixed(r.payoffs.majority_stay, 10) + "," + fixed(r.payoffs.majority_switch, 10));
    }
    out.csv("payoff_table.csv", "delta,lambda,minority_stay,minority_switch,majority_stay,majority_switch", rows);
    summary["rows"] = rows.size();
}

void cmd_simulate(const RunManifest& m, Outputs& out, json& summary) {
    const StrategyConfig config = strategy_from(m.config);
    const bool stats = m.config.at("stats").get<bool>();
    const bool record = stats || m.config.at("record_choices").get<bool>();
    const std::int64_t burn_in = get_int(m.config, "burn_in");
    const Trajectory traj = run(config, get_int(m.config, "steps"), record);

    std::vector<std::string> rows;
    rows.reserve(static_cast<std::size_t>(traj.length()));
    auto reset = traj.reset_days.begin();
    for (std::int64_t t = 0; t < traj.length(); ++t) {
        const bool is_reset = reset != traj.reset_days.end() && *reset == t;
        if (is_reset) ++reset;
        rows.push_back(std::to_string(t) + "," + std::to_string(traj.deltas[static_cast<std::size_t>(t)]) +
                       "," + std::to_string(traj.minority_side[static_cast<std::size_t>(t)]) + "," +
                       (is_reset ? "1" : "0"));
    }
    out.csv("days.csv", "t,delta,S,reset", rows);

    summary["eta"] = inefficiency_eta(traj, burn_in);
    summary["days"] = traj.length();
    summary["resets"] = traj.reset_days.size();
    if (!traj.reset_days.empty()) {
        const ConvergenceStats cs = convergence_time(traj);
        summary["convergence"] = {{"episodes", cs.episodes.size()},
                                  {"mean", cs.mean},
                                  {"median", cs.median},
                                  {"max", cs.max}};
    }

    if (stats) {
        const std::int64_t tau_max = get_int(m.config, "tau_max");
        const StatsSummary s = summarize(traj, tau_max, burn_in);
        std::vector<std::string> hist;
        for (const auto& [d, f] : s.delta_hist) hist.push_back(std::to_string(d) + "," + num(f));
        out.csv("delta_hist.csv", "delta,frequency", hist);
        std::vector<std::string> acf;
        for (std::size_t tau = 0; tau < s.s_autocorr.size(); ++tau)
            acf.push_back(std::to_string(tau) + "," + num(s.s_autocorr[tau]) + "," + num(s.c_autocorr[tau]));
        out.csv("autocorr.csv", "tau,s_autocorr,c_autocorr", acf);
        if (tau_max >= 3) {
            try {
                summary["decay_rate"] = fit_decay_rate(s.s_autocorr);
            } catch (const NumericError&) {
                summary["decay_rate"] = nullptr;
            }
        }
    }
}

void cmd_sweep(const RunManifest& m, Outputs& out, json& summary) {
    const StrategyConfig base = strategy_from(m.config);
    const std::vector<double> eps = parse_range(m.config.at("epsilons").get<std::string>());
    const auto seeds = static_cast<std::size_t>(get_int(m.config, "seeds"));
    const std::int64_t steps = get_int(m.config, "steps");
    const std::int64_t burn_in = get_int(m.config, "burn_in");

    std::vector<double> eta(eps.size() * seeds);
    parallel_for(eta.size(), [&](std::size_t i) {
        StrategyConfig c = base;
        c.epsilon = eps[i / seeds];
        c.seed = base.seed + i % seeds;
        eta[i] = inefficiency_eta(run(c, steps), burn_in);
    });

    std::vector<std::string> rows;
    json points = json::array();
    for (std::size_t e = 0; e < eps.size(); ++e) {
        double sum = 0.0, sq = 0.0;
        for (std::size_t s = 0; s < seeds; ++s) sum += eta[e * seeds + s];
        const double mean = sum / static_cast<double>(seeds);
        for (std::size_t s = 0; s < seeds; ++s) sq += std::pow(eta[e * seeds + s] - mean, 2);
        const double se = seeds > 1 ? std::sqrt(sq / static_cast<double>(seeds - 1) / static_cast<double>(seeds)) : 0.0;
        rows.push_back(fixed(eps[e], 6) + "," + num(mean) + "," + num(se) + "," + std::to_string(seeds));
        points.push_back({{"epsilon", eps[e]}, {"eta", mean}, {"std_err", se}});
    }
    out.csv("sweep.csv", "epsilon,eta,std_err,seeds", rows);
    summary["points"] = points;
}

void cmd_kpr(const RunManifest& m, Outputs& out, json& summary) {
    const std::int64_t n = get_int(m.config, "n");
    const auto seeds = static_cast<std::size_t>(get_int(m.config, "seeds"));
    const std::int64_t max_steps = get_int(m.config, "max_steps");

    std::vector<KprRun> runs(seeds);
    parallel_for(seeds, [&](std::size_t i) {
        Rng rng = make_stream(m.seed, i);
        runs[i] = kpr_run(n, max_steps, rng);
    });

    std::vector<std::string> rows;
    std::vector<double> days;
    double util_sum = 0.0;
    std::int64_t util_days = 0;
    for (std::size_t i = 0; i < seeds; ++i) {
        const auto& r = runs[i];
        rows.push_back(std::to_string(i) + "," + (r.convergence_day ? std::to_string(*r.convergence_day) : "NA"));
        if (r.convergence_day) days.push_back(static_cast<double>(*r.convergence_day));
        for (double u : r.utilization) util_sum += u;
        util_days += static_cast<std::int64_t>(r.utilization.size());
    }
    out.csv("kpr.csv", "seed,convergence_day", rows);
    summary["converged"] = days.size();
    summary["unconverged"] = seeds - days.size();
    if (!days.empty()) {
        double s = 0.0;
        for (double d : days) s += d;
        summary["mean_convergence_day"] = s / static_cast<double>(days.size());
        summary["median_convergence_day"] = median_of(days);
    }
    summary["mean_utilization_until_convergence"] = util_sum / static_cast<double>(util_days);
    summary["utilization_after_convergence"] = 1.0;
}

const char* module_of(const std::string& sub) {
    if (sub == "solve-lambda") return "solver";
    if (sub == "payoff-table") return "payoff";
    if (sub == "kpr") return "kpr";
    return "engine";
}

}  // namespace

std::string version() { return MINORITY_VERSION; }

json RunManifest::to_json() const {
    return {{"subcommand", subcommand},
            {"config", config},
            {"seed", seed},
            {"artifact_version", artifact_version},
            {"outputs", outputs}};
}

std::string RunManifest::hash() const {
    const json canonical = {{"subcommand", subcommand},
                            {"config", config},
                            {"seed", seed},
                            {"artifact_version", artifact_version}};
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical.dump())));
    return buf;
}

std::vector<double> parse_range(const std::string& text) {
    std::vector<double> out;
    auto to_double = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ConfigError("epsilons", "cannot parse '" + text + "'");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw ConfigError("epsilons", "range must be a:b:step");
        const double a = to_double(parts[0]), b = to_double(parts[1]), step = to_double(parts[2]);
        if (!(step > 0.0) || b < a) throw ConfigError("epsilons", "range needs a <= b and step > 0");
        const auto count = static_cast<std::int64_t>(std::floor((b - a) / step + 1e-9));
        for (std::int64_t i = 0; i <= count; ++i) {
            // Round to suppress accumulated binary noise (0.1 * 3 -> 0.3).
            out.push_back(std::round((a + static_cast<double>(i) * step) * 1e9) / 1e9);
        }
    } else {
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');) out.push_back(to_double(p));
    }
    if (out.empty()) throw ConfigError("epsilons", "no values");
    return out;
}

RunManifest parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Win-stay/lose-shift minority game solver and simulator", "minority"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version());

    struct Bound {
        std::map<std::string, std::string> text;
        std::map<std::string, bool> flags;
        std::map<std::string, CLI::Option*> options;
        std::string config_file;
        std::string out_dir;
        CLI::Option* out_dir_opt = nullptr;
    };
    std::map<std::string, Bound> bound;

    const std::map<std::string, std::string> about = {
        {"solve-lambda", "tabulate the cheat-proof mean number of switchers per excess"},
        {"payoff-table", "next-day expected payoffs at the solved switch rate"},
        {"simulate", "run one population and write per-day records"},
        {"sweep", "inefficiency versus epsilon over several seeds"},
        {"kpr", "restaurant-problem convergence days over several seeds"}};
    for (const auto& [name, list] : settings()) {
        CLI::App* sub = app.add_subcommand(name, about.at(name));
        Bound& b = bound[name];
        sub->add_option("--config", b.config_file, "flat JSON file of settings");
        b.out_dir_opt = sub->add_option("--out-dir", b.out_dir, std::string("output directory (default $") + kOutDirEnv + " or .)");
        for (const auto& s : list) {
            const std::string desc = std::string(s.help) + " [" + s.fallback.dump() + "]";
            if (s.fallback.is_boolean()) {
                b.options[s.key] = sub->add_flag(flag_of(s.key), b.flags[s.key], desc);
            } else {
                b.options[s.key] = sub->add_option(flag_of(s.key), b.text[s.key], desc);
            }
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::CallForVersion&) {
        throw HelpRequested{version() + "\n"};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    RunManifest m;
    m.subcommand = app.get_subcommands().front()->get_name();
    m.artifact_version = version();
    Bound& b = bound[m.subcommand];
    const auto& list = settings().at(m.subcommand);

    json cfg = json::object();
    for (const auto& s : list) cfg[s.key] = s.fallback;

    std::string file_out_dir;
    if (!b.config_file.empty()) {
        std::ifstream f(b.config_file);
        if (!f) throw ConfigError("config", "cannot open " + b.config_file);
        json file;
        try {
            file = json::parse(f);
        } catch (const json::parse_error& e) {
            throw ConfigError("config", std::string("malformed file: ") + e.what());
        }
        if (!file.is_object()) throw ConfigError("config", "file must hold a flat object");
        for (const auto& [key, value] : file.items()) {
            if (key == "out_dir") {
                if (!value.is_string()) throw ConfigError("out_dir", "must be a string");
                file_out_dir = value.get<std::string>();
                continue;
            }
            const auto it = std::find_if(list.begin(), list.end(), [&](const Setting& s) { return key == s.key; });
            if (it == list.end()) throw ConfigError(key, "unknown setting for " + m.subcommand);
            cfg[key] = check_file_value(key, it->fallback, value);
        }
    }

    for (const auto& s : list) {
        CLI::Option* opt = b.options.at(s.key);
        if (opt->count() == 0) continue;
        cfg[s.key] = s.fallback.is_boolean() ? json(b.flags.at(s.key))
                                             : convert_text(s.key, s.fallback, b.text.at(s.key));
    }

    validate(m.subcommand, cfg);
    m.config = cfg;
    if (cfg.contains("seed")) m.seed = static_cast<std::uint64_t>(get_int(cfg, "seed"));

    if (b.out_dir_opt->count() > 0) m.out_dir = b.out_dir;
    else if (!file_out_dir.empty()) m.out_dir = file_out_dir;
    else if (const char* env = std::getenv(kOutDirEnv); env && *env) m.out_dir = env;
    else m.out_dir = ".";
    return m;
}

int dispatch(RunManifest& manifest, std::ostream& out, std::ostream& err) {
    try {
        Outputs files(manifest);
        json summary = json::object();
        const std::string& sub = manifest.subcommand;
        if (sub == "solve-lambda") cmd_solve_lambda(manifest, files, summary);
        else if (sub == "payoff-table") cmd_payoff_table(manifest, files, summary);
        else if (sub == "simulate") cmd_simulate(manifest, files, summary);
        else if (sub == "sweep") cmd_sweep(manifest, files, summary);
        else if (sub == "kpr") cmd_kpr(manifest, files, summary);
        else throw UsageError("unknown subcommand " + sub);
        files.document("summary.json", summary);

        json echo = manifest.to_json();
        echo["out_dir"] = manifest.out_dir.string();
        echo["hash"] = manifest.hash();
        out << echo.dump(2) << "\n";
        return kExitOk;
    } catch (const NumericError& e) {
        err << "error [" << module_of(manifest.subcommand) << "]: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const DomainError& e) {
        err << "error [" << module_of(manifest.subcommand) << "]: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunManifest manifest;
    try {
        manifest = parse_config(args);
    } catch (const HelpRequested& h) {
        out << h.text;
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    return dispatch(manifest, out, err);
}

}  // namespace minority::cli
