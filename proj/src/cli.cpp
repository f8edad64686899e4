#include "risopt/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "risopt/errors.hpp"
#include "risopt/gradcheck.hpp"
#include "risopt/optimizer.hpp"
#include "risopt/report.hpp"

namespace risopt::cli {

namespace {

using nlohmann::json;

constexpr double kGradcheckThreshold = 1e-4;

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw UsageError("config key '" + key + "': " + why);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            bad_key(prefix + key, "unknown key");
        }
    }
}

template <typename T>
void read(const json& obj, const std::string& key, const std::string& prefix, T& out) {
    if (!obj.contains(key)) {
        return;
    }
    const json& v = obj.at(key);
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                bad_key(prefix + key, "expected a boolean");
            }
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) {
                bad_key(prefix + key, "expected an integer");
            }
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_integer() && !v.is_number_unsigned()) {
                    bad_key(prefix + key, "expected a nonnegative integer");
                }
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) {
                bad_key(prefix + key, "expected a number");
            }
        }
        out = v.get<T>();
    } catch (const json::exception&) {
        bad_key(prefix + key, "wrong type");
    }
}

std::vector<double> read_values(const json& obj, const std::string& key, const std::string& prefix,
                                 std::vector<double> fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_array() || v.empty()) {
        bad_key(prefix + key, "expected a non-empty array of numbers");
    }
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) {
            bad_key(prefix + key, "expected a non-empty array of numbers");
        }
        out.push_back(x.get<double>());
        if (out.size() > 1 && !(out.back() > out[out.size() - 2])) {
            bad_key(prefix + key, "values must be strictly increasing");
        }
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read config file '" + path + "'");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void emit(const CliInvocation& inv, const std::string& content) {
    if (inv.out) {
        report::write_atomic(*inv.out, content);
    } else {
        std::cout << content;
    }
}

OutputFormat output_format(const CliInvocation& inv) {
    if (inv.format) {
        return *inv.format;
    }
    if (inv.out && inv.out->size() >= 5 && inv.out->substr(inv.out->size() - 5) == ".json") {
        return OutputFormat::Json;
    }
    return OutputFormat::Csv;
}

SimulationConfig effective_config(const CliInvocation& inv, const FileConfig& file) {
    SimulationConfig cfg = file.sim;
    if (inv.seed) {
        cfg.master_seed = *inv.seed;
    }
    if (inv.realizations) {
        cfg.realizations = *inv.realizations;
    }
    if (inv.snr_db) {
        cfg.pt = cfg.sigma2 * std::pow(10.0, *inv.snr_db / 10.0);
    }
    if (inv.threads) {
        cfg.threads = *inv.threads;
    }
    return cfg;
}

int run_single(const CliInvocation& inv, const SimulationConfig& cfg) {
    cfg.validate();
    Rng rng(derive_seed(cfg.master_seed, 0));
    const ChannelRealization ch = sample_rayleigh(cfg.dims, cfg.direct_link, rng);
    const RisPhases theta0 = RisPhases::uniform_random(cfg.dims.N, rng);

    std::vector<OptimizationTrace> traces;
    for (CovarianceScheme scheme : cfg.schemes) {
        traces.push_back(optimizer::alternate(ch, scheme, cfg.pt, cfg.sigma2, theta0, cfg.optimizer));
    }

    std::ostream& summary = inv.out ? std::cout : std::cerr;
    summary << "M=" << cfg.dims.M << " K=" << cfg.dims.K << " N=" << cfg.dims.N << " Pt=" << cfg.pt
            << " sigma2=" << cfg.sigma2 << " seed=" << cfg.master_seed << '\n';
    for (const auto& t : traces) {
        summary << scheme_name(t.scheme) << ": E " << report::format_double(t.initial_effective_rank) << " -> "
                << report::format_double(t.final_effective_rank()) << ", C "
                << report::format_double(t.initial_capacity) << " -> " << report::format_double(t.final_capacity())
                << " bits/s/Hz, " << t.records.size() << " outer / " << t.total_inner_steps() << " inner steps"
                << (t.capped ? " (capped)" : "") << (t.stalled ? " (stalled)" : "") << '\n';
        if (inv.verbosity > 0) {
            for (const auto& r : t.records) {
                summary << "  iter " << r.iteration << " E=" << report::format_double(r.effective_rank)
                        << " C=" << report::format_double(r.capacity) << " steps=" << r.inner_steps
                        << " alpha=" << report::format_double(r.step_size) << '\n';
            }
        }
    }
    emit(inv, output_format(inv) == OutputFormat::Json ? report::trace_json(traces) : report::trace_csv(traces));
    return kExitOk;
}

int run_sweep(const CliInvocation& inv, SimulationConfig cfg, SweepVariable var, const FileConfig& file) {
    cfg.sweep = var;
    switch (var) {
        case SweepVariable::Snr:
            cfg.sweep_values = file.snr_db_values;
            break;
        case SweepVariable::N:
            cfg.sweep_values = file.n_values;
            break;
        case SweepVariable::M:
            cfg.sweep_values = file.m_values;
            break;
    }
    try {
        cfg.validate();
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    if (inv.verbosity > 0) {
        std::cerr << "sweeping " << sweep_name(var) << " over " << cfg.sweep_values.size() << " values, "
                  << cfg.realizations << " realizations, " << worker_count(cfg.threads) << " workers\n";
    }
    const std::vector<MetricsRecord> records = run_monte_carlo(cfg);
    emit(inv, output_format(inv) == OutputFormat::Json ? report::metrics_json(records)
                                                       : report::metrics_csv(records));
    return kExitOk;
}

int run_gradcheck_cmd(const CliInvocation& inv, const SimulationConfig& cfg, const FileConfig& file) {
    const int instances = inv.realizations ? *inv.realizations : file.gradcheck_instances;
    const GradcheckReport rep = run_gradcheck(cfg.dims, instances, cfg.master_seed, cfg.pt, file.gradcheck_eps);
    std::cout << "gradcheck: " << rep.instances.size() << " instances (" << rep.skipped
              << " skipped for eigengap), max relative error " << report::format_double(rep.max_relative_error)
              << '\n';
    if (inv.out) {
        std::ostringstream os;
        os << "instance,max_relative_error\n";
        for (const auto& i : rep.instances) {
            os << i.index << ',' << report::format_double(i.max_relative_error) << '\n';
        }
        report::write_atomic(*inv.out, os.str());
    }
    if (!(rep.max_relative_error < kGradcheckThreshold)) {
        std::cerr << "gradcheck failed: relative error " << rep.max_relative_error << " >= " << kGradcheckThreshold
                  << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace

FileConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("malformed config JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw UsageError("config must be a JSON object");
    }
    reject_unknown(root,
                   {"schema_version", "M", "K", "N", "pt", "sigma2", "direct_link", "schemes", "realizations",
                    "seed", "ris_mode", "threads", "sweeps", "optimizer", "gradcheck"},
                   "");
    if (!root.contains("schema_version")) {
        bad_key("schema_version", "missing");
    }
    int version = 0;
    read(root, "schema_version", "", version);
    if (version != kSchemaVersion) {
        bad_key("schema_version", "unsupported version " + std::to_string(version));
    }

    FileConfig fc;
    SimulationConfig& sim = fc.sim;
    read(root, "M", "", sim.dims.M);
    read(root, "K", "", sim.dims.K);
    read(root, "N", "", sim.dims.N);
    read(root, "pt", "", sim.pt);
    read(root, "sigma2", "", sim.sigma2);
    read(root, "direct_link", "", sim.direct_link);
    read(root, "realizations", "", sim.realizations);
    read(root, "seed", "", sim.master_seed);
    read(root, "threads", "", sim.threads);

    if (root.contains("schemes")) {
        const json& v = root.at("schemes");
        if (!v.is_array() || v.empty()) {
            bad_key("schemes", "expected a non-empty array of scheme names");
        }
        sim.schemes.clear();
        for (const auto& s : v) {
            const auto parsed = s.is_string() ? parse_scheme(s.get<std::string>()) : std::nullopt;
            if (!parsed) {
                bad_key("schemes", "expected names from UPA, WF, MRT-WF, MMSE-WF");
            }
            sim.schemes.push_back(*parsed);
        }
    }
    if (root.contains("ris_mode")) {
        const json& v = root.at("ris_mode");
        const auto parsed = v.is_string() ? parse_ris_mode(v.get<std::string>()) : std::nullopt;
        if (!parsed) {
            bad_key("ris_mode", "expected optimized, random or identity");
        }
        sim.ris_mode = *parsed;
    }
    if (root.contains("sweeps")) {
        const json& sw = root.at("sweeps");
        if (!sw.is_object()) {
            bad_key("sweeps", "expected an object");
        }
        reject_unknown(sw, {"snr_db", "N", "M"}, "sweeps.");
        fc.snr_db_values = read_values(sw, "snr_db", "sweeps.", fc.snr_db_values);
        fc.n_values = read_values(sw, "N", "sweeps.", fc.n_values);
        fc.m_values = read_values(sw, "M", "sweeps.", fc.m_values);
    }
    if (root.contains("optimizer")) {
        const json& op = root.at("optimizer");
        if (!op.is_object()) {
            bad_key("optimizer", "expected an object");
        }
        reject_unknown(op, {"alpha", "gamma_tol", "max_outer", "max_inner", "inner_tol", "backtrack_factor"},
                       "optimizer.");
        read(op, "alpha", "optimizer.", sim.optimizer.alpha);
        read(op, "gamma_tol", "optimizer.", sim.optimizer.gamma_tol);
        read(op, "max_outer", "optimizer.", sim.optimizer.max_outer);
        read(op, "max_inner", "optimizer.", sim.optimizer.max_inner);
        read(op, "inner_tol", "optimizer.", sim.optimizer.inner_tol);
        read(op, "backtrack_factor", "optimizer.", sim.optimizer.backtrack_factor);
    }
    if (root.contains("gradcheck")) {
        const json& gc = root.at("gradcheck");
        if (!gc.is_object()) {
            bad_key("gradcheck", "expected an object");
        }
        reject_unknown(gc, {"instances", "eps"}, "gradcheck.");
        read(gc, "instances", "gradcheck.", fc.gradcheck_instances);
        read(gc, "eps", "gradcheck.", fc.gradcheck_eps);
    }

    try {
        sim.dims.validate();
        sim.optimizer.validate();
    } catch (const Error& e) {
        throw UsageError(std::string("invalid config: ") + e.what());
    }
    if (!(sim.pt > 0.0) || !(sim.sigma2 > 0.0)) {
        throw UsageError("invalid config: pt and sigma2 must be positive");
    }
    if (sim.realizations < 1) {
        bad_key("realizations", "must be at least 1");
    }
    if (fc.gradcheck_instances < 1) {
        bad_key("gradcheck.instances", "must be at least 1");
    }
    return fc;
}

FileConfig load_config(const std::string& path) {
    return parse_config(read_file(path));
}

std::string usage() {
    return "usage: risopt <single|sweep-snr|sweep-n|sweep-m|gradcheck> --config FILE [--seed N] "
           "[--realizations N] [--out PATH] [--format csv|json] [--snr-db X] [--threads N] [-v]";
}

std::optional<CliInvocation> parse_invocation(const std::vector<std::string>& args) {
    CLI::App app{"RIS phase and precoder optimization simulator", "risopt"};
    app.require_subcommand(1, 1);

    CliInvocation inv;
    std::uint64_t seed = 0;
    int realizations = 0;
    std::string out;
    std::string format;
    double snr_db = 0.0;
    int threads = 0;

    struct Entry {
        const char* name;
        const char* help;
        Subcommand kind;
    };
    const Entry entries[] = {
        {"single", "optimize one channel realization and write its trace", Subcommand::Single},
        {"sweep-snr", "Monte-Carlo sweep over SNR in dB", Subcommand::SweepSnr},
        {"sweep-n", "Monte-Carlo sweep over the RIS size N", Subcommand::SweepN},
        {"sweep-m", "Monte-Carlo sweep over the antenna count M", Subcommand::SweepM},
        {"gradcheck", "compare the analytic phase gradient with finite differences", Subcommand::Gradcheck}};
    std::vector<std::pair<CLI::App*, Subcommand>> subs;
    for (const auto& [name, help, kind] : entries) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", inv.config_path, "configuration JSON file")->required();
        sub->add_option("--seed", seed, "master seed override");
        sub->add_option("--realizations", realizations, "realization / instance count override")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", out, "output path (stdout when omitted)");
        sub->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--snr-db", snr_db, "set Pt = sigma2 * 10^(x/10)");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("-v,--verbose", "more output");
        subs.emplace_back(sub, kind);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + "\n" + usage());
    }

    for (const auto& [sub, kind] : subs) {
        if (sub->parsed()) {
            inv.subcommand = kind;
            if (sub->count("--seed")) inv.seed = seed;
            if (sub->count("--realizations")) inv.realizations = realizations;
            if (sub->count("--out")) inv.out = out;
            if (sub->count("--format")) inv.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
            if (sub->count("--snr-db")) inv.snr_db = snr_db;
            if (sub->count("--threads")) inv.threads = threads;
            inv.verbosity = static_cast<int>(sub->count("--verbose"));
        }
    }
    return inv;
}

int run(const CliInvocation& inv) {
    const FileConfig file = load_config(inv.config_path);
    const SimulationConfig cfg = effective_config(inv, file);
    switch (inv.subcommand) {
        case Subcommand::Single:
            return run_single(inv, cfg);
        case Subcommand::SweepSnr:
            return run_sweep(inv, cfg, SweepVariable::Snr, file);
        case Subcommand::SweepN:
            return run_sweep(inv, cfg, SweepVariable::N, file);
        case Subcommand::SweepM:
            return run_sweep(inv, cfg, SweepVariable::M, file);
        case Subcommand::Gradcheck:
            return run_gradcheck_cmd(inv, cfg, file);
    }
    return kExitUsage;
}

int main_entry(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const auto inv = parse_invocation(args);
        if (!inv) {
            return kExitOk;
        }
        return run(*inv);
    } catch (const UsageError& e) {
        std::cerr << "risopt: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "risopt: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace risopt::cli
