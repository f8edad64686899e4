#include "risopt/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "risopt/errors.hpp"

namespace risopt::report {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string metrics_csv(const std::vector<MetricsRecord>& records) {
    std::ostringstream os;
    os << "sweep_var,sweep_value,scheme,mean_se,ci95,mean_effrank,mean_gap,realizations,capped_count,"
          "failed_count,mean_sum_rate\n";
    for (const auto& r : records) {
        os << sweep_name(r.sweep_var) << ',' << format_double(r.sweep_value) << ',' << scheme_name(r.scheme)
           << ',' << format_double(r.mean_se) << ',' << format_double(r.ci95) << ','
           << format_double(r.mean_effrank) << ',' << format_double(r.mean_gap) << ',' << r.realizations << ','
           << r.capped_count << ',' << r.failed_count << ',';
        if (r.mean_sum_rate) {
            os << format_double(*r.mean_sum_rate);
        }
        os << '\n';
    }
    return os.str();
}

std::string metrics_json(const std::vector<MetricsRecord>& records) {
    nlohmann::json root;
    root["sweep_var"] = records.empty() ? std::string() : std::string(sweep_name(records.front().sweep_var));
    auto points = nlohmann::json::array();
    for (const auto& r : records) {
        if (points.empty() || points.back()["sweep_value"].get<double>() != r.sweep_value) {
            points.push_back({{"sweep_value", r.sweep_value}, {"schemes", nlohmann::json::array()}});
        }
        nlohmann::json s;
        s["scheme"] = std::string(scheme_name(r.scheme));
        s["mean_se"] = r.mean_se;
        s["ci95"] = r.ci95;
        s["mean_effrank"] = r.mean_effrank;
        s["mean_gap"] = r.mean_gap;
        s["realizations"] = r.realizations;
        s["capped_count"] = r.capped_count;
        s["failed_count"] = r.failed_count;
        s["mean_sum_rate"] = r.mean_sum_rate ? nlohmann::json(*r.mean_sum_rate) : nlohmann::json(nullptr);
        points.back()["schemes"].push_back(std::move(s));
    }
    root["points"] = std::move(points);
    return root.dump(2) + "\n";
}

std::string trace_json(const std::vector<OptimizationTrace>& traces) {
    auto arr = nlohmann::json::array();
    for (const auto& t : traces) {
        nlohmann::json j;
        j["scheme"] = std::string(scheme_name(t.scheme));
        j["initial"] = {{"effective_rank", t.initial_effective_rank}, {"capacity", t.initial_capacity}};
        auto its = nlohmann::json::array();
        for (const auto& r : t.records) {
            its.push_back({{"iteration", r.iteration},
                           {"effective_rank", r.effective_rank},
                           {"capacity", r.capacity},
                           {"step_size", r.step_size},
                           {"inner_steps", r.inner_steps}});
        }
        j["iterations"] = std::move(its);
        j["converged"] = t.converged;
        j["capped"] = t.capped;
        j["stalled"] = t.stalled;
        const RisPhases wrapped = t.phases.wrapped();
        j["phases"] = std::vector<double>(wrapped.theta.data(), wrapped.theta.data() + wrapped.theta.size());
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::string trace_csv(const std::vector<OptimizationTrace>& traces) {
    std::ostringstream os;
    os << "scheme,iteration,effective_rank,capacity,step_size,inner_steps\n";
    for (const auto& t : traces) {
        os << scheme_name(t.scheme) << ",0," << format_double(t.initial_effective_rank) << ','
           << format_double(t.initial_capacity) << ",0,0\n";
        for (const auto& r : t.records) {
            os << scheme_name(t.scheme) << ',' << r.iteration << ',' << format_double(r.effective_rank) << ','
               << format_double(r.capacity) << ',' << format_double(r.step_size) << ',' << r.inner_steps << '\n';
        }
    }
    return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw Error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot move output into place at " + path.string() + ": " + ec.message());
    }
}

}  // namespace risopt::report
