#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "risopt/optimizer.hpp"
#include "risopt/simulation.hpp"

namespace risopt::report {

/// Shortest round-trip decimal form of a double (at most 17 significant digits).
std::string format_double(double v);

/// Fixed column order:
/// sweep_var,sweep_value,scheme,mean_se,ci95,mean_effrank,mean_gap,realizations,capped_count,failed_count,mean_sum_rate
std::string metrics_csv(const std::vector<MetricsRecord>& records);

/// Same fields, grouped by sweep value.
std::string metrics_json(const std::vector<MetricsRecord>& records);

std::string trace_json(const std::vector<OptimizationTrace>& traces);
std::string trace_csv(const std::vector<OptimizationTrace>& traces);

/// Writes `content` to a temporary sibling of `path` and renames it into
/// place, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace risopt::report
