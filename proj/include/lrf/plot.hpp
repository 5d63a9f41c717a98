#pragma once

#include <string>
#include <vector>

namespace lrf {

/// A parsed metrics CSV: header names plus one row of doubles per line.
struct MetricsTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

MetricsTable read_metrics_csv(const std::string& path);

/// Renders one line chart per non-iteration column to <out_dir>/<column>.svg,
/// x axis = the iteration column. Returns the written file paths.
std::vector<std::string> plot_metrics(const MetricsTable& table, const std::string& out_dir);

}  // namespace lrf
