#pragma once

#include <string>
#include <vector>

#include "conewave/experiments.hpp"

namespace conewave {

enum class ReportFormat { json, csv, svg };

std::string report_json(const TrialReport& report, const ExperimentConfig* config = nullptr);
// Columns trial, seed, ratio, lhs, rhs, then the extras of the first row.
std::string report_csv(const TrialReport& report);
// Log-log polyline of the trajectory.
std::string report_svg(const TrialReport& report);

// Writes result.json, trials.csv or trajectory.svg into `dir`; returns the path written.
std::string emit_report(const TrialReport& report, ReportFormat format, const std::string& dir,
                        const ExperimentConfig* config = nullptr);

}  // namespace conewave
