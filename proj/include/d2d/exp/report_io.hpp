#pragma once

#include <string>
#include <vector>

#include "d2d/exp/suites.hpp"

namespace d2d::experiments {

// CSV: one `# config_digest=<hex>` comment line, a header row, then one row
// per instance (instance, model_rate, wmmse_rate, ratio [, best_rate]).
std::string report_csv(const ExperimentReport& report);

// JSON summary embedding the full canonical config for re-runs.
std::string report_json(const ExperimentReport& report, const EvalContext& ctx);

void write_report(const ExperimentReport& report, const EvalContext& ctx,
                  const std::string& csv_path, const std::string& json_path);

// Curve CSV (x, mean, std) with the digest comment line.
struct CurveRow {
    double x = 0.0;
    double mean = 0.0;
    double std = 0.0;
};
std::string curve_csv(const std::string& x_name, const std::vector<CurveRow>& rows,
                      const std::string& config_digest);

// Canonical numeric formatting used by every text output (shortest
// round-trip form, '.' decimal separator).
std::string format_double(double v);

}  // namespace d2d::experiments
