#include "d2d/exp/report_io.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

#include "d2d/util/fs.hpp"

namespace d2d::experiments {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string report_csv(const ExperimentReport& report) {
    const bool has_best =
        !report.per_instance.empty() && report.per_instance.front().best_rate.has_value();
    std::ostringstream out;
    out << "# config_digest=" << report.summary.config_digest << "\n";
    out << "instance,model_rate,wmmse_rate,ratio";
    if (has_best) out << ",best_rate";
    out << "\n";
    for (const auto& r : report.per_instance) {
        const double ratio = r.wmmse_rate > 0.0 ? r.model_rate / r.wmmse_rate : 0.0;
        out << r.id << ',' << format_double(r.model_rate) << ','
            << format_double(r.wmmse_rate) << ',' << format_double(ratio);
        if (has_best) out << ',' << format_double(r.best_rate.value_or(0.0));
        out << "\n";
    }
    return out.str();
}

std::string report_json(const ExperimentReport& report, const EvalContext& ctx) {
    json cfg = json::object();
    for (const auto& [k, v] : ctx.config) cfg[k] = v;
    json doc = {
        {"name", report.name},
        {"summary",
         {{"mean_ratio", report.summary.mean_ratio},
          {"std_ratio", report.summary.std_ratio},
          {"n_users", report.summary.n_users},
          {"count", report.summary.count},
          {"config_digest", report.summary.config_digest},
          {"checkpoint_digest", report.summary.checkpoint_digest},
          {"test_set_digest", report.summary.test_set_digest},
          {"seed", report.summary.seed}}},
        {"config", cfg},
    };
    return doc.dump(2) + "\n";
}

void write_report(const ExperimentReport& report, const EvalContext& ctx,
                  const std::string& csv_path, const std::string& json_path) {
    atomic_write(csv_path, report_csv(report));
    atomic_write(json_path, report_json(report, ctx));
}

std::string curve_csv(const std::string& x_name, const std::vector<CurveRow>& rows,
                      const std::string& config_digest) {
    std::ostringstream out;
    out << "# config_digest=" << config_digest << "\n";
    out << x_name << ",mean,std\n";
    for (const auto& r : rows) {
        out << format_double(r.x) << ',' << format_double(r.mean) << ','
            << format_double(r.std) << "\n";
    }
    return out.str();
}

}  // namespace d2d::experiments
