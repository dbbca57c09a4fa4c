#include "ssotfs/result.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ssotfs {

double wilson_half_width(long successes, long trials, double z) {
    if (trials <= 0) return 0.0;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    return z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
}

namespace {
std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}
} // namespace

std::string to_csv(const ResultTable& table) {
    std::string out;
    for (const auto& [key, value] : table.metadata) {
        out += "# ";
        out += key;
        out += "=";
        out += value;
        out += "\n";
    }
    out += "series,x,metric,n_trials,ci_half_width\n";
    for (const auto& row : table.rows) {
        out += row.series;
        out += ",";
        out += fmt(row.x);
        out += ",";
        out += fmt(row.metric);
        out += ",";
        out += std::to_string(row.n_trials);
        out += ",";
        out += fmt(row.ci_half_width);
        out += "\n";
    }
    return out;
}

void emit_csv(const ResultTable& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    const std::string body = to_csv(table);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace ssotfs
