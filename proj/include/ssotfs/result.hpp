#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ssotfs {

/// One data point of an experiment curve. Series labels keep multi-curve
/// outputs (e.g. the determinant evaluation) in a single table.
struct ResultRow {
    std::string series;
    double x = 0.0;
    double metric = 0.0;
    long n_trials = 0;
    double ci_half_width = 0.0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    std::vector<std::pair<std::string, std::string>> metadata;
};

/// Wilson score interval half-width for a binomial proportion (95% default).
double wilson_half_width(long successes, long trials, double z = 1.959963984540054);

/// CSV rendering: '#'-prefixed metadata lines, a header row, then
/// series,x,metric,n_trials,ci_half_width with values at 10 significant
/// digits. Byte-stable for identical tables.
std::string to_csv(const ResultTable& table);

void emit_csv(const ResultTable& table, const std::string& path);

} // namespace ssotfs
