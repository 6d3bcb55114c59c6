#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "moretro/config.hpp"
#include "moretro/search.hpp"

namespace moretro {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 1;
inline constexpr int kExitNoRoute = 2;

inline constexpr const char* kR2Definition =
    "mean over simplex-grid weights (step 1/10, rescaled to unit max-norm) of min over routes of "
    "max_i w_i*(v_i - 0)";

struct RunOutput {
    nlohmann::json run;
    std::string trace_csv;
    int exit_code = kExitOk;
};

/// Runs one search to termination and assembles the run JSON and HV trace.
RunOutput run_single(const RunConfig& config);

std::string trace_csv(const std::vector<TraceRow>& trace);

/// Writes `<path>` and `<path stem>.trace.csv` next to it.
void write_run(const RunOutput& output, const std::filesystem::path& path);

/// Worker slots from MORETRO_WORKERS (default 1).
std::size_t bench_workers();

/// One run per (world seed x strategy). Failed runs become {"error", ...} records in place.
/// Output order is fixed by the suite, independent of `workers`.
std::vector<nlohmann::json> run_benchmark(const RunConfig& base, std::size_t workers);

struct AggregateRow {
    std::string world;
    std::string target;
    std::string strategy;
    std::optional<std::string> error;
    FrontStats stats;
    /// False on the reference strategy's own rows.
    bool has_coverage = false;
    std::size_t expansions = 0;
    std::string termination;
    std::size_t pruned = 0;
    double reduction_pct = 0.0;
    bool certified = false;
};

/// Per-target normalized metrics. Costs of every route collected for a target fix the
/// percentile scale; HV uses reference [1.1,...]; coverage is against `reference`.
std::vector<AggregateRow> aggregate_rows(const std::vector<nlohmann::json>& runs,
                                         Strategy reference = Strategy::MoretroBO);
/// Row block, blank line, then a mean/std summary block per strategy.
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

/// One row per archived route: masked costs, generating weight, route length.
std::string front_plotdata(const nlohmann::json& run);

} // namespace moretro
