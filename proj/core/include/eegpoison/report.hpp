#pragma once

#include <filesystem>
#include <string>

namespace eegpoison {

/// Renders markdown tables (one per scenario, rows grouped by model then
/// rate, mean over seeds with +/- stdev when there are replicates) from a
/// results directory containing results.csv. Throws Error{MissingResults}
/// if the file is absent.
std::string render_report(const std::filesystem::path& results_dir);

/// Parses results.csv text into the table model used by render_report;
/// exposed so reports can be built from in-memory results.
std::string render_report_from_csv(const std::string& csv_text);

}  // namespace eegpoison
