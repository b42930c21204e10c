#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eegpoison/errors.hpp"
#include "eegpoison/experiment.hpp"
#include "eegpoison/report.hpp"

namespace eegpoison {

namespace {

struct Row {
  std::string model;
  std::string scenario;
  double rate = 0.0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double macro_recall = 0.0;
  double macro_precision = 0.0;
  double macro_f1 = 0.0;
  std::size_t n_flipped = 0;
  bool clamped = false;
  std::string status;
};

double parse_number(std::string_view cell, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(ErrorKind::BadRow,
                "bad number in results row " + std::to_string(line_no),
                static_cast<long>(line_no));
  }
  return v;
}

std::vector<Row> parse_results_csv(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) lines.push_back(line);
    }
  }
  if (lines.empty() || lines.front() != kResultsCsvHeader) {
    throw Error(ErrorKind::BadRow, "unexpected results.csv header");
  }

  std::vector<Row> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    const std::string& line = lines[i];
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (cells.size() != 12) {
      throw Error(ErrorKind::BadRow,
                  "results row " + std::to_string(i + 1) + " has " +
                      std::to_string(cells.size()) + " fields, expected 12",
                  static_cast<long>(i + 1));
    }
    Row row;
    row.model = cells[0];
    row.scenario = cells[1];
    row.rate = parse_number(cells[2], i + 1);
    row.seed = static_cast<std::uint64_t>(parse_number(cells[3], i + 1));
    row.accuracy = parse_number(cells[4], i + 1);
    row.macro_recall = parse_number(cells[5], i + 1);
    row.macro_precision = parse_number(cells[6], i + 1);
    row.macro_f1 = parse_number(cells[7], i + 1);
    row.n_flipped = static_cast<std::size_t>(parse_number(cells[8], i + 1));
    row.clamped = cells[9] == "true";
    row.status = cells[11];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string fixed2(double value) {
  const double rounded = std::floor(value * 100.0 + 0.5) / 100.0;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", rounded);
  return buf;
}

/// Mean over the selected metric, with sample stdev appended when more than
/// one row contributed; "n/a" when nothing did.
std::string cell_stat(const std::vector<const Row*>& rows,
                      double Row::*metric) {
  if (rows.empty()) return "n/a";
  double mean = 0.0;
  for (const Row* r : rows) mean += r->*metric;
  mean /= static_cast<double>(rows.size());
  if (rows.size() == 1) return fixed2(mean);
  double var = 0.0;
  for (const Row* r : rows) {
    const double d = r->*metric - mean;
    var += d * d;
  }
  var /= static_cast<double>(rows.size() - 1);
  return fixed2(mean) + " +/- " + fixed2(std::sqrt(var));
}

}  // namespace

std::string render_report_from_csv(const std::string& csv_text) {
  const std::vector<Row> rows = parse_results_csv(csv_text);

  std::set<std::string> model_set;
  std::set<std::string> scenario_set;
  std::size_t ok_count = 0;
  std::size_t failed_count = 0;
  std::size_t timed_out_count = 0;
  std::size_t clamped_count = 0;
  std::set<std::uint64_t> seed_set;
  for (const Row& r : rows) {
    model_set.insert(r.model);
    if (r.scenario != "none") scenario_set.insert(r.scenario);
    seed_set.insert(r.seed);
    if (r.status == "ok") {
      ++ok_count;
    } else if (r.status == "timed_out") {
      ++timed_out_count;
    } else {
      ++failed_count;
    }
    if (r.clamped) ++clamped_count;
  }
  const std::vector<std::string> models(model_set.begin(), model_set.end());

  std::ostringstream out;
  out << "# Label-flipping benchmark report\n\n";
  out << "Test-set metrics in percent, mean";
  if (seed_set.size() > 1) out << " +/- sample standard deviation";
  out << " across " << seed_set.size()
      << (seed_set.size() == 1 ? " seed" : " seeds")
      << ". One stratified split per seed is shared by every cell of that "
         "seed; the 0% row is the clean baseline, identical across "
         "scenarios.\n\n";
  out << "- cells: " << rows.size() << " (" << ok_count << " ok, "
      << failed_count << " failed, " << timed_out_count << " timed out)\n";
  if (clamped_count > 0) {
    out << "- clamped cells: " << clamped_count
        << " (requested flips exceeded the eligible pool)\n";
  }
  out << "\n";

  for (const std::string& scenario : scenario_set) {
    out << "## Scenario: " << scenario << "\n\n";

    std::set<double> rate_set;
    bool has_baseline = false;
    for (const Row& r : rows) {
      if (r.scenario == scenario) rate_set.insert(r.rate);
      if (r.scenario == "none") has_baseline = true;
    }
    std::vector<double> rates(rate_set.begin(), rate_set.end());
    if (has_baseline) rates.insert(rates.begin(), 0.0);

    out << "| model | poison rate [%] | accuracy [%] | recall [%] | "
           "precision [%] | f1 [%] |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const auto& m : models) {
      for (const double rate : rates) {
        std::vector<const Row*> selected;
        for (const Row& r : rows) {
          const bool match = rate == 0.0
                                 ? r.scenario == "none" && r.rate == 0.0
                                 : r.scenario == scenario && r.rate == rate;
          if (match && r.model == m && r.status == "ok") {
            selected.push_back(&r);
          }
        }
        out << "| " << m << " | " << format_double(rate * 100.0) << " | "
            << cell_stat(selected, &Row::accuracy) << " | "
            << cell_stat(selected, &Row::macro_recall) << " | "
            << cell_stat(selected, &Row::macro_precision) << " | "
            << cell_stat(selected, &Row::macro_f1) << " |\n";
      }
    }
    out << "\n";
  }

  if (failed_count + timed_out_count > 0) {
    out << "## Incomplete cells\n\n";
    out << "| model | scenario | rate | seed | status |\n";
    out << "|---|---|---|---|---|\n";
    for (const Row& r : rows) {
      if (r.status == "ok") continue;
      out << "| " << r.model << " | " << r.scenario << " | "
          << format_double(r.rate) << " | " << r.seed << " | " << r.status
          << " |\n";
    }
    out << "\n";
  }
  return out.str();
}

std::string render_report(const std::filesystem::path& results_dir) {
  const std::filesystem::path csv = results_dir / "results.csv";
  std::ifstream in(csv, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::MissingResults,
                "no results.csv under '" + results_dir.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return render_report_from_csv(buf.str());
}

}  // namespace eegpoison
