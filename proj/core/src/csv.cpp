#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eegpoison/data.hpp"
#include "eegpoison/errors.hpp"

namespace eegpoison {

namespace {

std::string_view trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && (text[begin] == ' ' || text[begin] == '\t')) ++begin;
  while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t' ||
                         text[end - 1] == '\r')) {
    --end;
  }
  return text.substr(begin, end - begin);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_feature(std::string_view cell, long row, const std::string& column) {
  const std::string_view body = trim(cell);
  double value = 0.0;
  const char* first = body.data();
  const char* last = body.data() + body.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || body.empty()) {
    throw Error(ErrorKind::BadNumber,
                "non-numeric value \"" + std::string(body) + "\" at row " +
                    std::to_string(row) + ", column " + column,
                row, column);
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::BadNumber,
                "non-finite value at row " + std::to_string(row) + ", column " +
                    column,
                row, column);
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      std::string_view line =
          nl == std::string_view::npos ? rest : rest.substr(0, nl);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!trim(line).empty()) lines.push_back(line);
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
  }
  if (lines.empty()) {
    throw Error(ErrorKind::EmptyFile, path.string() + " is empty");
  }
  if (lines.size() == 1) {
    throw Error(ErrorKind::EmptyFile, path.string() + " has no data rows");
  }

  // Bind columns by header name; extra columns are ignored.
  std::unordered_map<std::string, std::size_t> header;
  {
    const auto cells = split_fields(lines[0]);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      header.emplace(std::string(trim(cells[i])), i);
    }
  }
  const auto find_column = [&header](const std::string& name,
                                     const char* alias) -> std::size_t {
    auto it = header.find(name);
    if (it == header.end() && alias != nullptr) it = header.find(alias);
    if (it == header.end()) {
      throw Error(ErrorKind::MissingColumn, "missing column " + name, -1, name);
    }
    return it->second;
  };

  const std::vector<std::string>& names = eeg_feature_names();
  std::vector<std::size_t> feature_cols;
  feature_cols.reserve(names.size());
  for (const std::string& name : names) {
    // the AF_ALPHA spelling seen in some exports is an alias for AF3_ALPHA
    const char* alias = name == "AF3_ALPHA" ? "AF_ALPHA" : nullptr;
    feature_cols.push_back(find_column(name, alias));
  }
  const std::size_t label_col = find_column(kLabelColumn, nullptr);

  Dataset ds;
  ds.feature_names = names;
  ds.samples.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const long row = static_cast<long>(li);  // 1-based data row
    const auto cells = split_fields(lines[li]);
    std::size_t needed = label_col;
    for (const std::size_t c : feature_cols) needed = std::max(needed, c);
    if (cells.size() <= needed) {
      throw Error(ErrorKind::BadRow,
                  "row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, expected at least " +
                      std::to_string(needed + 1),
                  row);
    }
    Sample sample;
    sample.features.reserve(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
      sample.features.push_back(
          parse_feature(cells[feature_cols[j]], row, names[j]));
    }
    sample.label = parse_risk_label(trim(cells[label_col]), row);
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

std::string to_csv(const Dataset& ds) {
  std::string out;
  for (std::size_t j = 0; j < ds.feature_names.size(); ++j) {
    if (j > 0) out += ',';
    out += ds.feature_names[j];
  }
  if (!ds.feature_names.empty()) out += ',';
  out += kLabelColumn;
  out += '\n';
  for (const Sample& s : ds.samples) {
    for (const double v : s.features) {
      out += format_double(v);
      out += ',';
    }
    out += to_string(s.label);
    out += '\n';
  }
  return out;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path.string());
  }
  out << to_csv(ds);
}

}  // namespace eegpoison
