#include "sdr/dataset.hpp"

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

namespace sdr {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> tryParseDouble(const std::string& tok) {
  if (tok.empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    const double v = std::stod(tok, &used);
    if (used == tok.size()) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

Eigen::Index resolveLabelColumn(const std::string& spec, Eigen::Index columns, const std::string& name) {
  if (spec == "last") return columns - 1;
  if (spec == "first") return 0;
  try {
    std::size_t used = 0;
    const long idx = std::stol(spec, &used);
    if (used == spec.size() && idx >= 0 && idx < columns) return static_cast<Eigen::Index>(idx);
  } catch (const std::exception&) {
  }
  throw DataError(name + ": label column '" + spec + "' is not 'first', 'last' or a valid 0-based index");
}

}  // namespace

Dataset loadCsvText(const std::string& text, const LoadOptions& options, const std::string& name) {
  std::vector<std::vector<std::string>> rows;
  {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) continue;
      rows.push_back(splitCsvLine(line));
    }
  }
  if (rows.empty()) throw DataError(name + ": file contains no data");

  const Eigen::Index columns = static_cast<Eigen::Index>(rows.front().size());
  if (columns < 2) throw DataError(name + ": need at least one feature column plus a label column");
  const Eigen::Index labelCol = resolveLabelColumn(options.labelColumn, columns, name);

  Dataset ds;
  std::size_t firstDataRow = 0;
  {
    bool headerish = false;
    for (Eigen::Index c = 0; c < columns; ++c) {
      if (c == labelCol) continue;
      if (!tryParseDouble(rows[0][static_cast<std::size_t>(c)])) headerish = true;
    }
    if (headerish) {
      for (Eigen::Index c = 0; c < columns; ++c) {
        if (c != labelCol) ds.featureNames.push_back(rows[0][static_cast<std::size_t>(c)]);
      }
      firstDataRow = 1;
    }
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size() - firstDataRow);
  if (n < 2) throw DataError(name + ": need at least two data rows, found " + std::to_string(n));
  const Eigen::Index dim = columns - 1;
  ds.raw.resize(n, dim);
  std::vector<std::string> labelTokens(static_cast<std::size_t>(n));

  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& cells = rows[firstDataRow + static_cast<std::size_t>(r)];
    const std::size_t fileLine = firstDataRow + static_cast<std::size_t>(r) + 1;
    if (static_cast<Eigen::Index>(cells.size()) != columns) {
      throw DataError(name + ": line " + std::to_string(fileLine) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(columns));
    }
    Eigen::Index out = 0;
    for (Eigen::Index c = 0; c < columns; ++c) {
      const std::string& tok = cells[static_cast<std::size_t>(c)];
      if (c == labelCol) {
        if (tok.empty()) throw DataError(name + ": line " + std::to_string(fileLine) + ": missing label");
        labelTokens[static_cast<std::size_t>(r)] = tok;
        continue;
      }
      const auto v = tryParseDouble(tok);
      if (!v) {
        throw DataError(name + ": line " + std::to_string(fileLine) + " column " + std::to_string(c) +
                        ": cannot parse '" + tok + "' as a number");
      }
      ds.raw(r, out++) = *v;
    }
  }

  // Two-valued label column mapped onto +1/-1.
  std::vector<std::string> distinct;
  for (const auto& t : labelTokens) {
    bool seen = false;
    for (const auto& u : distinct) seen = seen || u == t;
    if (!seen) distinct.push_back(t);
  }
  if (distinct.size() != 2) {
    throw DataError(name + ": label column has " + std::to_string(distinct.size()) +
                    " distinct values, expected exactly 2");
  }
  std::string positive = options.positiveLabel;
  if (positive.empty()) {
    for (const auto& t : distinct) {
      const auto v = tryParseDouble(t);
      if (v && *v == 1.0) positive = t;
    }
    if (positive.empty()) {
      throw DataError(name + ": labels are {" + distinct[0] + ", " + distinct[1] +
                      "}; pass the token that should map to +1");
    }
  } else if (positive != distinct[0] && positive != distinct[1]) {
    throw DataError(name + ": positive label '" + positive + "' does not occur in the label column");
  }
  ds.labels.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    ds.labels(r) = labelTokens[static_cast<std::size_t>(r)] == positive ? 1 : -1;
  }

  // Standardize: zero mean and unit variance per column; constant columns
  // are zeroed out so they contribute nothing to any kernel.
  ds.mean = ds.raw.colwise().mean();
  ds.scale.resize(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const double var = (ds.raw.col(c).array() - ds.mean(c)).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (sd < 1e-12) {
      ds.scale(c) = 0.0;
      const std::string colName =
          ds.featureNames.empty() ? std::to_string(c) : ds.featureNames[static_cast<std::size_t>(c)];
      ds.warnings.push_back("column " + colName + " is constant and was dropped");
    } else {
      ds.scale(c) = 1.0 / sd;
    }
  }
  ds.features = (ds.raw.rowwise() - ds.mean.transpose()) * ds.scale.asDiagonal();
  return ds;
}

Dataset loadCsv(const std::string& path, const LoadOptions& options) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open data file '" + path + "'");
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return loadCsvText(buffer.str(), options, path);
}

}  // namespace sdr
