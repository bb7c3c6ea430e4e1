#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sdr/errors.hpp"

namespace sdr {

/// A loaded two-class dataset. `features` holds the standardized values
/// ((raw - mean) * scale, where scale = 1/std and 0 for constant columns);
/// `raw` keeps the unscaled values for prediction-time use with a model's
/// own stored standardization.
struct Dataset {
  Eigen::MatrixXd raw;
  Eigen::MatrixXd features;
  Eigen::VectorXi labels;            ///< strictly +1 / -1
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  std::vector<std::string> featureNames;  ///< empty when the file has no header
  std::vector<std::string> warnings;      ///< e.g. dropped constant columns

  Eigen::Index size() const { return labels.size(); }
  Eigen::Index dim() const { return raw.cols(); }
};

struct LoadOptions {
  std::string labelColumn = "last";   ///< "first", "last" or a 0-based index
  std::string positiveLabel;          ///< token mapped to +1; other token maps to -1
};

/// Reads a CSV file with one numeric feature row per line plus a two-valued
/// label column. A first line whose feature cells are not numeric is treated
/// as a header. Features are standardized to zero mean and unit variance per
/// column; constant columns are dropped (scale 0) with a warning.
Dataset loadCsv(const std::string& path, const LoadOptions& options = {});

/// Same parsing from an already-read buffer (used by tests).
Dataset loadCsvText(const std::string& text, const LoadOptions& options = {}, const std::string& name = "<memory>");

}  // namespace sdr
