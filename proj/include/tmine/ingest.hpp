#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tmine {

/// One concentration slot: a measured value, a below-detection-limit report
/// ("<x" in the file), or a missing cell.
struct CellValue {
  enum class State { Value, CensoredBelow, Missing };
  State state = State::Missing;
  double x = 0.0;  // value, or the detection limit for CensoredBelow

  static CellValue value(double v) { return {State::Value, v}; }
  static CellValue censored(double limit) { return {State::CensoredBelow, limit}; }
  static CellValue missing() { return {State::Missing, 0.0}; }

  bool is_value() const { return state == State::Value; }
  bool is_censored() const { return state == State::CensoredBelow; }
  bool is_missing() const { return state == State::Missing; }
};

struct SampleRow {
  std::string site_id;
  std::string traverse_id;
  double easting = 0.0;
  double northing = 0.0;
  std::string material;
  double weight = 1.0;
  std::vector<CellValue> concentrations;  // one slot per element
};

struct SampleTable {
  std::vector<SampleRow> rows;
  std::vector<std::string> element_names;
  std::vector<std::string> material_names;  // distinct, in first-seen order
};

/// One material at one site reduced to ordered 1-D positions.
struct Transect {
  std::string site_id;
  std::string material;
  Eigen::VectorXd positions;  // meters along the principal line, min = 0
  Eigen::MatrixXd Y;          // n x D, strictly positive
  Eigen::VectorXd weights;
  std::vector<std::string> element_names;
  std::vector<std::string> dropped_elements;  // too many missing cells

  Eigen::Index n() const { return positions.size(); }
  Eigen::Index n_elements() const { return Y.cols(); }
};

/// Delimited text, comma or semicolon autodetected, one header row with
/// SITE, TRAVERSE, EAST, NORTH, MATERIAL, optional WEIGHT; every other
/// column is an element. Cells: number, "<limit", or empty (missing).
SampleTable parse_samples(const std::string& path);
SampleTable parse_samples_text(const std::string& text, const std::string& origin = "<text>");

struct CensoringPolicy {
  enum class Kind { HalfLimit, FixedFraction, Drop };
  Kind kind = Kind::HalfLimit;
  double fraction = 0.5;  // used by FixedFraction
};

/// Replaces every censored-below(x) slot by x*f (f = 0.5 for HalfLimit) or
/// marks it missing (Drop). Also validates that every resolved value is
/// finite and > 0. Idempotent.
SampleTable resolve_censoring(const SampleTable& table, const CensoringPolicy& policy);

struct TransectOptions {
  double max_missing_fraction = 0.10;  // drop an element above this
};

/// Collapses the (easting, northing) cloud of one (site, material) group
/// onto its principal line (leading eigenvector of the 2x2 coordinate
/// covariance), orders samples by signed projection shifted to start at 0,
/// drops elements missing in too many rows and imputes the rest by the
/// nearest neighbour along the transect.
Transect project_to_transect(const SampleTable& table, const std::string& site_id,
                             const std::string& material,
                             const TransectOptions& options = {});

}  // namespace tmine
