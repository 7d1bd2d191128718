#include "tmine/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tmine/errors.hpp"

namespace tmine {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  if (*begin == '+') ++begin;  // from_chars rejects a leading plus
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, delim)) fields.push_back(trim(field));
  if (!line.empty() && line.back() == delim) fields.emplace_back();
  return fields;
}

char detect_delimiter(const std::string& header) {
  const auto commas = std::count(header.begin(), header.end(), ',');
  const auto semis = std::count(header.begin(), header.end(), ';');
  return semis > commas ? ';' : ',';
}

}  // namespace

SampleTable parse_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_samples_text(buf.str(), path);
}

SampleTable parse_samples_text(const std::string& text, const std::string& origin) {
  std::vector<std::string> lines;
  {
    std::string line;
    std::stringstream ss(text);
    while (std::getline(ss, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw input_error(origin + ": empty file, no header row");

  const char delim = detect_delimiter(lines[0]);
  const std::vector<std::string> header = split_line(lines[0], delim);

  int col_site = -1, col_traverse = -1, col_east = -1, col_north = -1,
      col_material = -1, col_weight = -1;
  std::vector<int> element_cols;
  SampleTable table;
  for (int c = 0; c < int(header.size()); ++c) {
    const std::string name = upper(header[c]);
    if (name == "SITE") col_site = c;
    else if (name == "TRAVERSE") col_traverse = c;
    else if (name == "EAST") col_east = c;
    else if (name == "NORTH") col_north = c;
    else if (name == "MATERIAL") col_material = c;
    else if (name == "WEIGHT") col_weight = c;
    else {
      if (header[c].empty())
        throw input_error(origin + ": malformed header, empty column name");
      element_cols.push_back(c);
      table.element_names.push_back(header[c]);
    }
  }
  const std::pair<int, const char*> required[] = {
      {col_site, "SITE"}, {col_traverse, "TRAVERSE"}, {col_east, "EAST"},
      {col_north, "NORTH"}, {col_material, "MATERIAL"}};
  for (const auto& [col, name] : required) {
    if (col < 0)
      throw input_error(origin + ": malformed header, missing required column " +
                        std::string(name));
  }
  if (element_cols.empty())
    throw input_error(origin + ": malformed header, no element columns");
  {
    auto sorted = table.element_names;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw input_error(origin + ": malformed header, duplicate element column");
  }

  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto fields = split_line(lines[li], delim);
    const std::string where = origin + ": row " + std::to_string(li);
    if (fields.size() != header.size())
      throw input_error(where + ": expected " + std::to_string(header.size()) +
                        " fields, got " + std::to_string(fields.size()));

    SampleRow row;
    row.site_id = fields[col_site];
    row.traverse_id = fields[col_traverse];
    row.material = fields[col_material];
    if (!parse_double(fields[col_east], row.easting) || !std::isfinite(row.easting))
      throw input_error(where + ", column EAST: not a finite number");
    if (!parse_double(fields[col_north], row.northing) || !std::isfinite(row.northing))
      throw input_error(where + ", column NORTH: not a finite number");
    if (col_weight >= 0 && !trim(fields[col_weight]).empty()) {
      if (!parse_double(fields[col_weight], row.weight) ||
          !std::isfinite(row.weight) || row.weight < 0.0)
        throw input_error(where + ", column WEIGHT: not a nonnegative number");
    }

    row.concentrations.reserve(element_cols.size());
    for (std::size_t e = 0; e < element_cols.size(); ++e) {
      const std::string cell = trim(fields[element_cols[e]]);
      if (cell.empty()) {
        row.concentrations.push_back(CellValue::missing());
        continue;
      }
      if (cell.front() == '<') {
        double limit;
        if (!parse_double(cell.substr(1), limit) || !std::isfinite(limit))
          throw input_error(where + ", column " + table.element_names[e] +
                            ": malformed censored cell '" + cell + "'");
        row.concentrations.push_back(CellValue::censored(limit));
        continue;
      }
      double v;
      if (!parse_double(cell, v))
        throw input_error(where + ", column " + table.element_names[e] +
                          ": not a number: '" + cell + "'");
      if (!std::isfinite(v))
        throw input_error(where + ", column " + table.element_names[e] +
                          ": value must be finite");
      row.concentrations.push_back(CellValue::value(v));
    }

    if (std::find(table.material_names.begin(), table.material_names.end(),
                  row.material) == table.material_names.end())
      table.material_names.push_back(row.material);
    table.rows.push_back(std::move(row));
  }

  if (table.rows.empty()) throw input_error(origin + ": no samples");
  return table;
}

SampleTable resolve_censoring(const SampleTable& table, const CensoringPolicy& policy) {
  double f = 0.5;
  if (policy.kind == CensoringPolicy::Kind::FixedFraction) {
    f = policy.fraction;
    if (!(f > 0.0 && f <= 1.0))
      throw input_error("censoring fraction must lie in (0, 1]");
  }

  SampleTable out = table;
  for (std::size_t r = 0; r < out.rows.size(); ++r) {
    auto& row = out.rows[r];
    for (std::size_t e = 0; e < row.concentrations.size(); ++e) {
      auto& cell = row.concentrations[e];
      const std::string where = "row " + std::to_string(r + 1) + ", element " +
                                out.element_names[e];
      if (cell.is_censored()) {
        if (!(cell.x > 0.0))
          throw input_error(where + ": detection limit must be > 0");
        cell = policy.kind == CensoringPolicy::Kind::Drop
                   ? CellValue::missing()
                   : CellValue::value(cell.x * f);
      } else if (cell.is_value() && !(cell.x > 0.0 && std::isfinite(cell.x))) {
        throw input_error(where + ": concentrations must be finite and > 0");
      }
    }
  }
  return out;
}

Transect project_to_transect(const SampleTable& table, const std::string& site_id,
                             const std::string& material,
                             const TransectOptions& options) {
  std::vector<int> match;
  for (int r = 0; r < int(table.rows.size()); ++r) {
    const auto& row = table.rows[r];
    if (row.site_id == site_id && row.material == material) match.push_back(r);
  }
  const int n = int(match.size());
  if (n < 2)
    throw input_error("insufficient data: fewer than 2 samples for site '" +
                      site_id + "', material '" + material + "'");
  for (int r : match)
    for (const auto& cell : table.rows[r].concentrations)
      if (cell.is_censored())
        throw input_error("unresolved censored values; apply resolve_censoring first");

  // Principal line of the coordinate cloud.
  Eigen::MatrixX2d coords(n, 2);
  for (int i = 0; i < n; ++i) {
    coords(i, 0) = table.rows[match[i]].easting;
    coords(i, 1) = table.rows[match[i]].northing;
  }
  const Eigen::RowVector2d centroid = coords.colwise().mean();
  const Eigen::MatrixX2d centered = coords.rowwise() - centroid;
  const Eigen::Matrix2d cov = centered.transpose() * centered / double(n - 1);
  const double scale = coords.cwiseAbs().maxCoeff() + 1.0;
  if (cov.trace() <= 1e-12 * scale * scale)
    throw input_error("geometry error: degenerate coordinate cloud");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  Eigen::Vector2d dir = es.eigenvectors().col(1);  // leading eigenvector
  if (dir[0] < 0.0 || (dir[0] == 0.0 && dir[1] < 0.0)) dir = -dir;

  Eigen::VectorXd proj = centered * dir;
  proj.array() -= proj.minCoeff();

  // Sort by position, ties kept in input order.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&proj](int a, int b) { return proj[a] < proj[b]; });

  // Element availability after the missing-cell policy.
  const int d_all = int(table.element_names.size());
  std::vector<int> kept;
  Transect t;
  t.site_id = site_id;
  t.material = material;
  for (int e = 0; e < d_all; ++e) {
    int missing = 0;
    for (int r : match)
      if (table.rows[r].concentrations[e].is_missing()) ++missing;
    if (double(missing) > options.max_missing_fraction * double(n))
      t.dropped_elements.push_back(table.element_names[e]);
    else
      kept.push_back(e);
  }
  if (kept.empty())
    throw input_error("no usable elements for site '" + site_id +
                      "', material '" + material + "'");

  t.positions.resize(n);
  t.weights.resize(n);
  t.Y.resize(n, int(kept.size()));
  for (int i = 0; i < n; ++i) {
    const auto& row = table.rows[match[order[i]]];
    t.positions[i] = proj[order[i]];
    t.weights[i] = row.weight;
  }
  for (std::size_t c = 0; c < kept.size(); ++c) {
    t.element_names.push_back(table.element_names[kept[c]]);
    // Fill known values, then impute missing ones from the nearest known
    // neighbour along the transect (ties resolved towards smaller position).
    std::vector<int> known;
    for (int i = 0; i < n; ++i) {
      const auto& cell = table.rows[match[order[i]]].concentrations[kept[c]];
      if (cell.is_value()) {
        t.Y(i, int(c)) = cell.x;
        known.push_back(i);
      }
    }
    for (int i = 0; i < n; ++i) {
      const auto& cell = table.rows[match[order[i]]].concentrations[kept[c]];
      if (cell.is_value()) continue;
      int best = -1;
      double best_dist = 0.0;
      for (int j : known) {
        const double dist = std::abs(t.positions[j] - t.positions[i]);
        if (best < 0 || dist < best_dist) {
          best = j;
          best_dist = dist;
        }
      }
      if (best < 0)
        throw input_error("element " + table.element_names[kept[c]] +
                          " has no observed values to impute from");
      t.Y(i, int(c)) = t.Y(best, int(c));
    }
  }
  return t;
}

}  // namespace tmine
