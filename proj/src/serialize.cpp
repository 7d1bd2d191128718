#include "tmine/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "tmine/errors.hpp"

namespace tmine {

namespace {

using nlohmann::json;

constexpr int kTransectVersion = 1;
constexpr int kFitsVersion = 1;
constexpr int kTruthVersion = 1;

json parse_json(const std::string& text, const std::string& origin) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw io_error(origin + ": malformed JSON");
  return j;
}

void expect_format(const json& j, const std::string& format, int version,
                   const std::string& origin) {
  if (j.value("format", "") != format)
    throw io_error(origin + ": expected format '" + format + "'");
  if (j.value("version", -1) != version)
    throw io_error(origin + ": unsupported version");
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const json& a, const std::string& origin) {
  if (!a.is_array()) throw io_error(origin + ": expected an array");
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw io_error(origin + ": expected numbers");
    v[Eigen::Index(i)] = a[i].get<double>();
  }
  return v;
}

json fit_to_json(const FittedCurve& fit, const std::string& name) {
  json j;
  j["name"] = name;
  j["degree"] = fit.basis.degree;
  j["knots"] = vector_to_json(fit.basis.knots);
  j["coefficients"] = vector_to_json(fit.coefficients);
  j["power"] = fit.family.power;
  j["dispersion"] = fit.family.dispersion;
  j["lambda"] = fit.lambda;
  j["gcv"] = std::isfinite(fit.gcv_score) ? json(fit.gcv_score) : json();
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["edf"] = fit.edf;
  j["deviance"] = fit.deviance;
  j["ridge"] = fit.ridge_used;
  return j;
}

FittedCurve fit_from_json(const json& j, const std::string& origin) {
  FittedCurve fit;
  fit.basis.degree = j.at("degree").get<int>();
  fit.basis.knots = vector_from_json(j.at("knots"), origin + " knots");
  fit.basis.n_basis = int(fit.basis.knots.size()) - fit.basis.degree - 1;
  fit.coefficients = vector_from_json(j.at("coefficients"), origin + " coefficients");
  if (fit.coefficients.size() != fit.basis.n_basis)
    throw io_error(origin + ": coefficient count does not match the knot vector");
  fit.family.power = j.at("power").get<double>();
  fit.family.dispersion = j.at("dispersion").get<double>();
  fit.lambda = j.at("lambda").get<double>();
  fit.gcv_score = j.at("gcv").is_null() ? std::numeric_limits<double>::infinity()
                                        : j.at("gcv").get<double>();
  fit.converged = j.at("converged").get<bool>();
  fit.iterations = j.at("iterations").get<int>();
  fit.edf = j.value("edf", 0.0);
  fit.deviance = j.value("deviance", 0.0);
  fit.ridge_used = j.value("ridge", 0.0);
  return fit;
}

}  // namespace

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_report(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string transect_to_json(const Transect& t, const std::string& config_hash) {
  json j;
  j["format"] = "transect-miner/transect";
  j["version"] = kTransectVersion;
  j["config"] = config_hash;
  j["site"] = t.site_id;
  j["material"] = t.material;
  j["element_names"] = t.element_names;
  j["dropped_elements"] = t.dropped_elements;
  j["positions"] = vector_to_json(t.positions);
  j["weights"] = vector_to_json(t.weights);
  json rows = json::array();
  for (Eigen::Index i = 0; i < t.Y.rows(); ++i)
    rows.push_back(vector_to_json(t.Y.row(i).transpose()));
  j["Y"] = rows;
  return j.dump(2) + "\n";
}

Transect transect_from_json(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  expect_format(j, "transect-miner/transect", kTransectVersion, origin);
  Transect t;
  t.site_id = j.at("site").get<std::string>();
  t.material = j.at("material").get<std::string>();
  t.element_names = j.at("element_names").get<std::vector<std::string>>();
  t.dropped_elements = j.value("dropped_elements", std::vector<std::string>{});
  t.positions = vector_from_json(j.at("positions"), origin + " positions");
  t.weights = vector_from_json(j.at("weights"), origin + " weights");
  const json& rows = j.at("Y");
  if (!rows.is_array() || rows.empty())
    throw io_error(origin + ": transect has no samples");
  t.Y.resize(Eigen::Index(rows.size()), Eigen::Index(t.element_names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::VectorXd row = vector_from_json(rows[i], origin + " Y row");
    if (row.size() != t.Y.cols())
      throw io_error(origin + ": ragged concentration matrix");
    t.Y.row(Eigen::Index(i)) = row.transpose();
  }
  if (t.positions.size() != t.Y.rows() || t.weights.size() != t.Y.rows())
    throw io_error(origin + ": positions/weights/Y sizes disagree");
  return t;
}

std::string fit_bundle_to_json(const FitBundle& b) {
  if (b.fits.size() != b.element_names.size())
    throw input_error("fit bundle: element names and fits disagree");
  json j;
  j["format"] = "transect-miner/fits";
  j["version"] = kFitsVersion;
  j["config"] = b.config_hash;
  j["site"] = b.site_id;
  j["material"] = b.material;
  j["x_min"] = b.x_min;
  j["x_max"] = b.x_max;
  j["sample_positions"] = vector_to_json(b.sample_positions);
  json fits = json::array();
  for (std::size_t i = 0; i < b.fits.size(); ++i)
    fits.push_back(fit_to_json(b.fits[i], b.element_names[i]));
  j["elements"] = fits;
  json skipped = json::array();
  for (const auto& [name, reason] : b.skipped)
    skipped.push_back(json{{"name", name}, {"reason", reason}});
  j["skipped"] = skipped;
  return j.dump(2) + "\n";
}

FitBundle fit_bundle_from_json(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  expect_format(j, "transect-miner/fits", kFitsVersion, origin);
  FitBundle b;
  b.site_id = j.at("site").get<std::string>();
  b.material = j.at("material").get<std::string>();
  b.x_min = j.at("x_min").get<double>();
  b.x_max = j.at("x_max").get<double>();
  b.config_hash = j.value("config", "");
  b.sample_positions = vector_from_json(j.at("sample_positions"),
                                        origin + " sample_positions");
  for (const json& f : j.at("elements")) {
    b.element_names.push_back(f.at("name").get<std::string>());
    b.fits.push_back(fit_from_json(f, origin + " element " + b.element_names.back()));
  }
  for (const json& s : j.value("skipped", json::array()))
    b.skipped.emplace_back(s.at("name").get<std::string>(),
                           s.value("reason", ""));
  return b;
}

std::string ground_truth_to_json(const GroundTruth& truth,
                                 const std::string& config_hash) {
  json j;
  j["format"] = "transect-miner/ground-truth";
  j["version"] = kTruthVersion;
  j["config"] = config_hash;
  j["planted_elements"] = truth.planted_elements;
  json iv = json::array();
  for (const auto& [lo, hi] : truth.intervals)
    iv.push_back(json::array({lo, hi}));
  j["intervals"] = iv;
  return j.dump(2) + "\n";
}

GroundTruth ground_truth_from_json(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  expect_format(j, "transect-miner/ground-truth", kTruthVersion, origin);
  GroundTruth truth;
  truth.planted_elements = j.at("planted_elements").get<std::vector<std::string>>();
  for (const json& iv : j.at("intervals"))
    truth.intervals.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
  return truth;
}

std::string profile_to_json(const CurvatureProfile& p, const std::string& config_hash) {
  json j;
  j["format"] = "transect-miner/profile";
  j["version"] = 1;
  j["config"] = config_hash;
  j["element1"] = p.element1;
  j["element2"] = p.element2;
  j["c"] = p.c;
  j["threshold"] = p.threshold;
  j["k"] = p.k;
  json iv = json::array();
  for (std::size_t i = 0; i < p.intervals.size(); ++i) {
    json e;
    e["u"] = json::array({p.intervals[i].u_lo, p.intervals[i].u_hi});
    e["x"] = json::array({p.x_intervals[i].first, p.x_intervals[i].second});
    e["peak"] = p.intervals[i].peak;
    iv.push_back(e);
  }
  j["intervals"] = iv;
  j["flagged_samples"] = p.flagged_samples;
  return j.dump(2) + "\n";
}

std::string samples_to_csv(const SampleTable& table) {
  std::string out = "SITE,TRAVERSE,EAST,NORTH,MATERIAL,WEIGHT";
  for (const auto& name : table.element_names) out += "," + name;
  out += '\n';
  for (const auto& row : table.rows) {
    out += row.site_id + "," + row.traverse_id + "," + format_full(row.easting) +
           "," + format_full(row.northing) + "," + row.material + "," +
           format_full(row.weight);
    for (const auto& cell : row.concentrations) {
      out += ',';
      if (cell.is_value()) out += format_full(cell.x);
      else if (cell.is_censored()) out += "<" + format_full(cell.x);
    }
    out += '\n';
  }
  return out;
}

std::string profile_to_csv(const CurvatureProfile& p, const std::string& config_hash) {
  std::string out = "# config " + config_hash + "\n";
  out += "u,x,g,kappa,exceeds\n";
  for (Eigen::Index i = 0; i < p.u.size(); ++i) {
    bool exceeds = false;
    for (const auto& iv : p.intervals)
      if (i >= iv.first && i <= iv.last) {
        exceeds = true;
        break;
      }
    out += format_report(p.u[i]);
    out += ',';
    out += format_report(p.x[i]);
    out += ',';
    out += format_report(p.g[i]);
    out += ',';
    out += format_report(p.kappa[i]);
    out += ',';
    out += exceeds ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string heatmap_to_csv(const CValueMatrix& m, const std::string& config_hash) {
  std::string out = "# config " + config_hash + "\n";
  out += "element";
  for (const auto& name : m.element_names) out += "," + name;
  out += '\n';
  for (int i = 0; i < int(m.element_names.size()); ++i) {
    out += m.element_names[std::size_t(i)];
    for (int j = 0; j < int(m.element_names.size()); ++j)
      out += "," + format_report(m.C(i, j));
    out += '\n';
  }
  return out;
}

std::string topk_to_csv(const RankedPairs& ranked, const std::string& config_hash) {
  std::string out = "# config " + config_hash + "\n";
  const bool pooled = ranked.material == "(all)";
  out += pooled ? "rank,material,element_1,element_2,c_value\n"
                : "rank,element_1,element_2,c_value\n";
  for (std::size_t i = 0; i < ranked.pairs.size(); ++i) {
    const auto& p = ranked.pairs[i];
    out += std::to_string(i + 1) + ",";
    if (pooled) out += p.material + ",";
    out += p.element1 + "," + p.element2 + "," + format_report(p.c) + "\n";
  }
  return out;
}

std::string pathfinders_to_csv(const std::vector<PathfinderScore>& scores,
                               const std::string& config_hash) {
  std::string out = "# config " + config_hash + "\n";
  out += "element,row_mean,row_max\n";
  for (const auto& s : scores)
    out += s.element + "," + format_report(s.row_mean) + "," +
           format_report(s.row_max) + "\n";
  return out;
}

std::string comparison_to_csv(const MaterialComparison& cmp,
                              const std::string& config_hash) {
  std::string out = "# config " + config_hash + "\n";
  out += "rank";
  for (const auto& m : cmp.materials) out += "," + m;
  out += '\n';
  for (int r = 0; r < cmp.c.rows(); ++r) {
    out += std::to_string(r + 1);
    for (int m = 0; m < cmp.c.cols(); ++m) {
      out += ',';
      if (std::isfinite(cmp.c(r, m))) out += format_report(cmp.c(r, m));
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw io_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace tmine
