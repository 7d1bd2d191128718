#include "tmine/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "tmine/curvature.hpp"
#include "tmine/errors.hpp"
#include "tmine/gam.hpp"
#include "tmine/ingest.hpp"
#include "tmine/ranking.hpp"
#include "tmine/serialize.hpp"
#include "tmine/svg.hpp"
#include "tmine/synth.hpp"

namespace fs = std::filesystem;

namespace tmine::cli {

namespace {

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-')
               ? c
               : '_';
  return out.empty() ? std::string("_") : out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create directory: " + dir.string());
}

void write_run_config(const RunConfig& cfg) {
  ensure_dir(cfg.out);
  write_text_file((fs::path(cfg.out) / "run_config.txt").string(),
                  "# config " + cfg.hash() + "\n" + cfg.resolved.to_text());
}

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token.erase(std::remove_if(token.begin(), token.end(),
                               [](unsigned char c) { return std::isspace(c); }),
                token.end());
    if (token.empty()) continue;
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw input_error("config key '" + key + "': bad number '" + token + "'");
    }
  }
  return out;
}

std::vector<std::string> list_files(const std::string& input, const std::string& suffix,
                                    const std::string& subdir) {
  const fs::path p(input);
  if (!fs::exists(p)) throw io_error("input does not exist: " + input);
  std::vector<std::string> files;
  if (fs::is_regular_file(p)) {
    files.push_back(p.string());
    return files;
  }
  auto scan = [&files, &suffix](const fs::path& dir) {
    if (!fs::is_directory(dir)) return;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (name.size() >= suffix.size() &&
          name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
        files.push_back(entry.path().string());
    }
  };
  scan(p);
  if (files.empty() && !subdir.empty()) scan(p / subdir);
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw io_error("no *" + suffix + " files under: " + input);
  return files;
}

CensoringPolicy censoring_policy_of(const RunConfig& cfg) {
  CensoringPolicy policy;
  if (cfg.censoring_policy == "half_limit") {
    policy.kind = CensoringPolicy::Kind::HalfLimit;
  } else if (cfg.censoring_policy == "fixed_fraction") {
    policy.kind = CensoringPolicy::Kind::FixedFraction;
    policy.fraction = cfg.censoring_fraction;
  } else {
    policy.kind = CensoringPolicy::Kind::Drop;
  }
  return policy;
}

ThresholdPolicy threshold_policy_of(const RunConfig& cfg) {
  ThresholdPolicy policy;
  if (cfg.threshold_policy == "absolute") {
    policy.kind = ThresholdPolicy::Kind::Absolute;
    policy.value = cfg.threshold_value;
  } else {
    policy.kind = ThresholdPolicy::Kind::Quantile;
    policy.q = cfg.threshold_q;
  }
  return policy;
}

struct ElementFitOutcome {
  bool ok = false;
  FittedCurve fit;
  std::string reason;
};

ElementFitOutcome fit_element(const RunConfig& cfg, const std::string& element,
                              const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& w, const SplineBasis& basis) {
  ElementFitOutcome outcome;
  bool fixed = false;
  const double lambda_fixed = cfg.element_lambda(element, fixed);

  std::vector<double> powers{cfg.element_power(element)};
  if (cfg.power_profile) {
    powers.clear();
    for (int i = 1; i <= 9; ++i) powers.push_back(1.0 + 0.1 * i);
  }

  try {
    bool have = false;
    for (double p : powers) {
      FamilyConfig family;
      family.power = p;
      double lambda = lambda_fixed;
      if (!fixed) {
        const LambdaSelection sel =
            select_lambda(y, u, w, basis, family, cfg.lambda_grid());
        lambda = sel.lambda;
      }
      FittedCurve fit = fit_gam(y, u, w, basis, family, lambda);
      if (!have || fit.gcv_score < outcome.fit.gcv_score) {
        outcome.fit = fit;
        have = true;
      }
    }
    if (!outcome.fit.converged) {
      outcome.reason = "did not converge within iteration budget";
      return outcome;
    }
    outcome.ok = true;
  } catch (const numeric_error& e) {
    outcome.reason = e.what();
  }
  return outcome;
}

std::string bundle_label(const FitBundle& b, bool multi_site) {
  return multi_site ? b.site_id + "/" + b.material : b.material;
}

}  // namespace

void run_synth(const RunConfig& cfg, std::ostream& log) {
  SynthConfig sc;
  sc.seed = cfg.seed;
  sc.n_samples = cfg.synth_n_samples;
  sc.n_elements = cfg.synth_n_elements;
  for (double v : parse_double_list(cfg.synth_planted, "synth.planted")) {
    if (v != std::floor(v) || v < 1.0)
      throw input_error("synth.planted expects 1-based element indices");
    sc.planted_elements.push_back(int(v) - 1);
  }
  sc.anomaly_centers = parse_double_list(cfg.synth_centers, "synth.centers");
  sc.anomaly_width = cfg.synth_width;
  sc.anomaly_amplitude = cfg.synth_amplitude;
  if (cfg.synth_baseline == "linear") sc.baseline = SynthConfig::Baseline::Linear;
  else if (cfg.synth_baseline == "sinusoid") sc.baseline = SynthConfig::Baseline::Sinusoid;
  else sc.baseline = SynthConfig::Baseline::Constant;
  sc.baseline_level = cfg.synth_baseline_level;
  sc.noise_power = cfg.synth_power;
  sc.noise_dispersion = cfg.synth_dispersion;
  sc.transect_length = cfg.synth_length;
  sc.site_id = cfg.synth_site;
  sc.material = cfg.synth_material;

  const auto [table, truth] = generate(sc);
  write_run_config(cfg);
  write_text_file((fs::path(cfg.out) / "samples.csv").string(), samples_to_csv(table));
  write_text_file((fs::path(cfg.out) / "ground_truth.json").string(),
                  ground_truth_to_json(truth, cfg.hash()));
  log << "synth: wrote " << table.rows.size() << " samples, "
      << table.element_names.size() << " elements";
  if (!truth.planted_elements.empty()) {
    log << ", planted:";
    for (const auto& e : truth.planted_elements) log << " " << e;
  }
  log << "\n";
}

void run_ingest(const RunConfig& cfg, std::ostream& log) {
  if (cfg.input.empty()) throw input_error("ingest requires input = <samples.csv>");
  SampleTable table = parse_samples(cfg.input);
  table = resolve_censoring(table, censoring_policy_of(cfg));

  if (!cfg.material_filter.empty() &&
      std::find(table.material_names.begin(), table.material_names.end(),
                cfg.material_filter) == table.material_names.end())
    throw input_error("material not found: " + cfg.material_filter);
  if (!cfg.site_filter.empty()) {
    const bool found = std::any_of(table.rows.begin(), table.rows.end(),
                                   [&](const SampleRow& r) {
                                     return r.site_id == cfg.site_filter;
                                   });
    if (!found) throw input_error("site not found: " + cfg.site_filter);
  }

  std::map<std::string, int> material_counts;
  std::set<std::pair<std::string, std::string>> groups;
  for (const auto& row : table.rows) {
    if (!cfg.site_filter.empty() && row.site_id != cfg.site_filter) continue;
    if (!cfg.material_filter.empty() && row.material != cfg.material_filter) continue;
    ++material_counts[row.material];
    groups.emplace(row.site_id, row.material);
  }
  if (groups.empty()) throw input_error("no samples left after filters");

  for (const auto& [material, count] : material_counts)
    log << "material " << material << ": " << count << " samples\n";

  write_run_config(cfg);
  const fs::path tdir = fs::path(cfg.out) / "transects";
  ensure_dir(tdir);

  TransectOptions options;
  options.max_missing_fraction = cfg.max_missing;
  int written = 0;
  std::string first_failure;
  for (const auto& [site, material] : groups) {
    try {
      const Transect t = project_to_transect(table, site, material, options);
      const std::string name = sanitize(site) + "__" + sanitize(material) +
                               ".transect.json";
      write_text_file((tdir / name).string(), transect_to_json(t, cfg.hash()));
      log << site << "/" << material << ": n=" << t.n()
          << " elements=" << t.n_elements();
      if (!t.dropped_elements.empty()) {
        log << " dropped=";
        for (std::size_t i = 0; i < t.dropped_elements.size(); ++i)
          log << (i ? "," : "") << t.dropped_elements[i];
      }
      log << " -> " << name << "\n";
      ++written;
    } catch (const input_error& e) {
      log << "warning: skipping " << site << "/" << material << ": " << e.what()
          << "\n";
      if (first_failure.empty()) first_failure = e.what();
    }
  }
  if (written == 0)
    throw input_error("no transect could be built: " + first_failure);
}

void run_fit(const RunConfig& cfg, std::ostream& log) {
  if (cfg.input.empty())
    throw input_error("fit requires input = <transect file or directory>");
  const auto files = list_files(cfg.input, ".transect.json", "transects");

  write_run_config(cfg);
  const fs::path fdir = fs::path(cfg.out) / "fits";
  ensure_dir(fdir);

  std::string report = "# config " + cfg.hash() + "\n";
  report +=
      "site,material,element,converged,lambda,power,gcv,edf,dispersion,deviance,"
      "iterations\n";

  int total_elements = 0, total_converged = 0, refused_small = 0;
  for (const auto& file : files) {
    const Transect t = transect_from_json(read_text_file(file), file);
    if (t.n() < cfg.min_n) {
      log << "warning: refusing " << t.site_id << "/" << t.material << ": n="
          << t.n() << " is below the minimum of " << cfg.min_n << " samples\n";
      ++refused_small;
      continue;
    }

    const double x_min = t.positions.minCoeff();
    const double x_max = t.positions.maxCoeff();
    if (!(x_max > x_min))
      throw input_error("geometry error: transect positions span a single point");
    const Eigen::VectorXd u = (t.positions.array() - x_min) / (x_max - x_min);
    const int n_basis =
        std::max(cfg.degree + 2, std::min(cfg.n_basis_cap, int(t.n()) / 2));
    const SplineBasis basis = build_basis(u, n_basis, cfg.degree);

    FitBundle bundle;
    bundle.site_id = t.site_id;
    bundle.material = t.material;
    bundle.x_min = x_min;
    bundle.x_max = x_max;
    bundle.sample_positions = t.positions;
    bundle.config_hash = cfg.hash();

    std::string residuals = "# config " + cfg.hash() + "\n";
    residuals += "element,position,y,mu,pearson\n";

    for (Eigen::Index e = 0; e < t.n_elements(); ++e) {
      const std::string& element = t.element_names[std::size_t(e)];
      ++total_elements;
      const Eigen::VectorXd y = t.Y.col(e);
      const ElementFitOutcome outcome =
          fit_element(cfg, element, y, u, t.weights, basis);
      const auto row_prefix = t.site_id + "," + t.material + "," + element;
      if (!outcome.ok) {
        bundle.skipped.emplace_back(element, outcome.reason);
        log << "warning: " << t.site_id << "/" << t.material << " " << element
            << ": " << outcome.reason << " (excluded)\n";
        report += row_prefix + ",false,,,,,,,\n";
        continue;
      }
      ++total_converged;
      const FittedCurve& fit = outcome.fit;
      bundle.element_names.push_back(element);
      bundle.fits.push_back(fit);
      report += row_prefix + ",true," + format_report(fit.lambda) + "," +
                format_report(fit.family.power) + "," +
                format_report(fit.gcv_score) + "," + format_report(fit.edf) + "," +
                format_report(fit.family.dispersion) + "," +
                format_report(fit.deviance) + "," + std::to_string(fit.iterations) +
                "\n";
      if (cfg.write_residuals) {
        for (Eigen::Index i = 0; i < u.size(); ++i) {
          const double mu = std::exp(evaluate(fit, u[i]));
          const double pearson =
              (y[i] - mu) / std::sqrt(std::pow(mu, fit.family.power));
          residuals += element + "," + format_report(t.positions[i]) + "," +
                       format_report(y[i]) + "," + format_report(mu) + "," +
                       format_report(pearson) + "\n";
        }
      }
    }

    const std::string stem = sanitize(t.site_id) + "__" + sanitize(t.material);
    write_text_file((fdir / (stem + ".fits.json")).string(),
                    fit_bundle_to_json(bundle));
    if (cfg.write_residuals) {
      const fs::path rdir = fs::path(cfg.out) / "residuals";
      ensure_dir(rdir);
      write_text_file((rdir / (stem + ".csv")).string(), residuals);
    }
    log << t.site_id << "/" << t.material << ": fitted " << bundle.fits.size()
        << "/" << t.n_elements() << " elements\n";
  }

  write_text_file((fs::path(cfg.out) / "fit_report.csv").string(), report);
  if (total_elements == 0) {
    if (refused_small > 0)
      throw input_error(
          "all transects refused: fewer samples than the configured minimum");
    throw input_error("no elements to fit");
  }
  if (total_converged == 0) throw numeric_error("all element fits failed");
}

void run_rank(const RunConfig& cfg, std::ostream& log) {
  if (cfg.input.empty())
    throw input_error("rank requires input = <fits file or directory>");
  const auto files = list_files(cfg.input, ".fits.json", "fits");

  write_run_config(cfg);

  std::vector<FitBundle> bundles;
  for (const auto& file : files)
    bundles.push_back(fit_bundle_from_json(read_text_file(file), file));

  std::set<std::string> sites;
  std::set<std::string> labels;
  for (const auto& b : bundles) sites.insert(b.site_id);
  const bool multi_site = sites.size() > 1;
  for (const auto& b : bundles) {
    if (!labels.insert(bundle_label(b, multi_site)).second)
      throw input_error("duplicate fit bundle for " + bundle_label(b, multi_site));
  }

  const ThresholdPolicy base_policy = threshold_policy_of(cfg);

  struct MaterialResult {
    std::string label;
    std::vector<CurvatureProfile> profiles;
    CValueMatrix matrix;
    RankedPairs ranked;
  };
  std::vector<MaterialResult> results;

  for (const auto& bundle : bundles) {
    const std::string label = bundle_label(bundle, multi_site);
    if (bundle.fits.size() < 2) {
      log << "warning: " << label << ": fewer than two fitted elements, "
          << "excluded from ranking\n";
      MaterialResult r;
      r.label = label;
      r.ranked.material = label;
      results.push_back(std::move(r));
      continue;
    }

    bool shared = true;
    for (const auto& fit : bundle.fits) {
      if (fit.basis.knots.size() != bundle.fits[0].basis.knots.size() ||
          fit.basis.knots != bundle.fits[0].basis.knots) {
        shared = false;
        break;
      }
    }
    PairGrid grid;
    if (shared) grid = make_pair_grid(bundle.fits[0].basis, cfg.grid_m);

    ProfileConfig pc;
    pc.m = cfg.grid_m;
    pc.threshold = base_policy;

    if (cfg.threshold_global &&
        base_policy.kind == ThresholdPolicy::Kind::Quantile) {
      // Global mode: one threshold from the pooled curvature of all pairs.
      std::vector<double> pool;
      for (std::size_t i = 0; i < bundle.fits.size(); ++i)
        for (std::size_t j = i + 1; j < bundle.fits.size(); ++j) {
          const LogRatioCurve curve =
              shared ? logratio_curve(bundle.fits[i], bundle.fits[j], grid)
                     : logratio_curve(bundle.fits[i], bundle.fits[j], cfg.grid_m);
          const Eigen::VectorXd kappa = curvature_of(curve);
          pool.insert(pool.end(), kappa.data(), kappa.data() + kappa.size());
        }
      Eigen::Map<const Eigen::VectorXd> pooled(pool.data(), Eigen::Index(pool.size()));
      pc.threshold.kind = ThresholdPolicy::Kind::Absolute;
      pc.threshold.value = pick_threshold(pooled, base_policy);
    }

    MaterialResult r;
    r.label = label;
    for (std::size_t i = 0; i < bundle.fits.size(); ++i)
      for (std::size_t j = i + 1; j < bundle.fits.size(); ++j)
        r.profiles.push_back(profile_pair(
            bundle.fits[i], bundle.fits[j], bundle.element_names[i],
            bundle.element_names[j], pc, bundle.x_min, bundle.x_max,
            bundle.sample_positions, shared ? &grid : nullptr));
    r.matrix = c_matrix(r.profiles, bundle.element_names, label);
    r.ranked = top_k(r.matrix, cfg.top_k);
    r.ranked.material = label;
    results.push_back(std::move(r));
  }

  double vmax = 0.0;
  for (const auto& r : results)
    if (r.matrix.C.size() > 0) vmax = std::max(vmax, r.matrix.C.maxCoeff());

  const fs::path out(cfg.out);
  for (std::size_t bi = 0; bi < bundles.size(); ++bi) {
    const auto& bundle = bundles[bi];
    const auto& r = results[bi];
    if (r.profiles.empty()) continue;
    const std::string stem =
        sanitize(bundle.site_id) + "__" + sanitize(bundle.material);

    const fs::path pdir = out / "profiles" / stem;
    ensure_dir(pdir);
    std::set<std::pair<std::string, std::string>> plot_set;
    if (cfg.plots == "topk") {
      for (const auto& p : r.ranked.pairs)
        plot_set.emplace(p.element1, p.element2);
    }
    for (const auto& profile : r.profiles) {
      const std::string pair_stem =
          sanitize(profile.element1) + "__" + sanitize(profile.element2);
      write_text_file((pdir / (pair_stem + ".csv")).string(),
                      profile_to_csv(profile, cfg.hash()));
      write_text_file((pdir / (pair_stem + ".json")).string(),
                      profile_to_json(profile, cfg.hash()));
      const bool plot =
          cfg.plots == "all" ||
          (cfg.plots == "topk" &&
           plot_set.count({profile.element1, profile.element2}) != 0);
      if (plot)
        write_text_file(
            (pdir / (pair_stem + ".svg")).string(),
            svg_curvature_plot(profile, bundle.sample_positions, r.label,
                               cfg.hash()));
    }

    write_text_file((out / ("heatmap__" + stem + ".csv")).string(),
                    heatmap_to_csv(r.matrix, cfg.hash()));
    write_text_file((out / ("heatmap__" + stem + ".svg")).string(),
                    svg_heatmap(r.matrix, vmax, cfg.hash()));
    write_text_file((out / ("topk__" + stem + ".csv")).string(),
                    topk_to_csv(r.ranked, cfg.hash()));
    write_text_file((out / ("pathfinders__" + stem + ".csv")).string(),
                    pathfinders_to_csv(pathfinder_scores(r.matrix), cfg.hash()));
    log << r.label << ": " << r.profiles.size() << " pairs, top c = "
        << (r.ranked.pairs.empty() ? "n/a"
                                   : format_report(r.ranked.pairs.front().c))
        << "\n";
  }

  if (results.size() >= 2) {
    std::vector<RankedPairs> per_material;
    per_material.reserve(results.size());
    for (const auto& r : results) per_material.push_back(r.ranked);
    const MaterialComparison cmp = material_comparison(per_material, cfg.top_k);
    for (const auto& m : cmp.excluded)
      log << "warning: material " << m << " excluded from comparison\n";
    write_text_file((out / "comparison.csv").string(),
                    comparison_to_csv(cmp, cfg.hash()));
    write_text_file((out / "comparison.svg").string(),
                    svg_comparison(cmp, cfg.hash()));
  }
}

int run_command(const std::string& command, const RunConfig& config,
                std::ostream& log, std::ostream& err) {
  try {
    if (command == "synth") run_synth(config, log);
    else if (command == "ingest") run_ingest(config, log);
    else if (command == "fit") run_fit(config, log);
    else if (command == "rank") run_rank(config, log);
    else throw input_error("unknown command: " + command);
    return 0;
  } catch (const io_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const input_error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const numeric_error& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace tmine::cli
