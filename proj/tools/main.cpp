#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tmine/cli.hpp"
#include "tmine/config.hpp"
#include "tmine/errors.hpp"

namespace {

struct SubArgs {
  std::string config_path;
  std::string input;
  std::string out;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, SubArgs& args) {
  sub->add_option("--config", args.config_path, "key = value configuration file");
  sub->add_option("--input", args.input, "input file or directory");
  sub->add_option("--out", args.out, "output directory");
  sub->add_option("--set", args.sets, "override a config key (key=value, repeatable)");
}

int dispatch(const std::string& command, const SubArgs& args) {
  try {
    tmine::KeyValues user;
    if (!args.config_path.empty())
      user = tmine::parse_config_file(args.config_path);
    if (!args.input.empty()) user.set("input", args.input);
    if (!args.out.empty()) user.set("out", args.out);
    for (const auto& s : args.sets) tmine::apply_override(user, s);
    const tmine::RunConfig config = tmine::resolve_run_config(user);
    return tmine::cli::run_command(command, config, std::cout, std::cerr);
  } catch (const tmine::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tmine::input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "transect-miner: ranks element pairs along a geochemical sampling "
      "transect by the curvature of their fitted log-ratio curves"};
  app.require_subcommand(1);

  SubArgs synth_args, ingest_args, fit_args, rank_args;
  add_common(app.add_subcommand("synth",
                                "generate a synthetic sample set with ground truth"),
             synth_args);
  add_common(app.add_subcommand(
                 "ingest", "parse samples and build one transect per site/material"),
             ingest_args);
  add_common(app.add_subcommand("fit", "fit per-element Tweedie GAMs"), fit_args);
  add_common(app.add_subcommand(
                 "rank", "compute curvature profiles, c-values and reports"),
             rank_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  if (app.got_subcommand("synth")) return dispatch("synth", synth_args);
  if (app.got_subcommand("ingest")) return dispatch("ingest", ingest_args);
  if (app.got_subcommand("fit")) return dispatch("fit", fit_args);
  return dispatch("rank", rank_args);
}
