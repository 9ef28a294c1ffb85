#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "its/its.hpp"

namespace {

struct CommonFlags {
  double reduce = 0.0;
  std::string mode = "its";
  std::optional<double> max_error;
  std::optional<double> max_geom_error;
  bool proximity_pairs = false;
  double initial_threshold = 0.01;
  bool target_vertices = false;
  std::string report;
  bool quiet = false;
  bool force = false;
};

void add_common_flags(CLI::App& cmd, CommonFlags& f) {
  cmd.add_option("--reduce", f.reduce, "Percentage of faces to remove, 0-100")->required();
  cmd.add_option("--mode", f.mode, "Error metric: its (geometry + attributes) or quadric-only")
      ->check(CLI::IsMember({"its", "quadric-only"}));
  cmd.add_option("--max-error", f.max_error, "Stop once the best collapse exceeds this unified error");
  cmd.add_option("--max-geom-error", f.max_geom_error,
                 "Never collapse a pair whose geometric error exceeds this");
  cmd.add_flag("--proximity-pairs", f.proximity_pairs,
               "Also admit non-edge vertex pairs closer than the threshold");
  cmd.add_option("--initial-threshold", f.initial_threshold,
                 "Initial pair threshold as a fraction of the bounding box diagonal");
  cmd.add_flag("--target-vertices", f.target_vertices,
               "Interpret --reduce against the vertex count instead of the face count");
  cmd.add_option("--report", f.report, "Append a CSV benchmark report at this path");
  cmd.add_flag("--quiet", f.quiet, "Suppress the human-readable report");
  cmd.add_flag("--force", f.force, "Overwrite existing output files");
}

its::SimplifyParams to_params(const CommonFlags& f) {
  its::SimplifyParams p;
  p.reduce_percent = f.reduce;
  p.mode = f.mode == "quadric-only" ? its::SimplifyMode::QuadricOnly : its::SimplifyMode::ITS;
  p.max_unified_error = f.max_error;
  p.max_geometric_error = f.max_geom_error;
  p.proximity_pairs = f.proximity_pairs;
  p.initial_threshold_fraction = f.initial_threshold;
  p.target_vertices = f.target_vertices;
  return p;
}

int finish(const its::RunOutcome& outcome, bool quiet) {
  for (const std::string& m : outcome.messages) {
    const bool is_error = m.rfind("error", 0) == 0 || m.rfind("internal error", 0) == 0;
    if (is_error)
      std::cerr << m << "\n";
    else if (!quiet)
      std::cout << m << "\n";
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"its - instanced textured mesh simplifier"};
  app.require_subcommand(1);

  CommonFlags sf;
  std::string s_input, s_output, s_expanded;
  CLI::App* cmd_simplify =
      app.add_subcommand("simplify", "Simplify a scene and write the instanced output");
  cmd_simplify->add_option("--input", s_input, "Input instance-extended OBJ")->required();
  cmd_simplify->add_option("--out", s_output, "Instanced output OBJ")->required();
  cmd_simplify->add_option("--expanded", s_expanded,
                           "Also write every instance baked into a plain indexed OBJ");
  add_common_flags(*cmd_simplify, sf);

  CommonFlags cf;
  std::string c_input, c_outdir = ".";
  CLI::App* cmd_compare = app.add_subcommand(
      "compare", "Run instance-aware simplification against the expand-first baseline");
  cmd_compare->add_option("--input", c_input, "Input instance-extended OBJ")->required();
  cmd_compare->add_option("--out", c_outdir, "Directory for the two output meshes");
  add_common_flags(*cmd_compare, cf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (cmd_simplify->parsed()) {
    its::SimplifyRunOptions opt;
    opt.input = s_input;
    opt.output = s_output;
    if (!s_expanded.empty()) opt.expanded_output = s_expanded;
    if (!sf.report.empty()) opt.report_path = sf.report;
    opt.params = to_params(sf);
    opt.force = sf.force;
    return finish(its::run_simplify(opt), sf.quiet);
  }

  its::CompareRunOptions opt;
  opt.input = c_input;
  opt.output_dir = c_outdir;
  if (!cf.report.empty()) opt.report_path = cf.report;
  opt.params = to_params(cf);
  opt.force = cf.force;
  return finish(its::run_compare(opt), cf.quiet);
}
