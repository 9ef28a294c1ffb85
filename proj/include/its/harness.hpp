#pragma once

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "its/instancing.hpp"
#include "its/obj_io.hpp"
#include "its/simplify.hpp"

namespace its {

/// One benchmark row: what ran, how long it took, and what came out.
struct RunRecord {
  std::string model;
  std::string mode;
  double reduce_percent = 0.0;
  std::size_t instances = 0;
  double time_ms = 0.0;
  std::size_t bytes = 0;  // total size of the mesh files this run emitted
  std::size_t vertices = 0;
  std::size_t faces = 0;
};

inline std::string mode_name(SimplifyMode mode) {
  return mode == SimplifyMode::ITS ? "its" : "quadric-only";
}

namespace detail {

inline std::string number_to_string(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
  std::string s(buf, res.ptr);
  // Trim trailing zeros but keep at least one digit after the point.
  if (s.find('.') != std::string::npos) {
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

}  // namespace detail

/// CSV rows in record order: model,mode,reduce,instances,time_ms,bytes,vertices,faces
inline std::string emit_report(std::span<const RunRecord> records) {
  std::string out = "model,mode,reduce,instances,time_ms,bytes,vertices,faces\n";
  for (const RunRecord& r : records) {
    out += r.model + ',' + r.mode + ',' + detail::number_to_string(r.reduce_percent) + ',' +
           std::to_string(r.instances) + ',' + detail::number_to_string(r.time_ms) + ',' +
           std::to_string(r.bytes) + ',' + std::to_string(r.vertices) + ',' +
           std::to_string(r.faces) + '\n';
  }
  return out;
}

struct RunOutcome {
  int exit_code = 0;
  std::vector<RunRecord> records;
  std::vector<std::string> messages;  // human-readable log, printed unless --quiet
};

struct SimplifyRunOptions {
  std::filesystem::path input;
  std::filesystem::path output;  // instanced output
  std::optional<std::filesystem::path> expanded_output;
  std::optional<std::filesystem::path> report_path;
  SimplifyParams params;
  bool force = false;
};

struct CompareRunOptions {
  std::filesystem::path input;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> report_path;
  SimplifyParams params;
  bool force = false;
};

namespace detail {

inline bool refuse_overwrite(const std::filesystem::path& p, bool force, RunOutcome& out) {
  std::error_code ec;
  if (!force && std::filesystem::exists(p, ec)) {
    out.messages.push_back("error: '" + p.string() + "' already exists (use --force to overwrite)");
    out.exit_code = 2;
    return true;
  }
  return false;
}

inline bool write_text_file(const std::filesystem::path& p, const std::string& text,
                            RunOutcome& out) {
  std::error_code ec;
  if (const auto dir = p.parent_path(); !dir.empty()) std::filesystem::create_directories(dir, ec);
  std::ofstream f(p, std::ios::binary);
  f << text;
  if (!f) {
    out.messages.push_back("error: cannot write '" + p.string() + "'");
    out.exit_code = 1;
    return false;
  }
  return true;
}

inline std::optional<Scene> load_scene(const std::filesystem::path& path, RunOutcome& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    out.messages.push_back("error: cannot open '" + path.string() + "'");
    out.exit_code = 1;
    return std::nullopt;
  }
  ParseResult parsed = parse_scene(f);
  for (const std::string& w : parsed.warnings) out.messages.push_back("warning: " + w);
  if (!parsed.ok()) {
    out.messages.push_back("error: " + path.string() + ":" +
                           std::to_string(parsed.error->line_number) + ": " +
                           parsed.error->message);
    out.exit_code = 1;
    return std::nullopt;
  }
  if (const auto issues = validate_mesh(parsed.scene->mesh); !issues.empty()) {
    out.messages.push_back("error: " + path.string() + ": invalid mesh: " +
                           issues.front().message);
    out.exit_code = 1;
    return std::nullopt;
  }
  return std::move(parsed.scene);
}

/// Re-parses a written file and checks it against the reported counts, so a
/// report can never disagree with the bytes on disk.
inline bool verify_written(const std::filesystem::path& path, std::size_t want_vertices,
                           std::size_t want_faces, RunOutcome& out) {
  std::ifstream f(path, std::ios::binary);
  ParseResult parsed = parse_scene(f);
  if (!parsed.ok()) {
    out.messages.push_back("internal error: written file '" + path.string() +
                           "' does not parse: " + parsed.error->message);
    out.exit_code = 1;
    return false;
  }
  const RefMesh& m = parsed.scene->mesh;
  if (!validate_mesh(m).empty() || m.positions.size() != want_vertices ||
      m.faces.size() != want_faces) {
    out.messages.push_back("internal error: written file '" + path.string() +
                           "' disagrees with the run report");
    out.exit_code = 1;
    return false;
  }
  return true;
}

inline std::size_t file_bytes(const std::filesystem::path& p) {
  std::error_code ec;
  const auto n = std::filesystem::file_size(p, ec);
  return ec ? 0 : static_cast<std::size_t>(n);
}

inline bool emit_csv(const std::optional<std::filesystem::path>& path,
                     std::span<const RunRecord> records, bool force, RunOutcome& out) {
  if (!path) return true;
  if (refuse_overwrite(*path, force, out)) return false;
  return write_text_file(*path, emit_report(records), out);
}

}  // namespace detail

/// Parse, simplify, write the instanced output (plus the expanded one when
/// requested), copy the material file, verify the written files against the
/// report, and emit the record. Exit code 1 = input/parse error, 2 = bad
/// parameters or refusal to overwrite.
inline RunOutcome run_simplify(const SimplifyRunOptions& opt) {
  RunOutcome out;
  if (opt.params.reduce_percent < 0.0 || opt.params.reduce_percent > 100.0) {
    out.messages.push_back("error: --reduce must be in [0, 100]");
    out.exit_code = 2;
    return out;
  }
  if (detail::refuse_overwrite(opt.output, opt.force, out)) return out;
  if (opt.expanded_output && detail::refuse_overwrite(*opt.expanded_output, opt.force, out))
    return out;

  const auto scene = detail::load_scene(opt.input, out);
  if (!scene) return out;

  const auto t0 = std::chrono::steady_clock::now();
  Scene simplified;
  SimplifyReport srep;
  try {
    std::tie(simplified, srep) = simplify(*scene, opt.params);
  } catch (const std::invalid_argument& e) {
    out.messages.push_back(std::string("error: ") + e.what());
    out.exit_code = 2;
    return out;
  }
  if (!detail::write_text_file(opt.output, write_scene(simplified, OutputKind::Instanced), out))
    return out;
  if (opt.expanded_output &&
      !detail::write_text_file(*opt.expanded_output,
                               write_scene(simplified, OutputKind::ExpandedIndexed), out))
    return out;
  const double elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  const auto mtl = copy_material_lib(*scene, opt.input.parent_path(), opt.output.parent_path());
  if (mtl.warning) out.messages.push_back("warning: " + *mtl.warning);

  if (!detail::verify_written(opt.output, srep.final_vertices, srep.final_faces, out)) return out;

  RunRecord rec;
  rec.model = opt.input.stem().string();
  rec.mode = mode_name(opt.params.mode);
  rec.reduce_percent = opt.params.reduce_percent;
  rec.instances = scene->instances.size();
  rec.time_ms = elapsed_ms;
  rec.bytes = detail::file_bytes(opt.output) +
              (opt.expanded_output ? detail::file_bytes(*opt.expanded_output) : 0);
  rec.vertices = srep.final_vertices;
  rec.faces = srep.final_faces;
  out.records.push_back(rec);

  out.messages.push_back("model " + rec.model + ": " + std::to_string(srep.initial_vertices) +
                         " -> " + std::to_string(srep.final_vertices) + " vertices, " +
                         std::to_string(srep.initial_faces) + " -> " +
                         std::to_string(srep.final_faces) + " faces (" +
                         std::to_string(srep.collapses) + " collapses, " +
                         detail::number_to_string(elapsed_ms) + " ms, " +
                         std::to_string(rec.bytes) + " bytes)");

  if (!detail::emit_csv(opt.report_path, out.records, opt.force, out)) return out;
  return out;
}

/// The two-condition benchmark: the instanced run simplifies the reference
/// mesh once and writes the instanced output; the baseline first bakes every
/// instance into one indexed mesh, simplifies that, and writes it as a plain
/// OBJ. Same input bytes, same parameters, timed separately (parse excluded;
/// baking counts against the baseline).
inline RunOutcome run_compare(const CompareRunOptions& opt) {
  RunOutcome out;
  if (opt.params.reduce_percent < 0.0 || opt.params.reduce_percent > 100.0) {
    out.messages.push_back("error: --reduce must be in [0, 100]");
    out.exit_code = 2;
    return out;
  }
  const auto scene = detail::load_scene(opt.input, out);
  if (!scene) return out;

  const std::string model = opt.input.stem().string();
  const auto instanced_path = opt.output_dir / (model + "_instanced.obj");
  const auto baseline_path = opt.output_dir / (model + "_baseline.obj");
  if (detail::refuse_overwrite(instanced_path, opt.force, out)) return out;
  if (detail::refuse_overwrite(baseline_path, opt.force, out)) return out;

  try {
    // Condition A: instance-aware.
    const auto a0 = std::chrono::steady_clock::now();
    auto [simplified, arep] = simplify(*scene, opt.params);
    const std::string a_text = write_scene(simplified, OutputKind::Instanced);
    if (!detail::write_text_file(instanced_path, a_text, out)) return out;
    const double a_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - a0).count();
    if (!detail::verify_written(instanced_path, arep.final_vertices, arep.final_faces, out))
      return out;

    RunRecord ra;
    ra.model = model;
    ra.mode = mode_name(opt.params.mode);
    ra.reduce_percent = opt.params.reduce_percent;
    ra.instances = scene->instances.size();
    ra.time_ms = a_ms;
    ra.bytes = detail::file_bytes(instanced_path);
    ra.vertices = arep.final_vertices;
    ra.faces = arep.final_faces;
    out.records.push_back(ra);

    // Condition B: expand first, then simplify the baked mesh.
    const auto b0 = std::chrono::steady_clock::now();
    const Scene flat = flatten_scene(*scene);
    auto [baseline, brep] = simplify(flat, opt.params);
    const std::string b_text = write_scene(baseline, OutputKind::ExpandedIndexed);
    if (!detail::write_text_file(baseline_path, b_text, out)) return out;
    const double b_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - b0).count();
    if (!detail::verify_written(baseline_path, brep.final_vertices, brep.final_faces, out))
      return out;

    RunRecord rb;
    rb.model = model;
    rb.mode = "expanded-baseline";
    rb.reduce_percent = opt.params.reduce_percent;
    rb.instances = scene->instances.size();
    rb.time_ms = b_ms;
    rb.bytes = detail::file_bytes(baseline_path);
    rb.vertices = brep.final_vertices;
    rb.faces = brep.final_faces;
    out.records.push_back(rb);

    const auto mtl = copy_material_lib(*scene, opt.input.parent_path(), opt.output_dir);
    if (mtl.warning) out.messages.push_back("warning: " + *mtl.warning);

    out.messages.push_back("condition            time_ms      bytes   vertices      faces");
    for (const RunRecord& r : out.records) {
      char line[160];
      std::snprintf(line, sizeof(line), "%-18s %10.3f %10zu %10zu %10zu",
                    r.mode.c_str(), r.time_ms, r.bytes, r.vertices, r.faces);
      out.messages.push_back(line);
    }
    if (rb.time_ms > 0.0 && rb.bytes > 0) {
      out.messages.push_back(
          "instanced/baseline size ratio: " +
          detail::number_to_string(static_cast<double>(ra.bytes) / static_cast<double>(rb.bytes)) +
          ", baseline/instanced time ratio: " + detail::number_to_string(rb.time_ms / ra.time_ms));
    }
  } catch (const std::invalid_argument& e) {
    out.messages.push_back(std::string("error: ") + e.what());
    out.exit_code = 2;
    return out;
  }

  if (!detail::emit_csv(opt.report_path, out.records, opt.force, out)) return out;
  return out;
}

}  // namespace its
