#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "its/instancing.hpp"
#include "its/mesh.hpp"

namespace its {

/// The two output flavors: the compact instanced form, and every instance
/// baked out as one plain indexed OBJ any viewer can read.
enum class OutputKind { Instanced, ExpandedIndexed };

struct ParseError {
  enum class Kind {
    UnknownKeyword,
    MalformedNumber,
    IndexOutOfRange,
    NonTriangleFace,
    BadInstanceMatrix,
    MissingInstanceCount,
  };
  Kind kind = Kind::UnknownKeyword;
  std::size_t line_number = 0;  // 1-based source line
  std::string message;
};

struct ParseResult {
  std::optional<Scene> scene;
  std::optional<ParseError> error;
  std::vector<std::string> warnings;

  bool ok() const { return scene.has_value(); }
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_double(std::string_view tok, double& out) {
  const std::string buf(tok);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && !buf.empty();
}

inline bool parse_long(std::string_view tok, long& out) {
  const std::string buf(tok);
  char* end = nullptr;
  out = std::strtol(buf.c_str(), &end, 10);
  return end == buf.c_str() + buf.size() && !buf.empty();
}

inline void append_float(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  out += buf;
}

}  // namespace detail

/// Parses the instance-extended OBJ format. Geometry keywords are standard;
/// instancing is carried by one `instances <N>` line followed by N lines
/// `instance <m00> ... <m33>` (16 reals, row-major, applied as p' = M [x y z 1]^T).
/// Files without an instances block get a single identity instance. The first
/// error aborts the parse.
inline ParseResult parse_scene(std::istream& in) {
  ParseResult result;
  Scene scene;
  RefMesh& mesh = scene.mesh;

  bool saw_instances_decl = false;
  std::size_t declared_instances = 0;
  bool saw_colored_vertex = false;
  bool saw_plain_vertex = false;
  bool saw_mtllib = false;
  bool saw_object = false;

  const auto fail = [&](ParseError::Kind kind, std::size_t line, std::string msg) {
    result.error = ParseError{kind, line, std::move(msg)};
    return result;
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string_view line(raw);
    // Strip trailing comments and whitespace-only lines.
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    const auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;
    const std::string_view kw = tokens[0];

    if (kw == "v") {
      if (tokens.size() != 4 && tokens.size() != 7)
        return fail(ParseError::Kind::MalformedNumber, line_no,
                    "vertex line needs 3 coordinates (plus optional r g b)");
      double c[6] = {};
      for (std::size_t i = 1; i < tokens.size(); ++i)
        if (!detail::parse_double(tokens[i], c[i - 1]))
          return fail(ParseError::Kind::MalformedNumber, line_no,
                      "bad number '" + std::string(tokens[i]) + "'");
      const bool colored = tokens.size() == 7;
      if ((colored && saw_plain_vertex) || (!colored && saw_colored_vertex))
        return fail(ParseError::Kind::MalformedNumber, line_no,
                    "vertex color columns must be present on all vertices or none");
      (colored ? saw_colored_vertex : saw_plain_vertex) = true;
      mesh.positions.push_back({c[0], c[1], c[2]});
      if (colored) mesh.colors.push_back({c[3], c[4], c[5]});
    } else if (kw == "vt") {
      if (tokens.size() < 3 || tokens.size() > 4)
        return fail(ParseError::Kind::MalformedNumber, line_no, "texcoord line needs 2 values");
      double c[3] = {};
      for (std::size_t i = 1; i < tokens.size(); ++i)
        if (!detail::parse_double(tokens[i], c[i - 1]))
          return fail(ParseError::Kind::MalformedNumber, line_no,
                      "bad number '" + std::string(tokens[i]) + "'");
      mesh.texcoords.push_back({c[0], c[1]});
    } else if (kw == "vn") {
      if (tokens.size() != 4)
        return fail(ParseError::Kind::MalformedNumber, line_no, "normal line needs 3 values");
      double c[3] = {};
      for (std::size_t i = 1; i < 4; ++i)
        if (!detail::parse_double(tokens[i], c[i - 1]))
          return fail(ParseError::Kind::MalformedNumber, line_no,
                      "bad number '" + std::string(tokens[i]) + "'");
      mesh.normals.push_back({c[0], c[1], c[2]});
    } else if (kw == "f") {
      if (tokens.size() != 4)
        return fail(ParseError::Kind::NonTriangleFace, line_no,
                    "face has " + std::to_string(tokens.size() - 1) +
                        " corners; only triangles are supported");
      Face face;
      for (int ci = 0; ci < 3; ++ci) {
        const std::string_view spec = tokens[ci + 1];
        long idx[3] = {0, 0, 0};
        bool has[3] = {false, false, false};
        std::size_t part = 0, start = 0;
        for (std::size_t k = 0; k <= spec.size(); ++k) {
          if (k == spec.size() || spec[k] == '/') {
            if (part > 2)
              return fail(ParseError::Kind::MalformedNumber, line_no,
                          "too many '/' in face corner '" + std::string(spec) + "'");
            const std::string_view piece = spec.substr(start, k - start);
            if (!piece.empty()) {
              if (!detail::parse_long(piece, idx[part]))
                return fail(ParseError::Kind::MalformedNumber, line_no,
                            "bad index '" + std::string(piece) + "'");
              has[part] = true;
            }
            ++part;
            start = k + 1;
          }
        }
        if (!has[0])
          return fail(ParseError::Kind::MalformedNumber, line_no, "face corner lacks a position index");
        const auto resolve = [&](long value, std::size_t count, const char* what,
                                 std::uint32_t& slot) -> bool {
          if (value <= 0 || static_cast<std::size_t>(value) > count) {
            result.error =
                ParseError{ParseError::Kind::IndexOutOfRange, line_no,
                           std::string(what) + " index " + std::to_string(value) +
                               " out of range (have " + std::to_string(count) + ")"};
            return false;
          }
          slot = static_cast<std::uint32_t>(value - 1);
          return true;
        };
        Corner corner;
        if (!resolve(idx[0], mesh.positions.size(), "position", corner.position)) return result;
        if (has[1] && !resolve(idx[1], mesh.texcoords.size(), "texcoord", corner.texcoord))
          return result;
        if (has[2] && !resolve(idx[2], mesh.normals.size(), "normal", corner.normal)) return result;
        if (!mesh.colors.empty()) corner.color = corner.position;
        face.corners[ci] = corner;
      }
      mesh.faces.push_back(face);
    } else if (kw == "instances") {
      if (saw_instances_decl)
        return fail(ParseError::Kind::BadInstanceMatrix, line_no, "instances block redeclared");
      long n = 0;
      if (tokens.size() != 2 || !detail::parse_long(tokens[1], n) || n <= 0)
        return fail(ParseError::Kind::MalformedNumber, line_no,
                    "instances needs a positive count");
      saw_instances_decl = true;
      declared_instances = static_cast<std::size_t>(n);
    } else if (kw == "instance") {
      if (!saw_instances_decl)
        return fail(ParseError::Kind::MissingInstanceCount, line_no,
                    "instance line before any 'instances <N>' declaration");
      if (scene.instances.size() >= declared_instances)
        return fail(ParseError::Kind::BadInstanceMatrix, line_no,
                    "more instance lines than the declared count of " +
                        std::to_string(declared_instances));
      if (tokens.size() != 17)
        return fail(ParseError::Kind::BadInstanceMatrix, line_no,
                    "instance line needs 16 matrix entries");
      Mat4 m;
      for (int i = 0; i < 16; ++i)
        if (!detail::parse_double(tokens[i + 1], m.m[static_cast<std::size_t>(i)]))
          return fail(ParseError::Kind::BadInstanceMatrix, line_no,
                      "bad matrix entry '" + std::string(tokens[i + 1]) + "'");
      if (!m.affine_bottom_row(1e-9))
        return fail(ParseError::Kind::BadInstanceMatrix, line_no,
                    "instance matrix bottom row must be 0 0 0 1");
      if (std::abs(m.det3()) <= kSingularDeterminant)
        return fail(ParseError::Kind::BadInstanceMatrix, line_no,
                    "instance matrix upper-left 3x3 block is singular");
      scene.instances.push_back(Instance{m});
    } else if (kw == "mtllib") {
      if (tokens.size() >= 2 && !saw_mtllib) {
        scene.material_lib = std::string(tokens[1]);
        saw_mtllib = true;
      } else if (saw_mtllib) {
        result.warnings.push_back("line " + std::to_string(line_no) +
                                  ": extra mtllib ignored");
      }
    } else if (kw == "o") {
      if (tokens.size() >= 2 && !saw_object) {
        scene.object_name = std::string(tokens[1]);
        saw_object = true;
      } else if (saw_object) {
        result.warnings.push_back("line " + std::to_string(line_no) + ": extra o ignored");
      }
    } else if (std::isalpha(static_cast<unsigned char>(kw[0]))) {
      // Real exporters emit g/s/usemtl and friends; skip them, note it.
      result.warnings.push_back("line " + std::to_string(line_no) + ": skipped keyword '" +
                                std::string(kw) + "'");
    } else {
      return fail(ParseError::Kind::UnknownKeyword, line_no,
                  "unrecognized directive '" + std::string(kw) + "'");
    }
  }

  if (saw_instances_decl && scene.instances.size() != declared_instances)
    return fail(ParseError::Kind::MissingInstanceCount, line_no,
                "declared " + std::to_string(declared_instances) + " instances, found " +
                    std::to_string(scene.instances.size()));
  if (scene.instances.empty()) scene.instances.push_back(Instance{Mat4::identity()});

  result.scene = std::move(scene);
  return result;
}

inline ParseResult parse_scene(const std::string& text) {
  std::istringstream in(text);
  return parse_scene(in);
}

namespace detail {

inline void write_vertex_line(std::string& out, const RefMesh& mesh, std::size_t i, Vec3 p) {
  out += "v ";
  append_float(out, p.x);
  out += ' ';
  append_float(out, p.y);
  out += ' ';
  append_float(out, p.z);
  if (!mesh.colors.empty()) {
    const Vec3 c = mesh.colors[i];
    out += ' ';
    append_float(out, c.x);
    out += ' ';
    append_float(out, c.y);
    out += ' ';
    append_float(out, c.z);
  }
  out += '\n';
}

inline void write_face_line(std::string& out, const Face& f, std::size_t v_off, std::size_t t_off,
                            std::size_t n_off) {
  out += 'f';
  for (const Corner& c : f.corners) {
    out += ' ';
    out += std::to_string(c.position + 1 + v_off);
    if (c.texcoord != kNoIndex || c.normal != kNoIndex) {
      out += '/';
      if (c.texcoord != kNoIndex) out += std::to_string(c.texcoord + 1 + t_off);
      if (c.normal != kNoIndex) {
        out += '/';
        out += std::to_string(c.normal + 1 + n_off);
      }
    }
  }
  out += '\n';
}

inline void write_header(std::string& out, const Scene& scene) {
  if (!scene.material_lib.empty()) out += "mtllib " + scene.material_lib + "\n";
  if (!scene.object_name.empty()) out += "o " + scene.object_name + "\n";
}

}  // namespace detail

/// Serializes a scene. Instanced output is the reference mesh plus the
/// instances block; ExpandedIndexed bakes each instance into a `g`-grouped
/// plain OBJ with shared texcoords written once.
inline std::string write_scene(const Scene& scene, OutputKind kind) {
  std::string out;
  const RefMesh& mesh = scene.mesh;

  if (kind == OutputKind::Instanced) {
    detail::write_header(out, scene);
    for (std::size_t i = 0; i < mesh.positions.size(); ++i)
      detail::write_vertex_line(out, mesh, i, mesh.positions[i]);
    for (const Vec2& t : mesh.texcoords) {
      out += "vt ";
      detail::append_float(out, t.u);
      out += ' ';
      detail::append_float(out, t.v);
      out += '\n';
    }
    for (const Vec3& n : mesh.normals) {
      out += "vn ";
      detail::append_float(out, n.x);
      out += ' ';
      detail::append_float(out, n.y);
      out += ' ';
      detail::append_float(out, n.z);
      out += '\n';
    }
    for (const Face& f : mesh.faces) detail::write_face_line(out, f, 0, 0, 0);
    out += "instances " + std::to_string(scene.instances.size()) + "\n";
    for (const Instance& inst : scene.instances) {
      out += "instance";
      for (double v : inst.transform.m) {
        out += ' ';
        detail::append_float(out, v);
      }
      out += '\n';
    }
    return out;
  }

  // ExpandedIndexed
  detail::write_header(out, scene);
  const auto expanded = expand_scene(scene);
  for (const Vec2& t : mesh.texcoords) {
    out += "vt ";
    detail::append_float(out, t.u);
    out += ' ';
    detail::append_float(out, t.v);
    out += '\n';
  }
  for (std::size_t i = 0; i < expanded.size(); ++i) {
    const ExpandedInstance& inst = expanded[i];
    out += "g instance_" + std::to_string(i) + "\n";
    for (std::size_t v = 0; v < inst.positions.size(); ++v)
      detail::write_vertex_line(out, mesh, v, inst.positions[v]);
    for (const Vec3& n : inst.normals) {
      out += "vn ";
      detail::append_float(out, n.x);
      out += ' ';
      detail::append_float(out, n.y);
      out += ' ';
      detail::append_float(out, n.z);
      out += '\n';
    }
    for (const Face& f : mesh.faces)
      detail::write_face_line(out, f, i * mesh.positions.size(), 0, i * mesh.normals.size());
  }
  return out;
}

struct MaterialCopyResult {
  std::optional<std::string> copied_name;
  std::optional<std::string> warning;
};

/// Copies the referenced .mtl byte-identically from source_dir to dest_dir.
/// No material reference is a no-op; a dangling reference is a warning, not a
/// failure, so viewers can still open the geometry.
inline MaterialCopyResult copy_material_lib(const Scene& scene,
                                            const std::filesystem::path& source_dir,
                                            const std::filesystem::path& dest_dir) {
  MaterialCopyResult result;
  if (scene.material_lib.empty()) return result;
  const std::filesystem::path src = source_dir / scene.material_lib;
  std::error_code ec;
  if (!std::filesystem::exists(src, ec) || ec) {
    result.warning = "material file '" + scene.material_lib + "' not found in " +
                     source_dir.string();
    return result;
  }
  const std::filesystem::path dst = dest_dir / scene.material_lib;
  if (std::filesystem::exists(dst, ec) && std::filesystem::equivalent(src, dst, ec)) {
    result.copied_name = scene.material_lib;
    return result;
  }
  std::filesystem::create_directories(dest_dir, ec);
  std::filesystem::copy_file(src, dst, std::filesystem::copy_options::overwrite_existing, ec);
  if (ec) {
    result.warning = "failed to copy '" + scene.material_lib + "': " + ec.message();
    return result;
  }
  result.copied_name = scene.material_lib;
  return result;
}

}  // namespace its
