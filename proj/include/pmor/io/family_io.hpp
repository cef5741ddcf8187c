#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pmor/affine/affine_family.hpp"
#include "pmor/io/json_util.hpp"
#include "pmor/sparse/matrix_market.hpp"

namespace pmor::io {

/// A family together with its suggested expansion points, as stored on disk.
struct FamilyData {
  AffineFamily family;
  std::vector<ExpansionPoint> points;
  /// Free-form description of how the family was produced.
  Json generator = Json::object();
};

inline constexpr const char* family_format = "pmor-affine-family";

inline std::string term_file_name(std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "term_%02zu.mtx", j);
  return buf;
}

/// Writes term_XX.mtx, b.mtx and c.mtx (when present) and manifest.json.
/// Output depends only on the data, so equal families give identical bytes.
inline void save_family(const FamilyData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& f = data.family;
  Json terms = Json::array();
  for (std::size_t j = 0; j < f.terms().size(); ++j) {
    const auto name = term_file_name(j);
    write_matrix_market(f.terms()[j], dir / name);
    terms.push_back({{"file", name}, {"label", f.term_labels()[j]}});
  }
  Json m{{"format", family_format},
         {"version", 1},
         {"dimension", f.dimension()},
         {"terms", terms},
         {"points", points_to_json(data.points)},
         {"generator", data.generator}};
  if (f.rhs().size() != 0) {
    write_matrix_market(f.rhs(), dir / "b.mtx");
    m["rhs"] = "b.mtx";
  }
  if (f.output().size() != 0) {
    write_matrix_market(f.output(), dir / "c.mtx");
    m["output"] = "c.mtx";
  }
  write_json(dir / "manifest.json", m);
}

inline FamilyData load_family(const std::filesystem::path& dir) {
  const auto m = read_json(dir / "manifest.json");
  if (m.value("format", std::string{}) != family_format)
    throw FormatError(dir.string() + ": manifest is not an affine-family manifest");
  if (!m.contains("terms") || !m["terms"].is_array()) throw FormatError("manifest lists no terms");
  std::vector<SparseMatrix> terms;
  std::vector<std::string> labels;
  for (const auto& t : m["terms"]) {
    terms.push_back(read_matrix_market(dir / t.at("file").get<std::string>()));
    labels.push_back(t.value("label", "A" + std::to_string(labels.size())));
  }
  const auto dense = [&](const char* key) -> DenseBlock {
    if (!m.contains(key)) return {};
    const auto a = read_matrix_market(dir / m[key].get<std::string>());
    return to_dense(a);
  };
  FamilyData d{AffineFamily(std::move(terms), dense("rhs"), dense("output"), std::move(labels)),
               m.contains("points") ? points_from_json(m["points"]) : std::vector<ExpansionPoint>{},
               m.value("generator", Json::object())};
  if (m.contains("dimension") && m["dimension"].get<Index>() != d.family.dimension())
    throw FormatError("manifest dimension does not match the stored terms");
  for (const auto& p : d.points)
    if (p.size() != d.family.parameter_count())
      throw FormatError("point '" + p.label + "' does not match the family's term count");
  return d;
}

}  // namespace pmor::io
