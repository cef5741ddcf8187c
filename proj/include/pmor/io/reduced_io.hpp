#pragma once

#include <filesystem>
#include <string>

#include "pmor/io/family_io.hpp"
#include "pmor/rpmor/model.hpp"

namespace pmor::io {

inline constexpr const char* reduced_format = "pmor-reduced-model";

/// Writes reduced terms, B̂, Ĉ and V as Matrix Market files plus manifest.json.
inline void save_reduced(const ReducedModel& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Json terms = Json::array();
  for (std::size_t j = 0; j < r.terms.size(); ++j) {
    const auto name = term_file_name(j);
    write_matrix_market(r.terms[j], dir / name);
    terms.push_back({{"file", name}, {"label", j < r.term_labels.size() ? r.term_labels[j] : ""}});
  }
  Json m{{"format", reduced_format}, {"version", 1}, {"order", r.order()}, {"terms", terms}};
  if (r.b.size() != 0) {
    write_matrix_market(r.b, dir / "b.mtx");
    m["rhs"] = "b.mtx";
  }
  if (r.c.size() != 0) {
    write_matrix_market(r.c, dir / "c.mtx");
    m["output"] = "c.mtx";
  }
  write_matrix_market(r.v, dir / "v.mtx");
  m["basis"] = "v.mtx";
  write_json(dir / "manifest.json", m);
}

inline ReducedModel load_reduced(const std::filesystem::path& dir) {
  const auto m = read_json(dir / "manifest.json");
  if (m.value("format", std::string{}) != reduced_format)
    throw FormatError(dir.string() + ": manifest is not a reduced-model manifest");
  ReducedModel r;
  for (const auto& t : m.at("terms")) {
    r.terms.push_back(read_dense_matrix_market(dir / t.at("file").get<std::string>()));
    r.term_labels.push_back(t.value("label", std::string{}));
  }
  if (m.contains("rhs")) r.b = read_dense_matrix_market(dir / m["rhs"].get<std::string>());
  if (m.contains("output")) r.c = read_dense_matrix_market(dir / m["output"].get<std::string>());
  r.v = read_dense_matrix_market(dir / m.at("basis").get<std::string>());
  return r;
}

}  // namespace pmor::io
