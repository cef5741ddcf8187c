#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pmor/io/json_util.hpp"
#include "pmor/spai/preconditioner.hpp"
#include "pmor/sparse/matrix_market.hpp"

namespace pmor::io {

inline constexpr const char* preconditioner_format = "pmor-preconditioner";

/// Writes the chain outermost factor first as <name>_0.mtx, <name>_1.mtx, ...
/// plus <name>.json. `info` (build statistics, configuration) is stored as is.
inline void save_preconditioner(const Preconditioner& p, const std::filesystem::path& dir,
                                const std::string& name, const Json& info = Json::object()) {
  std::filesystem::create_directories(dir);
  Json files = Json::array();
  int k = 0;
  for (const Preconditioner* q = &p; q; q = q->base(), ++k) {
    const auto file = name + "_" + std::to_string(k) + ".mtx";
    write_matrix_market(q->matrix(), dir / file);
    files.push_back(file);
  }
  write_json(dir / (name + ".json"), Json{{"format", preconditioner_format},
                                          {"kind", p.is_factored() ? "factored" : "explicit"},
                                          {"dimension", p.dimension()},
                                          {"depth", p.depth()},
                                          {"factors", files},
                                          {"info", info}});
}

inline Preconditioner load_preconditioner(const std::filesystem::path& dir, const std::string& name) {
  const auto m = read_json(dir / (name + ".json"));
  if (m.value("format", std::string{}) != preconditioner_format)
    throw FormatError(name + ".json is not a preconditioner manifest");
  const auto& files = m.at("factors");
  if (!files.is_array() || files.empty()) throw FormatError(name + ".json lists no factors");
  auto p = Preconditioner::explicit_inverse(read_matrix_market(dir / files.back().get<std::string>()));
  for (std::size_t k = files.size() - 1; k-- > 0;)
    p = Preconditioner::factored(read_matrix_market(dir / files[k].get<std::string>()), std::move(p));
  return p;
}

}  // namespace pmor::io
