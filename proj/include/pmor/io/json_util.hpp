#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>
#include "pmor/affine/affine_family.hpp"

namespace pmor::io {

using Json = nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// 64-bit FNV-1a.
class Fnv1a {
 public:
  void update(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  void update(std::string_view s) { update(s.data(), s.size()); }
  template <class T>
  void update_value(const T& v) {
    update(&v, sizeof(T));
  }
  std::uint64_t value() const noexcept { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Hash of the canonical (key-sorted, compact) JSON text.
inline std::string json_hash(const Json& j) {
  Fnv1a h;
  h.update(j.dump());
  return hex(h.value());
}

/// Hash of every term, B and C of a family, independent of file layout.
inline std::string family_fingerprint(const AffineFamily& f) {
  Fnv1a h;
  h.update_value(f.dimension());
  h.update_value(f.term_count());
  for (const auto& t : f.terms()) {
    for (const auto v : t.row_ptr()) h.update_value(v);
    for (const auto v : t.col_idx()) h.update_value(v);
    for (const auto v : t.values()) h.update_value(v);
  }
  for (const DenseBlock* m : {&f.rhs(), &f.output()}) {
    h.update_value(m->rows());
    h.update_value(m->cols());
    for (Index k = 0; k < m->size(); ++k) h.update_value(m->data()[k]);
  }
  return hex(h.value());
}

inline Json complex_to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

/// Accepts [re, im] pairs or plain numbers.
inline Complex complex_from_json(const Json& j) {
  if (j.is_number()) return Complex(j.get<double>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw FormatError("expected a number or a [re, im] pair, got " + j.dump());
}

inline Json point_to_json(const ExpansionPoint& p) {
  Json values = Json::array();
  for (const auto& v : p.values) values.push_back(complex_to_json(v));
  return Json{{"label", p.label}, {"values", values}};
}

inline ExpansionPoint point_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("values") || !j["values"].is_array())
    throw FormatError("point needs a 'values' array");
  ExpansionPoint p;
  p.label = j.value("label", std::string{});
  for (const auto& v : j["values"]) p.values.push_back(complex_from_json(v));
  return p;
}

inline Json points_to_json(const std::vector<ExpansionPoint>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(point_to_json(p));
  return a;
}

inline std::vector<ExpansionPoint> points_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("points must be an array");
  std::vector<ExpansionPoint> pts;
  for (const auto& p : j) pts.push_back(point_from_json(p));
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (pts[k].label.empty()) pts[k].label = "point" + std::to_string(k + 1);
  return pts;
}

inline Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed for " + path.string());
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace pmor::io
