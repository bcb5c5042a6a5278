#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "puckplan/common.hpp"
#include "puckplan/table.hpp"

namespace puckplan::detail {

using nlohmann::json;

/// Reads keys of one JSON object and rejects the ones nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(ErrorCode::Format, path_ + ": expected an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  bool opt(const std::string& key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return false;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Format, key_path(key) + ": " + e.what());
    }
    return true;
  }

  template <typename T>
  T req(const std::string& key) {
    T out{};
    if (!opt(key, out)) throw Error(ErrorCode::Format, key_path(key) + ": missing");
    return out;
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& req_child(const std::string& key) {
    const json* c = child(key);
    if (!c) throw Error(ErrorCode::Format, key_path(key) + ": missing");
    return *c;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw Error(ErrorCode::Format, key_path(it.key()) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Derived>
json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Derived>
json vector_to_json(const Eigen::MatrixBase<Derived>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline MatX matrix_from_json(const json& j, const std::string& path, Eigen::Index rows = -1, Eigen::Index cols = -1) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) throw Error(ErrorCode::Format, path + ": expected a 2-D array");
  const auto r = static_cast<Eigen::Index>(j.size());
  const auto c = static_cast<Eigen::Index>(j.front().size());
  if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols)) {
    throw Error(ErrorCode::Format, path + ": wrong matrix shape");
  }
  MatX m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) throw Error(ErrorCode::Format, path + ": ragged matrix");
    for (Eigen::Index k = 0; k < c; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw Error(ErrorCode::Format, path + ": non-numeric entry");
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

inline VecX vector_from_json(const json& j, const std::string& path, Eigen::Index size = -1) {
  if (!j.is_array()) throw Error(ErrorCode::Format, path + ": expected an array");
  if (size >= 0 && static_cast<Eigen::Index>(j.size()) != size) throw Error(ErrorCode::Format, path + ": wrong length");
  VecX v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::Format, path + ": non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline json table_to_json(const TableGeometry& t) {
  return {{"length", t.length},
          {"width", t.width},
          {"goal_width", t.goal_width},
          {"puck_radius", t.puck_radius},
          {"mallet_radius", t.mallet_radius}};
}

inline TableGeometry table_from_json(const json& j, const std::string& path) {
  TableGeometry t;
  ObjectReader r(j, path);
  r.opt("length", t.length);
  r.opt("width", t.width);
  r.opt("goal_width", t.goal_width);
  r.opt("puck_radius", t.puck_radius);
  r.opt("mallet_radius", t.mallet_radius);
  r.finish();
  return t;
}

std::string sha256_hex_impl(const std::string& bytes);

}  // namespace puckplan::detail
