#pragma once

// Snapshot files: one JSON header line {version, d, n, L, N, t}, then N·n^d
// little-endian binary64 (re, im) pairs, components in order, x fastest.

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <string>

#include "hfc4/state.hpp"

namespace hfc4 {

inline constexpr int kSnapshotVersion = 1;

namespace detail {

inline void put_le(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b, 8);
}

inline double get_le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw Error("snapshot truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace detail

inline void write_snapshot(const std::string& path, const SystemState& s) {
  s.validate();
  const Grid& g = s.grid();
  nlohmann::json h{{"version", kSnapshotVersion}, {"d", g.dim()},         {"n", g.points()},
                   {"L", g.length()},             {"N", s.components()}, {"t", s.t}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write snapshot " + path);
  out << h.dump() << '\n';
  for (const auto& f : s.u)
    for (const auto& v : f.values()) {
      detail::put_le(out, v.real());
      detail::put_le(out, v.imag());
    }
  if (!out) throw Error("failed writing snapshot " + path);
}

inline SystemState read_snapshot(const std::string& path, std::size_t budget = kDefaultPointBudget) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read snapshot " + path);
  std::string line;
  std::getline(in, line);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad snapshot header in " + path + ": " + e.what());
  }
  if (h.value("version", 0) != kSnapshotVersion) throw Error("unsupported snapshot version in " + path);
  const Grid g(h.at("d").get<int>(), h.at("n").get<int>(), h.at("L").get<double>(), budget);
  SystemState s{h.at("t").get<double>(), {}};
  const int N = h.at("N").get<int>();
  for (int j = 0; j < N; ++j) {
    Field f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double re = detail::get_le(in);
      f[i] = complex(re, detail::get_le(in));
    }
    s.u.push_back(std::move(f));
  }
  s.validate();
  return s;
}

}  // namespace hfc4
