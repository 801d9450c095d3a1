#pragma once

#include "leray_lab/field.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace leray_lab {

/// Missing, truncated or inconsistent trajectory file.
class FormatError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct Snapshot {
  double time = 0.0;
  Field u;  // spectral
  Field q;  // spectral Q = P[(u . grad) u]
};

struct TrajectoryStore {
  Grid grid;
  double nu = 0.0;
  std::uint64_t seed = 0;
  std::vector<Snapshot> snapshots;
};

inline constexpr char kTrajectoryMagic[8] = {'L', 'R', 'Y', 'T', 'R', 'A', 'J', '1'};

namespace detail {

inline std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), 8);
}

inline void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }

inline std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 8)) throw FormatError("trajectory file truncated");
  return to_little(v);
}

inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace detail

/// Layout: 8-byte magic, u64 LE header length, JSON header, then for each
/// snapshot, u then q, component-major, half-spectrum row-major (re, im)
/// float64 little-endian pairs.
inline void write_trajectory(const std::string& path, const TrajectoryStore& traj) {
  const Grid& g = traj.grid;
  nlohmann::json h;
  h["format"] = "leray_lab.trajectory";
  h["version"] = 1;
  h["grid"] = {{"dim", g.dim()},
               {"resolution", g.resolution()},
               {"box_length", g.box_length()},
               {"dealias_fraction", g.dealias_fraction()}};
  h["nu"] = traj.nu;
  h["seed"] = traj.seed;
  std::vector<double> times;
  for (const auto& s : traj.snapshots) times.push_back(s.time);
  h["times"] = times;
  h["components"] = g.dim();
  h["modes"] = g.mode_count();
  h["layout"] = "snapshot-major; u then q; component-major; half-spectrum row-major; complex128 LE";
  const std::string header = h.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open trajectory file for writing: " + path);
  os.write(kTrajectoryMagic, 8);
  detail::put_u64(os, header.size());
  os.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const auto& s : traj.snapshots) {
    for (const Field* f : {&s.u, &s.q}) {
      if (!(f->grid() == g) || f->components() != static_cast<std::size_t>(g.dim()))
        throw FormatError("snapshot does not match the trajectory grid");
      for (std::size_t c = 0; c < f->components(); ++c)
        for (const Complex& z : f->coefficients(c)) {
          detail::put_f64(os, z.real());
          detail::put_f64(os, z.imag());
        }
    }
  }
  if (!os) throw FormatError("failed writing trajectory file: " + path);
}

inline TrajectoryStore read_trajectory(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open trajectory file: " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kTrajectoryMagic, 8) != 0)
    throw FormatError("not a trajectory file: " + path);
  const std::uint64_t len = detail::get_u64(is);
  if (len > (1u << 26)) throw FormatError("implausible trajectory header length");
  std::string header(len, '\0');
  if (!is.read(header.data(), static_cast<std::streamsize>(len)))
    throw FormatError("trajectory header truncated");
  TrajectoryStore traj;
  std::vector<double> times;
  try {
    const auto h = nlohmann::json::parse(header);
    if (h.at("format") != "leray_lab.trajectory" || h.at("version") != 1)
      throw FormatError("unsupported trajectory format");
    const auto& gj = h.at("grid");
    traj.grid = make_grid(gj.at("dim").get<int>(), gj.at("resolution").get<int>(),
                          gj.at("box_length").get<double>(), gj.at("dealias_fraction").get<double>());
    traj.nu = h.at("nu").get<double>();
    traj.seed = h.at("seed").get<std::uint64_t>();
    times = h.at("times").get<std::vector<double>>();
    if (h.at("modes").get<std::size_t>() != traj.grid.mode_count() ||
        h.at("components").get<int>() != traj.grid.dim())
      throw FormatError("trajectory header sizes disagree with its grid");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt trajectory header: ") + e.what());
  } catch (const FormatError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("corrupt trajectory header: ") + e.what());
  }
  const Grid& g = traj.grid;
  for (double t : times) {
    Snapshot s;
    s.time = t;
    for (Field* f : {&s.u, &s.q}) {
      std::vector<ComplexArray> coef(g.dim(), ComplexArray(g.mode_count()));
      for (auto& c : coef)
        for (auto& z : c) {
          const double re = detail::get_f64(is);
          z = Complex(re, detail::get_f64(is));
        }
      *f = Field::from_coefficients(g, std::move(coef));
    }
    traj.snapshots.push_back(std::move(s));
  }
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in trajectory file");
  return traj;
}

/// Velocity of the first snapshot in a trajectory file, for restarts.
inline Field read_initial_field(const std::string& path, const Grid& expected) {
  const TrajectoryStore traj = read_trajectory(path);
  if (!(traj.grid == expected)) throw InvalidArgument("initial-condition file grid differs from config grid");
  if (traj.snapshots.empty()) throw FormatError("initial-condition file holds no snapshots");
  return traj.snapshots.front().u;
}

}  // namespace leray_lab
