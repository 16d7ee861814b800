#include "cflow/field_io.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace cflow {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'C', 'F', 'L', 'O', 'W', 'F', 'L', 'D'};

static_assert(sizeof(double) == 8, "field container assumes 64-bit doubles");

void write_u64_le(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64_le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

bool host_is_little_endian() {
  const std::uint16_t x = 1;
  return *reinterpret_cast<const unsigned char*>(&x) == 1;
}

} // namespace

void write_field(const std::string& path, const Field& f) {
  if (!host_is_little_endian()) throw IoError("field container requires a little-endian host");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  const Grid4& g = f.grid();
  json header = {
      {"dims", g.dims},
      {"lengths", g.lengths},
      {"rank", f.rank().kind_name()},
      {"target_dim", f.rank().dim},
      {"components", f.components()},
  };
  const std::string htext = header.dump();
  out.write(kMagic, 8);
  write_u64_le(out, htext.size());
  out.write(htext.data(), std::streamsize(htext.size()));
  out.write(reinterpret_cast<const char*>(f.data()), std::streamsize(f.size() * 8));
  if (!out) throw IoError("write failed for '" + path + "'");
}

Field read_field(const std::string& path) {
  if (!host_is_little_endian()) throw IoError("field container requires a little-endian host");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError("'" + path + "' is not a field container (bad magic)");
  const std::uint64_t hlen = read_u64_le(in);
  std::string htext(hlen, '\0');
  in.read(htext.data(), std::streamsize(hlen));
  if (!in) throw IoError("truncated header in '" + path + "'");

  json header;
  try {
    header = json::parse(htext);
  } catch (const json::parse_error& e) {
    throw IoError("bad container header in '" + path + "': " + e.what());
  }
  std::array<int, 4> dims = header.at("dims").get<std::array<int, 4>>();
  std::array<double, 4> lengths = header.at("lengths").get<std::array<double, 4>>();
  Rank rank = Rank::from_kind_name(header.at("rank").get<std::string>(),
                                   header.at("target_dim").get<int>());
  Grid4 grid(dims, lengths);
  Field f(grid, rank);
  if (header.at("components").get<int>() != f.components())
    throw IoError("component count mismatch in '" + path + "'");
  in.read(reinterpret_cast<char*>(f.data()), std::streamsize(f.size() * 8));
  if (!in) throw IoError("truncated payload in '" + path + "'");
  return f;
}

void write_map(const std::string& path, const MapField& u) {
  write_field(path, u.disp());
  json meta;
  meta["linear_part"] = json::array();
  for (const auto& row : u.linear_part()) meta["linear_part"].push_back(row);
  const SpaceForm& t = u.target();
  if (t.chart() == SpaceForm::Chart::FlatTorus)
    meta["target"] = {{"kind", "torus"}, {"dim", t.dim()}, {"K", 0.0}, {"periods", t.periods()}};
  else
    meta["target"] = {{"kind", "ball"}, {"dim", t.dim()}, {"K", t.curvature()}};
  std::ofstream out(path + ".meta.json", std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + ".meta.json' for writing");
  out << meta.dump(2) << "\n";
}

MapField read_map(const std::string& path) {
  Field disp = read_field(path);
  std::ifstream in(path + ".meta.json");
  if (!in) throw IoError("cannot open '" + path + ".meta.json'");
  json meta;
  try {
    in >> meta;
  } catch (const json::parse_error& e) {
    throw IoError("bad map sidecar: " + std::string(e.what()));
  }
  LinearPart A;
  for (const auto& row : meta.at("linear_part"))
    A.push_back(row.get<std::array<int, 4>>());
  const auto& tj = meta.at("target");
  SpaceForm target = tj.at("kind").get<std::string>() == "torus"
                         ? SpaceForm::flat_torus(tj.at("dim").get<int>(),
                                                 tj.at("periods").get<std::vector<double>>())
                         : SpaceForm::hyperbolic_ball(tj.at("dim").get<int>(),
                                                      tj.at("K").get<double>());
  return MapField(disp.grid(), std::move(target), std::move(A), std::move(disp));
}

} // namespace cflow
