#include "conewave/serialize.hpp"

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "conewave/error.hpp"

namespace conewave {

namespace {

using nlohmann::json;

constexpr char kMagic[] = "CWDUMP1\n";

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json axes_json(const std::vector<Axis>& axes) {
  json a = json::array();
  for (const Axis& ax : axes) a.push_back({{"count", ax.count}, {"half_width", ax.half_width}});
  return a;
}

std::vector<Axis> axes_from(const json& a) {
  std::vector<Axis> out;
  for (const json& e : a) out.push_back(Axis{e.at("count").get<int>(), e.at("half_width").get<double>()});
  return out;
}

json grid_obj(const Grid& g) { return {{"e_axes", axes_json(g.e_axes)}, {"f_axes", axes_json(g.f_axes)}}; }

json symbol_axes_obj(const ScalarSymbol& s) {
  json a = json::array();
  for (const SymbolAxis& ax : s.axes) a.push_back({{"start", ax.start}, {"step", ax.step}, {"count", ax.count}});
  return a;
}

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw IoError("truncated dump");
  return v;
}

void put_values(std::ostream& os, const std::vector<cplx>& values) {
  put<std::uint64_t>(os, values.size());
  os.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(cplx)));
  if (!os) throw IoError("dump write failed");
}

std::vector<cplx> get_values(std::istream& is, std::size_t expected) {
  const auto n = get<std::uint64_t>(is);
  if (n != expected) throw IoError("dump value count does not match its shape header");
  std::vector<cplx> v(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
  if (!is) throw IoError("truncated dump");
  return v;
}

void read_header(std::istream& is, char kind) {
  char magic[sizeof kMagic - 1];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) throw IoError("not a CWDUMP1 stream");
  if (get<char>(is) != kind) throw IoError("dump holds a different object kind");
}

}  // namespace

std::string to_json(const ConeDescriptor& cone) {
  json j{{"kind", to_string(cone.kind)},
         {"rank", cone.rank},
         {"dims", cone.dim},
         {"d", vec_json(cone.d.s)},
         {"m_vec", vec_json(cone.m_vec)},
         {"m_dual_vec", vec_json(cone.m_dual_vec)},
         {"e_primal", vec_json(cone.e_primal)},
         {"e_dual", vec_json(cone.e_dual)}};
  return j.dump(2);
}

std::string to_json(const SiegelData& siegel) {
  json phi = json::array();
  for (int a = 0; a < siegel.n; ++a) {
    json row = json::array();
    for (int b = 0; b < siegel.n; ++b) {
      json entry = json::array();
      const CVec& v = siegel.phi[a * siegel.n + b];
      for (int k = 0; k < v.size(); ++k) entry.push_back(cplx_json(v[k]));
      row.push_back(entry);
    }
    phi.push_back(row);
  }
  json j{{"n", siegel.n},
         {"m", siegel.m},
         {"cone", {{"kind", to_string(siegel.cone.kind)},
                   {"rank_or_dim", siegel.cone.kind == ConeKind::product ? siegel.cone.rank : siegel.cone.dim}}},
         {"phi", phi},
         {"b", vec_json(siegel.b.s)}};
  return j.dump(2);
}

SiegelData siegel_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const ConeDescriptor cone = make_cone(cone_kind_from_string(j.at("cone").at("kind").get<std::string>()),
                                          j.at("cone").at("rank_or_dim").get<int>());
    const int n = j.at("n").get<int>();
    if (n == 0) return abelian_siegel(cone);
    std::vector<CVec> phi;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const json& entry = j.at("phi").at(a).at(b);
        CVec v(cone.dim);
        for (int k = 0; k < cone.dim; ++k) v[k] = cplx(entry.at(k).at(0).get<double>(), entry.at(k).at(1).get<double>());
        phi.push_back(v);
      }
    return make_siegel(cone, n, phi);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("siegel JSON: ") + e.what());
  }
}

std::string to_json(const Grid& grid) { return grid_obj(grid).dump(2); }

Grid grid_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    return Grid(axes_from(j.at("e_axes")), axes_from(j.at("f_axes")));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid JSON: ") + e.what());
  }
}

std::string to_json(const LatticeSpec& spec, const LatticeReport* report) {
  json pts = json::array();
  for (const Vec& p : spec.points) pts.push_back(vec_json(p));
  const Region& r = spec.region;
  json region{{"kind", r.kind == Region::Kind::annulus ? "annulus" : "log_box"}};
  if (r.kind == Region::Kind::annulus) {
    region["scale_lo"] = r.scale_lo;
    region["scale_hi"] = r.scale_hi;
    region["angle"] = r.angle;
  } else {
    region["lo"] = vec_json(r.lo);
    region["hi"] = vec_json(r.hi);
  }
  json j{{"delta", spec.delta}, {"R", spec.R}, {"points", pts}, {"region", region}};
  if (report)
    j["report"] = {{"point_count", report->point_count},
                   {"sample_count", report->sample_count},
                   {"separation_violations", report->separation_violations},
                   {"cover_violations", report->cover_violations},
                   {"max_overlap", report->max_overlap},
                   {"min_separation", report->min_separation},
                   {"max_cover_distance", report->max_cover_distance},
                   {"passed", report->passed}};
  return j.dump(2);
}

std::string to_json(const NormReport& report) {
  json per = json::array();
  for (const IndexTerm& t : report.per_index)
    per.push_back({{"k", t.k}, {"lambda_k", vec_json(t.lambda_k)}, {"weight", t.weight}, {"lp", t.lp}});
  auto num = [](double v) -> json { return std::isinf(v) ? json("inf") : json(v); };
  json j{{"params", {{"s", vec_json(report.params.s.s)}, {"p", num(report.params.p)}, {"q", num(report.params.q)}}},
         {"per_index", per},
         {"total", report.total}};
  return j.dump(2);
}

void write_dump(std::ostream& os, const GridFunction& u) {
  os.write(kMagic, sizeof kMagic - 1);
  put<char>(os, 'G');
  put<std::uint32_t>(os, static_cast<std::uint32_t>(u.grid.e_axes.size()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(u.grid.f_axes.size()));
  for (const auto* axes : {&u.grid.e_axes, &u.grid.f_axes})
    for (const Axis& a : *axes) {
      put<std::int32_t>(os, a.count);
      put<double>(os, a.half_width);
    }
  put_values(os, u.values);
}

void write_dump(std::ostream& os, const ScalarSymbol& sigma) {
  os.write(kMagic, sizeof kMagic - 1);
  put<char>(os, 'S');
  put<std::uint32_t>(os, static_cast<std::uint32_t>(sigma.axes.size()));
  for (const SymbolAxis& a : sigma.axes) {
    put<double>(os, a.start);
    put<double>(os, a.step);
    put<std::int32_t>(os, a.count);
  }
  put_values(os, sigma.values);
}

GridFunction read_grid_dump(std::istream& is) {
  read_header(is, 'G');
  const auto ne = get<std::uint32_t>(is);
  const auto nf = get<std::uint32_t>(is);
  std::vector<Axis> e(ne), f(nf);
  for (auto* axes : {&e, &f})
    for (Axis& a : *axes) {
      a.count = get<std::int32_t>(is);
      a.half_width = get<double>(is);
    }
  Grid grid(e, f);
  return GridFunction(grid, get_values(is, grid.size()));
}

ScalarSymbol read_symbol_dump(std::istream& is) {
  read_header(is, 'S');
  ScalarSymbol s;
  s.axes.resize(get<std::uint32_t>(is));
  for (SymbolAxis& a : s.axes) {
    a.start = get<double>(is);
    a.step = get<double>(is);
    a.count = get<std::int32_t>(is);
  }
  s.values = get_values(is, s.size());
  return s;
}

std::string dump_json(const GridFunction& u) {
  json values = json::array();
  for (const cplx& v : u.values) values.push_back(cplx_json(v));
  return json{{"format", "CWDUMP1"}, {"kind", "grid_function"}, {"grid", grid_obj(u.grid)}, {"values", values}}.dump();
}

std::string dump_json(const ScalarSymbol& sigma) {
  json values = json::array();
  for (const cplx& v : sigma.values) values.push_back(cplx_json(v));
  return json{{"format", "CWDUMP1"}, {"kind", "symbol"}, {"axes", symbol_axes_obj(sigma)}, {"values", values}}.dump();
}

}  // namespace conewave
