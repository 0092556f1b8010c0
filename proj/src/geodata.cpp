#include "emberline/geodata.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include "emberline/errors.hpp"
#include "emberline/rng.hpp"

namespace emberline {

namespace {

std::string lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_double_token(const std::string& t, const std::string& what) {
  double v = 0.0;
  const char* b = t.data();
  const char* e = b + t.size();
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) {
    throw FileError("ASCII grid: non-numeric " + what + " '" + t + "'");
  }
  if (!std::isfinite(v)) {
    throw FileError("ASCII grid: non-finite " + what + " '" + t + "'");
  }
  return v;
}

int parse_dim_token(const std::string& t, const std::string& what) {
  int v = 0;
  const char* b = t.data();
  const char* e = b + t.size();
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || v < 1) {
    throw FileError("ASCII grid: " + what + " must be a positive integer, got '" + t + "'");
  }
  return v;
}

std::string join_tokens(const std::vector<std::string>& toks) {
  std::string out;
  for (const auto& t : toks) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

Raster parse_ascii_grid(std::istream& in) {
  auto read_line = [&in]() -> std::vector<std::string> {
    std::string line;
    while (std::getline(in, line)) {
      auto toks = tokens_of(line);
      if (!toks.empty()) return toks;
    }
    return {};
  };

  auto header_value = [&read_line](const char* key) {
    auto toks = read_line();
    if (toks.empty()) throw FileError(std::string("ASCII grid: missing header line '") + key + "'");
    if (toks.size() != 2 || lower(toks[0]) != key) {
      throw FileError(std::string("ASCII grid: expected header '") + key + "', got '" +
                      join_tokens(toks) + "'");
    }
    return toks[1];
  };

  Raster r;
  r.ncols = parse_dim_token(header_value("ncols"), "ncols");
  r.nrows = parse_dim_token(header_value("nrows"), "nrows");
  r.xllcorner = parse_double_token(header_value("xllcorner"), "xllcorner");
  r.yllcorner = parse_double_token(header_value("yllcorner"), "yllcorner");
  r.cellsize = parse_double_token(header_value("cellsize"), "cellsize");
  if (r.cellsize <= 0.0) throw FileError("ASCII grid: cellsize must be > 0");

  // The sixth line is either the optional NODATA_value header or data row 0.
  std::vector<std::string> buffered = read_line();
  if (buffered.size() == 2 && lower(buffered[0]) == "nodata_value") {
    r.has_nodata = true;
    r.nodata = parse_double_token(buffered[1], "NODATA_value");
    buffered.clear();
  }

  r.values = Grid<double>(r.nrows, r.ncols);
  r.nodata_flag = Grid<std::uint8_t>(r.nrows, r.ncols);
  for (int row = 0; row < r.nrows; ++row) {
    std::vector<std::string> toks = buffered.empty() ? read_line() : std::move(buffered);
    buffered.clear();
    if (toks.empty()) {
      throw FileError("ASCII grid: expected " + std::to_string(r.nrows) + " data rows, found " +
                      std::to_string(row));
    }
    if (static_cast<int>(toks.size()) != r.ncols) {
      throw FileError("ASCII grid: data row " + std::to_string(row + 1) + " has " +
                      std::to_string(toks.size()) + " values, expected ncols=" +
                      std::to_string(r.ncols));
    }
    for (int col = 0; col < r.ncols; ++col) {
      const double v = parse_double_token(toks[col], "cell value");
      r.values(row, col) = v;
      r.nodata_flag(row, col) = (r.has_nodata && v == r.nodata) ? 1 : 0;
    }
  }
  if (!read_line().empty()) throw FileError("ASCII grid: trailing content after data rows");
  return r;
}

Raster parse_ascii_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open raster file: " + path);
  try {
    return parse_ascii_grid(in);
  } catch (const FileError& e) {
    throw FileError(path + ": " + e.what());
  }
}

std::string format_double_exact(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("format_double_exact: non-finite value");
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    const auto [p, ec] = std::from_chars(buf, buf + std::strlen(buf), back);
    if (ec == std::errc() && p == buf + std::strlen(buf) &&
        std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v)) {
      break;
    }
  }
  return buf;
}

void write_ascii_grid(const Raster& raster, std::ostream& out) {
  out << "ncols " << raster.ncols << '\n';
  out << "nrows " << raster.nrows << '\n';
  out << "xllcorner " << format_double_exact(raster.xllcorner) << '\n';
  out << "yllcorner " << format_double_exact(raster.yllcorner) << '\n';
  out << "cellsize " << format_double_exact(raster.cellsize) << '\n';
  if (raster.has_nodata) out << "NODATA_value " << format_double_exact(raster.nodata) << '\n';
  for (int row = 0; row < raster.nrows; ++row) {
    for (int col = 0; col < raster.ncols; ++col) {
      if (col > 0) out << ' ';
      out << format_double_exact(raster.values(row, col));
    }
    out << '\n';
  }
}

void write_ascii_grid_file(const Raster& raster, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open file for writing: " + path);
  write_ascii_grid(raster, out);
  out.flush();
  if (!out) throw FileError("failed writing raster file: " + path);
}

Raster raster_from_model(const Grid<double>& model_values, double cellsize, double xllcorner,
                         double yllcorner) {
  if (cellsize <= 0.0 || !std::isfinite(cellsize)) {
    throw std::invalid_argument("raster_from_model: cellsize must be positive");
  }
  Raster r;
  r.nrows = model_values.height();
  r.ncols = model_values.width();
  r.cellsize = cellsize;
  r.xllcorner = xllcorner;
  r.yllcorner = yllcorner;
  r.values = Grid<double>(r.nrows, r.ncols);
  r.nodata_flag = Grid<std::uint8_t>(r.nrows, r.ncols);
  for (int mr = 0; mr < r.nrows; ++mr) {
    for (int c = 0; c < r.ncols; ++c) {
      r.values(r.nrows - 1 - mr, c) = model_values(mr, c);
    }
  }
  return r;
}

Grid<double> model_grid(const Raster& raster) {
  Grid<double> g(raster.nrows, raster.ncols);
  for (int mr = 0; mr < raster.nrows; ++mr) {
    for (int c = 0; c < raster.ncols; ++c) g(mr, c) = raster.at_model(mr, c);
  }
  return g;
}

SlopeField slope_from_dem(const Raster& dem) {
  const int h = dem.nrows;
  const int w = dem.ncols;
  SlopeField slope(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (dem.nodata_at_model(r, c)) continue;  // slope 0 in all directions
      for (int k = 0; k < 8; ++k) {
        const NeighborOffset d = kNeighborOffsets[k];
        const int nr = r + d.dy;
        const int nc = c + d.dx;
        if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
        if (dem.nodata_at_model(nr, nc)) continue;
        const double dist =
            dem.cellsize * ((d.dx != 0 && d.dy != 0) ? std::numbers::sqrt2 : 1.0);
        slope.set_toward(r, c, k, std::atan((dem.at_model(nr, nc) - dem.at_model(r, c)) / dist));
      }
    }
  }
  return slope;
}

void FuelTable::set(int code, Entry e) {
  if (!std::isfinite(e.veg) || !std::isfinite(e.den) || e.veg < -1.0 || e.veg > 1.0 ||
      e.den < -1.0 || e.den > 1.0) {
    throw std::invalid_argument("FuelTable: modifiers for code " + std::to_string(code) +
                                " must lie in [-1, 1]");
  }
  entries_[code] = e;
}

void FuelTable::set_fallback(Entry e) {
  if (!std::isfinite(e.veg) || !std::isfinite(e.den) || e.veg < -1.0 || e.veg > 1.0 ||
      e.den < -1.0 || e.den > 1.0) {
    throw std::invalid_argument("FuelTable: fallback modifiers must lie in [-1, 1]");
  }
  fallback_ = e;
}

FuelTable::Entry FuelTable::lookup(int code) const {
  const auto it = entries_.find(code);
  if (it != entries_.end()) return it->second;
  if (fallback_.has_value()) return *fallback_;
  throw FileError("fuel table has no entry for landcover code " + std::to_string(code));
}

FuelTable parse_fuel_table(std::istream& in) {
  FuelTable table;
  std::string line;
  int line_no = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto toks = tokens_of(line);
    if (toks.empty()) continue;
    if (toks.size() != 3) {
      throw FileError("fuel table line " + std::to_string(line_no) +
                      ": expected `code mu_veg mu_den`, got '" + join_tokens(toks) + "'");
    }
    FuelTable::Entry e;
    try {
      e.veg = parse_double_token(toks[1], "mu_veg");
      e.den = parse_double_token(toks[2], "mu_den");
      if (lower(toks[0]) == "default") {
        table.set_fallback(e);
      } else {
        int code = 0;
        const char* b = toks[0].data();
        const char* end = b + toks[0].size();
        const auto [p, ec] = std::from_chars(b, end, code);
        if (ec != std::errc() || p != end) {
          throw FileError("non-integer landcover code '" + toks[0] + "'");
        }
        table.set(code, e);
      }
    } catch (const std::exception& ex) {
      throw FileError("fuel table line " + std::to_string(line_no) + ": " + ex.what());
    }
    any = true;
  }
  if (!any) throw FileError("fuel table: no entries found");
  return table;
}

FuelTable parse_fuel_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open fuel table file: " + path);
  try {
    return parse_fuel_table(in);
  } catch (const FileError& e) {
    throw FileError(path + ": " + e.what());
  }
}

FuelTable default_worldcover_table() {
  FuelTable t;
  t.set(10, {0.4, 0.3});     // tree cover
  t.set(20, {0.25, 0.1});    // shrubland
  t.set(30, {0.15, -0.1});   // grassland
  t.set(40, {0.0, -0.2});    // cropland
  t.set(50, {-0.8, -0.8});   // built-up
  t.set(60, {-0.7, -0.6});   // bare / sparse vegetation
  t.set(70, {-1.0, -1.0});   // snow and ice
  t.set(80, {-1.0, -1.0});   // permanent water bodies
  t.set(90, {-0.4, -0.3});   // herbaceous wetland
  t.set(95, {-0.2, -0.1});   // mangroves
  t.set(100, {-0.3, -0.4});  // moss and lichen
  return t;
}

namespace {

// Fuel layers from a landcover raster; dem_nodata (optional) forces (-1, -1).
FuelField fuel_layers(const Raster& landcover, const FuelTable& table, const Raster* dem) {
  const int h = landcover.nrows;
  const int w = landcover.ncols;
  Grid<double> veg(h, w);
  Grid<double> den(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (landcover.nodata_at_model(r, c) || (dem != nullptr && dem->nodata_at_model(r, c))) {
        veg(r, c) = -1.0;
        den(r, c) = -1.0;
        continue;
      }
      const double v = landcover.at_model(r, c);
      if (v != std::floor(v) || std::abs(v) > 2147483647.0) {
        throw FileError("landcover raster holds non-integer value " + format_double_exact(v));
      }
      const auto e = table.lookup(static_cast<int>(v));
      veg(r, c) = e.veg;
      den(r, c) = e.den;
    }
  }
  return FuelField(std::move(veg), std::move(den));
}

}  // namespace

FuelField fuel_from_landcover(const Raster& landcover, const FuelTable& table) {
  return fuel_layers(landcover, table, nullptr);
}

GridState grid_from_rasters(const Raster& dem, const Raster& landcover, const FuelTable& table,
                            double wind_speed, double wind_direction) {
  if (dem.nrows != landcover.nrows || dem.ncols != landcover.ncols) {
    throw FileError("DEM is " + std::to_string(dem.nrows) + "x" + std::to_string(dem.ncols) +
                    " but landcover is " + std::to_string(landcover.nrows) + "x" +
                    std::to_string(landcover.ncols) + "; rasters must share dimensions");
  }
  if (dem.cellsize != landcover.cellsize) {
    throw FileError("DEM cellsize " + format_double_exact(dem.cellsize) +
                    " differs from landcover cellsize " + format_double_exact(landcover.cellsize));
  }
  const int h = dem.nrows;
  const int w = dem.ncols;
  return GridState(FireLayer(h, w, FireState::Unburned),
                   WindField::uniform(h, w, wind_speed, wind_direction),
                   fuel_layers(landcover, table, &dem), slope_from_dem(dem));
}

namespace {

Grid<double> box_blur(const Grid<double>& g) {
  const int h = g.height();
  const int w = g.width();
  Grid<double> out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double sum = 0.0;
      int count = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          sum += g(rr, cc);
          ++count;
        }
      }
      out(r, c) = sum / count;
    }
  }
  return out;
}

}  // namespace

GridState synthetic_environment(int height, int width, std::uint64_t seed,
                                const SyntheticOptions& options) {
  if (height < 2 || width < 2) {
    throw std::invalid_argument("synthetic_environment: dimensions must be at least 2x2");
  }
  if (!(options.forest_density >= 0.0 && options.forest_density <= 1.0)) {
    throw std::invalid_argument("synthetic_environment: forest_density must lie in [0, 1]");
  }
  if (!(options.elevation_roughness >= 0.0) || !std::isfinite(options.elevation_roughness)) {
    throw std::invalid_argument("synthetic_environment: elevation_roughness must be >= 0");
  }
  const int n = height * width;

  // Elevation: white noise smoothed by two box passes, scaled so roughness 1
  // yields hillside-like slopes at the default cellsize.
  Grid<double> elev(height, width);
  const RngKey elevation_key{seed, 0, 0};
  for (int i = 0; i < n; ++i) {
    elev[i] = rng_uniform(elevation_key, static_cast<std::uint64_t>(i), kDrawSynthesis);
  }
  elev = box_blur(box_blur(elev));
  const double amplitude = options.elevation_roughness * 4.0 * options.cellsize;
  for (int i = 0; i < n; ++i) elev[i] *= amplitude;
  const SlopeField slope = slope_from_dem(raster_from_model(elev, options.cellsize));

  // Fuel: Bernoulli(forest_density) per cell; burnable cells draw positive
  // modifiers, the rest are inert.
  Grid<double> veg(height, width);
  Grid<double> den(height, width);
  const RngKey forest_key{seed, 1, 0};
  const RngKey veg_key{seed, 2, 0};
  const RngKey den_key{seed, 3, 0};
  for (int i = 0; i < n; ++i) {
    const auto cell = static_cast<std::uint64_t>(i);
    if (rng_uniform(forest_key, cell, kDrawSynthesis) < options.forest_density) {
      veg[i] = 0.1 + 0.6 * rng_uniform(veg_key, cell, kDrawSynthesis);
      den[i] = 0.1 + 0.5 * rng_uniform(den_key, cell, kDrawSynthesis);
    } else {
      veg[i] = -1.0;
      den[i] = -1.0;
    }
  }

  return GridState(FireLayer(height, width, FireState::Unburned),
                   WindField::uniform(height, width, options.wind_speed, options.wind_direction),
                   FuelField(std::move(veg), std::move(den)), slope);
}

}  // namespace emberline
