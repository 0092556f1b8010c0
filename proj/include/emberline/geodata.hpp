// Raster ingestion and environment construction: ESRI ASCII grid parsing and
// writing, DEM -> 8-direction slope, landcover -> fuel modifiers via a fuel
// table, and reproducible synthetic environments.
//
// Rasters keep their values in file order (row 0 = first, i.e. northmost,
// data line); at_model() converts to the simulation convention where row 0 is
// the southmost row. All GridState layers built here are in model order.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "emberline/grid.hpp"

namespace emberline {

struct Raster {
  int nrows = 0;
  int ncols = 0;
  double xllcorner = 0.0;
  double yllcorner = 0.0;
  double cellsize = 1.0;
  bool has_nodata = false;
  double nodata = -9999.0;
  Grid<double> values;           // file order: row 0 is the top (north) line
  Grid<std::uint8_t> nodata_flag;  // 1 where the cell held the NODATA sentinel

  double at_file(int file_row, int col) const { return values(file_row, col); }
  double at_model(int model_row, int col) const { return values(nrows - 1 - model_row, col); }
  bool nodata_at_model(int model_row, int col) const {
    return nodata_flag(nrows - 1 - model_row, col) != 0;
  }
};

// Parses the ESRI ASCII grid format: header lines ncols, nrows, xllcorner,
// yllcorner, cellsize, optionally NODATA_value (case-insensitive keys, this
// order), then nrows lines of ncols whitespace-separated values, top row
// first. Throws FileError on malformed input.
Raster parse_ascii_grid(std::istream& in);
Raster parse_ascii_grid_file(const std::string& path);

void write_ascii_grid(const Raster& raster, std::ostream& out);
void write_ascii_grid_file(const Raster& raster, const std::string& path);

// Shortest decimal string that parses back to exactly the same double.
std::string format_double_exact(double v);

// Builds a Raster (file order) from model-order values.
Raster raster_from_model(const Grid<double>& model_values, double cellsize = 30.0,
                         double xllcorner = 0.0, double yllcorner = 0.0);

// Model-order copy of a raster's values (nodata cells keep the sentinel).
Grid<double> model_grid(const Raster& raster);

// S(u, d) = atan((elev(u+d) - elev(u)) / (cellsize * |d|)), radians. Cells out
// of bounds get slope 0; nodata cells get slope 0 in every direction, both
// from and toward them.
SlopeField slope_from_dem(const Raster& dem);

// Landcover class code -> fuel modifier pair, parsed from a text file with
// lines `code mu_veg mu_den` (a line `default mu_veg mu_den` supplies the
// fallback for unknown codes); `#` starts a comment.
class FuelTable {
 public:
  struct Entry {
    double veg = 0.0;
    double den = 0.0;
  };

  void set(int code, Entry e);
  void set_fallback(Entry e);
  // Throws FileError naming the code when it is unmapped and no fallback exists.
  Entry lookup(int code) const;

 private:
  std::map<int, Entry> entries_;
  std::optional<Entry> fallback_;
};

FuelTable parse_fuel_table(std::istream& in);
FuelTable parse_fuel_table_file(const std::string& path);

// The shipped mapping for the 11 WorldCover class codes (heuristic values,
// mirrored in data/worldcover_fuel.txt).
FuelTable default_worldcover_table();

// Per-cell table lookup; raster values must be integers. Nodata cells become
// (-1, -1), i.e. unburnable.
FuelField fuel_from_landcover(const Raster& landcover, const FuelTable& table);

// Assembles a GridState from a DEM and a landcover raster (shared dims and
// cellsize required), uniform wind, and an all-unburned fire layer. DEM nodata
// cells force fuel (-1, -1) in addition to zero slope.
GridState grid_from_rasters(const Raster& dem, const Raster& landcover, const FuelTable& table,
                            double wind_speed, double wind_direction);

struct SyntheticOptions {
  double forest_density = 0.7;      // probability a cell carries burnable fuel
  double elevation_roughness = 1.0; // 0 = flat terrain
  double wind_speed = 1.0;
  double wind_direction = 0.0;      // radians, from east, counter-clockwise
  double cellsize = 30.0;           // meters, for the slope computation
};

// Reproducible random environment: smoothed-noise elevation, thresholded-noise
// fuel, spatially uniform wind, all cells unburned.
GridState synthetic_environment(int height, int width, std::uint64_t seed,
                                const SyntheticOptions& options = {});

}  // namespace emberline
