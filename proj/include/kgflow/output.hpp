/// @file output.hpp
/// @brief Deterministic CSV emitters for run artifacts.
///
/// Every writer produces byte-identical output for identical inputs: numbers
/// are printed with %.17g (round-trip exact for doubles), lines end with LF,
/// and no timestamps or environment data are embedded.
#pragma once

#include <string>
#include <vector>

#include "kgflow/flow.hpp"
#include "kgflow/grid.hpp"

namespace kgflow {

/// %.17g rendering of a double (shortest round-trip-exact form g gives).
std::string format_number(double v);

/// One row of the verification battery.
struct CheckRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  bool gated = true;  ///< counted toward the overall verdict when true
};

/// Creates @p dir (and parents) if missing.
void ensure_directory(const std::string& dir);

/// Time-series table. Header is fixed:
/// t,max_abs_ut,energy,max_abs_grad,u_min,u_max
void write_series_csv(const std::string& path, const std::vector<SeriesRow>& series);

/// Nodal field table: x1[,x2],u in grid id order.
void write_field_csv(const std::string& path, const Grid& grid,
                     const std::vector<double>& u);

/// Single-row translation-speed summary:
/// C,boundary_flux,curvature_flux,inverse_W_volume,flux_residual
void write_speed_csv(const std::string& path, double C, double boundary_flux,
                     double curvature_flux, double inverse_W_volume,
                     double flux_residual);

/// Verification table: name,value,threshold,pass,gated
void write_verify_csv(const std::string& path, const std::vector<CheckRow>& checks);

/// Writes @p text followed by a single trailing LF unless it already ends
/// with one.
void write_text_file(const std::string& path, const std::string& text);

/// Zero-padded snapshot filename, e.g. snapshot_0003.csv.
std::string snapshot_name(int index);

}  // namespace kgflow
