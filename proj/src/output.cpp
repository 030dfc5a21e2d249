/// @file output.cpp
/// @brief CSV writers with pinned headers and locale-independent formatting.

#include "kgflow/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace kgflow {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

void ensure_directory(const std::string& dir) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
}

namespace {

std::ofstream open_out(const std::string& path) {
  // binary mode: LF endings on every platform
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

}  // namespace

void write_series_csv(const std::string& path, const std::vector<SeriesRow>& series) {
  std::ofstream os = open_out(path);
  os << "t,max_abs_ut,energy,max_abs_grad,u_min,u_max\n";
  for (const SeriesRow& r : series) {
    os << format_number(r.t) << ',' << format_number(r.max_ut) << ','
       << format_number(r.energy) << ',' << format_number(r.max_grad) << ','
       << format_number(r.u_min) << ',' << format_number(r.u_max) << '\n';
  }
}

void write_field_csv(const std::string& path, const Grid& grid,
                     const std::vector<double>& u) {
  std::ofstream os = open_out(path);
  os << (grid.dim == 1 ? "x1,u\n" : "x1,x2,u\n");
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      const Vec x = grid.coord(i, j);
      os << format_number(x[0]);
      if (grid.dim == 2) os << ',' << format_number(x[1]);
      os << ',' << format_number(u[static_cast<std::size_t>(grid.id(i, j))]) << '\n';
    }
  }
}

void write_speed_csv(const std::string& path, double C, double boundary_flux,
                     double curvature_flux, double inverse_W_volume,
                     double flux_residual) {
  std::ofstream os = open_out(path);
  os << "C,boundary_flux,curvature_flux,inverse_W_volume,flux_residual\n";
  os << format_number(C) << ',' << format_number(boundary_flux) << ','
     << format_number(curvature_flux) << ',' << format_number(inverse_W_volume)
     << ',' << format_number(flux_residual) << '\n';
}

void write_verify_csv(const std::string& path, const std::vector<CheckRow>& checks) {
  std::ofstream os = open_out(path);
  os << "name,value,threshold,pass,gated\n";
  for (const CheckRow& c : checks) {
    os << c.name << ',' << format_number(c.value) << ',' << format_number(c.threshold)
       << ',' << (c.pass ? 1 : 0) << ',' << (c.gated ? 1 : 0) << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os = open_out(path);
  os << text;
  if (text.empty() || text.back() != '\n') os << '\n';
}

std::string snapshot_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snapshot_%04d.csv", index);
  return std::string(buf);
}

}  // namespace kgflow
