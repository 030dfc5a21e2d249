/// @file module.cpp
/// @brief Python module: the command driver plus config helpers.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kgflow/cli.hpp"
#include "kgflow/config.hpp"
#include "kgflow/errors.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
  m.doc() = "prescribed mean curvature flow of graphs over warped-product charts";

  py::register_exception<kgflow::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<kgflow::SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<kgflow::UnsupportedRegimeError>(m, "UnsupportedRegimeError",
                                                         PyExc_ValueError);

  m.def(
      "run_command",
      [](const std::string& command, const std::string& config_path,
         const std::string& out_dir, int resolution, double dt) {
        kgflow::CommandOverrides ov;
        ov.out_dir = out_dir;
        ov.resolution = resolution;
        ov.dt = dt;
        return kgflow::run_command_json(command, config_path, ov);
      },
      py::arg("command"), py::arg("config_path"), py::arg("out_dir") = "",
      py::arg("resolution") = 0, py::arg("dt") = 0.0,
      "Run flow/soliton/speed/verify against a config file; returns the report "
      "JSON text and writes the same artifacts the executable writes.");

  m.def(
      "run_command_text",
      [](const std::string& command, const std::string& config_text,
         const std::string& out_dir, int resolution, double dt) {
        kgflow::CommandOverrides ov;
        ov.out_dir = out_dir;
        ov.resolution = resolution;
        ov.dt = dt;
        return kgflow::run_command_json_text(command, config_text, ov);
      },
      py::arg("command"), py::arg("config_text"), py::arg("out_dir") = "",
      py::arg("resolution") = 0, py::arg("dt") = 0.0,
      "Same as run_command with the config text passed directly.");

  m.def(
      "canonical_config",
      [](const std::string& text) {
        return kgflow::write_config(kgflow::parse_config_text(text));
      },
      py::arg("text"),
      "Parse config text and return the canonical sorted serialization.");
}
