// SPDX-License-Identifier: Apache-2.0
//
// String-level bindings: documents go in and out as JSON text, and the
// Python package decodes them into plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "llmsim/cli.hpp"
#include "llmsim/error.hpp"
#include "llmsim/models.hpp"
#include "llmsim/profiles.hpp"
#include "llmsim/report.hpp"
#include "llmsim/scenario.hpp"

namespace py = pybind11;
using namespace llmsim;

namespace {

Suite suite_arg(const std::string& name) {
  const auto s = parse_suite(name);
  if (!s) throw LookupError("unknown suite '" + name + "'");
  return *s;
}

std::string run_document(const std::string& document) {
  const ScenarioDocument doc = load_scenario_document(document);
  std::vector<RunRecord> runs;
  {
    py::gil_scoped_release release;
    runs = run_scenarios(doc.scenarios, doc.models, doc.profiles);
  }
  return emit_records(runs, RecordFormat::kJson);
}

std::string compare_records(const std::string& records, const std::string& baseline) {
  const auto runs = parse_records(records, RecordFormat::kJson);
  return emit_comparison(compare(runs, baseline), RecordFormat::kJson);
}

std::tuple<int, std::string, std::string> cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int status = 0;
  {
    py::gil_scoped_release release;
    status = run_cli(args, out, err);
  }
  return {status, out.str(), err.str()};
}

}  // namespace

PYBIND11_MODULE(_llmsim, m) {
  m.doc() = "Analytical LLM inference simulator";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
  static py::exception<LookupError> lookup_error(m, "LookupError", PyExc_KeyError);
  static py::exception<IoError> io_error(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const ValidationError& e) {
      py::set_error(validation_error, e.what());
    } catch (const LookupError& e) {
      py::set_error(lookup_error, e.what());
    } catch (const IoError& e) {
      py::set_error(io_error, e.what());
    }
  });

  m.def("profiles_json", [] { return serialize_profiles(builtin_profiles()); });
  m.def("models_json", [] { return serialize_models(builtin_models()); });
  m.def(
      "param_count",
      [](const std::string& model) { return param_count(find_model(builtin_models(), model)); },
      py::arg("model"));
  m.def(
      "kv_bytes_per_token",
      [](const std::string& model, int weight_bits, int kv_bits, int activation_bits) {
        const DataFormatPolicy fmt{weight_bits, kv_bits, activation_bits};
        validate(fmt);
        return kv_bytes_per_token(find_model(builtin_models(), model), fmt);
      },
      py::arg("model"), py::arg("weight_bits") = 16, py::arg("kv_bits") = 16,
      py::arg("activation_bits") = 16);
  m.def(
      "builtin_scenarios_json",
      [](const std::string& suite) { return serialize_scenarios(builtin_scenarios(suite_arg(suite))); },
      py::arg("suite"));
  m.def("run_document", &run_document, py::arg("document"),
        "Runs every scenario in a scenario document; returns the records as JSON.");
  m.def("compare_records", &compare_records, py::arg("records"), py::arg("baseline"));
  m.def("run_cli", &cli, py::arg("args"), "Returns (exit status, stdout, stderr).");
  m.def("assumptions", &assumptions_text);
}
