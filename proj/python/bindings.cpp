#include "ract/cli.hpp"
#include "ract/error.hpp"
#include "ract/matrix_core.hpp"
#include "ract/permutation.hpp"
#include "ract/report.hpp"
#include "ract/statistics.hpp"
#include "ract/theory.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ract;

namespace {

// Reports cross the boundary as JSON text; the Python side parses it.
std::string test_json(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2, int B, std::uint64_t seed,
                      double k_cutoff, std::optional<int> K, bool baselines, int workers) {
  TestOptions opt;
  opt.B = B;
  opt.master_seed = seed;
  opt.k_cutoff = k_cutoff;
  opt.K_override = K;
  opt.baselines = baselines;
  opt.workers = workers;
  const auto report = run_test(TwoSampleDataset(x1, x2), opt);
  RunMetadata meta;
  meta.command = "test";
  meta.master_seed = seed;
  meta.B = B;
  return report_json(report, meta).dump();
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full{"ract"};
  full.insert(full.end(), args.begin(), args.end());
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = cli::run(full, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = RACT_VERSION;

  static py::exception<Error> base(m, "RactError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def("ky_fan_norm",
        [](const Eigen::MatrixXd& a, Eigen::Index k) { return ky_fan_norm(SymmetricMatrix(a), k); },
        py::arg("matrix"), py::arg("k"));
  m.def("t_k_grid",
        [](const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2, int K) {
          return t_k_grid(TwoSampleDataset(x1, x2), K).values;
        },
        py::arg("group1"), py::arg("group2"), py::arg("K"));
  m.def("select_K",
        [](const std::vector<double>& spectrum, double cutoff, int cap) { return select_K(spectrum, cutoff, cap); },
        py::arg("spectrum"), py::arg("cutoff") = 0.8, py::arg("cap") = 50);
  m.def("_test_json", &test_json, py::arg("group1"), py::arg("group2"), py::arg("B") = 1000,
        py::arg("seed") = 0, py::arg("k_cutoff") = 0.8, py::arg("K") = std::nullopt,
        py::arg("baselines") = true, py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("omega_sq",
        [](const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2, int k, double r1, double r2) {
          return omega_sq(PopulationPair(SymmetricMatrix(s1), SymmetricMatrix(s2), r1, r2), k);
        },
        py::arg("sigma1"), py::arg("sigma2"), py::arg("k"), py::arg("r1") = 2.0, py::arg("r2") = 2.0);
  m.def("cli", &run_cli, py::arg("args"), "Runs the command line in-process; returns (code, stdout, stderr).");
}
