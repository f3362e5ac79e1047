#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "sipsim/config.hpp"
#include "sipsim/duality.hpp"
#include "sipsim/experiments.hpp"
#include "sipsim/measures.hpp"
#include "sipsim/oracle.hpp"

namespace py = pybind11;
using namespace sipsim;

namespace {

// Sites arrive as a list of ints (d = 1) or a list of coordinate lists.
ParticleList to_particles(const py::sequence& sites, int dim) {
  ParticleList out(dim);
  for (const py::handle item : sites) {
    if (py::isinstance<py::int_>(item)) {
      if (dim != 1) throw py::value_error("integer sites need dimension 1");
      out.push_back(Site{item.cast<Coord>()});
    } else {
      const auto site = item.cast<Site>();
      if (site.size() != static_cast<std::size_t>(dim)) throw py::value_error("site dimension mismatch");
      out.push_back(site);
    }
  }
  return out;
}

Study to_study(const std::string& name) {
  const auto study = study_from_string(name);
  if (!study) throw py::value_error("unknown study '" + name + "'");
  return *study;
}

py::dict report_dict(const Report& rep) {
  py::list rows;
  for (const auto& r : rep.rows) {
    py::dict row;
    row["statistic"] = r.statistic;
    row["estimate"] = r.estimate;
    row["stderr"] = r.std_error;
    row["target"] = r.target;
    row["tolerance"] = r.tolerance;
    row["contract"] = to_string(r.contract);
    row["pass"] = r.pass;
    rows.append(row);
  }
  py::dict out;
  out["study"] = rep.study;
  out["seed"] = rep.seed;
  out["version"] = rep.version;
  out["wall_ms"] = rep.wall_ms;
  out["pass"] = rep.pass();
  out["rows"] = rows;
  out["csv"] = rep.csv();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Symmetric inclusion process simulator and verification studies.";

  // Translators are tried newest first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.attr("__version__") = version_string();
  m.def("studies", [] {
    std::vector<std::string> names;
    for (Study s : all_studies()) names.push_back(to_string(s));
    return names;
  });
  m.def("default_config", [](const std::string& study) { return default_config_text(to_study(study)); },
        py::arg("study"));

  m.def(
      "run_study",
      [](const std::string& study, const std::optional<std::string>& config, std::optional<std::uint64_t> seed,
         unsigned workers) {
        const Study s = to_study(study);
        ExperimentConfig cfg = config ? parse_config(*config, s) : default_config(s);
        if (seed) cfg.seed = *seed;
        Report rep;
        {
          py::gil_scoped_release release;
          rep = run_study(cfg, workers);
        }
        return report_dict(rep);
      },
      py::arg("study"), py::arg("config") = py::none(), py::arg("seed") = py::none(), py::arg("workers") = 1,
      "Run a study from config text (or its built-in config) and return the report.");

  m.def("duality_function",
        [](const py::sequence& xi, const py::sequence& eta, double m, int dim) {
          return duality_function(to_particles(xi, dim), occupation_of(to_particles(eta, dim)), m);
        },
        py::arg("xi"), py::arg("eta"), py::arg("m"), py::arg("dim") = 1,
        "D(xi, eta) with both configurations given as site lists (repeat a site for multiple occupancy).");
  m.def("d_single", &d_single, py::arg("k"), py::arg("l"), py::arg("m"));
  m.def("marginal_pmf", &marginal_pmf, py::arg("k"), py::arg("lam"), py::arg("m"));
  m.def("detailed_balance_ratio", &detailed_balance_ratio, py::arg("a"), py::arg("b"), py::arg("lam"), py::arg("m"));
  m.def("density", &density_of, py::arg("lam"));

  m.def(
      "exact_dual_expectation",
      [](const py::sequence& xi, const py::sequence& eta, double t, double m, Coord side, int dim) {
        SipParams p;
        p.m = m;
        p.geometry = Geometry::torus(dim, side);
        return exact_dual_expectation(to_particles(xi, dim), occupation_of(to_particles(eta, dim), p.geometry), t, p);
      },
      py::arg("xi"), py::arg("eta"), py::arg("t"), py::arg("m"), py::arg("side"), py::arg("dim") = 1,
      "Both sides of the self-duality relation on a torus, computed exactly.");
}
