#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gascap/cap_model.hpp"
#include "gascap/circuit.hpp"
#include "gascap/errors.hpp"
#include "gascap/formulation.hpp"
#include "gascap/gas.hpp"
#include "gascap/polynomial.hpp"
#include "gascap/simulator.hpp"

namespace py = pybind11;
using namespace gascap;

namespace {

py::dict terms_dict(const BinaryPolynomial& p) {
  py::dict out;
  for (const auto& [m, c] : p.terms()) out[py::tuple(py::cast(m))] = c;
  return out;
}

py::list pair_matrix(const PairMatrix& m) {
  py::list rows;
  for (int i = 0; i < m.size(); ++i) {
    py::list row;
    for (int k = 0; k < m.size(); ++k) row.append(i == k ? 0.0 : m(i, k));
    rows.append(row);
  }
  return rows;
}

Formulation formulate(const CapInstance& inst, const std::string& kind, double penalty) {
  if (kind == "qubo") return build_qubo(inst, penalty);
  return build_hubo(inst, encoding_from_string(kind), penalty);
}

py::dict resources(const ResourceReport& r) {
  py::dict d;
  d["n_key"] = r.n_key;
  d["m_val"] = r.m_val;
  d["h"] = r.h;
  d["r"] = r.r;
  d["cr_by_arity"] = r.cr_by_arity;
  d["cnot"] = r.cnot;
  d["ancillae"] = r.ancillae;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Channel assignment as QUBO/HUBO with Grover adaptive search";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);

  py::class_<CapInstance>(m, "CapInstance")
      .def_readonly("n_ap", &CapInstance::n_ap)
      .def_readonly("n_ch", &CapInstance::n_ch)
      .def_readwrite("alpha", &CapInstance::alpha)
      .def_readwrite("epsilon", &CapInstance::epsilon)
      .def_readonly("distances", &CapInstance::distances)
      .def_readonly("assoc", &CapInstance::assoc)
      .def("to_json", &instance_to_json);

  m.def("appendix_a_instance", &appendix_a_instance);
  m.def("synthetic_instance", &synthetic_instance, py::arg("n_ap"), py::arg("n_ch"),
        py::arg("seed"), py::arg("uts_per_ap") = 2, py::arg("alpha") = 1.0,
        py::arg("epsilon") = 0.01);
  m.def("load_instance", &load_instance, py::arg("path"));
  m.def("instance_from_json", &instance_from_json, py::arg("text"));

  m.def("coefficients", [](const CapInstance& inst) {
    const auto t = coeff_table(inst);
    py::dict d;
    d["C"] = pair_matrix(t.c);
    d["D"] = pair_matrix(t.d);
    d["c_min"] = t.c_min;
    d["d_sum"] = t.d_sum;
    return d;
  });

  py::class_<Decoded>(m, "Decoded")
      .def_readonly("assignment", &Decoded::assignment)
      .def_readonly("violations", &Decoded::violations)
      .def_property_readonly("valid", &Decoded::valid);

  py::class_<Formulation>(m, "Formulation")
      .def_property_readonly("encoding",
                             [](const Formulation& f) { return std::string(to_string(f.encoding)); })
      .def_readonly("n_ap", &Formulation::n_ap)
      .def_readonly("n_ch", &Formulation::n_ch)
      .def_readonly("penalty", &Formulation::penalty)
      .def_property_readonly("n_vars", &Formulation::n_vars)
      .def_property_readonly("term_count",
                             [](const Formulation& f) { return stats(f.objective).term_count; })
      .def_property_readonly("degree", [](const Formulation& f) { return f.objective.degree(); })
      .def("terms", [](const Formulation& f) { return terms_dict(f.objective); })
      .def("evaluate", [](const Formulation& f, const BitVector& x) { return f.objective.evaluate(x); })
      .def("decode", [](const Formulation& f, const BitVector& x) { return decode(f, x); })
      .def("encode", [](const Formulation& f, const std::vector<int>& a) { return encode(f, a); })
      .def("exhaustive_min",
           [](const Formulation& f) {
             const auto r = exhaustive_min(f.objective);
             return py::make_tuple(r.x, r.value);
           })
      .def("dump", &export_formulation);

  m.def("formulate", &formulate, py::arg("instance"), py::arg("kind") = "qubo",
        py::arg("penalty") = 1.0,
        "kind: qubo | binary_ascending | binary_descending");

  m.def("quadratize", [](const Formulation& f) {
    const auto q = quadratize(f.objective);
    py::list aux;
    for (const auto& a : q.aux_map) aux.append(py::make_tuple(a.first, a.second, a.aux));
    py::dict d;
    d["n_vars"] = q.poly.n_vars();
    d["terms"] = terms_dict(q.poly);
    d["aux"] = aux;
    return d;
  });

  m.def("variable_counts", [](int n_ap, int n_ch) {
    const auto v = variable_counts(n_ap, n_ch);
    py::dict d;
    d["n"] = v.n;
    d["n_prime"] = v.n_prime;
    d["n_double_prime"] = v.n_double_prime;
    d["log2_search_space"] = v.log2_search_space;
    return d;
  });

  m.def("value_register_width", [](const Formulation& f) { return cap_value_register_width(f); });

  m.def("state_prep_resources",
        [](const Formulation& f, double y, std::optional<int> m_val) {
          const int width = m_val ? *m_val : cap_value_register_width(f);
          return resources(enumerate_resources(build_state_prep(f.objective, y, width)));
        },
        py::arg("formulation"), py::arg("y") = 0.0, py::arg("m") = py::none());

  m.def("estimate", [](int n_ap, int n_ch, const std::string& kind) {
    const auto table = CoeffTable::uniform(n_ap);
    const auto e = kind == "qubo" ? Encoding::OneHot : encoding_from_string(kind);
    const auto s = e == Encoding::OneHot ? qubo_structure(n_ch, table, 1.0)
                                         : hubo_structure(n_ch, table, e, 1.0);
    auto d = resources(cap_state_prep_resources(s, cap_value_register_width(s)));
    const auto cf = closed_form_resources(n_ap, n_ch, e);
    d["cnot_closed_form"] = cf.cnot;
    d["cr_by_arity_closed_form"] = cf.cr_by_arity;
    d["qubits_closed_form"] = closed_form_qubits(n_ap, n_ch, table.d_sum, 1.0, e);
    return d;
  }, py::arg("n_ap"), py::arg("n_ch"), py::arg("kind"));

  m.def("brute_force", [](const CapInstance& inst) {
    const auto r = brute_force_cap(inst);
    py::dict d;
    d["assignment"] = r.best_assignment;
    d["value"] = r.best_value;
    d["evaluations"] = r.evaluations;
    d["partition"] = co_channel_partition(r.best_assignment);
    return d;
  });

  m.def("solve",
        [](const Formulation& f, int runs, std::uint64_t seed, const std::string& backend,
           std::int64_t budget_classical, bool stop_at_optimum) {
          GasConfig cfg;
          cfg.backend = backend_from_string(backend);
          cfg.master_seed = seed;
          cfg.termination.max_classical_iters = budget_classical;
          if (stop_at_optimum) cfg.termination.stop_at_known_optimum = exhaustive_min(f.objective).value;
          std::vector<GasTrace> traces;
          {
            py::gil_scoped_release release;
            traces = run_batch(f.objective, cfg, runs);
          }
          py::list out;
          for (const auto& t : traces) {
            py::dict d;
            d["run_seed"] = t.run_seed;
            d["best_x"] = t.best_x;
            d["best_y"] = t.best_y;
            d["classical_queries"] = t.classical_queries;
            d["quantum_queries"] = t.quantum_queries;
            py::list ys;
            for (const auto& it : t.iterations) ys.append(it.y);
            d["thresholds"] = ys;
            out.append(d);
          }
          return out;
        },
        py::arg("formulation"), py::arg("runs") = 10, py::arg("seed") = 0,
        py::arg("backend") = "ideal", py::arg("budget_classical") = 200,
        py::arg("stop_at_optimum") = true);

  m.def("ideal_marked_probability", &ideal_marked_probability);
}
