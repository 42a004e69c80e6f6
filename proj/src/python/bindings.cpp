#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reachset/config.hpp"
#include "reachset/io.hpp"
#include "reachset/parallel.hpp"
#include "reachset/reach.hpp"
#include "reachset/torsion.hpp"

namespace py = pybind11;
using namespace reachset;

namespace {

py::array_t<double> to_array(const std::vector<double>& flat, int dim) {
    const py::ssize_t rows = dim == 0 ? 0 : static_cast<py::ssize_t>(flat.size()) / dim;
    py::array_t<double> a({rows, static_cast<py::ssize_t>(dim)});
    std::copy(flat.begin(), flat.end(), a.mutable_data());
    return a;
}

RunConfig load(const std::string& json_text) {
    RunConfig c = parse_config(json_text);
    c.sync();
    c.validate();
    return c;
}

py::dict boundary(const std::string& json_text) {
    const RunConfig c = load(json_text);
    BoundaryCloud b;
    {
        py::gil_scoped_release nogil;
        b = build_boundary(c.mode, c.grid, c.boundary);
    }
    const int d = endpoint_dim(c.mode);
    std::vector<double> ends, normals;
    py::list families;
    for (const auto& p : b.points) {
        ends.insert(ends.end(), p.endpoint.begin(), p.endpoint.end());
        normals.insert(normals.end(), p.normal.begin(), p.normal.end());
        families.append(p.family);
    }
    py::dict counts;
    counts["candidates"] = b.counts.candidates;
    counts["dropped_singular"] = b.counts.dropped_singular;
    counts["removed_duplicates"] = b.counts.removed_duplicates;
    counts["pmp_failed"] = b.counts.pmp_failed;
    counts["dominated"] = b.counts.dominated;
    counts["witnesses"] = b.counts.witnesses;
    counts["points"] = b.counts.points;
    py::list supports;
    for (const auto& s : b.supports) {
        py::dict r;
        r["direction"] = s.direction;
        r["value"] = s.value;
        r["family"] = s.family;
        r["equivalence_pass"] = s.equivalence_pass;
        supports.append(r);
    }
    py::dict out;
    out["endpoints"] = to_array(ends, d);
    out["normals"] = to_array(normals, d);
    out["families"] = families;
    out["counts"] = counts;
    out["supports"] = supports;
    out["config_hash"] = config_hash(c);
    return out;
}

py::array_t<double> oracle(const std::string& json_text) {
    const RunConfig c = load(json_text);
    OracleCloud oc;
    {
        py::gil_scoped_release nogil;
        oc = mc_oracle(c.mode, c.t_f, c.oracle.n_samples, c.oracle.n_pieces, c.seed, c.kappa_max, c.oracle.model);
    }
    return to_array(oc.points.data, oc.points.dim);
}

py::dict support(const std::string& mode, const std::vector<double>& direction, double t_f, double kappa_max,
                 bool refine, double tol) {
    CandidateGrid g;
    g.t_f = t_f;
    g.kappa_max = kappa_max;
    g.validate();
    const Mode m = parse_mode(mode);
    const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(direction.data(), static_cast<long>(direction.size()));
    SupportResult r;
    EquivalenceReport eq;
    {
        py::gil_scoped_release nogil;
        r = support_point(m, c, g, refine);
        eq = check_candidate(m, r.generator, g, c, tol);
    }
    py::dict out;
    out["value"] = r.value;
    out["grid_value"] = r.grid_value;
    out["endpoint"] = r.endpoint;
    out["family"] = r.family;
    out["reach_gap"] = eq.reach.max_pointwise_gap;
    out["pass"] = eq.pass;
    return out;
}

}  // namespace

PYBIND11_MODULE(_reachset, m) {
    m.doc() = "Reachability-set boundaries of curvature-bounded paths";
    m.attr("__version__") = REACHSET_VERSION;

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<InvalidGrid>(m, "InvalidGrid", PyExc_ValueError);

    m.def("canonical_config", [](const std::string& s) { return to_json(load(s)); }, py::arg("config_json"),
          "Validated configuration with every default filled in.");
    m.def("config_hash", [](const std::string& s) { return config_hash(load(s)); }, py::arg("config_json"));
    m.def("boundary", &boundary, py::arg("config_json"),
          "Boundary cloud as a dict of arrays.");
    m.def("oracle", &oracle, py::arg("config_json"),
          "Monte Carlo endpoints, one row per sample.");
    m.def("support", &support, py::arg("mode"), py::arg("direction"), py::arg("t_f"), py::arg("kappa_max") = 1.0,
          py::arg("refine") = true, py::arg("tol") = 1e-4);
    m.def("pmp_check",
          [](const std::string& path_json, const std::string& cfg) { return pmp_check_json(path_json, load(cfg)); },
          py::arg("path_json"), py::arg("config_json") = "{}", "PMP report of a path file as JSON text.");
    m.def(
        "torsion_rhs", [](double tau, double taudot, double zeta) { return torsion_rhs({tau, taudot}, zeta); },
        py::arg("tau"), py::arg("taudot"), py::arg("zeta"));
    m.def(
        "random_directions",
        [](int dim, int n, uint64_t seed) {
            std::vector<double> flat;
            for (const auto& v : random_directions(dim, n, seed)) flat.insert(flat.end(), v.data(), v.data() + dim);
            return to_array(flat, dim);
        },
        py::arg("dim"), py::arg("n"), py::arg("seed"));
    m.def("set_worker_count", &set_worker_count, py::arg("n"), "0 restores the default.");
}
