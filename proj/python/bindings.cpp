#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "framescale/cli.hpp"
#include "framescale/family.hpp"
#include "framescale/pipeline.hpp"
#include "framescale/verify.hpp"

namespace py = pybind11;
using namespace framescale;

namespace {

py::object json_to_py(const nlohmann::ordered_json& j) {
    using nlohmann::ordered_json;
    switch (j.type()) {
        case ordered_json::value_t::null: return py::none();
        case ordered_json::value_t::boolean: return py::bool_(j.get<bool>());
        case ordered_json::value_t::number_integer: return py::int_(j.get<long long>());
        case ordered_json::value_t::number_unsigned:
            return py::int_(j.get<unsigned long long>());
        case ordered_json::value_t::number_float: return py::float_(j.get<double>());
        case ordered_json::value_t::string: return py::str(j.get<std::string>());
        case ordered_json::value_t::array: {
            py::list out;
            for (const auto& e : j) out.append(json_to_py(e));
            return out;
        }
        case ordered_json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it)
                out[py::str(it.key())] = json_to_py(it.value());
            return out;
        }
        default: return py::none();
    }
}

VectorFamily family_from_vectors(std::size_t dim, const std::vector<Vec>& vectors,
                                 const std::string& tail) {
    VectorFamily f;
    f.dim = dim;
    f.field = Field::cplx;
    if (tail == "zero")
        f.tail = TailMode::zero;
    else if (tail == "cyclic")
        f.tail = TailMode::cyclic;
    else
        fail(ErrorKind::input, "tail must be \"zero\" or \"cyclic\"");
    f.vectors = vectors;
    validate_family(f);
    return f;
}

PipelineConfig make_config(const std::string& mode, const std::string& method,
                           double rank_tol, double lambda_floor, std::size_t samples,
                           std::uint64_t seed) {
    PipelineConfig c;
    c.mode = approx_mode_from_name(mode);
    c.method = solve_method_from_name(method);
    c.rank_tol = rank_tol;
    c.lambda_floor = lambda_floor;
    c.samples = samples;
    c.seed = seed;
    return c;
}

py::dict run_pipeline_py(const VectorFamily& f, const std::string& mode,
                         const std::string& method, double rank_tol, double lambda_floor,
                         std::size_t samples, std::uint64_t seed) {
    const ScalingCertificate cert = run_pipeline(
        f, make_config(mode, method, rank_tol, lambda_floor, samples, seed));
    return json_to_py(nlohmann::ordered_json::parse(certificate_to_json(cert)));
}

}  // namespace

PYBIND11_MODULE(_framescale, m) {
    m.doc() = "Positive scalings certifying the lower frame inequality for total "
              "sequences, with built-in verification oracles.";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            switch (e.kind()) {
                case ErrorKind::input:
                case ErrorKind::parse:
                    PyErr_SetString(PyExc_ValueError, e.what());
                    break;
                case ErrorKind::overflow:
                    PyErr_SetString(PyExc_OverflowError, e.what());
                    break;
                default:
                    PyErr_SetString(PyExc_RuntimeError, e.what());
            }
        }
    });

    py::class_<VectorFamily>(m, "Family")
        .def_property_readonly("dim", [](const VectorFamily& f) { return f.dim; })
        .def_property_readonly("count", [](const VectorFamily& f) { return f.count(); })
        .def_property_readonly(
            "field",
            [](const VectorFamily& f) { return f.field == Field::real ? "real" : "complex"; })
        .def_property_readonly(
            "tail",
            [](const VectorFamily& f) { return f.tail == TailMode::zero ? "zero" : "cyclic"; })
        .def_property_readonly("vectors",
                               [](const VectorFamily& f) { return f.vectors; })
        .def("__repr__", [](const VectorFamily& f) {
            return "<framescale.Family dim=" + std::to_string(f.dim) +
                   " count=" + std::to_string(f.count()) +
                   (f.tail == TailMode::zero ? " tail=zero>" : " tail=cyclic>");
        });

    m.def(
        "generate_family",
        [](const std::string& kind, std::size_t dim, std::size_t count, std::uint64_t seed,
           double damping) {
            GeneratorSpec g;
            g.kind = generator_kind_from_name(kind);
            g.dim = dim;
            g.count = count;
            g.seed = seed;
            g.damping = damping;
            return generate_family(g);
        },
        py::arg("kind"), py::arg("dim"), py::arg("count") = 0, py::arg("seed") = 0,
        py::arg("damping") = 0.9,
        "Build one of the stock families (orthonormal, shifted_sum, damped_tail, "
        "random_gaussian, cyclic_spanning).");

    m.def("make_family", &family_from_vectors, py::arg("dim"), py::arg("vectors"),
          py::arg("tail") = "zero", "Wrap explicit vectors as a family.");

    m.def(
        "load_family",
        [](const std::string& path) {
            const bool csv = path.size() >= 4 && path.rfind(".csv") == path.size() - 4;
            return load_family(path, csv ? FileFormat::csv : FileFormat::json);
        },
        py::arg("path"));

    m.def(
        "save_family",
        [](const VectorFamily& f, const std::string& path, const std::string& format) {
            save_family(f, path, format == "csv" ? FileFormat::csv : FileFormat::json);
        },
        py::arg("family"), py::arg("path"), py::arg("format") = "json");

    m.def(
        "effective_vector",
        [](const VectorFamily& f, std::size_t k) { return effective_vector(f, k); },
        py::arg("family"), py::arg("k"), "v_k under the family's tail semantics (k >= 1).");

    m.def("run_pipeline", &run_pipeline_py, py::arg("family"), py::arg("mode") = "exact",
          py::arg("method") = "direct", py::arg("rank_tol") = 1e-10,
          py::arg("lambda_floor") = 0.0, py::arg("samples") = 1000, py::arg("seed") = 0,
          "Run the full scaling pipeline; returns the certificate as a dict.");

    m.def(
        "check_lower_frame",
        [](const VectorFamily& f, const std::map<std::size_t, double>& lambda_eff,
           std::size_t samples, std::uint64_t seed) {
            py::list out;
            for (const CheckEntry& e : check_lower_frame(f, lambda_eff, samples, seed)) {
                py::dict d;
                d["name"] = e.name;
                d["passed"] = e.passed;
                d["lhs"] = e.lhs;
                d["rhs"] = e.rhs;
                d["slack"] = e.slack;
                out.append(std::move(d));
            }
            return out;
        },
        py::arg("family"), py::arg("lambda_eff"), py::arg("samples") = 1000,
        py::arg("seed") = 0,
        "Sampling + analytic verification of ||x||^2 <= sum lambda_k |v_k^* x|^2.");

    m.def("weighted_cs_gap", &weighted_cs_gap, py::arg("beta"),
          "Both sides of (sum beta_n)^2 <= sum 2^n beta_n^2.");

    m.def("uniform_baseline", &uniform_baseline, py::arg("family"),
          "1/A where A is the min eigenvalue of the unweighted frame operator.");

    m.def(
        "operator_norm",
        [](const std::vector<Vec>& rows) {
            if (rows.empty()) return 0.0;
            DenseMatrix a(rows.size(), rows[0].size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].size() != rows[0].size())
                    fail(ErrorKind::input, "operator_norm: ragged matrix");
                for (std::size_t j = 0; j < rows[i].size(); ++j) a(i, j) = rows[i][j];
            }
            return operator_norm(a);
        },
        py::arg("rows"), "Largest singular value of a dense matrix given as rows.");

    m.def(
        "hermitian_min_eig",
        [](const std::vector<Vec>& rows) {
            DenseMatrix a(rows.size(), rows.empty() ? 0 : rows[0].size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].size() != rows.size())
                    fail(ErrorKind::input, "hermitian_min_eig: matrix must be square");
                for (std::size_t j = 0; j < rows[i].size(); ++j) a(i, j) = rows[i][j];
            }
            return hermitian_min_eig(a);
        },
        py::arg("rows"), "Smallest eigenvalue of a Hermitian matrix given as rows.");

    m.def(
        "min_norm_least_squares",
        [](const std::vector<Vec>& columns, const Vec& b, double tol) {
            if (columns.empty()) return Vec();
            return min_norm_least_squares(
                DenseMatrix::from_columns(columns[0].size(), columns), b, tol);
        },
        py::arg("columns"), py::arg("b"), py::arg("tol") = 1e-10,
        "Minimum-norm least-squares coefficients for b against the given columns.");
}
