#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stablebelief/belief.hpp"
#include "stablebelief/bivariate.hpp"
#include "stablebelief/continuous.hpp"
#include "stablebelief/error.hpp"
#include "stablebelief/pipeline.hpp"
#include "stablebelief/provenance.hpp"
#include "stablebelief/stable.hpp"
#include "stablebelief/stats.hpp"

namespace py = pybind11;

namespace {

std::vector<sb::Point2> points_from(const Eigen::MatrixXd& xy) {
    if (xy.cols() != 2) throw sb::InvalidArgument("expected an (n, 2) array");
    std::vector<sb::Point2> out(static_cast<std::size_t>(xy.rows()));
    for (Eigen::Index i = 0; i < xy.rows(); ++i) out[static_cast<std::size_t>(i)] = {xy(i, 0), xy(i, 1)};
    return out;
}

// Elementwise over any array shape; a scalar in gives a 0-d array out.
template <class F>
py::array_t<double> map(py::array_t<double, py::array::c_style | py::array::forcecast> x, F f) {
    py::array_t<double> out(std::vector<py::ssize_t>(x.shape(), x.shape() + x.ndim()));
    const double* in = x.data();
    double* o = out.mutable_data();
    for (py::ssize_t i = 0; i < x.size(); ++i) o[i] = f(in[i]);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "alpha-stable laws, belief functions and evidential classification";

    auto base = py::register_exception<sb::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<sb::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<sb::ConfigError>(m, "ConfigError", base.ptr());

    m.def("version", &sb::version);

    py::class_<sb::StableParams>(m, "StableParams")
        .def(py::init([](double alpha, double beta, double gamma, double delta) {
                 sb::StableParams p{alpha, beta, gamma, delta};
                 p.validate();
                 return p;
             }),
             py::arg("alpha"), py::arg("beta") = 0.0, py::arg("gamma") = 1.0, py::arg("delta") = 0.0)
        .def_readonly("alpha", &sb::StableParams::alpha)
        .def_readonly("beta", &sb::StableParams::beta)
        .def_readonly("gamma", &sb::StableParams::gamma)
        .def_readonly("delta", &sb::StableParams::delta)
        .def("__repr__", &sb::StableParams::to_string);

    m.def("pdf", [](const sb::StableParams& p, py::array_t<double> x) { return map(x, [&](double v) { return sb::pdf(p, v); }); }, py::arg("params"),
          py::arg("x"));
    m.def("cdf", [](const sb::StableParams& p, py::array_t<double> x) { return map(x, [&](double v) { return sb::cdf(p, v); }); }, py::arg("params"),
          py::arg("x"));
    m.def("quantile", &sb::quantile, py::arg("params"), py::arg("prob"));
    m.def("mode", py::overload_cast<const sb::StableParams&>(&sb::mode), py::arg("params"));
    m.def(
        "sample",
        [](const sb::StableParams& p, std::size_t n, std::uint64_t seed) {
            const auto v = sb::sample(p, n, seed);
            return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
        },
        py::arg("params"), py::arg("n"), py::arg("seed"));
    m.def(
        "estimate_koutrouvelis", [](const std::vector<double>& x) { return sb::estimate_koutrouvelis(x).params; },
        py::arg("data"));
    m.def(
        "estimate_mcculloch", [](const std::vector<double>& x) { return sb::estimate_mcculloch(x).params; },
        py::arg("data"));
    m.def("pl_stable_1d", [](const sb::StableParams& p, py::array_t<double> x) { return map(x, [&](double v) { return sb::pl_stable_1d(p, v); }); },
          py::arg("params"), py::arg("x"));
    m.def(
        "ks_test",
        [](const std::vector<double>& x, const std::function<double(double)>& model_cdf) {
            const auto r = sb::ks_test(x, model_cdf);
            return py::dict(py::arg("ksstat") = r.ksstat, py::arg("p_value") = r.p_value,
                            py::arg("n") = r.n_samples, py::arg("pass_at_5pct") = r.pass_at_5pct);
        },
        py::arg("data"), py::arg("model_cdf"));

    py::class_<sb::Frame>(m, "Frame")
        .def(py::init<std::vector<std::string>>(), py::arg("names"))
        .def_property_readonly("names", &sb::Frame::names)
        .def("__len__", &sb::Frame::size);
    py::class_<sb::MassFunction>(m, "MassFunction")
        .def(py::init<sb::Frame, std::vector<double>>(), py::arg("frame"), py::arg("masses"))
        .def("mass", &sb::MassFunction::mass, py::arg("subset"))
        .def_property_readonly("masses", &sb::MassFunction::dense)
        .def_property_readonly("conflict", &sb::MassFunction::conflict)
        .def_property_readonly("frame", &sb::MassFunction::frame);
    m.def(
        "combine_conjunctive", [](const std::vector<sb::MassFunction>& ms) { return sb::combine_conjunctive(ms); },
        py::arg("masses"));
    m.def("pignistic", &sb::pignistic, py::arg("mass"));
    m.def(
        "gbt_mass", [](const std::vector<double>& pls, const sb::Frame& f) { return sb::gbt_mass(pls, f); },
        py::arg("pls"), py::arg("frame"));

    py::class_<sb::SpectralStable2D>(m, "SpectralStable2D")
        .def(py::init([](double alpha, std::vector<double> weights, std::vector<double> angles,
                         std::array<double, 2> delta) {
                 sb::SpectralStable2D s{alpha, std::move(weights), std::move(angles), delta};
                 s.validate();
                 return s;
             }),
             py::arg("alpha"), py::arg("weights"), py::arg("angles"), py::arg("delta") = std::array<double, 2>{0, 0})
        .def_readonly("alpha", &sb::SpectralStable2D::alpha)
        .def_readonly("weights", &sb::SpectralStable2D::weights)
        .def_readonly("angles", &sb::SpectralStable2D::angles)
        .def_readonly("delta", &sb::SpectralStable2D::delta);
    m.def(
        "sample_2d",
        [](const sb::SpectralStable2D& s, std::size_t n, std::uint64_t seed) {
            const auto pts = sb::sample_2d(s, n, seed);
            Eigen::MatrixXd out(static_cast<Eigen::Index>(pts.size()), 2);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                out(static_cast<Eigen::Index>(i), 0) = pts[i][0];
                out(static_cast<Eigen::Index>(i), 1) = pts[i][1];
            }
            return out;
        },
        py::arg("law"), py::arg("n"), py::arg("seed"));
    m.def("projection", &sb::projection, py::arg("law"), py::arg("u"));
    m.def(
        "estimate_spectral", [](const Eigen::MatrixXd& xy, int k) { return sb::estimate_spectral(points_from(xy), k); },
        py::arg("data"), py::arg("k") = 4);
    m.def(
        "pdf_grid",
        [](const sb::SpectralStable2D& s, int resolution) {
            const auto g = sb::pdf_grid(s, sb::Window{}, resolution);
            return py::make_tuple(g.xs, g.ys, Eigen::MatrixXd(g.values));
        },
        py::arg("law"), py::arg("resolution") = 256,
        "Density on the [-4,4]^2 window: (xs, ys, values) with values[i, j] at (xs[i], ys[j]).");

    m.def(
        "generate",
        [](const std::string& preset, std::uint64_t seed, bool window) {
            auto g = sb::preset(preset);
            if (!window) g.window.reset();
            const auto d = sb::generate(g, seed);
            return py::make_tuple(d.features, d.labels, d.class_names);
        },
        py::arg("preset"), py::arg("seed"), py::arg("window") = true);
    m.def(
        "run_experiment_json",
        [](const std::string& config) {
            const auto cfg = sb::experiment_config_from_json(nlohmann::json::parse(config));
            sb::ExperimentResult r;
            {
                py::gil_scoped_release release;
                r = sb::run_experiment(cfg);
            }
            return sb::to_json(r).dump();
        },
        py::arg("config"));
}
