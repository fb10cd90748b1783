#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "symplembed/certify.hpp"
#include "symplembed/gluing.hpp"
#include "symplembed/guth.hpp"
#include "symplembed/hindkerman.hpp"
#include "symplembed/pipelines.hpp"
#include "symplembed/transport.hpp"

namespace py = pybind11;
using namespace symplembed;

namespace {

std::vector<Vec> domainSamples(const Domain& d, int count, std::uint64_t seed) {
    Sampler s;
    s.seed = seed;
    return d.sample(count, s);
}

}  // namespace

PYBIND11_MODULE(_symplembed, m) {
    m.doc() = "numerical toolkit for explicit symplectic embeddings";

    py::class_<Domain, DomainPtr>(m, "Domain")
        .def("dim", &Domain::dim)
        .def("kind", &Domain::kind)
        .def("contains", &Domain::contains)
        .def("boundary_margin", &Domain::boundaryMargin)
        .def("measure", [](const Domain& d) { auto r = d.measure(); return std::make_pair(r.value, r.err); })
        .def("sample", &domainSamples, py::arg("count"), py::arg("seed") = 0)
        .def("to_json", [](const Domain& d) { return d.toJson().dump(); });
    m.def("ball", &makeBall, py::arg("dim"), py::arg("radius"));
    m.def("rectangle", &makeRect);
    m.def("square", &makeSquare);
    m.def("punctured_torus", [](double area, double rel) -> DomainPtr {
        return std::make_shared<PuncturedTorus>(area, rel);
    }, py::arg("area"), py::arg("delta_punct_rel") = 1e-3);
    m.def("product", [](std::vector<DomainPtr> fs) { return makeProduct(std::move(fs)); });
    m.def("domain_from_json", [](const std::string& s) {
        return Domain::fromJson(nlohmann::json::parse(s));
    });

    py::class_<SmoothMap, MapPtr>(m, "SmoothMap")
        .def("dim_in", &SmoothMap::dimIn)
        .def("dim_out", &SmoothMap::dimOut)
        .def("__call__", &SmoothMap::eval)
        .def("eval", &SmoothMap::eval)
        .def("jacobian", &SmoothMap::jacobian)
        .def("tag", &SmoothMap::tag);
    m.def("compose", &compose);
    m.def("map_product", &product);
    m.def("conjugate_dilation", &conjugateDilation);
    m.def("torus_quotient", &torusQuotient);
    m.def("identity_map", [](int d) -> MapPtr { return std::make_shared<IdentityMap>(d); });
    m.def("invert_local", [](MapPtr f, const Vec& y, const Vec& seed) {
        return invertLocal(*f, y, seed);
    });
    m.def("omega", &omega);
    m.def("symplectic_residual", [](MapPtr f, const Vec& x) { return symplecticResidual(*f, x); });

    // guth
    m.def("solve_t", &solveT);
    m.def("solve_t_residual", &solveTResidual);
    py::class_<GuthFrame>(m, "GuthFrame")
        .def_readonly("R", &GuthFrame::R)
        .def_readonly("t", &GuthFrame::t)
        .def_readonly("lmbda", &GuthFrame::lambda)
        .def_readonly("mu", &GuthFrame::mu)
        .def_readonly("shadow_radius", &GuthFrame::shadowRadius)
        .def_readonly("rho", &GuthFrame::rho)
        .def_readonly("matrix", &GuthFrame::M);
    m.def("guth_frame", &buildGuthFrame);
    m.def("build_guth_family", &buildGuthFamily, py::arg("n"), py::arg("R"));
    m.def("projection_radius_bound", &projectionRadiusBound);

    // moser2d transports
    py::class_<TransportMap, TransportPtr, SmoothMap>(m, "TransportMap")
        .def("det_residual", &TransportMap::detResidual, py::arg("grid") = 120,
             py::arg("core_fraction") = 0.9)
        .def("method", &TransportMap::method);
    m.def("knothe_map", &knotheMap);
    m.def("rect_to_disk", &rectToDisk);
    m.def("disk_to_square", &diskToSquare);

    // hind-kerman
    py::class_<SolveAResult>(m, "SolveAResult")
        .def_readonly("limit_small", &SolveAResult::limitSmall)
        .def_readonly("limit_large", &SolveAResult::limitLarge)
        .def_readonly("measured_small", &SolveAResult::measuredSmall)
        .def_readonly("measured_large", &SolveAResult::measuredLarge)
        .def_readonly("small_feasible", &SolveAResult::smallFeasible)
        .def_readonly("large_feasible", &SolveAResult::largeFeasible);
    m.def("solve_A", &solveA);
    py::class_<HkConstants>(m, "HkConstants")
        .def_readonly("ctilde", &HkConstants::ctilde)
        .def_readonly("c", &HkConstants::c)
        .def_readonly("C", &HkConstants::C)
        .def_readonly("C_prime", &HkConstants::Cprime)
        .def_readonly("eps0", &HkConstants::eps0);
    m.def("hk_constants", &hkConstants);
    py::class_<HkBundle, std::shared_ptr<const HkBundle>>(m, "HkBundle")
        .def_readonly("eps", &HkBundle::eps)
        .def_property_readonly("A", [](const HkBundle& b) { return b.serp->A; })
        .def_property_readonly("r_eps", [](const HkBundle& b) { return b.rEps; })
        .def_property_readonly("i_eps", [](const HkBundle& b) { return b.iEps; })
        .def_property_readonly("flow", [](const HkBundle& b) { return b.flow; })
        .def_property_readonly("I", [](const HkBundle& b) { return b.I; })
        .def_property_readonly("chain", [](const HkBundle& b) { return b.chain; })
        .def_property_readonly("envelope", [](const HkBundle& b) { return b.envelope; })
        .def("sample_sigma_q", &HkBundle::sampleSigmaQ)
        .def("sample_sigma_disk", &HkBundle::sampleSigmaDisk)
        .def("serpentine_polyline", [](const HkBundle& b) {
            std::vector<std::pair<double, double>> out;
            for (auto& p : b.serp->centerlinePolyline()) out.emplace_back(p.x(), p.y());
            return out;
        });
    m.def("build_bundle", &buildBundle, py::arg("eps"));
    m.def("build_isr", [](int n, double S, double R) {
        auto d = buildISR(n, S, R);
        return py::make_tuple(d.map, d.T, d.eps63, d.source, d.target);
    });

    // certification
    py::class_<SymplecticReport>(m, "SymplecticReport")
        .def_readonly("max_residual", &SymplecticReport::maxResidual)
        .def_readonly("samples", &SymplecticReport::samples);
    py::class_<InjectivityReport>(m, "InjectivityReport")
        .def_readonly("collisions", &InjectivityReport::collisions)
        .def_readonly("samples", &InjectivityReport::samples);
    py::class_<ContainmentReport>(m, "ContainmentReport")
        .def_readonly("min_margin", &ContainmentReport::minMargin)
        .def_readonly("outside", &ContainmentReport::outside);
    m.def("check_symplectic",
          [](MapPtr f, const std::vector<Vec>& pts) { return checkSymplectic(*f, pts); });
    m.def("check_injective",
          [](MapPtr f, const std::vector<Vec>& pts, double dInj, double dSrc, bool wrap,
             double scale) { return checkInjective(*f, pts, dInj, dSrc, wrap, scale); },
          py::arg("map"), py::arg("samples"), py::arg("delta_inj") = 1e-6,
          py::arg("delta_src") = 1e-3, py::arg("torus_wrap") = false, py::arg("wrap_scale") = 1.0);
    m.def("check_contained", [](MapPtr f, DomainPtr target, const std::vector<Vec>& pts) {
        return checkContained(*f, *target, pts);
    });

    // pipelines
    py::class_<RadiusChain>(m, "RadiusChain")
        .def_readonly("n", &RadiusChain::n)
        .def_readonly("radius_squared", &RadiusChain::radiusSquared)
        .def_readonly("radius", &RadiusChain::radius)
        .def_readonly("factor_radii", &RadiusChain::factorRadii);
    m.def("radius_chain", &radiusChain);
    m.def("general0_report", [](int n, int d, long samples, std::uint64_t seed) {
        auto r = general0Chain(n, d, samples, seed);
        return py::make_tuple(r.certificate.pass(), r.report);
    }, py::arg("n"), py::arg("d"), py::arg("samples") = 2000, py::arg("seed") = 7);
}
