#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cvsat/effective_channel.hpp"
#include "cvsat/errors.hpp"
#include "cvsat/postselection.hpp"
#include "cvsat/scenario.hpp"
#include "cvsat/schemes.hpp"

namespace py = pybind11;
using namespace cvsat;

namespace {

QuadratureSpec quad_of(int nodes, int subdivisions) {
    QuadratureSpec q{nodes, subdivisions};
    q.validate();
    return q;
}

py::dict ps_dict(const PostSelectionResult& r) {
    py::dict d;
    d["cm"] = r.cm.matrix();
    d["p_success"] = r.p_success;
    d["e_ln"] = r.e_ln;
    d["threshold"] = r.threshold;
    return d;
}

py::dict summary_dict(const EffectiveSummary& s) {
    py::dict d;
    d["scheme"] = std::string(to_string(s.kind));
    d["cosh_2r"] = s.cosh_2r;
    d["eta_a"] = s.eta_a;
    d["eta_b"] = s.eta_b;
    d["out_of_range_mass"] = s.out_of_range_mass;
    d["note"] = s.note;
    return d;
}

py::list rows_list(const std::vector<SweepRow>& rows) {
    py::list out;
    for (const auto& r : rows) {
        py::dict d;
        d["scheme"] = std::string(to_string(r.scheme));
        d["sigma_b"] = r.sigma_b;
        d["r"] = r.r;
        d["chi"] = r.chi;
        d["threshold"] = r.threshold;
        d["e_ln"] = r.e_ln;
        d["p_success"] = r.p_success;
        d["mean_loss_up_db"] = r.mean_loss_up_db;
        d["mean_loss_down_db"] = r.mean_loss_down_db;
        d["cm"] = r.cm.matrix();
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Entanglement distribution over fading satellite links (Gaussian covariance-matrix model)";

    auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NotEntangledError>(m, "NotEntangledError", domain.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::enum_<SchemeKind>(m, "SchemeKind")
        .value("direct", SchemeKind::Direct)
        .value("satellite", SchemeKind::SatelliteSource)
        .value("swap", SchemeKind::Swap);

    // --- Gaussian states ---
    m.def("tmsv_cm", [](double r) { return tmsv_cm(Squeezing::from_r(r)).matrix(); }, py::arg("r"));
    m.def("log_negativity", [](const Mat4& cm) { return log_negativity(TwoModeCM(cm)); }, py::arg("cm"));
    m.def(
        "symplectic_spectrum_pt",
        [](const Mat4& cm) {
            const auto s = symplectic_spectrum_pt(TwoModeCM(cm));
            return py::make_tuple(s.nu_minus, s.nu_plus);
        },
        py::arg("cm"));
    m.def("is_physical", [](const Mat4& cm) { return TwoModeCM(cm).is_physical(); }, py::arg("cm"));
    m.def(
        "apply_loss", [](const Mat4& cm, double ea, double eb) { return apply_loss(TwoModeCM(cm), ea, eb).matrix(); },
        py::arg("cm"), py::arg("eta_a"), py::arg("eta_b"));
    m.def(
        "add_excess_noise",
        [](const Mat4& cm, double xa, double xb) { return add_excess_noise(TwoModeCM(cm), xa, xb).matrix(); },
        py::arg("cm"), py::arg("chi_a"), py::arg("chi_b"));

    // --- channels ---
    py::class_<FadingChannel>(m, "FadingChannel")
        .def_static("beam_wander", &FadingChannel::beam_wander, py::arg("sigma_b"), py::arg("beta"), py::arg("w"))
        .def_property_readonly("sigma_b", &FadingChannel::sigma_b)
        .def_property_readonly("eta0", &FadingChannel::eta0)
        .def_property_readonly("lambda_shape", &FadingChannel::lambda_shape)
        .def_property_readonly("l_scale", &FadingChannel::l_scale)
        .def("pdf", &FadingChannel::pdf, py::arg("eta"))
        .def("cdf", &FadingChannel::cdf, py::arg("eta"))
        .def(
            "mean_transmittance",
            [](const FadingChannel& c, int nodes, int subdiv) { return c.mean_transmittance(quad_of(nodes, subdiv)); },
            py::arg("nodes_1d") = 64, py::arg("subdivisions") = 8)
        .def(
            "loss_db", [](const FadingChannel& c, int nodes, int subdiv) { return c.loss_db(quad_of(nodes, subdiv)); },
            py::arg("nodes_1d") = 64, py::arg("subdivisions") = 8)
        .def("__repr__", [](const FadingChannel& c) {
            std::ostringstream s;
            s << "FadingChannel(sigma_b=" << c.sigma_b() << ", eta0=" << c.eta0() << ", lambda=" << c.lambda_shape()
              << ", L=" << c.l_scale() << ")";
            return s.str();
        });

    m.def(
        "expand_links",
        [](double sigma_b, double k1, double k2, double beta, double w) {
            const auto l = expand_links({sigma_b, k1, k2}, beta, w);
            py::dict d;
            d["as"] = l.as;
            d["sa"] = l.sa;
            d["bs"] = l.bs;
            d["sb"] = l.sb;
            return d;
        },
        py::arg("sigma_b"), py::arg("k1"), py::arg("k2"), py::arg("beta") = 1.0, py::arg("w") = 1.0);

    // --- schemes ---
    m.def(
        "scheme_ensemble",
        [](SchemeKind kind, double r, const FadingChannel& first, const FadingChannel& second, double chi, int nodes,
           int subdiv) {
            return scheme_ensemble(kind, Squeezing::from_r(r), first, second, chi, quad_of(nodes, subdiv)).matrix();
        },
        py::arg("kind"), py::arg("r"), py::arg("first"), py::arg("second"), py::arg("chi") = 0.0,
        py::arg("nodes_1d") = 64, py::arg("subdivisions") = 8);
    m.def(
        "scheme_realization",
        [](SchemeKind kind, double r, double eta, double eta_prime, double chi) {
            return scheme_realization(kind, Squeezing::from_r(r), eta, eta_prime, chi).matrix();
        },
        py::arg("kind"), py::arg("r"), py::arg("eta"), py::arg("eta_prime"), py::arg("chi") = 0.0);
    m.def(
        "evaluate_scheme",
        [](SchemeKind kind, double r, double sigma_b, double k1, double k2, double beta, double w, double chi,
           int nodes, int subdiv) {
            SchemeConfig cfg{kind, Squeezing::from_r(r), {sigma_b, k1, k2}, beta, w, chi, {nodes, subdiv}};
            const auto res = evaluate_scheme(cfg);
            return py::make_tuple(res.cm.matrix(), res.e_ln);
        },
        py::arg("kind"), py::arg("r"), py::arg("sigma_b"), py::arg("k1") = 0.5, py::arg("k2") = 0.64,
        py::arg("beta") = 1.0, py::arg("w") = 1.0, py::arg("chi") = 0.0, py::arg("nodes_1d") = 64,
        py::arg("subdivisions") = 8);
    m.def(
        "swap_realization",
        [](double r, double eta, double eta_prime, double chi) {
            return swap_realization(Squeezing::from_r(r), eta, eta_prime, chi).matrix();
        },
        py::arg("r"), py::arg("eta"), py::arg("eta_prime"), py::arg("chi") = 0.0);

    // --- post-selection ---
    m.def(
        "classical_postselect",
        [](double r, const FadingChannel& up, const FadingChannel& down, double zeta_th, int nodes, int subdiv) {
            return ps_dict(classical_postselect(Squeezing::from_r(r), up, down, {zeta_th}, quad_of(nodes, subdiv)));
        },
        py::arg("r"), py::arg("uplink"), py::arg("downlink"), py::arg("zeta_th"), py::arg("nodes_1d") = 64,
        py::arg("subdivisions") = 8);
    m.def(
        "quantum_postselect",
        [](double r, const FadingChannel& up, const FadingChannel& down, double tap_t, double q_th, int nodes,
           int subdiv) {
            return ps_dict(
                quantum_postselect(Squeezing::from_r(r), up, down, {tap_t, q_th}, quad_of(nodes, subdiv)));
        },
        py::arg("r"), py::arg("uplink"), py::arg("downlink"), py::arg("tap_t"), py::arg("q_th"),
        py::arg("nodes_1d") = 64, py::arg("subdivisions") = 8);
    m.def(
        "quantum_moments_realization",
        [](double r, double eta, double eta_prime, double tap_t, double q_th) {
            const auto q = quantum_moments_realization(Squeezing::from_r(r), eta, eta_prime, {tap_t, q_th});
            py::dict d;
            d["mean_qa"] = q.mean_qa;
            d["mean_qb"] = q.mean_qb;
            d["second_qa"] = q.second_qa;
            d["second_qb"] = q.second_qb;
            d["cross_qab"] = q.cross_qab;
            d["p_accept"] = q.p_accept;
            return d;
        },
        py::arg("r"), py::arg("eta"), py::arg("eta_prime"), py::arg("tap_t"), py::arg("q_th"));

    // --- effective channel ---
    m.def(
        "to_effective",
        [](const Mat4& cm) {
            const auto p = to_effective(StandardFormCM::from_cm(TwoModeCM(cm)));
            return py::make_tuple(p.cosh_2r, p.eta_a, p.eta_b);
        },
        py::arg("cm"), "Returns (cosh_2r, eta_a, eta_b) of the equivalent lossy TMSV.");
    m.def(
        "swap_effective_realization",
        [](double r, double eta, double eta_prime) {
            const auto p = swap_effective_realization(Squeezing::from_r(r), eta, eta_prime);
            return py::make_tuple(p.cosh_2r, p.eta_a, p.eta_b);
        },
        py::arg("r"), py::arg("eta"), py::arg("eta_prime"));
    m.def(
        "ordering_check",
        [](double sigma_b, double k1, double k2, double beta, double w, double r, int nodes, int subdiv) {
            const auto rep = ordering_check({sigma_b, k1, k2}, beta, w, Squeezing::from_r(r), quad_of(nodes, subdiv));
            py::dict d;
            d["direct"] = summary_dict(rep.direct);
            d["satellite"] = summary_dict(rep.satellite);
            d["swap"] = summary_dict(rep.swap);
            d["swap_le_direct"] = rep.swap_le_direct;
            d["satellite_ge_direct"] = rep.satellite_ge_direct;
            return d;
        },
        py::arg("sigma_b"), py::arg("k1"), py::arg("k2"), py::arg("beta"), py::arg("w"), py::arg("r"),
        py::arg("nodes_1d") = 64, py::arg("subdivisions") = 8);

    // --- scenarios ---
    m.def(
        "run_sweep", [](const std::string& text, int workers) { return rows_list(run_sweep(parse_scenario_text(text), workers)); },
        py::arg("scenario_text"), py::arg("workers") = 1, "Scheme sweep over a scenario given as file text.");
    m.def(
        "run_postselect",
        [](const std::string& text, int workers) { return rows_list(run_postselect(parse_scenario_text(text), workers)); },
        py::arg("scenario_text"), py::arg("workers") = 1);
    m.def("rate_estimate", &rate_estimate, py::arg("p_success"), py::arg("tx_rate_hz"));
}
