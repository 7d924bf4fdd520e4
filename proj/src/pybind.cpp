#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "toricount/arcs.hpp"
#include "toricount/archimedean.hpp"
#include "toricount/constant.hpp"
#include "toricount/densities.hpp"
#include "toricount/enumerate.hpp"
#include "toricount/hyperbolic.hpp"
#include "toricount/io.hpp"
#include "toricount/mobius.hpp"

namespace py = pybind11;
using namespace toricount;

namespace {

std::vector<long long> ones_like(const ToricModel& m, std::vector<long long> e) {
    if (e.empty()) e.assign(m.num_rays(), 1);
    return e;
}

}  // namespace

PYBIND11_MODULE(_toricount, mod) {
    mod.doc() = "Bounded-height point counts and constant factors for toric hypersurfaces";
    mod.attr("__version__") = tool_version();

    py::register_exception<BudgetExceeded>(mod, "BudgetExceeded");
    py::register_exception<ModelError>(mod, "ModelError");
    py::register_exception<InsufficientHits>(mod, "InsufficientHits");

    py::class_<ToricModel>(mod, "ToricModel")
        .def_readonly("name", &ToricModel::name)
        .def_readonly("n", &ToricModel::n)
        .def_readonly("r", &ToricModel::r)
        .def_readonly("rays", &ToricModel::rays)
        .def_readonly("cones", &ToricModel::cones)
        .def_readonly("degrees", &ToricModel::degrees)
        .def_readonly("weight", &ToricModel::weight)
        .def_readonly("anticanonical", &ToricModel::anticanonical)
        .def_readonly("pic_rays", &ToricModel::pic_rays)
        .def("num_cones", &ToricModel::num_cones)
        .def("off_rays", &ToricModel::off_rays, py::return_value_policy::copy)
        .def("divisor_D_sigma", &ToricModel::divisor_D_sigma, py::return_value_policy::copy)
        .def("divisor_E", &ToricModel::divisor_E)
        .def("minimal_uncovered_sets", &ToricModel::minimal_uncovered_sets);

    py::class_<QuasiForm>(mod, "QuasiForm")
        .def_readonly("degrees", &QuasiForm::degrees)
        .def("eval_int", [](const QuasiForm& f, std::vector<long long> x) { return f.eval_int(x); })
        .def("eval_mod",
             [](const QuasiForm& f, std::vector<long long> x, std::uint32_t m) {
                 return f.eval_mod(x, m);
             })
        .def("eval_real",
             [](const QuasiForm& f, std::vector<double> u) { return f.eval_real(u); })
        .def("degree_in", &QuasiForm::degree_in);

    py::class_<LoadedModel>(mod, "LoadedModel")
        .def_readonly("model", &LoadedModel::model)
        .def_readonly("form", &LoadedModel::form)
        .def_readonly("hash", &LoadedModel::hash);

    mod.def("load_model", &load_model_file, py::arg("path"), "load and validate a model file");
    mod.def("parse_model",
            [](const std::string& text) {
                RawModel raw = parse_model_json(text);
                ToricModel model = ToricModel::validate(raw);
                QuasiForm form = QuasiForm::check_quasi_homogeneous(model, raw.polynomial);
                return LoadedModel{std::move(model), std::move(form), fnv1a_hex(text)};
            },
            py::arg("text"), "parse and validate a model from a JSON string");

    mod.def("is_torsor_point",
            [](const ToricModel& m, std::vector<long long> x) { return is_torsor_point(m, x); });
    mod.def("height", [](const ToricModel& m, std::vector<long long> x) { return height(m, x); });
    mod.def("dominant_cone",
            [](const ToricModel& m, std::vector<long long> x) { return dominant_cone(m, x); });

    py::class_<CountRecord>(mod, "CountRecord")
        .def_readonly("B", &CountRecord::B)
        .def_readonly("total", &CountRecord::total)
        .def_readonly("per_cone", &CountRecord::per_cone)
        .def_property_readonly("rational",
                               [](const CountRecord& r) { return r.rational.to_double(); })
        .def_property_readonly("rational_str",
                               [](const CountRecord& r) { return r.rational.str(); });

    mod.def(
        "count_torsor",
        [](const LoadedModel& lm, long long B, bool all_nonzero, bool coprime, bool use_form,
           std::vector<long long> e, long long budget, int workers) {
            CountOptions opt;
            opt.all_nonzero = all_nonzero;
            opt.coprime = coprime;
            opt.e = std::move(e);
            opt.budget = budget;
            opt.workers = workers;
            return count_torsor(lm.model, use_form ? &lm.form : nullptr, B, opt);
        },
        py::arg("model"), py::arg("B"), py::arg("all_nonzero") = true, py::arg("coprime") = true,
        py::arg("use_form") = true, py::arg("e") = std::vector<long long>{},
        py::arg("budget") = 10'000'000'000LL, py::arg("workers") = 1);

    mod.def(
        "fiber_count",
        [](const LoadedModel& lm, int cone, std::vector<long long> k, bool upper,
           std::vector<long long> e, long long budget) {
            return fiber_count(lm.model, lm.form, cone, ones_like(lm.model, std::move(e)), k,
                               upper, budget);
        },
        py::arg("model"), py::arg("cone"), py::arg("k"), py::arg("upper") = true,
        py::arg("e") = std::vector<long long>{}, py::arg("budget") = 10'000'000'000LL);

    mod.def(
        "cone_count",
        [](const LoadedModel& lm, int cone, long long B, std::vector<long long> e,
           long long budget) {
            return cone_count(lm.model, lm.form, cone, ones_like(lm.model, std::move(e)), B,
                              budget);
        },
        py::arg("model"), py::arg("cone"), py::arg("B"), py::arg("e") = std::vector<long long>{},
        py::arg("budget") = 10'000'000'000LL);

    py::class_<MobiusTable>(mod, "MobiusTable")
        .def(py::init([](const LoadedModel& lm) { return MobiusTable(lm.model); }))
        .def("chi", [](const MobiusTable& t, std::vector<long long> e) { return t.chi(e); })
        .def("mu_local", &MobiusTable::mu_local)
        .def("mu_global",
             [](const MobiusTable& t, std::vector<long long> e) { return t.mu_global(e); })
        .def("pattern_covered", &MobiusTable::pattern_covered)
        .def("mu_partial_sum_bound", [](const MobiusTable& t, long long X) {
            auto rep = t.mu_partial_sum_bound(X);
            py::dict d;
            d["f"] = rep.f;
            d["per_prime_factor"] = rep.per_prime_factor;
            d["tail_estimate"] = rep.tail_estimate;
            d["min_set_cards"] = rep.min_set_cards;
            return d;
        });

    py::class_<DensityReport>(mod, "DensityReport")
        .def_readonly("p", &DensityReport::p)
        .def_readonly("stabilized", &DensityReport::stabilized)
        .def_property_readonly("stabilized_at",
                               [](const DensityReport& r) {
                                   return r.stabilized_at ? py::cast(*r.stabilized_at)
                                                          : py::none().cast<py::object>();
                               })
        .def_property_readonly("values",
                               [](const DensityReport& r) {
                                   std::vector<double> v;
                                   for (const auto& x : r.values) v.push_back(x.to_double());
                                   return v;
                               })
        .def_property_readonly("values_str",
                               [](const DensityReport& r) {
                                   std::vector<std::string> v;
                                   for (const auto& x : r.values) v.push_back(x.str());
                                   return v;
                               })
        .def_property_readonly("sigma", [](const DensityReport& r) { return r.sigma.to_double(); });

    py::class_<SeriesResult>(mod, "SeriesResult")
        .def_readonly("value", &SeriesResult::value)
        .def_readonly("tail_bound", &SeriesResult::tail_bound)
        .def_readonly("any_unstable", &SeriesResult::any_unstable)
        .def_property_readonly("factors", [](const SeriesResult& s) {
            py::list out;
            for (const auto& f : s.factors) {
                py::dict d;
                d["p"] = f.p;
                d["sigma_p"] = f.sigma;
                d["stabilized"] = f.stabilized;
                out.append(d);
            }
            return out;
        });

    py::class_<LocalDensities>(mod, "LocalDensities")
        .def(py::init([](const LoadedModel& lm, const MobiusTable& mob) {
                 return LocalDensities(lm.model, lm.form, mob);
             }),
             py::keep_alive<1, 2>(), py::keep_alive<1, 3>())
        .def("complete_sum",
             [](const LocalDensities& d, long long a, long long q, std::vector<long long> e,
                long long budget) { return d.complete_sum(a, q, e, budget); },
             py::arg("a"), py::arg("q"), py::arg("e") = std::vector<long long>{},
             py::arg("budget") = LocalDensities::kDefaultBudget)
        .def("A_of_q",
             [](const LocalDensities& d, long long q, std::vector<long long> e, long long budget) {
                 return d.A_of_q(q, e, budget);
             },
             py::arg("q"), py::arg("e") = std::vector<long long>{},
             py::arg("budget") = LocalDensities::kDefaultBudget)
        .def("m_star",
             [](const LocalDensities& d, long long p, int m, long long budget) {
                 return (double)d.m_star(p, m, budget);
             },
             py::arg("p"), py::arg("m"), py::arg("budget") = LocalDensities::kDefaultBudget)
        .def("sigma_p", &LocalDensities::sigma_p, py::arg("p"), py::arg("m_max") = 3,
             py::arg("budget") = LocalDensities::kDefaultBudget)
        .def("singular_series", &LocalDensities::singular_series, py::arg("prime_bound"),
             py::arg("m_max") = 3, py::arg("budget") = LocalDensities::kDefaultBudget)
        .def("mstar_identity_check",
             [](const LocalDensities& d, long long p, int m, long long budget, double tol) {
                 auto chk = d.mstar_identity_check(p, m, budget, tol);
                 py::dict out;
                 out["lhs"] = chk.lhs.to_double();
                 out["rhs"] = chk.rhs;
                 out["ok"] = chk.ok;
                 return out;
             },
             py::arg("p"), py::arg("m"), py::arg("budget") = LocalDensities::kDefaultBudget,
             py::arg("tol") = 1e-8);

    py::class_<DensityEstimate>(mod, "DensityEstimate")
        .def_readonly("value", &DensityEstimate::value)
        .def_readonly("std_error", &DensityEstimate::std_error)
        .def_readonly("imag", &DensityEstimate::imag)
        .def_readonly("imag_error", &DensityEstimate::imag_error)
        .def_readonly("method", &DensityEstimate::method)
        .def_readonly("seed", &DensityEstimate::seed)
        .def_readonly("samples", &DensityEstimate::samples)
        .def_readonly("eps", &DensityEstimate::eps)
        .def_readonly("eps_values", &DensityEstimate::eps_values)
        .def_readonly("eps_hits", &DensityEstimate::eps_hits);

    py::class_<Archimedean>(mod, "Archimedean")
        .def(py::init([](const LoadedModel& lm) { return Archimedean(lm.model, lm.form); }),
             py::keep_alive<1, 2>())
        .def("region_volume", &Archimedean::region_volume, py::arg("cone"), py::arg("samples"),
             py::arg("seed") = 42)
        .def("I_beta", &Archimedean::I_beta, py::arg("cone"), py::arg("beta"), py::arg("samples"),
             py::arg("seed") = 42)
        .def("leray_density",
             [](const Archimedean& a, int cone, std::vector<double> eps, long long samples,
                std::uint64_t seed) { return a.leray_density(cone, eps, samples, seed); },
             py::arg("cone"), py::arg("eps"), py::arg("samples"), py::arg("seed") = 42)
        .def("J_total",
             [](const Archimedean& a, std::vector<double> eps, long long samples,
                std::uint64_t seed, int workers) { return a.J_total(eps, samples, seed, workers); },
             py::arg("eps"), py::arg("samples"), py::arg("seed") = 42, py::arg("workers") = 1)
        .def("J_total_oscillatory", &Archimedean::J_total_oscillatory, py::arg("phi"),
             py::arg("samples"), py::arg("seed") = 42, py::arg("workers") = 1);

    mod.def("shell_density_box",
            [](int dim, const std::function<double(std::vector<double>)>& f,
               std::vector<double> eps, long long samples, std::uint64_t seed) {
                auto wrap = [&f](std::span<const double> u) {
                    return f(std::vector<double>(u.begin(), u.end()));
                };
                return shell_density_box(dim, wrap, eps, samples, seed);
            },
            py::arg("dim"), py::arg("f"), py::arg("eps"), py::arg("samples"),
            py::arg("seed") = 42);

    py::class_<ConstantBreakdown>(mod, "ConstantBreakdown")
        .def_property_readonly("alpha",
                               [](const ConstantBreakdown& b) { return b.alpha.to_double(); })
        .def_property_readonly("alpha_str",
                               [](const ConstantBreakdown& b) { return b.alpha.str(); })
        .def_readonly("beta", &ConstantBreakdown::beta)
        .def_readonly("series", &ConstantBreakdown::series)
        .def_readonly("J", &ConstantBreakdown::J)
        .def_readonly("tau_H", &ConstantBreakdown::tau_H)
        .def_readonly("C", &ConstantBreakdown::C)
        .def_readonly("C_error", &ConstantBreakdown::C_error);

    mod.def("alpha_of", [](const LoadedModel& lm) { return alpha_of(lm.model).to_double(); });
    mod.def(
        "assemble_constant",
        [](const LoadedModel& lm, long long prime_bound, int m_max, long long series_budget,
           std::vector<double> eps, long long samples, std::uint64_t seed, int workers) {
            SeriesConfig scfg{prime_bound, m_max, series_budget};
            DensityConfig dcfg{std::move(eps), samples, seed, workers};
            return assemble_constant(lm.model, lm.form, scfg, dcfg);
        },
        py::arg("model"), py::arg("prime_bound") = 100, py::arg("m_max") = 3,
        py::arg("series_budget") = LocalDensities::kDefaultBudget,
        py::arg("eps") = std::vector<double>{1e-2, 1e-3}, py::arg("samples") = 1'000'000,
        py::arg("seed") = 42, py::arg("workers") = 1);
    mod.def("predict", &predict, py::arg("breakdown"), py::arg("B"));

    mod.def(
        "upsilon",
        [](int r, std::vector<int> alpha, const std::function<double(std::vector<long long>)>& h,
           double P, long long budget) {
            FiberFamily fam;
            fam.r = r;
            fam.alpha = std::move(alpha);
            fam.h = [&h](std::span<const long long> x) {
                return h(std::vector<long long>(x.begin(), x.end()));
            };
            return upsilon(fam, P, budget);
        },
        py::arg("r"), py::arg("alpha"), py::arg("h"), py::arg("P"),
        py::arg("budget") = 4'000'000'000LL);
    mod.def("V_rj", [](int r, int j) { return V_rj(r, j).to_double(); });
    mod.def("p_r_eval", &p_r_eval, py::arg("r"), py::arg("t"));
    mod.def(
        "fit_leading_constant",
        [](std::vector<std::pair<double, double>> samples, int r) {
            auto fit = fit_leading_constant(samples, r);
            py::dict d;
            d["c_hat"] = fit.c_hat;
            d["a"] = fit.a;
            d["b"] = fit.b;
            d["residual"] = fit.residual;
            return d;
        },
        py::arg("samples"), py::arg("r"));

    mod.def(
        "major_arc_probe",
        [](const LoadedModel& lm, std::vector<long long> P, long long a, long long q, double beta,
           long long samples, std::uint64_t seed, long long budget) {
            std::vector<long long> e;
            auto probe = major_arc_probe(lm.model, lm.form, e, P, a, q, beta, samples, seed, budget);
            py::dict d;
            d["lhs"] = probe.lhs;
            d["rhs"] = probe.rhs;
            d["rel_err"] = probe.rel_err;
            return d;
        },
        py::arg("model"), py::arg("P"), py::arg("a"), py::arg("q"), py::arg("beta") = 0.0,
        py::arg("samples") = 1'000'000, py::arg("seed") = 42,
        py::arg("budget") = 10'000'000'000LL);
}
