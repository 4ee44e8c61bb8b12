#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "powexp/design.hpp"
#include "powexp/errors.hpp"
#include "powexp/exp_sum.hpp"
#include "powexp/fastconv.hpp"
#include "powexp/gen_bm.hpp"
#include "powexp/gen_de.hpp"
#include "powexp/io.hpp"
#include "powexp/prony.hpp"
#include "powexp/specfun.hpp"

namespace py = pybind11;
using namespace powexp;

namespace {

using TermList = std::vector<std::pair<double, double>>;

std::vector<Term> to_terms(const TermList& list)
{
    std::vector<Term> out;
    out.reserve(list.size());
    for (const auto& [a, w] : list) {
        out.push_back({a, w});
    }
    return out;
}

TermList from_terms(std::span<const Term> terms)
{
    TermList out;
    out.reserve(terms.size());
    for (const auto& t : terms) {
        out.emplace_back(t.a, t.w);
    }
    return out;
}

ToleranceSplit parse_split(const std::string& s)
{
    if (s == "paper-ex1") return ToleranceSplit::PaperEx1;
    if (s == "thirds") return ToleranceSplit::Thirds;
    throw Error(ErrorCode::Domain, "split must be 'paper-ex1' or 'thirds'");
}

py::dict design_dict(const DesignParams& p)
{
    py::dict d;
    d["h"] = p.h;
    d["x_delta"] = p.x_delta;
    d["X_T"] = p.X_T;
    d["M"] = p.M;
    d["N"] = p.N;
    return d;
}

py::dict reduction_dict(const prony::PronyReduction& r)
{
    py::dict d;
    d["L"] = r.L;
    d["K"] = r.K;
    d["scale"] = r.moments.scale;
    d["moments"] = r.moments.g;
    d["poly"] = r.poly;
    d["terms"] = from_terms(r.reduced);
    d["cond_estimate"] = r.cond_estimate;
    d["residual"] = r.residual;
    d["ill_conditioned"] = r.ill_conditioned;
    return d;
}

prony::PronyReduction reduction_from(const py::dict& d)
{
    prony::PronyReduction r;
    r.L = d["L"].cast<int>();
    r.K = d["K"].cast<int>();
    r.reduced = to_terms(d["terms"].cast<TermList>());
    return r;
}

fastconv::TimeGrid time_grid(const std::vector<double>& t)
{
    std::vector<double> pts{0.0};
    pts.insert(pts.end(), t.begin(), t.end());
    return fastconv::TimeGrid(std::move(pts));
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Exponential sum approximations of t^-beta";

    static py::exception<Error> error_type(m, "PowexpError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
            exc.attr("code") = to_string(e.code());
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    // special functions
    m.def("gamma", &specfun::gamma, py::arg("beta"));
    m.def("abs_gamma_complex", &specfun::abs_gamma_complex, py::arg("beta"), py::arg("y"));
    m.def("arg_gamma_complex", &specfun::arg_gamma_complex, py::arg("beta"), py::arg("y"));
    m.def("upper_inc_gamma", &specfun::upper_inc_gamma, py::arg("beta"), py::arg("q"));
    m.def("lower_inc_gamma", &specfun::lower_inc_gamma, py::arg("beta"), py::arg("q"));
    m.def("amplitude_ratio", &specfun::amplitude_ratio, py::arg("beta"), py::arg("xi"));

    py::class_<Tolerances>(m, "Tolerances")
        .def(py::init([](double eps, double eps_rd, double eps_rt) {
                 Tolerances t{eps, eps_rd, eps_rt};
                 t.validate();
                 return t;
             }),
             py::arg("eps") = 1e-8, py::arg("eps_rd") = 0.9e-8, py::arg("eps_rt") = 0.05e-8)
        .def_readonly("eps", &Tolerances::eps)
        .def_readonly("eps_rd", &Tolerances::eps_rd)
        .def_readonly("eps_rt", &Tolerances::eps_rt)
        .def("__repr__", [](const Tolerances& t) {
            return "Tolerances(eps=" + io::format_double(t.eps) +
                   ", eps_rd=" + io::format_double(t.eps_rd) +
                   ", eps_rt=" + io::format_double(t.eps_rt) + ")";
        });
    m.def("split_tolerance", [](double eps, const std::string& split) {
        return split_tolerance(eps, parse_split(split));
    }, py::arg("eps"), py::arg("split") = "paper-ex1");

    // design
    m.def("solve_step", &design::solve_step, py::arg("beta"), py::arg("eps_rd"));
    m.def("solve_upper_cutoff", &design::solve_upper_cutoff, py::arg("beta"), py::arg("delta"),
          py::arg("eps_rt"));
    m.def("solve_lower_cutoff", &design::solve_lower_cutoff, py::arg("beta"), py::arg("T"),
          py::arg("eps_rt"));
    m.def("design_bm", [](double beta, double delta, double T, const Tolerances& tol) {
        return design_dict(design::design_bm(beta, delta, T, tol));
    }, py::arg("beta"), py::arg("delta"), py::arg("T"), py::arg("tol") = Tolerances{});
    m.def("design_sweep", [](double beta, double delta, double T, std::vector<double> eps_list,
                             const std::string& split) {
        std::vector<py::dict> rows;
        for (const auto& r : design::design_sweep(beta, delta, T, eps_list, parse_split(split))) {
            py::dict d;
            d["eps"] = r.eps;
            d["h"] = r.h;
            d["M"] = r.M;
            d["N"] = r.N;
            rows.push_back(d);
        }
        return rows;
    }, py::arg("beta"), py::arg("delta"), py::arg("T"), py::arg("eps_list"),
          py::arg("split") = "thirds");

    // exponential sums
    py::class_<ExpSum>(m, "ExpSum")
        .def(py::init([](double beta, const TermList& terms, double t_lo, double t_hi,
                         const std::string& provenance) {
                 return ExpSum(beta, to_terms(terms), t_lo, t_hi,
                               provenance_from_string(provenance));
             }),
             py::arg("beta"), py::arg("terms"), py::arg("t_lo"), py::arg("t_hi"),
             py::arg("provenance") = "file")
        .def_property_readonly("beta", &ExpSum::beta)
        .def_property_readonly("t_lo", &ExpSum::t_lo)
        .def_property_readonly("t_hi", &ExpSum::t_hi)
        .def_property_readonly("provenance",
                               [](const ExpSum& s) { return std::string(to_string(s.provenance())); })
        .def_property_readonly("terms", [](const ExpSum& s) { return from_terms(s.terms()); })
        .def("__len__", &ExpSum::size)
        .def("__call__", &ExpSum::operator(), py::arg("t"))
        .def("__call__", [](const ExpSum& s, const std::vector<double>& t) {
            std::vector<double> out;
            out.reserve(t.size());
            for (double v : t) {
                out.push_back(s(v));
            }
            return out;
        }, py::arg("t"))
        .def("raw_sum", &ExpSum::raw_sum, py::arg("t"))
        .def("with_interval", &ExpSum::with_interval, py::arg("t_lo"), py::arg("t_hi"))
        .def("to_json", [](const ExpSum& s) { return io::exp_sum_to_json(s); })
        .def_static("from_json", &io::exp_sum_from_json, py::arg("text"))
        .def("__repr__", [](const ExpSum& s) {
            return "ExpSum(beta=" + io::format_double(s.beta()) + ", terms=" +
                   std::to_string(s.size()) + ", interval=[" + io::format_double(s.t_lo()) +
                   ", " + io::format_double(s.t_hi()) + "], provenance=" +
                   to_string(s.provenance()) + ")";
        });

    m.def("load_exp_sum", &io::load_exp_sum, py::arg("path"));
    m.def("save_exp_sum", &io::save_exp_sum, py::arg("path"), py::arg("sum"));

    m.def("generate_bm", [](double beta, double delta, double T, const Tolerances& tol) {
        auto r = generate_bm(beta, delta, T, tol);
        return py::make_tuple(std::move(r.sum), design_dict(r.recipe.params));
    }, py::arg("beta"), py::arg("delta"), py::arg("T"), py::arg("tol") = Tolerances{});
    m.def("generate_de", [](double beta, double delta, double T, const Tolerances& tol,
                            double headroom) {
        auto r = generate_de(beta, delta, T, tol, headroom);
        py::dict d;
        d["h"] = r.recipe.h;
        d["M"] = r.recipe.M;
        d["N"] = r.recipe.N;
        d["headroom"] = r.recipe.headroom;
        return py::make_tuple(std::move(r.sum), d);
    }, py::arg("beta"), py::arg("delta"), py::arg("T"), py::arg("tol") = Tolerances{},
          py::arg("headroom") = 10.0);

    m.def("geometric_grid", &geometric_grid, py::arg("t_lo"), py::arg("t_hi"), py::arg("P") = 751);
    m.def("relative_error", [](const ExpSum& s, std::optional<std::vector<double>> grid) {
        const auto g = grid ? *grid : geometric_grid(s.t_lo(), s.t_hi());
        const auto r = relative_error_report(s, g);
        py::dict d;
        d["grid"] = r.grid;
        d["rho"] = r.rho;
        d["max_abs"] = r.max_abs;
        d["argmax_t"] = r.argmax_t;
        return d;
    }, py::arg("sum"), py::arg("grid") = py::none());
    m.def("rescale", &rescale, py::arg("sum"), py::arg("T_prime"));
    m.def("error_model_first_term", &error_model_first_term, py::arg("beta"), py::arg("h"),
          py::arg("t"));

    // Prony reduction
    m.def("prony_reduce", [](const TermList& head, int K) {
        return reduction_dict(prony::prony_reduce(to_terms(head), K));
    }, py::arg("head"), py::arg("K"));
    m.def("eta_error", [](const TermList& head, const TermList& reduced, double beta,
                          const std::vector<double>& grid) {
        return prony::eta_error(to_terms(head), to_terms(reduced), beta, grid);
    }, py::arg("head"), py::arg("reduced"), py::arg("beta"), py::arg("grid"));
    m.def("auto_scan", [](const ExpSum& s, double budget, int K_max,
                          std::optional<std::vector<double>> grid) {
        const auto g = grid ? *grid : geometric_grid(s.t_lo(), s.t_hi());
        const auto r = prony::auto_scan(s, budget, K_max, g);
        if (r.L == 0) {
            return py::object(py::none());
        }
        return py::object(reduction_dict(r.reduction));
    }, py::arg("sum"), py::arg("budget"), py::arg("K_max") = 6, py::arg("grid") = py::none());
    m.def("splice", [](const ExpSum& s, const py::dict& reduction) {
        const auto r = reduction_from(reduction);
        return prony::splice(s, r.L, r);
    }, py::arg("sum"), py::arg("reduction"));
    m.def("scan_table", [](const ExpSum& s, int L_min, int L_max, int K_max) {
        std::vector<std::tuple<int, int, double>> rows;
        for (const auto& r :
             prony::scan_table(s, L_min, L_max, K_max, geometric_grid(s.t_lo(), s.t_hi()))) {
            rows.emplace_back(r.L, r.K, r.eta_max);
        }
        return rows;
    }, py::arg("sum"), py::arg("L_min"), py::arg("L_max"), py::arg("K_max") = 6);

    // fractional integral; t lists t_1..t_Nt with t_0 = 0 implied
    m.def("direct_convolve", [](const std::vector<double>& t, const std::vector<double>& u,
                                double alpha) {
        return fastconv::direct_convolve(time_grid(t), u, alpha);
    }, py::arg("t"), py::arg("u"), py::arg("alpha"));
    m.def("fast_convolve", [](const std::vector<double>& t, const std::vector<double>& u,
                              const ExpSum& kernel, double alpha) {
        return fastconv::fast_convolve(time_grid(t), u, kernel, alpha);
    }, py::arg("t"), py::arg("u"), py::arg("kernel"), py::arg("alpha"));
    m.def("error_bound", [](const std::vector<double>& t, const std::vector<double>& u,
                            double alpha, double eps) {
        return fastconv::error_bound(time_grid(t), u, alpha, eps);
    }, py::arg("t"), py::arg("u"), py::arg("alpha"), py::arg("eps"));

    py::class_<fastconv::FastConvolver>(m, "FastConvolver")
        .def(py::init<const ExpSum&, double>(), py::arg("kernel"), py::arg("alpha"))
        .def("step", &fastconv::FastConvolver::step, py::arg("t"), py::arg("u"))
        .def_property_readonly("steps_taken", &fastconv::FastConvolver::steps_taken);
}
