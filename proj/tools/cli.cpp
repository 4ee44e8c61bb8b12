#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "powexp/design.hpp"
#include "powexp/errors.hpp"
#include "powexp/exp_sum.hpp"
#include "powexp/fastconv.hpp"
#include "powexp/gen_bm.hpp"
#include "powexp/gen_de.hpp"
#include "powexp/io.hpp"
#include "powexp/prony.hpp"

namespace powexp::cli {

namespace {

enum class Command { Build, Reduce, Report, DesignSweep, Convolve, Scan };
enum class Method { Bm, De };

struct RunConfig {
    Command command = Command::Build;
    double beta = 0.75;
    double delta = 1e-6;
    double T = 10.0;
    double eps = 1e-8;
    Method method = Method::Bm;
    double headroom = 10.0;
    ToleranceSplit split = ToleranceSplit::PaperEx1;
    std::optional<double> eps_rd;
    std::optional<double> eps_rt;
    int grid_P = 751;

    std::string in_path;
    std::string out_path;
    std::string design_out;
    std::string scan_out;
    std::string signal_path;

    // reduce / scan
    std::optional<int> L;
    std::optional<int> K;
    std::optional<double> budget;
    int K_max = 6;
    std::optional<int> L_min;
    std::optional<int> L_max;

    // design-sweep
    std::vector<double> eps_list;

    // convolve
    std::optional<double> alpha;
    bool with_direct = false;
    std::optional<double> bound_eps;

    bool no_header = false;
    bool json_summary = false;
};

// Values reported by --json-summary; unset fields print as null.
struct Summary {
    std::optional<std::size_t> terms;
    std::optional<double> max_rho;
    std::optional<double> h;
    std::optional<int> M;
    std::optional<int> N;
    std::optional<int> L;
    std::optional<int> K;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class T>
nlohmann::json opt_json(const std::optional<T>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

void write_summary(std::ostream& out, const Summary& s)
{
    nlohmann::json j;
    j["terms"] = opt_json(s.terms);
    j["max_rho"] = opt_json(s.max_rho);
    j["h"] = opt_json(s.h);
    j["M"] = opt_json(s.M);
    j["N"] = opt_json(s.N);
    j["L"] = opt_json(s.L);
    j["K"] = opt_json(s.K);
    out << j.dump() << '\n';
}

std::string timestamp_line()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << "# powexp generated " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
    return os.str();
}

// Output sink: a file when a path is given, otherwise the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw Error(ErrorCode::Io, "cannot write '" + path + "'");
            }
            stream_ = file_.get();
        }
    }

    std::ostream& get() { return *stream_; }

    void finish()
    {
        stream_->flush();
        if (!*stream_) {
            throw Error(ErrorCode::Io, "write failed");
        }
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

void csv_header(std::ostream& out, const RunConfig& cfg)
{
    if (!cfg.no_header) {
        out << timestamp_line();
    }
}

Tolerances tolerances(const RunConfig& cfg)
{
    if (cfg.eps_rd || cfg.eps_rt) {
        if (!cfg.eps_rd || !cfg.eps_rt) {
            throw UsageError("--eps-rd and --eps-rt must be given together");
        }
        Tolerances tol{cfg.eps, *cfg.eps_rd, *cfg.eps_rt};
        tol.validate();
        return tol;
    }
    return split_tolerance(cfg.eps, cfg.split);
}

std::vector<double> report_grid(const ExpSum& sum, int P)
{
    return geometric_grid(sum.t_lo(), sum.t_hi(), P);
}

void validate(const RunConfig& cfg)
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw UsageError(std::string(name) + " must be positive");
        }
    };
    switch (cfg.command) {
    case Command::Build:
        positive(cfg.beta, "--beta");
        positive(cfg.delta, "--delta");
        positive(cfg.T, "--T");
        if (!(cfg.delta < cfg.T)) {
            throw UsageError("--delta must be smaller than --T");
        }
        if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) {
            throw UsageError("--eps must lie in (0,1)");
        }
        if (!(cfg.headroom >= 1.0)) {
            throw UsageError("--headroom must be >= 1");
        }
        break;
    case Command::DesignSweep:
        positive(cfg.beta, "--beta");
        positive(cfg.delta, "--delta");
        positive(cfg.T, "--T");
        if (!(cfg.delta < cfg.T)) {
            throw UsageError("--delta must be smaller than --T");
        }
        if (cfg.eps_list.empty()) {
            throw UsageError("--eps-list needs at least one value");
        }
        break;
    case Command::Reduce:
        if (cfg.L.has_value() != cfg.K.has_value()) {
            throw UsageError("--L and --K must be given together");
        }
        if (cfg.L && cfg.budget) {
            throw UsageError("--budget is only used by the automatic scan");
        }
        break;
    case Command::Convolve:
        if (cfg.signal_path.empty()) {
            throw UsageError("--signal is required");
        }
        break;
    default:
        break;
    }
    if (cfg.grid_P < 2) {
        throw UsageError("--P must be >= 2");
    }
}

void cmd_build(const RunConfig& cfg, std::ostream& out, std::ostream& err, Summary& summary)
{
    const Tolerances tol = tolerances(cfg);
    nlohmann::json design;
    design["method"] = cfg.method == Method::Bm ? "bm" : "de";
    design["beta"] = cfg.beta;
    design["delta"] = cfg.delta;
    design["T"] = cfg.T;
    design["eps"] = tol.eps;
    design["eps_rd"] = tol.eps_rd;
    design["eps_rt"] = tol.eps_rt;

    std::optional<ExpSum> sum;
    if (cfg.method == Method::Bm) {
        auto res = generate_bm(cfg.beta, cfg.delta, cfg.T, tol);
        const auto& p = res.recipe.params;
        design["h"] = p.h;
        design["x_delta"] = p.x_delta;
        design["X_T"] = p.X_T;
        design["M"] = p.M;
        design["N"] = p.N;
        summary.h = p.h;
        summary.M = p.M;
        summary.N = p.N;
        sum.emplace(std::move(res.sum));
    } else {
        auto res = generate_de(cfg.beta, cfg.delta, cfg.T, tol, cfg.headroom);
        design["headroom"] = cfg.headroom;
        design["h"] = res.recipe.h;
        design["M"] = res.recipe.M;
        design["N"] = res.recipe.N;
        summary.h = res.recipe.h;
        summary.M = res.recipe.M;
        summary.N = res.recipe.N;
        sum.emplace(std::move(res.sum));
    }
    const auto report = relative_error_report(*sum, report_grid(*sum, cfg.grid_P));
    design["terms"] = sum->size();
    design["max_rho"] = report.max_abs;
    summary.terms = sum->size();
    summary.max_rho = report.max_abs;

    Sink sink(cfg.out_path, out);
    io::write_exp_sum(sink.get(), *sum);
    sink.finish();
    if (!cfg.design_out.empty()) {
        Sink d(cfg.design_out, out);
        d.get() << design.dump(2) << '\n';
        d.finish();
    } else {
        err << "design: " << design.dump() << '\n';
    }
}

void cmd_reduce(const RunConfig& cfg, std::ostream& out, std::ostream& err, Summary& summary)
{
    const ExpSum sum = io::load_exp_sum(cfg.in_path);
    const auto grid = report_grid(sum, cfg.grid_P);
    int L = 0;
    int K = 0;
    prony::PronyReduction reduction;
    if (cfg.L) {
        L = *cfg.L;
        K = *cfg.K;
        if (L < 1 || L > static_cast<int>(sum.size())) {
            throw UsageError("--L must lie in [1, number of terms]");
        }
        reduction = prony::prony_reduce(sum.terms().first(static_cast<std::size_t>(L)), K);
    } else {
        const double budget = cfg.budget.value_or(cfg.eps);
        auto scan = prony::auto_scan(sum, budget, cfg.K_max, grid);
        L = scan.L;
        K = scan.K;
        reduction = std::move(scan.reduction);
    }
    if (reduction.ill_conditioned) {
        err << "warning: " << to_string(ErrorCode::IllConditioned)
            << ": Hankel condition estimate " << reduction.cond_estimate << '\n';
    }
    const ExpSum reduced = L > 0 ? prony::splice(sum, L, reduction) : sum;

    if (!cfg.scan_out.empty()) {
        const int L_max = static_cast<int>(sum.size());
        const int L_min = std::max(1, L_max - 50);
        const auto rows = prony::scan_table(sum, L_min, L_max, cfg.K_max, grid);
        Sink s(cfg.scan_out, out);
        csv_header(s.get(), cfg);
        prony::write_scan_csv(s.get(), rows);
        s.finish();
    }
    const auto report = relative_error_report(reduced, grid);
    summary.terms = reduced.size();
    summary.max_rho = report.max_abs;
    summary.L = L;
    summary.K = K;
    err << "reduce: L=" << L << " K=" << K << " terms " << sum.size() << " -> " << reduced.size()
        << ", max|rho| = " << report.max_abs << '\n';

    Sink sink(cfg.out_path, out);
    io::write_exp_sum(sink.get(), reduced);
    sink.finish();
}

void cmd_report(const RunConfig& cfg, std::ostream& out, Summary& summary)
{
    const ExpSum sum = io::load_exp_sum(cfg.in_path);
    const auto report = relative_error_report(sum, report_grid(sum, cfg.grid_P));
    summary.terms = sum.size();
    summary.max_rho = report.max_abs;
    Sink sink(cfg.out_path, out);
    csv_header(sink.get(), cfg);
    write_report_csv(sink.get(), report);
    sink.finish();
}

void cmd_design_sweep(const RunConfig& cfg, std::ostream& out)
{
    auto eps_list = cfg.eps_list;
    std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
    const auto rows = design::design_sweep(cfg.beta, cfg.delta, cfg.T, eps_list, cfg.split);
    Sink sink(cfg.out_path, out);
    csv_header(sink.get(), cfg);
    design::write_sweep_csv(sink.get(), rows);
    sink.finish();
}

void cmd_convolve(const RunConfig& cfg, std::ostream& out, Summary& summary)
{
    const ExpSum kernel = io::load_exp_sum(cfg.in_path);
    std::ifstream in(cfg.signal_path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open '" + cfg.signal_path + "'");
    }
    const auto signal = fastconv::read_signal_csv(in);
    std::vector<double> pts{0.0};
    pts.insert(pts.end(), signal.t.begin(), signal.t.end());
    const fastconv::TimeGrid grid(std::move(pts));
    const double alpha = cfg.alpha.value_or(1.0 - kernel.beta());
    const double eps = cfg.bound_eps.value_or(
        relative_error_report(kernel, report_grid(kernel, cfg.grid_P)).max_abs);

    const auto fast = fastconv::fast_convolve(grid, signal.u, kernel, alpha);
    std::vector<double> direct;
    if (cfg.with_direct) {
        direct = fastconv::direct_convolve(grid, signal.u, alpha);
    }
    const auto bound = fastconv::error_bound(grid, signal.u, alpha, eps);
    summary.terms = kernel.size();
    summary.max_rho = eps;

    Sink sink(cfg.out_path, out);
    csv_header(sink.get(), cfg);
    fastconv::write_convolution_csv(sink.get(), signal.t, fast, direct, bound);
    sink.finish();
}

void cmd_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const ExpSum sum = io::load_exp_sum(cfg.in_path);
    const int n = static_cast<int>(sum.size());
    const int L_max = cfg.L_max.value_or(n);
    const int L_min = cfg.L_min.value_or(std::max(1, L_max - 20));
    const auto rows =
        prony::scan_table(sum, L_min, L_max, cfg.K_max, report_grid(sum, cfg.grid_P));
    const auto floored = std::count_if(rows.begin(), rows.end(),
                                       [](const prony::ScanEntry& r) { return r.below_floor; });
    if (floored > 0) {
        err << "scan: " << floored << " entries below the rounding floor " << prony::kEtaFloor
            << '\n';
    }
    Sink sink(cfg.out_path, out);
    csv_header(sink.get(), cfg);
    prony::write_scan_csv(sink.get(), rows);
    sink.finish();
}

void add_common(CLI::App* sub, RunConfig& cfg)
{
    sub->add_flag("--no-header", cfg.no_header, "Omit the timestamp line in CSV outputs");
    sub->add_flag("--json-summary", cfg.json_summary,
                  "Print {terms, max_rho, h, M, N, L, K} as JSON on stdout");
    sub->add_option("--P", cfg.grid_P, "Points in the geometric error grid")->capture_default_str();
}

void add_problem(CLI::App* sub, RunConfig& cfg)
{
    const std::map<std::string, ToleranceSplit> splits{{"paper-ex1", ToleranceSplit::PaperEx1},
                                                       {"thirds", ToleranceSplit::Thirds}};
    sub->add_option("--beta", cfg.beta, "Exponent beta of t^-beta")->capture_default_str();
    sub->add_option("--delta", cfg.delta, "Lower end of the interval")->capture_default_str();
    sub->add_option("--T", cfg.T, "Upper end of the interval")->capture_default_str();
    sub->add_option("--split", cfg.split, "Tolerance split: paper-ex1 (0.9/0.05) or thirds")
        ->transform(CLI::CheckedTransformer(splits, CLI::ignore_case));
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    CLI::App app{"Exponential sum approximations of t^-beta"};
    app.name("powexp");
    app.require_subcommand(1);

    const std::map<std::string, Method> methods{{"bm", Method::Bm}, {"de", Method::De}};

    auto* build = app.add_subcommand("build", "Generate an exponential sum");
    add_problem(build, cfg);
    add_common(build, cfg);
    build->add_option("--method", cfg.method, "bm (p = e^x) or de (p = exp(x - e^-x))")
        ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
    build->add_option("--eps", cfg.eps, "Overall relative error target")->capture_default_str();
    build->add_option("--eps-rd", cfg.eps_rd, "Explicit discretization tolerance");
    build->add_option("--eps-rt", cfg.eps_rt, "Explicit truncation tolerance (per tail)");
    build->add_option("--headroom", cfg.headroom, "de only: build on [delta, headroom*T]")
        ->capture_default_str();
    build->add_option("--out,-o", cfg.out_path, "ExpSum JSON output (default stdout)");
    build->add_option("--design-out", cfg.design_out, "Design report JSON output");

    auto* reduce = app.add_subcommand("reduce", "Prony reduction of the smallest exponents");
    add_common(reduce, cfg);
    reduce->add_option("--in,-i", cfg.in_path, "ExpSum JSON input")->required();
    reduce->add_option("--out,-o", cfg.out_path, "Reduced ExpSum JSON output");
    reduce->add_option("--L", cfg.L, "Head length (explicit reduction)");
    reduce->add_option("--K", cfg.K, "Reduced term count (explicit reduction)");
    reduce->add_option("--budget", cfg.budget, "Added-error budget for the automatic scan");
    reduce->add_option("--eps", cfg.eps, "Budget used when --budget is absent")
        ->capture_default_str();
    reduce->add_option("--K-max", cfg.K_max, "Largest K tried by the scan")->capture_default_str();
    reduce->add_option("--scan-out", cfg.scan_out, "Write the L,K,eta_max table here");

    auto* report = app.add_subcommand("report", "Relative error on a geometric grid");
    add_common(report, cfg);
    report->add_option("--in,-i", cfg.in_path, "ExpSum JSON input")->required();
    report->add_option("--out,-o", cfg.out_path, "t,rho CSV output");

    auto* sweep = app.add_subcommand("design-sweep", "h, M, N as functions of eps");
    add_problem(sweep, cfg);
    add_common(sweep, cfg);
    sweep->add_option("--eps-list", cfg.eps_list, "Tolerances")->delimiter(',')->required();
    sweep->add_option("--out,-o", cfg.out_path, "eps,h,M,N CSV output");

    auto* conv = app.add_subcommand("convolve", "Fast fractional integral of a sampled signal");
    add_common(conv, cfg);
    conv->add_option("--kernel,-k", cfg.in_path, "ExpSum JSON for t^-(1-alpha)")->required();
    conv->add_option("--signal,-s", cfg.signal_path, "t,U CSV input");
    conv->add_option("--alpha", cfg.alpha, "Order alpha (default 1 - beta)");
    conv->add_flag("--direct", cfg.with_direct, "Also evaluate the O(N^2) direct sum");
    conv->add_option("--bound-eps", cfg.bound_eps,
                     "Kernel relative error used in the bound column (default: measured)");
    conv->add_option("--out,-o", cfg.out_path, "t,fast[,direct],bound CSV output");

    auto* scan = app.add_subcommand("scan", "eta_max over a grid of (L, K)");
    add_common(scan, cfg);
    scan->add_option("--in,-i", cfg.in_path, "ExpSum JSON input")->required();
    scan->add_option("--L-min", cfg.L_min, "Smallest head length");
    scan->add_option("--L-max", cfg.L_max, "Largest head length");
    scan->add_option("--K-max", cfg.K_max, "Largest K")->capture_default_str();
    scan->add_option("--out,-o", cfg.out_path, "L,K,eta_max CSV output");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kExitDomain;
    }

    if (build->parsed()) cfg.command = Command::Build;
    if (reduce->parsed()) cfg.command = Command::Reduce;
    if (report->parsed()) cfg.command = Command::Report;
    if (sweep->parsed()) cfg.command = Command::DesignSweep;
    if (conv->parsed()) cfg.command = Command::Convolve;
    if (scan->parsed()) cfg.command = Command::Scan;

    CLI::App* active = app.get_subcommands().front();
    Summary summary;
    try {
        validate(cfg);
        switch (cfg.command) {
        case Command::Build: cmd_build(cfg, out, err, summary); break;
        case Command::Reduce: cmd_reduce(cfg, out, err, summary); break;
        case Command::Report: cmd_report(cfg, out, summary); break;
        case Command::DesignSweep: cmd_design_sweep(cfg, out); break;
        case Command::Convolve: cmd_convolve(cfg, out, summary); break;
        case Command::Scan: cmd_scan(cfg, out, err); break;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n' << active->help();
        return kExitDomain;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::Io ? kExitIo : kExitDomain;
    }
    if (cfg.json_summary) {
        write_summary(out, summary);
    }
    return kExitOk;
}

} // namespace powexp::cli
