#include "epholo/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>

#include <json.hpp>

#include "epholo/generator_solver.hpp"
#include "epholo/numdiff.hpp"

namespace epholo {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace std::complex_literals;

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::no_ep: return "no-ep";
        case Scenario::ep_minus: return "ep-minus";
        case Scenario::ep_plus: return "ep-plus";
        case Scenario::both_eps: return "both-eps";
        case Scenario::winding: return "winding";
        case Scenario::gate_cycle: return "gate-cycle";
        case Scenario::flatness_scan: return "flatness-scan";
        case Scenario::k_check: return "k-check";
        case Scenario::metric_check: return "metric-check";
    }
    return "no-ep";
}

std::optional<Scenario> scenario_from_string(const std::string& name) {
    static const std::pair<const char*, Scenario> table[] = {
        {"no-ep", Scenario::no_ep},
        {"ep-minus", Scenario::ep_minus},
        {"ep-plus", Scenario::ep_plus},
        {"both-eps", Scenario::both_eps},
        {"winding", Scenario::winding},
        {"gate-cycle", Scenario::gate_cycle},
        {"flatness-scan", Scenario::flatness_scan},
        {"k-check", Scenario::k_check},
        {"metric-check", Scenario::metric_check},
    };
    for (const auto& [key, value] : table) {
        if (name == key) return value;
    }
    return std::nullopt;
}

void validate(const ScenarioConfig& cfg) {
    if (cfg.steps < 1000) throw InvalidConfig("steps must be >= 1000");
    if (!(cfg.tolerance > 0.0)) throw InvalidConfig("tolerance must be positive");
    if (cfg.output_dir.empty()) throw InvalidConfig("output_dir must not be empty");
    switch (cfg.scenario) {
        case Scenario::no_ep:
        case Scenario::metric_check:
            if (!(cfg.r > 0.0 && cfg.r < 1.0)) {
                throw InvalidConfig("r must satisfy 0 < r < 1 for loops enclosing no EP");
            }
            break;
        case Scenario::both_eps:
            if (!(cfg.r > 1.001)) {
                throw InvalidConfig("r must exceed 1 for a loop enclosing both EPs");
            }
            break;
        default:
            break;
    }
    switch (cfg.scenario) {
        case Scenario::ep_minus:
        case Scenario::ep_plus:
        case Scenario::winding:
        case Scenario::gate_cycle:
        case Scenario::metric_check:
            if (!(cfg.rho > 0.0 && cfg.rho < 2.0)) {
                throw InvalidConfig("rho must satisfy 0 < rho < 2");
            }
            break;
        default:
            break;
    }
    if (cfg.scenario == Scenario::winding) {
        if (cfg.winding == 0 || std::abs(cfg.winding) > 64) {
            throw InvalidConfig("winding must be nonzero with |winding| <= 64");
        }
    }
    if (cfg.scenario == Scenario::flatness_scan) {
        if (cfg.grid < 2) throw InvalidConfig("flatness grid must be >= 2");
        if (!(cfg.xmax > cfg.xmin) || !(cfg.ymax > cfg.ymin)) {
            throw InvalidConfig("flatness bounds must be ordered");
        }
    }
}

namespace {

std::string fmt_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// i^(-k) style powers of the loop holonomy eigenvalue: (-i)^k for k mod 4.
Complex minus_i_power(long k) {
    static const Complex table[4] = {1.0, -1i, -1.0, 1i};
    return table[((k % 4) + 4) % 4];
}

ComplexMat i_hol_power(int k) {
    ComplexMat m = mat_identity2();
    const ComplexMat i_hol = mat_I_hol();
    for (int j = 0; j < ((k % 4) + 4) % 4; ++j) m = i_hol * m;
    return m;
}

std::string canonical_config_string(const ScenarioConfig& cfg) {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::string s;
    s += "scenario=" + to_string(cfg.scenario);
    s += ";r=" + num(cfg.r);
    s += ";rho=" + num(cfg.rho);
    s += ";winding=" + std::to_string(cfg.winding);
    s += ";steps=" + std::to_string(cfg.steps);
    s += ";t=" + num(cfg.time_slice);
    s += ";tol=" + num(cfg.tolerance);
    s += ";seed=" + std::to_string(cfg.seed);
    s += ";grid=" + std::to_string(cfg.grid);
    s += ";xmin=" + num(cfg.xmin) + ";xmax=" + num(cfg.xmax);
    s += ";ymin=" + num(cfg.ymin) + ";ymax=" + num(cfg.ymax);
    return s;
}

}  // namespace

std::string config_hash(const ScenarioConfig& cfg) {
    // FNV-1a, 64 bit.
    const std::string key = canonical_config_string(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : key) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool RunSummary::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
}

namespace {

std::ofstream open_output(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot open output file " + p.string());
    return out;
}

double det_drift(const TransportResult& r) {
    double drift = 0.0;
    for (const auto& [s, u] : r.samples) {
        drift = std::max(drift, std::abs(u.determinant() - 1.0));
    }
    return drift;
}

void append_check(RunSummary& summary, const std::string& name, double value, double tol,
                  bool pass_is_less = true) {
    CheckResult c;
    c.name = name;
    c.value = value;
    c.tol = tol;
    c.pass = pass_is_less ? (value < tol) : (value > tol);
    summary.checks.push_back(c);
}

// Reference lambda along w repetitions of the loop around (-1, 0): the closed
// form on each revolution times the accumulated per-revolution factor (-i)^k.
// Handles the path-end samples landing exactly on revolution boundaries.
std::function<Complex(double)> minus_loop_reference(double rho, int w) {
    const double two_pi = 2.0 * M_PI;
    if (w > 0) {
        return [rho, two_pi](double s) {
            const long k = static_cast<long>(std::floor(s / two_pi + 1e-12));
            const double theta = std::min(s - two_pi * static_cast<double>(k), two_pi);
            return lambda_ref_minus(rho, theta) * minus_i_power(k);
        };
    }
    // Reversed orientation: the trace runs the forward loop backwards from its
    // endpoint, so lambda(s) = lambda_fwd(L - s) / lambda_fwd(L).
    const long total = -static_cast<long>(w);
    return [rho, two_pi, total](double s) {
        const double u = two_pi * static_cast<double>(total) - s;
        const long k = static_cast<long>(std::floor(u / two_pi + 1e-12));
        const double theta = std::min(u - two_pi * static_cast<double>(k), two_pi);
        return lambda_ref_minus(rho, theta) * minus_i_power(k - total);
    };
}

// Everything a transport scenario needs besides the shared bookkeeping.
struct LoopPlan {
    Path path;
    int expected_power{0};  // holonomy = I^expected_power at time_slice 0
    std::function<Complex(double)> lambda_ref;  // null when no closed form applies
};

LoopPlan build_loop_plan(const ScenarioConfig& cfg) {
    LoopPlan plan;
    const double t0 = cfg.time_slice;
    switch (cfg.scenario) {
        case Scenario::no_ep: {
            plan.path = make_loop({LoopKind::circle_origin, cfg.r, 1, t0});
            plan.expected_power = 0;
            const double r = cfg.r;
            plan.lambda_ref = [r](double s) { return lambda_ref_O(r, std::fmod(s, 2.0 * M_PI)); };
            break;
        }
        case Scenario::ep_minus:
        case Scenario::gate_cycle: {
            plan.path = make_loop({LoopKind::circle_ep_minus, cfg.rho, 1, t0});
            plan.expected_power = 1;
            plan.lambda_ref = minus_loop_reference(cfg.rho, 1);
            break;
        }
        case Scenario::ep_plus: {
            plan.path = make_loop({LoopKind::circle_ep_plus, cfg.rho, 1, t0});
            plan.expected_power = 3;
            // The mirrored loop's diagonalized evolution is the reciprocal one.
            auto ref = minus_loop_reference(cfg.rho, 1);
            plan.lambda_ref = [ref](double s) { return 1.0 / ref(s); };
            break;
        }
        case Scenario::both_eps: {
            // Both defect lines are enclosed with the same orientation, so their
            // holonomy contributions multiply to I^2; no single-loop closed form
            // for lambda applies here.
            plan.path = loop_circle(0.0, 0.0, cfg.r, t0, 1);
            plan.expected_power = 2;
            plan.lambda_ref = nullptr;
            break;
        }
        case Scenario::winding: {
            plan.path = make_loop({LoopKind::circle_ep_minus, cfg.rho, cfg.winding, t0});
            plan.expected_power = ((cfg.winding % 4) + 4) % 4;
            plan.lambda_ref = minus_loop_reference(cfg.rho, cfg.winding);
            break;
        }
        default:
            throw Error("build_loop_plan: not a transport scenario");
    }
    return plan;
}

void write_trace_csv(const fs::path& file, const Path& path, const TransportResult& result,
                     const LambdaTrace& trace, const std::function<Complex(double)>& ref) {
    std::ofstream out = open_output(file);
    out << "s,theta,x,y,re_u00,im_u00,re_u01,im_u01,re_u10,im_u10,re_u11,im_u11,"
           "re_lambda,im_lambda,re_lambda_ref,im_lambda_ref,xi_offdiag\n";
    for (std::size_t k = 0; k < result.samples.size(); ++k) {
        const auto& [s, u] = result.samples[k];
        const BasePoint p = path_position(path, s);
        const Complex lambda = trace.samples[k].lambda;
        const Complex lref = ref ? ref(s) : Complex(kNan, kNan);
        const double cols[] = {
            s,
            std::fmod(s, 2.0 * M_PI),
            p.q(0),
            p.q(1),
            u(0, 0).real(), u(0, 0).imag(),
            u(0, 1).real(), u(0, 1).imag(),
            u(1, 0).real(), u(1, 0).imag(),
            u(1, 1).real(), u(1, 1).imag(),
            lambda.real(), lambda.imag(),
            lref.real(), lref.imag(),
            trace.samples[k].off_diagonal,
        };
        for (std::size_t i = 0; i < std::size(cols); ++i) {
            out << (i ? "," : "") << fmt_sci(cols[i]);
        }
        out << "\n";
    }
}

RunSummary run_transport_scenario(const ScenarioConfig& cfg) {
    LoopPlan plan = build_loop_plan(cfg);
    const ModelGenerators gens;
    TransportOptions opt;
    opt.steps = cfg.steps;
    opt.sample_stride = std::max(1, cfg.steps / 1000);

    RunSummary summary;
    summary.scenario = to_string(cfg.scenario);
    summary.params = cfg;

    const TransportResult result = integrate_transport(plan.path, gens, opt);
    const LambdaTrace trace =
        lambda_trace(result, std::numeric_limits<double>::infinity());

    summary.holonomy = result.holonomy;
    summary.est_error = result.est_error;
    const bool reference_plane = cfg.time_slice == 0.0;
    const HolonomyClass cls = classify_holonomy(result.holonomy, cfg.tolerance);
    summary.classification = cls;

    if (reference_plane) {
        const ComplexMat expected = i_hol_power(plan.expected_power);
        append_check(summary, "holonomy_distance",
                     frobenius_distance(result.holonomy, expected), cfg.tolerance);
        append_check(summary, "classification_label",
                     cls.label == classify_holonomy(expected, cfg.tolerance).label ? 0.0 : 1.0,
                     0.5);
        const Complex lambda_end = trace.samples.back().lambda;
        append_check(summary, "lambda_endpoint",
                     std::abs(lambda_end - minus_i_power(plan.expected_power)), cfg.tolerance);
        append_check(summary, "xi_offdiag", trace.max_off_diagonal, 1e-6);
        if (plan.lambda_ref) {
            double dev = 0.0;
            for (std::size_t k = 0; k < result.samples.size(); ++k) {
                dev = std::max(dev, std::abs(trace.samples[k].lambda -
                                             plan.lambda_ref(result.samples[k].first)));
            }
            summary.max_lambda_dev = dev;
            append_check(summary, "lambda_max_dev", dev, cfg.tolerance);
        }
    }
    append_check(summary, "det_drift", det_drift(result), 1e-8);

    if (cfg.scenario == Scenario::ep_plus && reference_plane) {
        // Mirror consistency: conjugating the mirrored loop's holonomy with the
        // swap matrix must reproduce this loop's holonomy.
        const Path minus = make_loop({LoopKind::circle_ep_minus, cfg.rho, 1, cfg.time_slice});
        const TransportResult res_minus = integrate_transport(minus, gens, opt);
        const ComplexMat mirrored = apply_T_symmetry(res_minus.holonomy);
        append_check(summary, "t_symmetry", frobenius_distance(mirrored, result.holonomy),
                     2.0 * cfg.tolerance);
    }

    if (cfg.scenario == Scenario::gate_cycle) {
        ComplexVec psi = ComplexVec::Zero(2);
        psi(0) = 1.0;
        const ComplexVec psi0 = psi;
        const ComplexMat i_hol = mat_I_hol();
        ComplexMat expected_power = mat_identity2();
        for (int k = 1; k <= 4; ++k) {
            psi = transport_state(psi, result);
            summary.gate_states.push_back(psi);
            expected_power = i_hol * expected_power;
            if (reference_plane) {
                append_check(summary, "state_" + std::to_string(k),
                             (psi - expected_power * psi0).norm(), cfg.tolerance);
            }
        }
        if (reference_plane) {
            const ComplexMat u = result.holonomy;
            append_check(summary, "cycle_identity",
                         frobenius_distance(u * u * u * u, mat_identity2()), cfg.tolerance);
        }
    }

    write_trace_csv(fs::path(cfg.output_dir) / "trace.csv", plan.path, result, trace,
                    reference_plane ? plan.lambda_ref : nullptr);
    return summary;
}

// Finite-difference residuals of the three curvature identities at (x, y, t).
struct FlatnessResiduals {
    double tq_x;
    double tq_y;
    double xy;
};

FlatnessResiduals flatness_residuals(double x, double y, double t) {
    const ComplexMat h = hamiltonian_at(x, y);
    const ComplexMat kx = kx_closed(x, y, t);
    const ComplexMat ky = ky_closed(x, y, t);

    const ComplexMat dkx_dt = central_derivative([&](double u) { return kx_closed(x, y, u); }, t);
    const ComplexMat dky_dt = central_derivative([&](double u) { return ky_closed(x, y, u); }, t);
    const ComplexMat dh_dx = central_derivative([&](double u) { return hamiltonian_at(u, y); }, x);
    const ComplexMat dh_dy = central_derivative([&](double u) { return hamiltonian_at(x, u); }, y);
    const ComplexMat dky_dx = central_derivative([&](double u) { return ky_closed(u, y, t); }, x);
    const ComplexMat dkx_dy = central_derivative([&](double u) { return kx_closed(x, u, t); }, y);

    FlatnessResiduals res;
    res.tq_x = (dkx_dt - dh_dx + 1i * commutator(h, kx)).norm();
    res.tq_y = (dky_dt - dh_dy + 1i * commutator(h, ky)).norm();
    res.xy = (dky_dx - dkx_dy + 1i * commutator(kx, ky)).norm();
    return res;
}

}  // namespace

FlatnessScan report_flatness(double xmin, double xmax, double ymin, double ymax, int grid,
                             double t, const std::string& csv_path, double ep_clearance) {
    if (grid < 2) throw InvalidConfig("report_flatness: grid must be >= 2");
    if (!(xmax > xmin) || !(ymax > ymin)) {
        throw InvalidConfig("report_flatness: bounds must be ordered");
    }
    const EPLocus locus = model_ep_locus();
    std::ofstream out = open_output(csv_path);
    out << "x,y,residual_tq_x,residual_tq_y,residual_xy,distance_to_nearest_ep,skipped\n";

    FlatnessScan scan;
    for (int iy = 0; iy < grid; ++iy) {
        const double y = ymin + (ymax - ymin) * iy / (grid - 1);
        for (int ix = 0; ix < grid; ++ix) {
            const double x = xmin + (xmax - xmin) * ix / (grid - 1);
            const double dist = locus.distance(x, y);
            scan.total += 1;
            FlatnessResiduals res{kNan, kNan, kNan};
            int skipped = 1;
            if (dist >= ep_clearance) {
                res = flatness_residuals(x, y, t);
                scan.admissible += 1;
                scan.max_residual =
                    std::max({scan.max_residual, res.tq_x, res.tq_y, res.xy});
                skipped = 0;
            } else {
                scan.skipped += 1;
            }
            const double cols[] = {x, y, res.tq_x, res.tq_y, res.xy, dist,
                                   static_cast<double>(skipped)};
            for (std::size_t i = 0; i < std::size(cols); ++i) {
                out << (i ? "," : "") << fmt_sci(cols[i]);
            }
            out << "\n";
        }
    }
    return scan;
}

namespace {

RunSummary run_flatness_scenario(const ScenarioConfig& cfg) {
    RunSummary summary;
    summary.scenario = to_string(cfg.scenario);
    summary.params = cfg;
    const FlatnessScan scan =
        report_flatness(cfg.xmin, cfg.xmax, cfg.ymin, cfg.ymax, cfg.grid, cfg.time_slice,
                        (fs::path(cfg.output_dir) / "scan.csv").string());
    append_check(summary, "max_flatness_residual", scan.max_residual, cfg.tolerance);
    append_check(summary, "admissible_fraction",
                 scan.total > 0 ? static_cast<double>(scan.admissible) / scan.total : 0.0,
                 -1.0, /*pass_is_less=*/false);  // informative: any fraction >= 0 passes
    return summary;
}

RunSummary run_k_check_scenario(const ScenarioConfig& cfg) {
    RunSummary summary;
    summary.scenario = to_string(cfg.scenario);
    summary.params = cfg;

    const ModelFamily family;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    const EPLocus locus = model_ep_locus();

    std::ofstream out = open_output(fs::path(cfg.output_dir) / "kcheck.csv");
    out << "x,y,dev_x,dev_y,comm_res_x,clos_res_x,comm_res_y,clos_res_y,"
           "cross_slope,cross_const\n";

    const int n_points = 1000;
    const int n_cross = 25;
    double max_dev = 0.0, max_comm = 0.0, max_clos = 0.0, max_cross = 0.0;
    int accepted = 0;
    while (accepted < n_points) {
        const double x = coord(rng);
        const double y = coord(rng);
        if (locus.distance(x, y) < 0.05) continue;
        const BasePoint p = make_point(0.0, x, y);

        const GeneratorPair px = solve_generator_pair(family, 1, p);
        const GeneratorPair py = solve_generator_pair(family, 2, p);
        const double dev_x =
            std::max(frobenius_distance(px.K1, kx_closed(x, y, 1.0) - kx_closed(x, y, 0.0)),
                     frobenius_distance(px.K0, kx_closed(x, y, 0.0)));
        const double dev_y =
            std::max(frobenius_distance(py.K1, ky_closed(x, y, 1.0) - ky_closed(x, y, 0.0)),
                     frobenius_distance(py.K0, ky_closed(x, y, 0.0)));
        const DeterminingResiduals rx = determining_residuals(px, family);
        const DeterminingResiduals ry = determining_residuals(py, family);

        double cross_slope = kNan, cross_const = kNan;
        if (accepted < n_cross) {
            const CrossCheckReport cross = cross_direction_check(px, py, family, p);
            cross_slope = cross.slope_residual;
            cross_const = cross.constant_residual;
            max_cross = std::max({max_cross, cross_slope, cross_const});
        }

        max_dev = std::max({max_dev, dev_x, dev_y});
        max_comm = std::max({max_comm, rx.commutation, ry.commutation});
        max_clos = std::max({max_clos, rx.closure, ry.closure});

        const double cols[] = {x,          y,          dev_x,      dev_y,
                               rx.commutation, rx.closure, ry.commutation, ry.closure,
                               cross_slope, cross_const};
        for (std::size_t i = 0; i < std::size(cols); ++i) {
            out << (i ? "," : "") << fmt_sci(cols[i]);
        }
        out << "\n";
        accepted += 1;
    }

    append_check(summary, "max_closed_form_dev", max_dev, 1e-9);
    append_check(summary, "max_commutation_residual", max_comm, 1e-10);
    append_check(summary, "max_closure_residual", max_clos, 1e-10);
    append_check(summary, "max_cross_residual", max_cross, 1e-6);
    return summary;
}

RunSummary run_metric_scenario(const ScenarioConfig& cfg) {
    RunSummary summary;
    summary.scenario = to_string(cfg.scenario);
    summary.params = cfg;

    const ModelGenerators gens;
    TransportOptions opt;
    opt.steps = cfg.steps;
    opt.sample_stride = std::max(1, cfg.steps / 1000);
    const ComplexMat g0 = mat_identity2();
    ComplexVec psi0 = ComplexVec::Zero(2);
    psi0(0) = 1.0;

    std::ofstream out = open_output(fs::path(cfg.output_dir) / "metric.csv");
    out << "leg,s,metric_norm,norm_imag,euclidean_sq\n";
    auto dump_leg = [&](int leg, const NormTrace& trace) {
        for (const auto& ns : trace.samples) {
            out << leg << "," << fmt_sci(ns.s) << "," << fmt_sci(ns.metric_norm) << ","
                << fmt_sci(ns.imag_magnitude) << "," << fmt_sci(ns.euclidean_sq) << "\n";
        }
    };

    double max_asym = 0.0;
    double min_eig = std::numeric_limits<double>::infinity();

    // Leg 0: loop enclosing no EP.
    {
        const Path path = make_loop({LoopKind::circle_origin, cfg.r, 1, cfg.time_slice});
        const NormTrace trace = norm_along_path(psi0, path, g0, gens, opt);
        dump_leg(0, trace);
        append_check(summary, "norm_drift_noep", trace.max_drift, cfg.tolerance);
        append_check(summary, "metric_holonomy_noep",
                     (trace.U_end.adjoint() * trace.G_end * trace.U_end - g0).norm(),
                     5.0 * std::max(trace.est_error, 1e-15));
        max_asym = std::max(max_asym, trace.max_asymmetry);
        min_eig = std::min(min_eig, trace.min_eigenvalue);

        const MetricState state = evolve_metric(path, g0, gens, opt);
        double max_res = 0.0;
        for (const auto& [s, res] : trajectory_compatibility_residuals(state, path, gens)) {
            max_res = std::max(max_res, res);
        }
        append_check(summary, "compat_residual_noep", max_res, 1e-6);
    }

    // Leg 1: loop enclosing the EP at (-1, 0).
    {
        const Path path = make_loop({LoopKind::circle_ep_minus, cfg.rho, 1, cfg.time_slice});
        const NormTrace trace = norm_along_path(psi0, path, g0, gens, opt);
        dump_leg(1, trace);
        append_check(summary, "norm_drift_ep", trace.max_drift, cfg.tolerance);
        append_check(summary, "metric_holonomy_ep",
                     (trace.U_end.adjoint() * trace.G_end * trace.U_end - g0).norm(),
                     5.0 * std::max(trace.est_error, 1e-15));
        max_asym = std::max(max_asym, trace.max_asymmetry);
        min_eig = std::min(min_eig, trace.min_eigenvalue);

        const MetricState state = evolve_metric(path, g0, gens, opt);
        double max_res = 0.0;
        for (const auto& [s, res] : trajectory_compatibility_residuals(state, path, gens)) {
            max_res = std::max(max_res, res);
        }
        append_check(summary, "compat_residual_ep", max_res, 1e-6);
    }

    // Leg 2: pure time evolution under a non-Hermitian H; the plain Euclidean
    // norm drifts while the metric norm must not.
    {
        const Path path = time_segment(0.5, 0.0, 0.0, 5.0);
        const NormTrace trace = norm_along_path(psi0, path, g0, gens, opt);
        dump_leg(2, trace);
        append_check(summary, "norm_drift_time", trace.max_drift, cfg.tolerance);
        double eucl_drift = 0.0;
        for (const auto& ns : trace.samples) {
            eucl_drift = std::max(eucl_drift, std::abs(ns.euclidean_sq - 1.0));
        }
        append_check(summary, "euclidean_drift_time", eucl_drift, 1e-3,
                     /*pass_is_less=*/false);
        max_asym = std::max(max_asym, trace.max_asymmetry);
        min_eig = std::min(min_eig, trace.min_eigenvalue);
    }

    append_check(summary, "hermiticity_drift", max_asym, 1e-10);
    append_check(summary, "positivity_min_eig", min_eig, 0.0, /*pass_is_less=*/false);
    return summary;
}

ordered_json matrix_to_json(const ComplexMat& m) {
    ordered_json re = ordered_json::array();
    ordered_json im = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json re_row = ordered_json::array();
        ordered_json im_row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re_row.push_back(m(i, j).real());
            im_row.push_back(m(i, j).imag());
        }
        re.push_back(re_row);
        im.push_back(im_row);
    }
    return ordered_json{{"re", re}, {"im", im}};
}

ComplexMat matrix_from_json(const ordered_json& j) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    const Eigen::Index rows = static_cast<Eigen::Index>(re.size());
    const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(re.at(0).size()) : 0;
    ComplexMat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j2 = 0; j2 < cols; ++j2) {
            m(i, j2) = Complex(re.at(i).at(j2).get<double>(), im.at(i).at(j2).get<double>());
        }
    }
    return m;
}

ordered_json params_to_json(const ScenarioConfig& cfg) {
    ordered_json j;
    j["scenario"] = to_string(cfg.scenario);
    j["r"] = cfg.r;
    j["rho"] = cfg.rho;
    j["winding"] = cfg.winding;
    j["steps"] = cfg.steps;
    j["time_slice"] = cfg.time_slice;
    j["tolerance"] = cfg.tolerance;
    j["output_dir"] = cfg.output_dir;
    j["seed"] = cfg.seed;
    j["grid"] = cfg.grid;
    j["xmin"] = cfg.xmin;
    j["xmax"] = cfg.xmax;
    j["ymin"] = cfg.ymin;
    j["ymax"] = cfg.ymax;
    return j;
}

ScenarioConfig params_from_json(const ordered_json& j) {
    ScenarioConfig cfg;
    const auto scen = scenario_from_string(j.at("scenario").get<std::string>());
    if (!scen) throw InvalidConfig("unknown scenario in summary JSON");
    cfg.scenario = *scen;
    cfg.r = j.at("r").get<double>();
    cfg.rho = j.at("rho").get<double>();
    cfg.winding = j.at("winding").get<int>();
    cfg.steps = j.at("steps").get<int>();
    cfg.time_slice = j.at("time_slice").get<double>();
    cfg.tolerance = j.at("tolerance").get<double>();
    cfg.output_dir = j.at("output_dir").get<std::string>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.grid = j.at("grid").get<int>();
    cfg.xmin = j.at("xmin").get<double>();
    cfg.xmax = j.at("xmax").get<double>();
    cfg.ymin = j.at("ymin").get<double>();
    cfg.ymax = j.at("ymax").get<double>();
    return cfg;
}

ordered_json summary_to_json_obj(const RunSummary& summary) {
    ordered_json j;
    j["scenario"] = summary.scenario;
    j["params"] = params_to_json(summary.params);
    j["holonomy"] = summary.holonomy ? matrix_to_json(*summary.holonomy) : ordered_json(nullptr);
    if (summary.classification) {
        ordered_json c;
        c["label"] = to_string(summary.classification->label);
        c["distance"] = summary.classification->distance;
        c["winding_mod4"] = summary.classification->winding_mod4
                                ? ordered_json(*summary.classification->winding_mod4)
                                : ordered_json(nullptr);
        j["classification"] = c;
    } else {
        j["classification"] = nullptr;
    }
    j["max_lambda_dev"] =
        summary.max_lambda_dev ? ordered_json(*summary.max_lambda_dev) : ordered_json(nullptr);
    j["est_error"] = summary.est_error;
    j["wall_time_s"] = summary.wall_time_s;
    ordered_json states = ordered_json::array();
    for (const auto& psi : summary.gate_states) {
        ordered_json re = ordered_json::array(), im = ordered_json::array();
        for (Eigen::Index i = 0; i < psi.size(); ++i) {
            re.push_back(psi(i).real());
            im.push_back(psi(i).imag());
        }
        states.push_back(ordered_json{{"re", re}, {"im", im}});
    }
    j["gate_states"] = states;
    ordered_json checks = ordered_json::array();
    for (const auto& c : summary.checks) {
        checks.push_back(
            ordered_json{{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tol", c.tol}});
    }
    j["checks"] = checks;
    return j;
}

}  // namespace

std::string summary_to_json(const RunSummary& summary) {
    return summary_to_json_obj(summary).dump(2) + "\n";
}

RunSummary summary_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    RunSummary summary;
    summary.scenario = j.at("scenario").get<std::string>();
    summary.params = params_from_json(j.at("params"));
    if (!j.at("holonomy").is_null()) summary.holonomy = matrix_from_json(j.at("holonomy"));
    if (!j.at("classification").is_null()) {
        const auto& c = j.at("classification");
        HolonomyClass cls;
        const auto label = holonomy_label_from_string(c.at("label").get<std::string>());
        if (!label) throw InvalidConfig("unknown holonomy label in summary JSON");
        cls.label = *label;
        cls.distance = c.at("distance").get<double>();
        if (!c.at("winding_mod4").is_null()) cls.winding_mod4 = c.at("winding_mod4").get<int>();
        summary.classification = cls;
    }
    if (!j.at("max_lambda_dev").is_null()) {
        summary.max_lambda_dev = j.at("max_lambda_dev").get<double>();
    }
    summary.est_error = j.at("est_error").get<double>();
    summary.wall_time_s = j.at("wall_time_s").get<double>();
    for (const auto& st : j.at("gate_states")) {
        const auto& re = st.at("re");
        const auto& im = st.at("im");
        ComplexVec psi(static_cast<Eigen::Index>(re.size()));
        for (Eigen::Index i = 0; i < psi.size(); ++i) {
            psi(i) = Complex(re.at(i).get<double>(), im.at(i).get<double>());
        }
        summary.gate_states.push_back(psi);
    }
    for (const auto& c : j.at("checks")) {
        CheckResult r;
        r.name = c.at("name").get<std::string>();
        r.pass = c.at("pass").get<bool>();
        r.value = c.at("value").get<double>();
        r.tol = c.at("tol").get<double>();
        summary.checks.push_back(r);
    }
    return summary;
}

RunSummary run_scenario(const ScenarioConfig& cfg) {
    validate(cfg);
    fs::create_directories(cfg.output_dir);

    const auto start = std::chrono::steady_clock::now();
    RunSummary summary;
    switch (cfg.scenario) {
        case Scenario::no_ep:
        case Scenario::ep_minus:
        case Scenario::ep_plus:
        case Scenario::both_eps:
        case Scenario::winding:
        case Scenario::gate_cycle:
            summary = run_transport_scenario(cfg);
            break;
        case Scenario::flatness_scan:
            summary = run_flatness_scenario(cfg);
            break;
        case Scenario::k_check:
            summary = run_k_check_scenario(cfg);
            break;
        case Scenario::metric_check:
            summary = run_metric_scenario(cfg);
            break;
    }
    const auto stop = std::chrono::steady_clock::now();
    summary.wall_time_s = std::chrono::duration<double>(stop - start).count();

    std::ofstream out = open_output(fs::path(cfg.output_dir) / "summary.json");
    out << summary_to_json(summary);
    return summary;
}

std::vector<RunSummary> sweep(const std::vector<ScenarioConfig>& grid,
                              const std::string& base_dir) {
    if (grid.empty()) throw InvalidConfig("sweep: empty configuration grid");
    fs::create_directories(base_dir);

    std::vector<RunSummary> results;
    ordered_json index;
    index["runs"] = ordered_json::array();
    for (const ScenarioConfig& cfg : grid) {
        ScenarioConfig run_cfg = cfg;
        const std::string hash = config_hash(cfg);
        run_cfg.output_dir = (fs::path(base_dir) / ("run-" + hash)).string();

        ordered_json entry;
        entry["hash"] = hash;
        entry["dir"] = "run-" + hash;
        entry["scenario"] = to_string(cfg.scenario);
        entry["params"] = params_to_json(run_cfg);
        try {
            const RunSummary summary = run_scenario(run_cfg);
            entry["status"] = summary.all_passed() ? "pass" : "check_failed";
            entry["error"] = nullptr;
            if (summary.classification) {
                entry["label"] = to_string(summary.classification->label);
                entry["distance"] = summary.classification->distance;
            } else {
                entry["label"] = nullptr;
                entry["distance"] = nullptr;
            }
            results.push_back(summary);
        } catch (const Error& e) {
            entry["status"] = "error";
            entry["error"] = e.what();
            entry["label"] = nullptr;
            entry["distance"] = nullptr;
        }
        index["runs"].push_back(entry);
    }

    std::ofstream out = open_output(fs::path(base_dir) / "index.json");
    out << index.dump(2) << "\n";
    return results;
}

}  // namespace epholo
