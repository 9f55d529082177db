#include "gradflow/cli.hpp"

#include "gradflow/io.hpp"
#include "gradflow/markov.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace gradflow::cli {
namespace {

using io::Json;

struct Options {
    std::string input;
    std::string action;  // markov subcommand
    std::string matrix;  // verify: optional override of the stored A
    std::string out;
    std::string x0;
    std::string method = "exact";
    double tol = kDefaultTol;
    std::uint64_t seed = 0;
    int samples = 1000;
    double t_end = 1.0;
    std::optional<double> step;
};

/// Failure that maps straight to an exit code.
class CommandError : public std::runtime_error {
public:
    CommandError(int code, std::string kind, const std::string& what)
        : std::runtime_error(what), code_(code), kind_(std::move(kind)) {}
    [[nodiscard]] int code() const noexcept { return code_; }
    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    int code_;
    std::string kind_;
};

std::shared_ptr<spdlog::logger> logger() {
    if (auto existing = spdlog::get("gradflow")) return existing;
    auto log = spdlog::stderr_logger_mt("gradflow");
    const char* level = std::getenv("GRADFLOW_LOG");
    log->set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
    return log;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::NonFiniteEntry: return kParseError;
        case ErrorKind::DimensionMismatch: return kDimensionError;
        case ErrorKind::ComplexSpectrum:
        case ErrorKind::Defective: return kSynthesisPrecondition;
        case ErrorKind::NegativeRate:
        case ErrorKind::ColumnSumNonzero: return kInvalidGenerator;
        case ErrorKind::DegenerateKernel:
        case ErrorKind::NonPositive: return kDegenerateChain;
        case ErrorKind::NotReversible: return kNotReversible;
        default: return kNumericFailure;
    }
}

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

std::string digest(const std::string& command, const Options& o, const std::string& contents) {
    std::ostringstream ss;
    ss << std::setprecision(17) << command << '\0' << o.action << '\0' << o.method << '\0' << o.tol << '\0' << o.seed
       << '\0' << o.samples << '\0' << o.t_end << '\0' << (o.step ? *o.step : -1.0) << '\0' << o.x0 << '\0'
       << contents;
    return fnv1a_hex(ss.str());
}

Json parse_json_file(const std::string& path, std::string& contents) {
    contents = io::read_text(path);
    try {
        return Json::parse(contents);
    } catch (const Json::parse_error& e) {
        throw io::ParseError(path + ": " + e.what());
    }
}

Json check_json(const CheckReport& r, double rel_tol) {
    return {{"max_violation", r.max_violation},
            {"scale", r.scale},
            {"samples", r.samples},
            {"seed", r.seed},
            {"passed", r.passed(rel_tol)}};
}

Json constants_json(const ConvexityConstants& c) {
    return {{"esssup_f", c.esssup_f}, {"lambda", c.lambda},       {"lambda_tilde", c.lambda_tilde},
            {"c_V", c.c_V},           {"c_V_tilde", c.c_V_tilde}, {"lambda_transfer", c.lambda_transfer}};
}

Json flow_json(const FlowResidualReport& r) {
    return {{"max_residual", r.max_residual},
            {"num_samples", r.num_samples},
            {"worst_point", io::vector_to_json(r.worst_point)},
            {"passed", r.passed}};
}

Json condition_json(double c) { return std::isfinite(c) ? Json(c) : Json(nullptr); }

// ---------------------------------------------------------------------------

Json cmd_analyze(const Json& input, const Options& o) {
    const Matrix A = io::matrix_from_json(input);
    const SpectralReport rep = analyse_spectrum(A, o.tol);

    Json eig = Json::array();
    for (const auto& z : rep.eigenvalues) eig.push_back({{"re", z.real()}, {"im", z.imag()}});
    Json results;
    results["dim"] = A.rows();
    results["eigenvalues"] = eig;
    results["real_diagonalisable"] = rep.real_diagonalisable;
    results["failure_kind"] = std::string(to_string(rep.failure_kind));
    results["condition_of_V"] = condition_json(rep.condition_of_V);
    results["gradient_flow"] = rep.real_diagonalisable;
    return results;
}

Json cmd_synthesize(const Json& input, const Options& o) {
    io::SystemFile sys;
    sys.A = io::matrix_from_json(input);
    try {
        sys.diag = real_diagonalise(sys.A, o.tol);
    } catch (const NotDiagonalisable& e) {
        throw CommandError(kSynthesisPrecondition, "NotDiagonalisable",
                           "cannot synthesize a gradient system: " + std::string(to_string(e.report().failure_kind)));
    }
    sys.gs = synthesize_canonical(sys.diag, o.tol);
    const auto flow = verify_flow_identity(sys.A, sys.gs, o.tol);
    const auto constants = convexity_constants(sys.diag);

    Json results;
    results["dim"] = sys.A.rows();
    results["f"] = io::vector_to_json(sys.diag.f);
    results["condition_of_V"] = condition_json(condition_number(sys.diag.V));
    results["flow_identity"] = flow_json(flow);
    results["K_is_spd"] = is_spd(sys.gs.K, o.tol);
    results["constants"] = constants_json(constants);
    if (!o.out.empty()) {
        std::ofstream file(o.out);
        if (!file) throw CommandError(kNumericFailure, "IOError", "cannot write " + o.out);
        file << io::system_to_json(sys).dump(2) << '\n';
        results["system_path"] = o.out;
    } else {
        results["system"] = io::system_to_json(sys);
    }
    return results;
}

Json cmd_verify(const Json& input, const Options& o, std::vector<std::string>& warnings) {
    const io::SystemFile sys = io::system_from_json(input);
    Matrix A = sys.A;
    if (!o.matrix.empty()) {
        std::string contents;
        A = io::matrix_from_json(parse_json_file(o.matrix, contents));
        if (A.rows() != sys.A.rows()) {
            throw Error(ErrorKind::DimensionMismatch, "matrix and system differ in dimension");
        }
    }
    const auto flow = verify_flow_identity(A, sys.gs, o.tol);

    Json results;
    results["flow_identity"] = flow_json(flow);
    results["K_is_spd"] = is_spd(sys.gs.K, o.tol);
    results["B_asymmetry"] = (sys.gs.B - sys.gs.B.transpose()).norm();
    try {
        const auto recovered = recover_diagonalisation(sys.gs, A, o.tol);
        results["recovered_f"] = io::vector_to_json(recovered.f);
    } catch (const Error& e) {
        warnings.emplace_back(std::string("diagonalisation not recovered: ") + e.what());
    }
    return results;
}

Json cmd_simulate(const Json& input, const Options& o, std::vector<std::string>& warnings) {
    const io::SystemFile sys = io::system_from_json(input);
    if (o.x0.empty()) throw CommandError(kParseError, "ParseError", "--x0 is required");
    const Vector x0 = io::parse_vector_list(o.x0);
    require_size(x0, sys.A.rows(), "x0");
    if (!(o.t_end >= 0.0)) throw CommandError(kParseError, "ParseError", "--t-end must be non-negative");

    const double step = o.step ? *o.step : (o.t_end > 0.0 ? o.t_end / 200.0 : 1.0);
    const MetricContext ctx = MetricContext::from(sys.diag);

    Trajectory traj;
    if (o.method == "exact") {
        const int nodes = o.t_end > 0.0 ? static_cast<int>(std::ceil(o.t_end / step - 1e-9)) + 1 : 1;
        traj = exact_trajectory(sys.diag, x0, o.t_end, nodes);
    } else if (o.method == "rk4") {
        traj = rk4_flow(sys.A, x0, o.t_end, step);
    } else if (o.method == "mm") {
        traj = minimizing_movement_flow(sys.gs, ctx, x0, o.t_end, step);
    } else {
        throw CommandError(kParseError, "BadMethod", "unknown method \"" + o.method + "\" (exact, rk4, mm)");
    }
    for (const auto& w : traj.warnings) warnings.push_back(w);

    if (!o.out.empty()) {
        std::ofstream csv(o.out);
        if (!csv) throw CommandError(kNumericFailure, "IOError", "cannot write " + o.out);
        io::write_trajectory_csv(traj, csv);
    }

    double deviation = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const Vector exact = exact_flow(sys.diag, x0, traj.times[k]);
        deviation = std::max(deviation, (traj.states[k] - exact).cwiseAbs().maxCoeff());
    }
    const auto audit = dissipation_audit(sys.gs, traj);
    const auto constants = convexity_constants(sys.diag);

    Json results;
    results["method"] = std::string(to_string(traj.method));
    results["nodes"] = traj.times.size();
    results["t_end"] = o.t_end;
    results["step"] = step;
    results["final_state"] = io::vector_to_json(traj.final_state());
    results["max_deviation_from_exact"] = deviation;
    results["dissipation"] = {{"monotone", audit.monotone},
                              {"dissipation_defect", audit.dissipation_defect},
                              {"max_increase", audit.max_increase},
                              {"F_initial", audit.F_values.front()},
                              {"F_final", audit.F_values.back()}};
    if (o.samples > 0 && o.t_end > 0.0) {
        const std::vector<double> times{0.1 * o.t_end, 0.5 * o.t_end, o.t_end};
        const auto contraction =
            check_contraction(sys.diag, ctx, constants.lambda, times, {o.samples, o.seed, 1.0});
        results["contraction"] = check_json(contraction, 1e-9);
        results["contraction"]["lambda"] = constants.lambda;
    }
    if (!o.out.empty()) results["csv_path"] = o.out;
    return results;
}

Json cmd_convexity(const Json& input, const Options& o) {
    io::SystemFile sys;
    if (input.is_object() && input.contains("V")) {
        sys = io::system_from_json(input);
    } else {
        sys.A = io::matrix_from_json(input);
        try {
            sys.diag = real_diagonalise(sys.A, o.tol);
        } catch (const NotDiagonalisable& e) {
            throw CommandError(kSynthesisPrecondition, "NotDiagonalisable",
                               "no gradient structure: " + std::string(to_string(e.report().failure_kind)));
        }
        sys.gs = synthesize_canonical(sys.diag, o.tol);
    }
    const auto constants = convexity_constants(sys.diag);
    const MetricContext ctx = MetricContext::from(sys.diag);
    const SamplingOptions sampling{o.samples, o.seed, 1.0};
    const auto theta = default_theta_grid();
    const std::vector<double> times{0.01 * o.t_end, 0.1 * o.t_end, o.t_end};

    Json results;
    results["constants"] = constants_json(constants);
    results["norm_V"] = ctx.norm_V;
    results["norm_V_inv"] = ctx.norm_Vinv;
    results["spectrum_nonpositive"] = essential_range_check(sys.diag, 0.0, o.tol);
    results["strong_monotonicity"] =
        check_json(check_strong_monotonicity(sys.gs, constants.lambda_tilde, sampling), 1e-9);
    results["geodesic_convexity"] =
        check_json(check_geodesic_convexity(sys.gs, ctx, constants.lambda, theta, sampling), 1e-9);
    results["contraction"] = check_json(check_contraction(sys.diag, ctx, constants.lambda, times, sampling), 1e-9);
    results["contraction"]["times"] = times;
    return results;
}

Json cmd_markov(const Json& input, const Options& o) {
    const auto G = markov::validate_generator(io::generator_from_json(input), o.tol);
    Json results;
    results["action"] = o.action;
    results["dim"] = G.dim();
    if (o.action == "validate") {
        results["valid"] = true;
    } else if (o.action == "stationary") {
        results["pi"] = io::vector_to_json(markov::stationary_distribution(G, o.tol));
    } else if (o.action == "reversible") {
        const Vector pi = markov::stationary_distribution(G, o.tol);
        results["pi"] = io::vector_to_json(pi);
        results["reversible"] = markov::is_reversible(G, pi, o.tol);
    } else if (o.action == "entropic-verify") {
        const auto es = markov::make_entropic_structure(G, o.tol);
        results["pi"] = io::vector_to_json(es.pi);
        results["entropic_flow"] = flow_json(markov::verify_entropic_flow(G, es, o.samples, o.seed, o.tol));
    }
    return results;
}

void add_common(CLI::App* app, Options& o) {
    app->add_option("--tol", o.tol, "relative tolerance")->check(CLI::PositiveNumber);
    app->add_option("--seed", o.seed, "seed for sampled checks");
    app->add_option("--samples", o.samples, "number of sampled pairs / points")->check(CLI::NonNegativeNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gradient-flow structure of linear ODEs x' = A x", "gradflow"};
    app.require_subcommand(1);
    Options o;

    auto* analyze = app.add_subcommand("analyze", "real diagonalisability test");
    analyze->add_option("input", o.input, "matrix JSON")->required();
    add_common(analyze, o);

    auto* synthesize = app.add_subcommand("synthesize", "build the canonical gradient system");
    synthesize->add_option("input", o.input, "matrix JSON")->required();
    synthesize->add_option("--out", o.out, "system JSON output path");
    add_common(synthesize, o);

    auto* verify = app.add_subcommand("verify", "check A = -K B for a system file");
    verify->add_option("input", o.input, "system JSON")->required();
    verify->add_option("--matrix", o.matrix, "matrix JSON replacing the stored A");
    add_common(verify, o);

    auto* simulate = app.add_subcommand("simulate", "integrate the flow of a system file");
    simulate->add_option("input", o.input, "system JSON")->required();
    simulate->add_option("--x0", o.x0, "initial state, comma separated");
    simulate->add_option("--t-end", o.t_end, "time horizon");
    simulate->add_option("--step", o.step, "step size (rk4 h, mm tau, exact node spacing)");
    simulate->add_option("--method", o.method, "exact | rk4 | mm");
    simulate->add_option("--out", o.out, "trajectory CSV output path");
    add_common(simulate, o);

    auto* convexity = app.add_subcommand("convexity", "convexity constants and sampled certificates");
    convexity->add_option("input", o.input, "matrix or system JSON")->required();
    convexity->add_option("--t-end", o.t_end, "largest contraction time");
    add_common(convexity, o);

    auto* markov_cmd = app.add_subcommand("markov", "finite-state Markov generator tools");
    markov_cmd->add_option("action", o.action, "validate | stationary | reversible | entropic-verify")
        ->required()
        ->check(CLI::IsMember({"validate", "stationary", "reversible", "entropic-verify"}));
    markov_cmd->add_option("input", o.input, "generator JSON")->required();
    add_common(markov_cmd, o);

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }

    // `convexity` defaults to the {0.1, 1, 10} contraction horizon.
    if (convexity->parsed() && convexity->count("--t-end") == 0) o.t_end = 10.0;

    const std::string command = app.get_subcommands().front()->get_name();
    auto log = logger();
    log->info("running {} on {}", command, o.input);

    Json report;
    report["schema_version"] = kReportSchemaVersion;
    report["command"] = command;
    std::vector<std::string> warnings;
    int code = kOk;
    std::string contents;
    try {
        const Json input = parse_json_file(o.input, contents);
        report["inputs_digest"] = digest(command, o, contents);
        Json results;
        if (command == "analyze") results = cmd_analyze(input, o);
        else if (command == "synthesize") results = cmd_synthesize(input, o);
        else if (command == "verify") results = cmd_verify(input, o, warnings);
        else if (command == "simulate") results = cmd_simulate(input, o, warnings);
        else if (command == "convexity") results = cmd_convexity(input, o);
        else results = cmd_markov(input, o);
        report["results"] = std::move(results);
    } catch (const CommandError& e) {
        code = e.code();
        report["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    } catch (const io::ParseError& e) {
        code = kParseError;
        report["error"] = {{"kind", "ParseError"}, {"message", e.what()}};
    } catch (const Error& e) {
        code = exit_code_for(e.kind());
        report["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    } catch (const std::exception& e) {
        code = kNumericFailure;
        report["error"] = {{"kind", "Internal"}, {"message", e.what()}};
    }
    if (!report.contains("inputs_digest")) report["inputs_digest"] = digest(command, o, contents);
    if (!report.contains("results")) report["results"] = Json::object();
    report["seed"] = o.seed;
    report["warnings"] = warnings;

    if (report.contains("error")) {
        const std::string msg = report["error"]["message"].get<std::string>();
        err << "gradflow " << command << ": " << msg << '\n';
        log->debug("{} failed: {}", command, msg);
    }
    for (const auto& w : warnings) log->warn("{}", w);
    out << report.dump(2) << '\n';
    return code;
}

}  // namespace gradflow::cli
