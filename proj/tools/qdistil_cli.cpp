// Command-line harness for the interferometric distillation pipeline:
// exact-expectation runs, finite-shot estimation, copy-budget tables,
// random-state oracle sweeps, and the algebraic concurrence oracle.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qdistil/budget.hpp"
#include "qdistil/concurrence.hpp"
#include "qdistil/fixtures.hpp"
#include "qdistil/io.hpp"
#include "qdistil/random_states.hpp"
#include "qdistil/reference.hpp"

namespace {

using namespace qdistil;

// Exit codes, stable for scripting.
constexpr int kOk = 0;
constexpr int kInvalidInput = 2;
constexpr int kNotDistillable = 3;
constexpr int kNonConvergence = 4;
constexpr int kBudgetCap = 5;

struct CommonOpts {
    std::string fixture_name;
    std::vector<double> params;
    std::string state_file;
    std::uint64_t seed = 1234;
    double threshold = -1;  // resolved per command
    int max_iters = 200;
    std::string out = "-";
    std::string format = "json";
};

void add_source_flags(CLI::App* cmd, CommonOpts& o) {
    auto* fx = cmd->add_option("--fixture", o.fixture_name,
                               "named source state (bell, werner, "
                               "mixed_identity, rho_prime, rho_eps_lambda, "
                               "asymptotic_fig2b)");
    cmd->add_option("--params", o.params,
                    "fixture parameters (e.g. --params 0.5 0.8)");
    auto* sf = cmd->add_option("--state", o.state_file,
                               "state file (JSON matrix_re/matrix_im)");
    fx->excludes(sf);
}

void add_output_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--out", o.out, "output path, '-' for stdout");
    cmd->add_option("--format", o.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

struct Source {
    TwoQubitStated state;
    json config;
    std::string label;
    std::optional<ReferenceRow> reference;
};

Source resolve_source(const CommonOpts& o) {
    Source src;
    if (!o.fixture_name.empty()) {
        const StateFixture f = fixture(o.fixture_name, o.params);
        src.state = f.state;
        src.label = fixture_label(f);
        src.config = {{"fixture", f.name}, {"params", f.params}};
        src.reference = reference_for(src.label);
    } else if (!o.state_file.empty()) {
        src.state = load_state_file(o.state_file);
        src.label = o.state_file;
        src.config = {{"state_file", o.state_file}};
    } else {
        throw InvalidArgumentError("one of --fixture or --state is required");
    }
    return src;
}

void emit(const CommonOpts& o, const json& report, const std::string& csv) {
    const std::string body = o.format == "json" ? report.dump(2) + "\n" : csv;
    if (o.out == "-") {
        std::cout << body;
    } else {
        std::ofstream f(o.out);
        if (!f) throw InvalidArgumentError("cannot write output: " + o.out);
        f << body;
    }
}

// Replay the recorded per-turn ops to attach a concurrence trace C^(k).
json exact_trace(const TwoQubitStated& state, const DistillationResultd& r) {
    json rows = json::array();
    LocalOpd op_a, op_b;
    for (const auto& step : r.history) {
        ((step.side == Side::A) ? op_a : op_b) =
            LocalOpd{step.f, step.theta, step.phi};
        const TwoQubitStated cur = apply_local(state, op_a, op_b);
        json row = distill_step_to_json(step);
        row["c_k"] = concurrence_if_distilled(cur, op_a.f, op_b.f);
        rows.push_back(row);
    }
    return rows;
}

int cmd_exact(const CommonOpts& o) {
    const Source src = resolve_source(o);
    const double threshold = o.threshold > 0 ? o.threshold : 1e-8;
    const DistillationResultd r =
        distill(src.state, threshold, o.max_iters);

    json report = {{"command", "exact"},
                   {"config",
                    {{"source", src.config},
                     {"seed", o.seed},
                     {"threshold", threshold},
                     {"max_iters", o.max_iters}}},
                   {"record", distillation_to_json(r)}};
    report["trace"] = exact_trace(src.state, r);
    report["asymptotic"] = (r.status == DistillStatus::MaxIterations);

    if (r.status == DistillStatus::NotDistillable) {
        report["error"] =
            "not distillable: a marginal is pure and filtering destroys the state";
        emit(o, report, "error,not_distillable\n");
        return kNotDistillable;
    }

    const QDecompositiond dec = decompose_q(q_matrix(r.final_state));
    const auto s = lorentz_from_decomposition(r.final_state, dec, r.op_a.f,
                                              r.op_b.f);
    const auto c = concurrence_from_visibilities(s);
    report["result"] = {{"decomposition", decomposition_to_json(dec)},
                        {"s", lorentz_to_json(s)},
                        {"c_dis", c.c_dis},
                        {"c_initial", c.c_initial},
                        {"oracle_wootters", wootters_concurrence(src.state)},
                        {"survival", r.survival},
                        {"f_a", r.op_a.f},
                        {"f_b", r.op_b.f},
                        {"status", to_string(r.status)}};

    std::string csv = csv_row({"k", "side", "visibility", "f", "theta", "phi",
                               "survival", "v_a", "v_b", "c_k"});
    for (const auto& row : report["trace"])
        csv += csv_row({row["k"].dump(), row["side"].get<std::string>(),
                        fmt_double(row["visibility"]), fmt_double(row["f"]),
                        fmt_double(row["theta"]), fmt_double(row["phi"]),
                        fmt_double(row["survival"]), fmt_double(row["v_a"]),
                        fmt_double(row["v_b"]), fmt_double(row["c_k"])});
    emit(o, report, csv);
    return r.status == DistillStatus::MaxIterations ? kNonConvergence : kOk;
}

int cmd_estimate(const CommonOpts& o, const ShotPlan& plan) {
    const Source src = resolve_source(o);
    std::optional<int> schedule;
    if (src.reference) schedule = src.reference->k_dis;
    Philox rng(o.seed, 0);
    const ConcurrenceEstimate est =
        estimate_concurrence(src.state, plan, rng, schedule);

    json report = {{"command", "estimate"},
                   {"config",
                    {{"source", src.config},
                     {"seed", o.seed},
                     {"plan", plan_to_json(plan)}}},
                   {"result", estimate_to_json(est)}};
    report["result"]["oracle_wootters"] = wootters_concurrence(src.state);

    std::string csv = csv_row({"state", "k_dis", "copies_distill",
                               "copies_quant", "total", "c_estimate",
                               "stderr"});
    csv += csv_row({src.label, std::to_string(est.k_dis),
                    std::to_string(est.copies_distill),
                    std::to_string(est.copies_quant),
                    std::to_string(est.copies_distill + est.copies_quant),
                    fmt_double(est.c), fmt_double(est.stderr_)});
    emit(o, report, csv);
    return kOk;
}

int cmd_table1(const CommonOpts& o, int replications, double target,
               long long budget_cap, const std::string& only_state) {
    json rows = json::array();
    std::string csv =
        csv_row({"state", "k_dis", "copies_distill", "copies_quant", "total",
                 "c_estimate", "stderr", "capped", "ref_k_dis", "ref_total",
                 "ref_tomography"});
    bool any_capped = false;
    int idx = -1;
    for (const auto& f : budget_fixtures()) {
        ++idx;
        const std::string label = fixture_label(f);
        if (!only_state.empty() && label.find(only_state) == std::string::npos)
            continue;
        const auto ref = reference_for(label);
        const BudgetResult res = min_copies_search(
            f.state, target, substream(o.seed, idx), replications,
            ref ? std::optional<int>(ref->k_dis) : std::nullopt, budget_cap);
        any_capped |= res.capped;
        json row = {{"state", label},
                    {"k_dis", res.k_dis},
                    {"copies_distill", res.copies_distill},
                    {"copies_quant", res.copies_quant},
                    {"total", res.total},
                    {"c_estimate", res.c_mean},
                    {"stderr", res.c_std_raw},
                    {"capped", res.capped},
                    {"plan", plan_to_json(res.plan)},
                    {"plans_evaluated", res.plans_evaluated}};
        if (res.capped)
            std::cerr << "warning: budget cap reached for " << label << "\n";
        if (ref) {
            std::ostringstream quant;
            quant << "9x" << ref->q_setting_shots << " + 3x"
                  << ref->lambda_setting_shots;
            row["reference"] = {{"k_dis", ref->k_dis},
                                {"copies_distill", ref->copies_distill},
                                {"quantification", quant.str()},
                                {"total", ref->total},
                                {"tomography", ref->tomography_total},
                                {"survival", ref->survival}};
        }
        rows.push_back(row);
        csv += csv_row(
            {label, std::to_string(res.k_dis),
             std::to_string(res.copies_distill),
             std::to_string(res.copies_quant), std::to_string(res.total),
             fmt_double(res.c_mean), fmt_double(res.c_std_raw),
             res.capped ? "1" : "0",
             ref ? std::to_string(ref->k_dis) : "",
             ref ? std::to_string(ref->total) : "",
             ref ? std::to_string(ref->tomography_total) : ""});
    }
    json report = {{"command", "table1"},
                   {"config",
                    {{"seed", o.seed},
                     {"replications", replications},
                     {"target_halfwidth", target},
                     {"budget_cap", budget_cap}}},
                   {"rows", rows}};
    emit(o, report, csv);
    return any_capped ? kBudgetCap : kOk;
}

int cmd_sweep(const CommonOpts& o, int n_states, int rank, bool product) {
    const double threshold = o.threshold > 0 ? o.threshold : 1e-8;
    json rows = json::array();
    std::string csv = csv_row(
        {"index", "c_pipeline", "c_oracle", "abs_dev", "status"});
    double max_dev = 0, max_comp_residual = 0, max_lambda = 0;
    int n_not_distillable = 0, n_non_converged = 0, n_ok = 0;
    for (int i = 0; i < n_states; ++i) {
        const std::uint64_t si = substream(o.seed, i);
        const TwoQubitStated st = product ? random_product_state(si)
                                          : random_state(si, rank);
        const double oracle = wootters_concurrence(st);
        json row = {{"index", i}, {"c_oracle", oracle}};
        std::string status = "ok";
        double c_pipe = 0;
        const DistillationResultd r = distill(st, threshold, o.max_iters);
        if (r.status == DistillStatus::NotDistillable) {
            ++n_not_distillable;
            status = "not_distillable";
        } else if (r.status == DistillStatus::MaxIterations) {
            ++n_non_converged;
            status = "asymptotic";
        } else {
            ++n_ok;
            const auto dec = decompose_q(q_matrix(r.final_state));
            const auto s = lorentz_from_decomposition(r.final_state, dec,
                                                      r.op_a.f, r.op_b.f);
            c_pipe = concurrence_from_visibilities(s).c_initial;
            max_dev = std::max(max_dev, std::abs(c_pipe - oracle));
            if (product)
                max_lambda = std::max(max_lambda, dec.lambdas(0));
        }
        if (rank == 1 && !product) {
            const double v0 = marginal(st, Side::A).norm();
            max_comp_residual = std::max(
                max_comp_residual, std::abs(v0 * v0 + oracle * oracle - 1.0));
        }
        row["c_pipeline"] = c_pipe;
        row["abs_dev"] = std::abs(c_pipe - oracle);
        row["status"] = status;
        rows.push_back(row);
        csv += csv_row({std::to_string(i), fmt_double(c_pipe),
                        fmt_double(oracle), fmt_double(std::abs(c_pipe - oracle)),
                        status});
    }
    json summary = {{"max_abs_dev", max_dev},
                    {"n_ok", n_ok},
                    {"n_not_distillable", n_not_distillable},
                    {"n_non_converged", n_non_converged}};
    if (rank == 1 && !product)
        summary["max_complementarity_residual"] = max_comp_residual;
    if (product) summary["max_lambda"] = max_lambda;
    json report = {{"command", "sweep"},
                   {"config",
                    {{"seed", o.seed},
                     {"n_states", n_states},
                     {"rank", rank},
                     {"product", product},
                     {"threshold", threshold},
                     {"max_iters", o.max_iters}}},
                   {"summary", summary},
                   {"rows", rows}};
    emit(o, report, csv);
    return kOk;
}

int cmd_oracle(const CommonOpts& o) {
    const Source src = resolve_source(o);
    const double c = wootters_concurrence(src.state);
    json report = {{"command", "oracle"},
                   {"config", {{"source", src.config}}},
                   {"wootters_concurrence", c}};
    emit(o, report,
         csv_row({"state", "wootters_concurrence"}) +
             csv_row({src.label, fmt_double(c)}));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Two-qubit entanglement distillation and concurrence from "
        "interference visibilities"};
    app.require_subcommand(1);

    CommonOpts o;
    ShotPlan plan;
    int replications = 30;
    double target = 0.01;
    long long budget_cap = 2'000'000;
    std::string only_state;
    int n_states = 200, rank = 4;
    bool product = false;

    auto* exact = app.add_subcommand(
        "exact", "exact-expectation distillation and concurrence");
    add_source_flags(exact, o);
    exact->add_option("--seed", o.seed, "replay seed recorded in the report");
    exact->add_option("--threshold", o.threshold,
                      "visibility convergence threshold (default 1e-8)");
    exact->add_option("--max-iters", o.max_iters, "turn limit");
    add_output_flags(exact, o);

    auto* estimate = app.add_subcommand(
        "estimate", "finite-shot Monte Carlo concurrence estimate");
    add_source_flags(estimate, o);
    estimate->add_option("--seed", o.seed, "rng seed");
    estimate->add_option("--shots-gamma", plan.shots_per_gamma_setting,
                         "surviving copies per gamma setting");
    estimate->add_option("--shots-q", plan.shots_per_q_setting,
                         "surviving copies per Q' setting");
    estimate->add_option("--shots-lambda", plan.shots_per_lambda_setting,
                         "surviving copies per extremum setting");
    estimate->add_option("--threshold", plan.distill_threshold,
                         "distillation visibility threshold (default 0.1)");
    estimate->add_option("--max-iters", o.max_iters, "turn limit");
    add_output_flags(estimate, o);

    auto* table1 = app.add_subcommand(
        "table1", "minimum copy budgets for the six benchmark states");
    table1->add_option("--seed", o.seed, "rng seed");
    table1->add_option("--replications", replications,
                       "replications per grid point");
    table1->add_option("--target", target, "statistical error halfwidth");
    table1->add_option("--budget-cap", budget_cap, "skip plans beyond this");
    table1->add_option("--states", only_state, "substring filter on rows");
    add_output_flags(table1, o);

    auto* sweep = app.add_subcommand(
        "sweep", "random-state oracle-equivalence sweep");
    sweep->add_option("--n-states", n_states, "number of random states");
    sweep->add_option("--rank", rank, "state rank 1..4")
        ->check(CLI::Range(1, 4));
    sweep->add_flag("--product", product, "draw random product states");
    sweep->add_option("--seed", o.seed, "rng seed");
    sweep->add_option("--threshold", o.threshold,
                      "distillation threshold (default 1e-8)");
    sweep->add_option("--max-iters", o.max_iters, "turn limit");
    add_output_flags(sweep, o);

    auto* oracle = app.add_subcommand(
        "oracle", "algebraic Wootters concurrence of a state");
    add_source_flags(oracle, o);
    add_output_flags(oracle, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*exact) return cmd_exact(o);
        if (*estimate) return cmd_estimate(o, plan);
        if (*table1)
            return cmd_table1(o, replications, target, budget_cap, only_state);
        if (*sweep) return cmd_sweep(o, n_states, rank, product);
        if (*oracle) return cmd_oracle(o);
    } catch (const NotDistillableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNotDistillable;
    } catch (const EstimationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNotDistillable;
    } catch (const NonPhysicalStateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kOk;
}
