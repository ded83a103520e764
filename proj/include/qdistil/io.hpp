#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "qdistil/budget.hpp"
#include "qdistil/distill.hpp"
#include "qdistil/estimation.hpp"
#include "qdistil/state.hpp"

namespace qdistil {

using json = nlohmann::json;

// State files: {"matrix_re": [[..]x4], "matrix_im": [[..]x4]} in the fixed
// basis order |uu>, |ud>, |du>, |dd>.

inline json state_to_json(const TwoQubitStated& state) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < 4; ++i) {
        json rrow = json::array(), irow = json::array();
        for (int j = 0; j < 4; ++j) {
            rrow.push_back(state.matrix(i, j).real());
            irow.push_back(state.matrix(i, j).imag());
        }
        re.push_back(rrow);
        im.push_back(irow);
    }
    return {{"matrix_re", re}, {"matrix_im", im}};
}

inline TwoQubitStated state_from_json(const json& j) {
    if (!j.contains("matrix_re") || !j.contains("matrix_im"))
        throw InvalidArgumentError(
            "state json must contain matrix_re and matrix_im");
    const auto& re = j.at("matrix_re");
    const auto& im = j.at("matrix_im");
    if (re.size() != 4 || im.size() != 4)
        throw InvalidArgumentError("state json: matrices must be 4x4");
    TwoQubitStated state;
    for (int i = 0; i < 4; ++i) {
        if (re[i].size() != 4 || im[i].size() != 4)
            throw InvalidArgumentError("state json: matrices must be 4x4");
        for (int j2 = 0; j2 < 4; ++j2)
            state.matrix(i, j2) = std::complex<double>(
                re[i][j2].get<double>(), im[i][j2].get<double>());
    }
    validate(state);  // reports which invariant failed
    return state;
}

inline TwoQubitStated load_state_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgumentError("cannot open state file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidArgumentError("state file " + path +
                                   ": invalid JSON: " + e.what());
    }
    try {
        return state_from_json(j);
    } catch (const NonPhysicalStateError& e) {
        throw NonPhysicalStateError("state file " + path + ": " + e.what());
    }
}

inline void save_state_file(const std::string& path,
                            const TwoQubitStated& state) {
    std::ofstream out(path);
    if (!out) throw InvalidArgumentError("cannot write state file: " + path);
    out << state_to_json(state).dump(2) << "\n";
}

inline json local_op_to_json(const LocalOpd& op) {
    return {{"f", op.f}, {"theta", op.theta}, {"phi", op.phi}};
}

inline json distill_step_to_json(const DistillStep<double>& s) {
    return {{"k", s.turn},
            {"side", side_name(s.side)},
            {"visibility", s.visibility},
            {"f", s.f},
            {"theta", s.theta},
            {"phi", s.phi},
            {"survival", s.survival},
            {"erased", s.erased},
            {"residual", s.residual},
            {"v_a", s.v_a},
            {"v_b", s.v_b}};
}

inline json distillation_to_json(const DistillationResultd& r) {
    json steps = json::array();
    for (const auto& s : r.history) steps.push_back(distill_step_to_json(s));
    return {{"status", to_string(r.status)},
            {"iterations", r.iterations},
            {"turns", r.turns},
            {"survival", r.survival},
            {"op_a", local_op_to_json(r.op_a)},
            {"op_b", local_op_to_json(r.op_b)},
            {"history", steps}};
}

inline json lorentz_to_json(const LorentzSingularValuesd& s) {
    return {{"s0", s.s0}, {"s1", s.s1}, {"s2", s.s2}, {"s3", s.s3}};
}

inline json decomposition_to_json(const QDecompositiond& d) {
    json va = json::array(), vb = json::array();
    for (int l = 0; l < 3; ++l) {
        va.push_back({d.vecs_a(0, l), d.vecs_a(1, l), d.vecs_a(2, l)});
        vb.push_back({d.vecs_b(0, l), d.vecs_b(1, l), d.vecs_b(2, l)});
    }
    return {{"lambdas", {d.lambdas(0), d.lambdas(1), d.lambdas(2)}},
            {"q_sign", d.q_sign},
            {"vecs_a", va},
            {"vecs_b", vb}};
}

inline json estimate_to_json(const ConcurrenceEstimate& e) {
    return {{"c_estimate", e.c},
            {"c_raw", e.c_raw},
            {"stderr", e.stderr_},
            {"s0_hat", e.s0_hat},
            {"lambda_hat", {e.lambda_hat(0), e.lambda_hat(1), e.lambda_hat(2)}},
            {"q_hat", e.q_hat},
            {"k_dis", e.k_dis},
            {"copies_distill", e.copies_distill},
            {"copies_quant", e.copies_quant},
            {"copies_total", e.copies_distill + e.copies_quant},
            {"distill_converged", e.distill_converged},
            {"verification_v_a", e.verification_v_a},
            {"verification_v_b", e.verification_v_b},
            {"op_a", local_op_to_json(e.op_a)},
            {"op_b", local_op_to_json(e.op_b)}};
}

inline json plan_to_json(const ShotPlan& p) {
    return {{"shots_per_gamma_setting", p.shots_per_gamma_setting},
            {"shots_per_q_setting", p.shots_per_q_setting},
            {"shots_per_lambda_setting", p.shots_per_lambda_setting},
            {"distill_threshold", p.distill_threshold},
            {"target_halfwidth", p.target_halfwidth}};
}

// Minimal CSV writing; fields never contain commas or quotes here.
inline std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ",";
        out += fields[i];
    }
    return out + "\n";
}

inline std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace qdistil
