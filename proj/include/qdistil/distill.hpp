#pragma once

#include <vector>

#include "qdistil/local_ops.hpp"

namespace qdistil {

enum class DistillStatus { Converged, MaxIterations, NotDistillable };

inline const char* to_string(DistillStatus s) {
    switch (s) {
        case DistillStatus::Converged: return "converged";
        case DistillStatus::MaxIterations: return "max_iterations";
        case DistillStatus::NotDistillable: return "not_distillable";
    }
    return "?";
}

// One protocol turn.  `visibility` is the Bloch norm the acting side measures
// with its own beam splitters reset; `residual` is that vector pushed through
// the op the side ends the turn with (zero right after an erase, and the
// convergence observable on a passing turn).  v_a / v_b / survival describe
// the fully transformed state after the turn.
template <typename Scalar>
struct DistillStep {
    int turn = 0;
    Side side = Side::A;
    Scalar visibility = Scalar(0);
    Scalar residual = Scalar(0);
    bool erased = false;
    Scalar f = Scalar(1);
    Scalar theta = Scalar(0);
    Scalar phi = Scalar(0);
    Scalar v_a = Scalar(0);
    Scalar v_b = Scalar(0);
    Scalar survival = Scalar(1);
};

template <typename Scalar>
struct DistillationResult {
    DistillStatus status = DistillStatus::Converged;
    int iterations = 0;  // erase turns performed
    int turns = 0;       // all turns, including the two terminating passes
    LocalOp<Scalar> op_a, op_b;
    Scalar survival = Scalar(1);  // trace of final_state
    std::vector<DistillStep<Scalar>> history;
    TwoQubitState<Scalar> final_state;  // unnormalized

    bool converged() const { return status == DistillStatus::Converged; }
};

using DistillationResultd = DistillationResult<double>;

// Alternating erasure of the single-qubit interference, Alice first.  Each
// turn the acting side resets its own op, measures its Bloch vector with the
// partner's op in place, and replaces its op by erase_marginal of what it
// measured unless the op it already holds nulls that vector to below
// `threshold` (then the turn is a pass).  Two consecutive passes mean both
// transformed marginals are below threshold simultaneously: the normal form.
//
// iterations counts erase turns: 0 for Werner/Bell-diagonal states, 1 for
// pure states, 2 for uncorrelated product states.  Slowly converging states
// (filter strength -> 0) end with status MaxIterations after max_iters turns.
template <typename Scalar>
DistillationResult<Scalar> distill(const TwoQubitState<Scalar>& state,
                                   Scalar threshold = Scalar(1e-8),
                                   int max_iters = 200) {
    if (!(threshold > Scalar(0)))
        throw InvalidArgumentError("distill: threshold must be positive");
    DistillationResult<Scalar> out;
    LocalOp<Scalar> id;
    Side side = Side::A;
    int passes = 0;
    while (passes < 2) {
        if (out.turns >= max_iters) {
            out.status = DistillStatus::MaxIterations;
            break;
        }
        const LocalOp<Scalar>& cur =
            (side == Side::A) ? out.op_a : out.op_b;
        const TwoQubitState<Scalar> reset_view =
            apply_local(state, side == Side::A ? id : out.op_a,
                        side == Side::B ? id : out.op_b);
        const BlochVector<Scalar> g = marginal(reset_view, side);

        DistillStep<Scalar> step;
        step.turn = ++out.turns;
        step.side = side;
        step.visibility = g.norm();

        const Scalar mapped = bloch_through(cur, g).first.norm();
        if (mapped < threshold) {
            ++passes;
            step.residual = mapped;
        } else {
            if (g.norm() >= Scalar(1) - Scalar(kPureMarginalTol)) {
                out.status = DistillStatus::NotDistillable;
                out.history.push_back(step);
                break;
            }
            LocalOp<Scalar>& mine = (side == Side::A) ? out.op_a : out.op_b;
            mine = erase_marginal(g);
            step.erased = true;
            step.residual = bloch_through(mine, g).first.norm();
            ++out.iterations;
            passes = 0;
        }
        const LocalOp<Scalar>& held = (side == Side::A) ? out.op_a : out.op_b;
        step.f = held.f;
        step.theta = held.theta;
        step.phi = held.phi;

        const TwoQubitState<Scalar> cur_state =
            apply_local(state, out.op_a, out.op_b);
        step.v_a = marginal(cur_state, Side::A).norm();
        step.v_b = marginal(cur_state, Side::B).norm();
        step.survival = cur_state.trace();
        out.history.push_back(step);
        side = other_side(side);
    }
    out.final_state = apply_local(state, out.op_a, out.op_b);
    out.survival = out.final_state.trace();
    return out;
}

// Beam-splitter settings after exactly k alternating erase turns (Alice
// first) computed from exact marginals, with no convergence gating.  This is
// the deterministic schedule replay used for fixed-iteration reproductions.
template <typename Scalar>
std::pair<LocalOp<Scalar>, LocalOp<Scalar>> scheduled_ops(
    const TwoQubitState<Scalar>& state, int k) {
    LocalOp<Scalar> op_a, op_b, id;
    Side side = Side::A;
    for (int turn = 1; turn <= k; ++turn) {
        const TwoQubitState<Scalar> reset_view =
            apply_local(state, side == Side::A ? id : op_a,
                        side == Side::B ? id : op_b);
        ((side == Side::A) ? op_a : op_b) =
            erase_marginal(marginal(reset_view, side));
        side = other_side(side);
    }
    return {op_a, op_b};
}

}  // namespace qdistil
