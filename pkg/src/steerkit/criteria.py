"""The criterion catalog: steering inequalities evaluated to uniform records.

Each evaluator returns a CriterionResult holding the left-hand side, the
local-hidden-state (or separability) bound, the signed violation margin and
every intermediate quantity, so results are auditable. Boundary saturation
(margin exactly 0) counts as NOT violated: the inequalities are non-strict
for local models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import (
    BipartiteState,
    expectation,
    partial_trace,
    spin_operators,
    tensor_product,
    variance,
)
from .gaussian import P_A, P_B, X_A, X_B, GaussianState, conditional_min_variance, linear_combination_variance
from .measurements import (
    CONDITIONAL_MEAN,
    Estimator,
    JointDistribution,
    Measurement,
    PROB_FLOOR,
    collective_variance,
    inference_variance,
    inferred_abs_mean,
    measure_joint,
    observable_to_measurement,
    operator_of,
)

VIOLATED_IF_BELOW = "below"
VIOLATED_IF_ABOVE = "above"

COMMUTATION_TOL = 1e-9
CONVEXITY_TOL = 1e-12
CONVEXITY_GRID = 21

# Boundary saturation (margin exactly 0) counts as NOT violated; in floating
# point an exactly-saturated inequality lands within roundoff of zero, so the
# flag requires the margin to clear this tolerance.
SATURATION_TOL = 1e-12


@dataclass(frozen=True)
class CriterionResult:
    """Uniform verdict record: lhs, bound, direction, signed margin, intermediates."""

    criterion_id: str
    lhs_value: float
    bound: float
    direction: str
    margin: float
    violated: bool
    details: dict[str, float | str] = field(default_factory=dict)


def _result(
    criterion_id: str,
    lhs: float,
    bound: float,
    direction: str,
    details: dict[str, float | str],
) -> CriterionResult:
    margin = bound - lhs if direction == VIOLATED_IF_BELOW else lhs - bound
    return CriterionResult(
        criterion_id=criterion_id,
        lhs_value=float(lhs),
        bound=float(bound),
        direction=direction,
        margin=float(margin),
        violated=bool(margin > SATURATION_TOL),
        details=details,
    )


@dataclass(frozen=True)
class InferencePair:
    """One inferred Bob observable: his measurement, Alice's, and her estimator."""

    alice: Measurement
    bob: Measurement
    estimator: Estimator = CONDITIONAL_MEAN


@dataclass(frozen=True)
class InferencePlan:
    """Measurement/estimator choices for each inferred Bob observable.

    Alice's choices are free parameters of every inference criterion; a plan
    pins them down explicitly.
    """

    pairs: tuple[InferencePair, ...]


def spin_triple_plan(
    j_alice: float, j_bob: float | None = None, estimator: Estimator = CONDITIONAL_MEAN
) -> InferencePlan:
    """Plan measuring the same spin component (x, y, z) on both sides."""
    j_bob = j_alice if j_bob is None else j_bob
    ja, jb = spin_operators(j_alice), spin_operators(j_bob)
    pairs = []
    for axis in "xyz":
        pairs.append(
            InferencePair(
                alice=observable_to_measurement(ja.component(axis), f"J{axis}_A"),
                bob=observable_to_measurement(jb.component(axis), f"J{axis}_B"),
                estimator=estimator,
            )
        )
    return InferencePlan(pairs=tuple(pairs))


def default_spin_plan(state: BipartiteState, estimator: Estimator = CONDITIONAL_MEAN) -> InferencePlan:
    return spin_triple_plan((state.dim_a - 1) / 2, (state.dim_b - 1) / 2, estimator)


def _check_commutation(b_ops: Sequence[np.ndarray], labels: Sequence[str], cyclic: bool) -> None:
    """Require [b1, b2] = i·b3 (and cyclic permutations when asked)."""
    triples = [(0, 1, 2)]
    if cyclic:
        triples += [(1, 2, 0), (2, 0, 1)]
    for i, k, l in triples:
        residue = np.max(np.abs(b_ops[i] @ b_ops[k] - b_ops[k] @ b_ops[i] - 1j * b_ops[l]))
        if residue > COMMUTATION_TOL:
            raise ValueError(
                f"commutation check failed for ({labels[i]}, {labels[k]}, {labels[l]}): "
                f"max |[b{i + 1}, b{k + 1}] - i b{l + 1}| = {residue:.3e}"
            )


def _plan_joints(state: BipartiteState, plan: InferencePlan) -> list[JointDistribution]:
    return [measure_joint(state, pair.alice, pair.bob) for pair in plan.pairs]


def _conditional_mean_details(joint: JointDistribution, tag: str) -> dict[str, float]:
    """Per-Alice-outcome conditional means of B, keyed by the outcome value."""
    weights = joint.marginal_a()
    b = np.asarray(joint.b_values)
    details = {}
    for idx, weight in enumerate(weights):
        if weight > PROB_FLOOR:
            mean = float(joint.probs[idx] @ b) / weight
            details[f"conditional_mean_{tag}[{joint.a_values[idx]:g}]"] = mean
    return details


def _require_three_pairs(plan: InferencePlan, criterion_id: str) -> None:
    if len(plan.pairs) != 3:
        raise ValueError(f"{criterion_id} needs a plan with three inference pairs, got {len(plan.pairs)}")


def eval_product_criterion(state: BipartiteState, plan: InferencePlan) -> CriterionResult:
    """D_inf(B1)·D_inf(B2) ≥ |<B3>|_inf / 2 for Bob observables with [b1, b2] = i·b3."""
    _require_three_pairs(plan, "product-spin")
    b_ops = [operator_of(p.bob) for p in plan.pairs]
    labels = [p.bob.label for p in plan.pairs]
    _check_commutation(b_ops, labels, cyclic=False)
    joints = _plan_joints(state, plan)
    v1 = inference_variance(joints[0], plan.pairs[0].estimator)
    v2 = inference_variance(joints[1], plan.pairs[1].estimator)
    abs_mean_inf = inferred_abs_mean(joints[2])
    lhs = math.sqrt(v1) * math.sqrt(v2)
    details: dict[str, float | str] = {
        "inference_variance_1": v1,
        "inference_variance_2": v2,
        "inferred_abs_mean_3": abs_mean_inf,
        "estimator_1": plan.pairs[0].estimator.mode,
        "estimator_2": plan.pairs[1].estimator.mode,
    }
    details.update(_conditional_mean_details(joints[2], "3"))
    return _result("product-spin", lhs, 0.5 * abs_mean_inf, VIOLATED_IF_BELOW, details)


def eval_bowen(state: BipartiteState, plan: InferencePlan) -> CriterionResult:
    """Weaker product criterion: the bound uses Bob's unconditional |<B3>|."""
    _require_three_pairs(plan, "bowen")
    b_ops = [operator_of(p.bob) for p in plan.pairs]
    labels = [p.bob.label for p in plan.pairs]
    _check_commutation(b_ops, labels, cyclic=False)
    joints = _plan_joints(state, plan)
    v1 = inference_variance(joints[0], plan.pairs[0].estimator)
    v2 = inference_variance(joints[1], plan.pairs[1].estimator)
    rho_b = partial_trace(state, "b")
    abs_mean = abs(expectation(b_ops[2], rho_b))
    lhs = math.sqrt(v1) * math.sqrt(v2)
    details: dict[str, float | str] = {
        "inference_variance_1": v1,
        "inference_variance_2": v2,
        "unconditional_abs_mean_3": abs_mean,
    }
    return _result("bowen", lhs, 0.5 * abs_mean, VIOLATED_IF_BELOW, details)


def eval_additive_sum_two(state: BipartiteState, plan: InferencePlan) -> CriterionResult:
    """Var_inf(B1) + Var_inf(B2) ≥ |<B3>|_inf; implied by the product criterion."""
    _require_three_pairs(plan, "sum-two")
    b_ops = [operator_of(p.bob) for p in plan.pairs]
    labels = [p.bob.label for p in plan.pairs]
    _check_commutation(b_ops, labels, cyclic=False)
    joints = _plan_joints(state, plan)
    v1 = inference_variance(joints[0], plan.pairs[0].estimator)
    v2 = inference_variance(joints[1], plan.pairs[1].estimator)
    abs_mean_inf = inferred_abs_mean(joints[2])
    details: dict[str, float | str] = {
        "inference_variance_1": v1,
        "inference_variance_2": v2,
        "inferred_abs_mean_3": abs_mean_inf,
    }
    details.update(_conditional_mean_details(joints[2], "3"))
    return _result("sum-two", v1 + v2, abs_mean_inf, VIOLATED_IF_BELOW, details)


def eval_additive_sum_three_spin(
    state: BipartiteState, plan: InferencePlan, j: float | None = None
) -> CriterionResult:
    """Var_inf(Jx) + Var_inf(Jy) + Var_inf(Jz) ≥ j for a spin-j Bob."""
    _require_three_pairs(plan, "sum-three-spin")
    dim_j = round(2 * j) + 1 if j is not None else state.dim_b
    if dim_j != state.dim_b:
        raise ValueError(f"Bob dimension {state.dim_b} does not equal 2j+1 = {dim_j}")
    j_val = (state.dim_b - 1) / 2
    b_ops = [operator_of(p.bob) for p in plan.pairs]
    labels = [p.bob.label for p in plan.pairs]
    _check_commutation(b_ops, labels, cyclic=True)
    casimir = b_ops[0] @ b_ops[0] + b_ops[1] @ b_ops[1] + b_ops[2] @ b_ops[2]
    if np.max(np.abs(casimir - j_val * (j_val + 1) * np.eye(state.dim_b))) > COMMUTATION_TOL:
        raise ValueError(f"Bob observables ({', '.join(labels)}) are not a spin-{j_val} triple")
    joints = _plan_joints(state, plan)
    variances = [inference_variance(jd, p.estimator) for jd, p in zip(joints, plan.pairs)]
    details: dict[str, float | str] = {
        f"inference_variance_{i + 1}": v for i, v in enumerate(variances)
    }
    details["spin_j"] = j_val
    return _result("sum-three-spin", sum(variances), j_val, VIOLATED_IF_BELOW, details)


def eval_reid_cv(
    state: GaussianState,
    use_min_variance: bool = True,
    gains: tuple[float, float] | None = None,
) -> CriterionResult:
    """D_inf(x_B)·D_inf(p_B) ≥ 1 on a two-mode Gaussian state.

    With use_min_variance the inference variances are the Schur-complement
    conditional variances (the optimum); otherwise the gain-based collective
    variances Var(g·q_A + q_B) are used.
    """
    if state.n_modes != 2:
        raise ValueError(f"reid-cv needs a two-mode state, got {state.n_modes} modes")
    if use_min_variance:
        vx = conditional_min_variance(state, X_B, X_A)
        vp = conditional_min_variance(state, P_B, P_A)
        gx: float | str = "optimal"
        gp: float | str = "optimal"
    else:
        if gains is None:
            raise ValueError("gain-based evaluation requires gains=(gx, gp)")
        gx, gp = float(gains[0]), float(gains[1])
        coeff_x = np.zeros(4)
        coeff_x[X_A], coeff_x[X_B] = gx, 1.0
        coeff_p = np.zeros(4)
        coeff_p[P_A], coeff_p[P_B] = gp, 1.0
        vx = linear_combination_variance(state, coeff_x)
        vp = linear_combination_variance(state, coeff_p)
    lhs = math.sqrt(vx) * math.sqrt(vp)
    details: dict[str, float | str] = {
        "inference_variance_x": vx,
        "inference_variance_p": vp,
        "gain_x": gx,
        "gain_p": gp,
    }
    return _result("reid-cv", lhs, 1.0, VIOLATED_IF_BELOW, details)


def eval_duan_simon(state: GaussianState) -> CriterionResult:
    """Var(x_A - x_B) + Var(p_A + p_B) ≥ 4: separability (entanglement) comparison.

    This witnesses entanglement, not steering; the analogous steering bound is
    half as large (harder to violate) because steering is the stronger notion.
    """
    if state.n_modes != 2:
        raise ValueError(f"duan-simon needs a two-mode state, got {state.n_modes} modes")
    minus = np.zeros(4)
    minus[X_A], minus[X_B] = 1.0, -1.0
    plus = np.zeros(4)
    plus[P_A], plus[P_B] = 1.0, 1.0
    v_minus = linear_combination_variance(state, minus)
    v_plus = linear_combination_variance(state, plus)
    details: dict[str, float | str] = {
        "variance_x_minus": v_minus,
        "variance_p_plus": v_plus,
        "witnesses": "entanglement (comparison criterion, not steering)",
    }
    return _result("duan-simon", v_minus + v_plus, 4.0, VIOLATED_IF_BELOW, details)


@dataclass(frozen=True)
class CollectiveTerm:
    """One Var(g·A + B) term.

    For CV variants alice/bob are quadrature indices into the covariance
    matrix; for spin/arbitrary variants they are observable matrices.
    """

    alice: int | np.ndarray
    bob: int | np.ndarray
    gain: float = 1.0


_COLLECTIVE_VARIANTS = ("product-cv", "sum-cv", "sum-spin", "product-arb", "sum-arb")


def _collective_term_variance(
    state: GaussianState | BipartiteState, term: CollectiveTerm, gain_mode: str
) -> tuple[float, float]:
    """Resolve the gain (optimizing g* = -cov(A,B)/Var(A) when asked) and the variance."""
    if isinstance(state, GaussianState):
        a_idx, b_idx = int(term.alice), int(term.bob)
        if gain_mode == "optimize":
            var_a = state.cov[a_idx, a_idx]
            if var_a < 1e-12:
                raise ValueError("cannot optimize the gain against a zero-variance Alice quadrature")
            gain = -state.cov[a_idx, b_idx] / var_a
        else:
            gain = term.gain
        coeffs = np.zeros(state.cov.shape[0])
        coeffs[a_idx] += gain
        coeffs[b_idx] += 1.0
        return float(gain), linear_combination_variance(state, coeffs)
    a_obs = np.asarray(term.alice, dtype=complex)
    b_obs = np.asarray(term.bob, dtype=complex)
    if gain_mode == "optimize":
        eye_a, eye_b = np.eye(state.dim_a), np.eye(state.dim_b)
        mean_a = expectation(tensor_product(a_obs, eye_b), state.matrix)
        mean_b = expectation(tensor_product(eye_a, b_obs), state.matrix)
        cov_ab = expectation(tensor_product(a_obs, b_obs), state.matrix) - mean_a * mean_b
        var_a = variance(a_obs, partial_trace(state, "a"))
        if var_a < 1e-12:
            raise ValueError("cannot optimize the gain against a zero-variance Alice observable")
        gain = -cov_ab / var_a
    else:
        gain = term.gain
    return float(gain), collective_variance(state, a_obs, b_obs, gain)


def eval_collective(
    state: GaussianState | BipartiteState,
    terms: Sequence[CollectiveTerm],
    variant: str,
    gain_mode: str = "fixed",
    inference_pair: InferencePair | None = None,
) -> CriterionResult:
    """Criteria built from collective variances Var(g_k·A_k + B_k).

    Bounds per variant: 1 for product-cv (product of standard deviations),
    2 for sum-cv, the spin quantum number j for sum-spin, and |<B3>|_inf
    (halved for the product form) for the arbitrary-observable variants,
    which therefore need an extra inference pair for B3.
    """
    if variant not in _COLLECTIVE_VARIANTS:
        raise ValueError(f"unknown collective variant {variant!r}")
    if gain_mode not in ("fixed", "optimize"):
        raise ValueError(f"gain_mode must be 'fixed' or 'optimize', got {gain_mode!r}")
    expected_terms = 3 if variant == "sum-spin" else 2
    if len(terms) != expected_terms:
        raise ValueError(f"variant {variant} needs {expected_terms} terms, got {len(terms)}")
    if variant.endswith("cv") and not isinstance(state, GaussianState):
        raise ValueError(f"variant {variant} needs a Gaussian state")
    if not variant.endswith("cv") and not isinstance(state, BipartiteState):
        raise ValueError(f"variant {variant} needs a finite-dimensional bipartite state")

    details: dict[str, float | str] = {"gain_mode": gain_mode}
    variances = []
    for i, term in enumerate(terms):
        gain, var = _collective_term_variance(state, term, gain_mode)
        variances.append(var)
        details[f"gain_{i + 1}"] = gain
        details[f"collective_variance_{i + 1}"] = var

    if variant == "sum-cv":
        lhs, bound = sum(variances), 2.0
    elif variant == "product-cv":
        lhs, bound = math.sqrt(variances[0]) * math.sqrt(variances[1]), 1.0
    elif variant == "sum-spin":
        j_val = (state.dim_b - 1) / 2
        details["spin_j"] = j_val
        lhs, bound = sum(variances), j_val
    else:
        if inference_pair is None:
            raise ValueError(f"variant {variant} needs an inference pair for the bound observable")
        joint = measure_joint(state, inference_pair.alice, inference_pair.bob)
        abs_mean_inf = inferred_abs_mean(joint)
        details["inferred_abs_mean_3"] = abs_mean_inf
        if variant == "sum-arb":
            lhs, bound = sum(variances), abs_mean_inf
        else:
            lhs, bound = math.sqrt(variances[0]) * math.sqrt(variances[1]), 0.5 * abs_mean_inf
    criterion_id = {
        "sum-cv": "collective-cv-sum",
        "product-cv": "collective-cv-product",
        "sum-spin": "collective-spin-sum",
        "sum-arb": "collective-arb-sum",
        "product-arb": "collective-arb-product",
    }[variant]
    return _result(criterion_id, lhs, bound, VIOLATED_IF_BELOW, details)


def _spin_correlation_sum(state: BipartiteState, axes: str) -> tuple[float, dict[str, float | str]]:
    ja = spin_operators((state.dim_a - 1) / 2)
    jb = spin_operators((state.dim_b - 1) / 2)
    total = 0.0
    details: dict[str, float | str] = {}
    for axis in axes:
        corr = expectation(tensor_product(ja.component(axis), jb.component(axis)), state.matrix)
        details[f"correlation_{axis}"] = corr
        total += corr
    return total, details


def eval_linear_qubit(state: BipartiteState, n_measurements: int) -> CriterionResult:
    """|Σ_i <J_i^A J_i^B>| over two or three spin axes, bounds √2/4 and √3/4."""
    if n_measurements not in (2, 3):
        raise ValueError(f"n_measurements must be 2 or 3, got {n_measurements}")
    if state.dim_a != 2 or state.dim_b != 2:
        raise ValueError("linear qubit criteria need a two-qubit state")
    axes = "xy" if n_measurements == 2 else "xyz"
    total, details = _spin_correlation_sum(state, axes)
    bound = math.sqrt(n_measurements) / 4
    return _result(f"linear-{n_measurements}", abs(total), bound, VIOLATED_IF_ABOVE, details)


def eval_linear_spin_j(state: BipartiteState, j: float | None = None) -> CriterionResult:
    """|Σ_i <J_i^A J_i^B>| ≤ √3·j² for two spin-j subsystems."""
    if state.dim_a != state.dim_b:
        raise ValueError("linear-spin-j needs equal subsystem dimensions")
    dim_j = round(2 * j) + 1 if j is not None else state.dim_b
    if dim_j != state.dim_b:
        raise ValueError(f"subsystem dimension {state.dim_b} does not equal 2j+1 = {dim_j}")
    j_val = (state.dim_b - 1) / 2
    total, details = _spin_correlation_sum(state, "xyz")
    details["spin_j"] = j_val
    return _result("linear-spin-j", abs(total), math.sqrt(3) * j_val**2, VIOLATED_IF_ABOVE, details)


@dataclass(frozen=True)
class ConvexTerm:
    """One term f_j(<B_j>_A, A) of an additive convex constraint.

    f must be convex in its first argument over mean_interval for every Alice
    outcome; that is spot-checked on a 21-point grid at tolerance 1e-12.
    Setting use_unconditional applies the weaker form f(<B_j>), valid when f
    ignores its second argument.
    """

    alice: Measurement
    bob: Measurement
    f: Callable[[float, float], float]
    mean_interval: tuple[float, float]
    use_unconditional: bool = False


def check_convexity(term: ConvexTerm) -> None:
    """Midpoint-convexity spot check of term.f over its declared interval."""
    lo, hi = term.mean_interval
    if not hi >= lo:
        raise ValueError(f"invalid mean interval {term.mean_interval}")
    grid = np.linspace(lo, hi, CONVEXITY_GRID)
    alphas = (0.0,) if term.use_unconditional else term.alice.values
    for alpha in alphas:
        f_vals = [term.f(float(t), float(alpha)) for t in grid]
        for i in range(CONVEXITY_GRID):
            for k in range(i + 2, CONVEXITY_GRID, 2):
                mid = (i + k) // 2
                if f_vals[mid] > 0.5 * (f_vals[i] + f_vals[k]) + CONVEXITY_TOL:
                    raise ValueError(
                        f"convexity spot-check failed at alpha={alpha}, "
                        f"x={grid[i]:.6g}, y={grid[k]:.6g}"
                    )


def eval_additive_convex(
    source: BipartiteState | Sequence[JointDistribution],
    terms: Sequence[ConvexTerm],
    quantum_bound: float = 0.0,
) -> CriterionResult:
    """General additive convex criterion Σ_j E_A[f_j(<B_j>_A, A)] ≤ bound.

    The caller asserts that Σ_j f_j(<B_j>_ρ, α_j) ≤ bound holds for every
    quantum state of Bob's subsystem (the quantum constraint is trusted
    input). Works for POVM measurements unchanged. Violation means lhs above
    the bound.
    """
    if not terms:
        raise ValueError("at least one convex term is required")
    for term in terms:
        check_convexity(term)
    if isinstance(source, BipartiteState):
        joints = [measure_joint(source, t.alice, t.bob) for t in terms]
    else:
        joints = list(source)
        if len(joints) != len(terms):
            raise ValueError(f"{len(joints)} joint distributions supplied for {len(terms)} terms")
    lhs = 0.0
    details: dict[str, float | str] = {}
    for i, (term, joint) in enumerate(zip(terms, joints)):
        if term.use_unconditional:
            contribution = term.f(joint.mean_b(), 0.0)
        else:
            weights = joint.marginal_a()
            contribution = 0.0
            for a_idx, w in enumerate(weights):
                if w > PROB_FLOOR:
                    mean = float(joint.probs[a_idx] @ np.asarray(joint.b_values)) / w
                    contribution += w * term.f(mean, joint.a_values[a_idx])
        details[f"term_{i + 1}"] = contribution
        lhs += contribution
    return _result("custom-convex", lhs, quantum_bound, VIOLATED_IF_ABOVE, details)


@dataclass(frozen=True)
class CriterionInfo:
    """Catalog descriptor: direction and human-readable formula for a criterion."""

    criterion_id: str
    kind: str  # "spin" | "cv" | "any"
    direction: str
    lhs_desc: str
    bound_desc: str
    note: str = ""


CATALOG: dict[str, CriterionInfo] = {
    info.criterion_id: info
    for info in (
        CriterionInfo(
            "reid-cv", "cv", VIOLATED_IF_BELOW,
            "D_inf(x_B) * D_inf(p_B)", "1",
            "conditional (Schur) variances by default; gain-based on request",
        ),
        CriterionInfo(
            "product-spin", "spin", VIOLATED_IF_BELOW,
            "D_inf(B1) * D_inf(B2)", "|<B3>|_inf / 2",
            "needs [b1, b2] = i b3 on Bob's side",
        ),
        CriterionInfo(
            "bowen", "spin", VIOLATED_IF_BELOW,
            "D_inf(B1) * D_inf(B2)", "|<B3>| / 2",
            "unconditional bound; weaker than product-spin",
        ),
        CriterionInfo(
            "sum-two", "spin", VIOLATED_IF_BELOW,
            "Var_inf(B1) + Var_inf(B2)", "|<B3>|_inf",
            "violated only if product-spin is",
        ),
        CriterionInfo(
            "sum-three-spin", "spin", VIOLATED_IF_BELOW,
            "Var_inf(Jx) + Var_inf(Jy) + Var_inf(Jz)", "j",
        ),
        CriterionInfo(
            "collective-cv-sum", "cv", VIOLATED_IF_BELOW,
            "Var(gx*x_A + x_B) + Var(gp*p_A + p_B)", "2",
            "default gains (-1, +1)",
        ),
        CriterionInfo(
            "collective-cv-product", "cv", VIOLATED_IF_BELOW,
            "D(gx*x_A + x_B) * D(gp*p_A + p_B)", "1",
            "default gains (-1, +1)",
        ),
        CriterionInfo(
            "collective-spin-sum", "spin", VIOLATED_IF_BELOW,
            "sum_i Var(g_i*Ji_A + Ji_B)", "j",
            "gains optimized by default",
        ),
        CriterionInfo(
            "linear-2", "spin", VIOLATED_IF_ABOVE,
            "|<Jx_A Jx_B> + <Jy_A Jy_B>|", "sqrt(2)/4",
        ),
        CriterionInfo(
            "linear-3", "spin", VIOLATED_IF_ABOVE,
            "|<Jx_A Jx_B> + <Jy_A Jy_B> + <Jz_A Jz_B>|", "sqrt(3)/4",
        ),
        CriterionInfo(
            "linear-spin-j", "spin", VIOLATED_IF_ABOVE,
            "|sum_i <Ji_A Ji_B>|", "sqrt(3)*j^2",
        ),
        CriterionInfo(
            "duan-simon", "cv", VIOLATED_IF_BELOW,
            "Var(x_A - x_B) + Var(p_A + p_B)", "4",
            "entanglement comparison criterion, not steering",
        ),
        CriterionInfo(
            "custom-convex", "any", VIOLATED_IF_ABOVE,
            "sum_j E_A[f_j(<B_j>_A, A)]", "caller-supplied constraint bound",
            "library-only: needs explicit convex terms",
        ),
    )
}


def _cv_collective_terms(gains: tuple[float, float] | None) -> list[CollectiveTerm]:
    gx, gp = gains if gains is not None else (-1.0, 1.0)
    return [CollectiveTerm(X_A, X_B, gx), CollectiveTerm(P_A, P_B, gp)]


def evaluate(
    criterion_id: str,
    state: BipartiteState | GaussianState,
    gain_mode: str | None = None,
    gains: tuple[float, float] | None = None,
    use_min_variance: bool = True,
) -> CriterionResult:
    """Evaluate a cataloged criterion on a state with its default plan.

    Spin criteria use the same-component spin plan with conditional-mean
    estimators; CV collective criteria default to fixed gains (-1, +1) while
    collective-spin-sum optimizes its gains unless told otherwise.
    """
    if criterion_id not in CATALOG:
        raise KeyError(f"unknown criterion {criterion_id!r}")
    info = CATALOG[criterion_id]
    if info.kind == "cv" and not isinstance(state, GaussianState):
        raise ValueError(f"criterion {criterion_id} needs a Gaussian state")
    if info.kind == "spin" and not isinstance(state, BipartiteState):
        raise ValueError(f"criterion {criterion_id} needs a finite-dimensional bipartite state")

    if criterion_id == "reid-cv":
        if gains is not None:
            return eval_reid_cv(state, use_min_variance=False, gains=gains)
        return eval_reid_cv(state, use_min_variance=use_min_variance)
    if criterion_id == "duan-simon":
        return eval_duan_simon(state)
    if criterion_id == "collective-cv-sum":
        return eval_collective(state, _cv_collective_terms(gains), "sum-cv", gain_mode or "fixed")
    if criterion_id == "collective-cv-product":
        return eval_collective(state, _cv_collective_terms(gains), "product-cv", gain_mode or "fixed")

    plan = default_spin_plan(state)
    if criterion_id == "product-spin":
        return eval_product_criterion(state, plan)
    if criterion_id == "bowen":
        return eval_bowen(state, plan)
    if criterion_id == "sum-two":
        return eval_additive_sum_two(state, plan)
    if criterion_id == "sum-three-spin":
        return eval_additive_sum_three_spin(state, plan)
    if criterion_id == "collective-spin-sum":
        ops = spin_operators((state.dim_b - 1) / 2)
        ops_a = spin_operators((state.dim_a - 1) / 2)
        terms = [
            CollectiveTerm(ops_a.component(axis), ops.component(axis), 1.0) for axis in "xyz"
        ]
        return eval_collective(state, terms, "sum-spin", gain_mode or "optimize")
    if criterion_id == "linear-2":
        return eval_linear_qubit(state, 2)
    if criterion_id == "linear-3":
        return eval_linear_qubit(state, 3)
    if criterion_id == "linear-spin-j":
        return eval_linear_spin_j(state)
    raise ValueError(f"criterion {criterion_id} cannot be evaluated without explicit terms")
