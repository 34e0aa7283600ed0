"""Random block coordinate descent with hard thresholding, and the
full-gradient hard-thresholding baseline, with instrumented traces.

Every iteration of the coordinate method draws one block uniformly at random
and replaces it by the thresholding map of the configured approximation
model. The recorded trace carries enough to verify the per-iteration descent
inequality

    F(x^{k+1}) <= F(x^k) - (mu_i/2) ||x^{k+1}_i - x^k_i||^2,

count support changes, and fit the linear convergence rate of the final
fixed-support phase.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .approx import ApproxSpec, apply_threshold, TIE_RULE
from .core import IterateState, L0Problem, l0_norm, support_of

# Counter-based generator pinned for cross-run reproducibility; the
# identifier travels in trace metadata and CSV headers.
RNG_ALGORITHM = "philox4x64"

# Slack terms for the runtime descent check and the stopping rule.
_DESCENT_SLACK = 1e-12
_STEP_TOL = 1e-10


class InvariantViolation(RuntimeError):
    """Raised when an iteration breaks the guaranteed descent inequality.

    This signals a bug or an invalid Lipschitz constant, never a benign
    numerical hiccup: the slack already absorbs roundoff.
    """


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def draw_block(rng: np.random.Generator, num_blocks: int) -> int:
    # Rejection-free uniform mapping from the 53-bit double; no modulo bias.
    return int(num_blocks * rng.random())


def support_bitmask(support: frozenset[int]) -> int:
    mask = 0
    for j in support:
        mask |= 1 << j
    return mask


@dataclass
class SolverConfig:
    """Settings for one coordinate-descent run."""

    approx: ApproxSpec
    max_iters: int
    seed: int = 0
    record_trace: bool = True
    support_patience: int | None = None  # default 3N, see stopping rule
    step_tol: float = _STEP_TOL

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass
class SolverTrace:
    """Per-iteration record of a solver run.

    ``F`` holds the objective before each iteration; ``final_F`` closes the
    sequence. ``blocks`` holds the chosen block index (-1 for full-gradient
    iterations). ``supports`` are bitmask snapshots of I(x^k) before each
    iteration when tracing is enabled.
    """

    blocks: np.ndarray
    F: np.ndarray
    step_norms: np.ndarray
    support_changed: np.ndarray
    supports: list[int]
    final_x: np.ndarray
    final_F: float
    delta_bound: float
    metadata: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return len(self.blocks)

    @property
    def support_change_iterations(self) -> np.ndarray:
        return np.flatnonzero(self.support_changed)

    @property
    def kappa(self) -> int:
        """Number of iterations whose step changed the support set."""
        return int(np.count_nonzero(self.support_changed))

    @property
    def fixed_support_tail_start(self) -> int:
        """First iteration of the final constant-support phase."""
        changes = self.support_change_iterations
        return int(changes[-1]) + 1 if len(changes) else 0


def rcd_iht_step(
    problem: L0Problem,
    state: IterateState,
    i: int,
    spec: ApproxSpec,
    mu_i: float | None = None,
) -> IterateState:
    """Apply the thresholding map to block i of ``state`` in place.

    The state's point, cache, support, and f value stay mutually consistent.
    Raises InvariantViolation if the step fails the guaranteed descent
    inequality beyond roundoff slack.
    """
    partition = problem.partition
    sl = partition.block_slice(i)
    old_block = state.x[sl].copy()
    F_old = state.objective(problem)

    new_block = apply_threshold(problem.smooth, partition, state.x, i, spec, state.cache)
    state.x[sl] = new_block
    problem.smooth.update_cache(state.cache, sl, old_block, new_block)
    state.f_value = problem.smooth.value_from_cache(state.x, state.cache)
    if partition.lam[i] > 0.0:
        coords = set(range(sl.start, sl.stop))
        kept = {sl.start + k for k in np.flatnonzero(new_block)}
        state.support = frozenset((state.support - coords) | kept)

    if mu_i is None:
        mu_i = float(spec.mu(partition)[i])
    step_sq = float(np.sum((new_block - old_block) ** 2))
    F_new = state.objective(problem)
    bound = F_old - 0.5 * mu_i * step_sq + _DESCENT_SLACK * (1.0 + abs(F_old))
    if F_new > bound:
        raise InvariantViolation(
            f"descent inequality violated at block {i}: F {F_old:.12g} -> {F_new:.12g}, "
            f"required <= {bound:.12g} (mu={mu_i:.3g}, step^2={step_sq:.3g}); "
            "check the block Lipschitz constants"
        )
    return state


def run_rcd_iht(
    problem: L0Problem, x0: np.ndarray, config: SolverConfig
) -> tuple[IterateState, SolverTrace]:
    """Run the randomized coordinate thresholding method from x0.

    Blocks are drawn i.i.d. uniformly from the seeded counter-based
    generator. Stops at max_iters, or earlier once the support has been
    stable for W consecutive iterations and every block update over that
    window moved the point by at most step_tol * (1 + ||x||), with W
    defaulting to 3N. Deterministic given (seed, x0, problem, config).
    """
    partition = problem.partition
    spec = config.approx
    spec.validate_for_solver(partition)
    mu = spec.mu(partition)
    N = partition.num_blocks
    W = config.support_patience if config.support_patience is not None else 3 * N

    state = IterateState.from_point(problem, x0)
    delta = delta_lower_bound(problem, spec, x0)
    rng = make_rng(config.seed)

    blocks: list[int] = []
    F_seq: list[float] = []
    steps: list[float] = []
    changed_seq: list[bool] = []
    supports: list[int] = []

    recent_steps: deque[float] = deque(maxlen=W)
    stable = 0
    stop_reason = "max_iters"
    F_cur = state.objective(problem)

    for _ in range(config.max_iters):
        i = draw_block(rng, N)
        support_before = state.support
        sl = partition.block_slice(i)
        old_block = state.x[sl].copy()

        rcd_iht_step(problem, state, i, spec, mu_i=float(mu[i]))

        step_norm = float(np.linalg.norm(state.x[sl] - old_block))
        changed = state.support != support_before
        if config.record_trace:
            blocks.append(i)
            F_seq.append(F_cur)
            steps.append(step_norm)
            changed_seq.append(changed)
            supports.append(support_bitmask(support_before))
        F_cur = state.objective(problem)

        recent_steps.append(step_norm)
        stable = 0 if changed else stable + 1
        if stable >= W and len(recent_steps) == W:
            if max(recent_steps) <= config.step_tol * (1.0 + float(np.linalg.norm(state.x))):
                stop_reason = "converged"
                break

    trace = SolverTrace(
        blocks=np.array(blocks, dtype=int),
        F=np.array(F_seq, dtype=float),
        step_norms=np.array(steps, dtype=float),
        support_changed=np.array(changed_seq, dtype=bool),
        supports=supports,
        final_x=state.x.copy(),
        final_F=F_cur,
        delta_bound=delta,
        metadata={
            "solver": "rcd-iht",
            "approx": spec.label(),
            "rng": RNG_ALGORITHM,
            "seed": int(config.seed),
            "tie_rule": TIE_RULE,
            "stop": stop_reason,
        },
    )
    return state, trace


def run_ihta(
    problem: L0Problem,
    x0: np.ndarray,
    M_f: float,
    max_iters: int,
    step_tol: float = _STEP_TOL,
    support_patience: int = 3,
    record_trace: bool = True,
) -> tuple[IterateState, SolverTrace]:
    """Full-gradient hard-thresholding baseline with global constant M_f.

    Every iteration thresholds all coordinates of the gradient step
    x - grad f(x) / M_f at once, zeroing coordinate j unless
    (M_f/2) |x_j - grad_j/M_f|^2 exceeds its block's penalty (ties to
    zero, as in the coordinate method). Requires M_f > L_f. Deterministic;
    trace block index is -1. The stability window is 3 full iterations
    (each one touches every block).
    """
    partition = problem.partition
    if M_f <= partition.global_lipschitz:
        raise ValueError(
            f"M_f={M_f} must strictly exceed the global Lipschitz constant "
            f"{partition.global_lipschitz}"
        )
    lam_coord = partition.coord_lambda()
    mu_f = M_f - partition.global_lipschitz

    state = IterateState.from_point(problem, x0)
    F_cur = state.objective(problem)

    F_seq: list[float] = []
    steps: list[float] = []
    changed_seq: list[bool] = []
    supports: list[int] = []
    recent_steps: deque[float] = deque(maxlen=support_patience)
    stable = 0
    stop_reason = "max_iters"

    for _ in range(max_iters):
        g = problem.smooth.full_grad(state.x)
        t = state.x - g / M_f
        d = 0.5 * M_f * t * t
        new_x = np.where(d > lam_coord, t, 0.0)

        step_norm = float(np.linalg.norm(new_x - state.x))
        support_before = state.support
        F_old = F_cur
        state.x = new_x
        state.refresh(problem)
        F_cur = state.objective(problem)

        bound = F_old - 0.5 * mu_f * step_norm**2 + _DESCENT_SLACK * (1.0 + abs(F_old))
        if F_cur > bound:
            raise InvariantViolation(
                f"full-gradient descent inequality violated: F {F_old:.12g} -> "
                f"{F_cur:.12g}, required <= {bound:.12g} (mu={mu_f:.3g})"
            )

        changed = state.support != support_before
        if record_trace:
            F_seq.append(F_old)
            steps.append(step_norm)
            changed_seq.append(changed)
            supports.append(support_bitmask(support_before))

        recent_steps.append(step_norm)
        stable = 0 if changed else stable + 1
        if stable >= support_patience and len(recent_steps) == support_patience:
            if max(recent_steps) <= step_tol * (1.0 + float(np.linalg.norm(state.x))):
                stop_reason = "converged"
                break

    trace = SolverTrace(
        blocks=np.full(len(F_seq), -1, dtype=int),
        F=np.array(F_seq, dtype=float),
        step_norms=np.array(steps, dtype=float),
        support_changed=np.array(changed_seq, dtype=bool),
        supports=supports,
        final_x=state.x.copy(),
        final_F=F_cur,
        delta_bound=float("nan"),
        metadata={
            "solver": "ihta",
            "approx": "uq-global",
            "rng": "none",
            "seed": 0,
            "tie_rule": TIE_RULE,
            "stop": stop_reason,
            "M_f": float(M_f),
        },
    )
    return state, trace


def delta_lower_bound(problem: L0Problem, spec: ApproxSpec, x0: np.ndarray) -> float:
    """Guaranteed objective decrease per support change, from the start point.

    delta = (1/N) * min{ min over blocks with lambda_i > 0 of mu_i lambda_i / M_i,
                         min over initially nonzero coordinates j of (mu_i/2) x0_j^2 }

    The second inner min is dropped when x0 has empty support. For the exact
    model the curvature constant M_i is L_i + beta_i.
    """
    partition = problem.partition
    x0 = np.asarray(x0, dtype=float)
    mu = spec.mu(partition)
    M = spec.curvature_bound(partition)
    N = partition.num_blocks

    terms = [
        mu[i] * partition.lam[i] / M[i]
        for i in range(N)
        if partition.lam[i] > 0.0
    ]
    best = min(terms)
    for i in range(N):
        sl = partition.block_slice(i)
        blk = x0[sl]
        nz = blk[blk != 0.0]
        if nz.size:
            best = min(best, 0.5 * mu[i] * float(np.min(nz**2)))
    return float(best / N)


def estimate_linear_rate(trace: SolverTrace, F_star: float) -> tuple[float, float]:
    """Fit log(F^k - F_star) over the final fixed-support phase.

    Returns (slope, r_squared) of the least-squares line; a linearly
    converging tail yields a negative slope with r_squared near 1. Gaps are
    floored at 1e-16. Raises ValueError when the tail has fewer than 20
    iterations.
    """
    start = trace.fixed_support_tail_start
    F_tail = np.append(trace.F[start:], trace.final_F)
    if len(F_tail) < 20:
        raise ValueError(
            f"fixed-support tail has {len(F_tail)} iterations; need at least 20"
        )
    gaps = np.maximum(F_tail - F_star, 1e-16)
    y = np.log(gaps)
    k = np.arange(len(y), dtype=float)
    slope, intercept = np.polyfit(k, y, 1)
    fit = slope * k + intercept
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(r_squared)


def trace_rows(trace: SolverTrace):
    """Iterate CSV rows (k, i_k, F, step_norm, support_changed) for export."""
    for k in range(trace.iterations):
        yield (
            k,
            int(trace.blocks[k]),
            trace.F[k],
            trace.step_norms[k],
            int(trace.support_changed[k]),
        )
