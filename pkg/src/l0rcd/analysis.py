"""Brute-force enumeration of candidate local minimizers and their
classification into nested restriction classes.

A candidate is the minimizer of the smooth term f restricted to a support
set I (zeros outside I). Classes, from largest to smallest:

- basic: the gradient vanishes on I(z);
- quadratic-model strong (per-block curvature M): basic, and every zero
  coordinate has |grad_j| <= sqrt(2 lambda_i M_i) while every nonzero
  coordinate has |z_j| >= sqrt(2 lambda_i / M_i);
- exact-model strong (per-block beta): every coordinate is a fixed point of
  the exact thresholding map.

Smaller parameters give sharper models and smaller classes; the enumeration
records per-class flags so the inclusion chain can be verified directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .approx import TIE_RULE, threshold_e
from .core import BlockPartition, L0Problem, l0_norm, support_of
from .objectives import LeastSquaresObjective, LogisticL2Objective, _sigmoid

# Boundary tolerance for class membership tests; restricted solves are
# accurate to 1e-10, so this absorbs accumulation without blurring classes.
CLASSIFY_TOL = 1e-8

# 2^n supports are solved; past this the table stops being a desk computation.
ENUMERATION_LIMIT = 24

# Rank cutoff (relative to the largest singular value) for least-norm solves.
_RANK_TOL = 1e-10

BASIC_LABEL = "basic"


@dataclass(frozen=True)
class ClassRequest:
    """One classification column: a label plus the model parameters.

    ``kind`` is "uq" (per-block curvature M in ``params``) or "ue"
    (per-block beta in ``params``).
    """

    label: str
    kind: str
    params: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("uq", "ue"):
            raise ValueError(f"unknown class kind {self.kind!r}")
        if self.label == BASIC_LABEL:
            raise ValueError(f"label {BASIC_LABEL!r} is reserved")

    @classmethod
    def quadratic(cls, label: str, M) -> "ClassRequest":
        return cls(label, "uq", tuple(float(v) for v in np.atleast_1d(M)))

    @classmethod
    def exact(cls, label: str, beta) -> "ClassRequest":
        return cls(label, "ue", tuple(float(v) for v in np.atleast_1d(beta)))


@dataclass
class CatalogEntry:
    support: frozenset[int]
    bitmask: int
    point: np.ndarray
    f_value: float
    F_value: float
    flags: dict[str, bool]


@dataclass
class MinimaCatalog:
    """One entry per enumerated support, with class-membership flags."""

    entries: list[CatalogEntry]
    class_labels: list[str]
    conventions: dict[str, str] = field(default_factory=dict)

    def counts(self) -> dict[str, int]:
        return {
            label: sum(1 for e in self.entries if e.flags[label])
            for label in self.class_labels
        }

    def members(self, label: str) -> list[CatalogEntry]:
        return [e for e in self.entries if e.flags[label]]

    @property
    def global_min(self) -> CatalogEntry:
        return min(self.entries, key=lambda e: (e.F_value, e.bitmask))

    def entry_for_support(self, support) -> CatalogEntry | None:
        if isinstance(support, frozenset):
            mask = 0
            for j in support:
                mask |= 1 << j
        else:
            mask = int(support)
        for e in self.entries:
            if e.bitmask == mask:
                return e
        return None


def restricted_minimize(problem: L0Problem, I) -> np.ndarray:
    """Minimizer of f over the subspace of vectors supported on I.

    Least squares uses the least-norm solution of the restricted system
    (pseudoinverse with relative rank cutoff 1e-10), so rank-deficient
    supports get a canonical representative. The logistic objective uses
    Newton iterations to gradient norm 1e-10 * (1 + ||grad f(0)||).
    """
    n = problem.n
    idx = sorted(int(j) for j in I)
    if any(j < 0 or j >= n for j in idx):
        raise ValueError(f"support indices out of range for n={n}")
    z = np.zeros(n)
    if not idx:
        return z
    oracle = problem.smooth

    if isinstance(oracle, LeastSquaresObjective):
        sub = oracle.A[:, idx]
        sol, *_ = np.linalg.lstsq(sub, oracle.b, rcond=_RANK_TOL)
        z[idx] = sol
        return z

    if isinstance(oracle, LogisticL2Objective):
        tol = 1e-10 * (1.0 + float(np.linalg.norm(oracle.full_grad(np.zeros(n)))))
        sub = oracle.data[:, idx]
        w = np.zeros(len(idx))
        val = oracle.eval(z)
        for _ in range(100):
            t = sub @ w
            s = _sigmoid(t)
            g = sub.T @ (s - oracle.y) / oracle.m + oracle.nu * w
            if float(np.linalg.norm(g)) <= tol:
                z[idx] = w
                return z
            D = s * (1.0 - s)
            H = (sub.T * D) @ sub / oracle.m + oracle.nu * np.eye(len(idx))
            step = np.linalg.solve(H, g)
            # backtrack if a full Newton step overshoots
            alpha = 1.0
            for _ in range(50):
                w_new = w - alpha * step
                z[idx] = w_new
                val_new = oracle.eval(z)
                if val_new <= val + 1e-12 * (1 + abs(val)):
                    break
                alpha *= 0.5
            w = w_new
            val = val_new
        raise RuntimeError(
            f"restricted Newton did not reach gradient tolerance {tol:.3e} on support {idx}"
        )

    raise TypeError(f"restricted minimization not implemented for {type(oracle).__name__}")


def is_basic_local_min(problem: L0Problem, z: np.ndarray, tol: float = CLASSIFY_TOL) -> bool:
    """True iff the gradient of f vanishes on I(z) (within tol)."""
    z = np.asarray(z, dtype=float)
    I = support_of(z, problem.partition)
    if not I:
        return True
    g = problem.smooth.full_grad(z)
    return float(np.linalg.norm(g[sorted(I)])) <= tol


def is_uq_strong(
    problem: L0Problem, z: np.ndarray, M, tol: float = CLASSIFY_TOL
) -> bool:
    """Fixed-point test for the separable quadratic model, in explicit form.

    Requires the basic condition, plus per coordinate in positive-penalty
    blocks: |grad_j| <= sqrt(2 lambda_i M_i) where z_j = 0 and
    |z_j| >= sqrt(2 lambda_i / M_i) where z_j != 0. Valid with M_i = L_i
    (classification at the boundary is well defined); solvers require
    strict inequality but classification does not.
    """
    z = np.asarray(z, dtype=float)
    partition = problem.partition
    M = np.asarray(M, dtype=float)
    if M.shape != (partition.num_blocks,):
        raise ValueError("M must have one entry per block")
    if not is_basic_local_min(problem, z, tol):
        return False
    g = problem.smooth.full_grad(z)
    for i in range(partition.num_blocks):
        lam_i = partition.lam[i]
        if lam_i == 0.0:
            continue
        sl = partition.block_slice(i)
        zero_bound = np.sqrt(2.0 * lam_i * M[i]) + tol
        keep_bound = np.sqrt(2.0 * lam_i / M[i]) - tol
        for j in range(sl.start, sl.stop):
            if z[j] == 0.0:
                if abs(g[j]) > zero_bound:
                    return False
            elif abs(z[j]) < keep_bound:
                return False
    return True


def is_ue_strong(
    problem: L0Problem, z: np.ndarray, beta, tol: float = CLASSIFY_TOL
) -> bool:
    """Fixed-point test for the exact model: thresholding returns z itself.

    Scalar blocks only. The thresholding output must preserve each
    coordinate's zero/nonzero status exactly (support semantics are
    bit-exact, so zeroing a tiny coordinate is a support change, not a
    fixed point) and may drift from kept values by at most tol.
    """
    z = np.asarray(z, dtype=float)
    partition = problem.partition
    if any(s != 1 for s in partition.block_sizes):
        raise ValueError("exact-model classification requires scalar blocks")
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (partition.num_blocks,):
        raise ValueError("beta must have one entry per block")
    cache = problem.smooth.make_cache(z)
    for i in range(partition.num_blocks):
        j = partition.block_slice(i).start
        out = threshold_e(problem.smooth, z, j, float(beta[i]), partition.lam[i], cache)
        if (out == 0.0) != (z[j] == 0.0):
            return False
        if abs(out - z[j]) > tol:
            return False
    return True


def enumerate_catalog(
    problem: L0Problem,
    requests: list[ClassRequest],
    tol: float = CLASSIFY_TOL,
) -> MinimaCatalog:
    """Solve the restricted problem for every support and classify the results.

    Supports range over all subsets of positive-penalty coordinates, each
    joined with the (always-included) zero-penalty coordinates: 2^(number of
    penalized coordinates) restricted solves. One entry per support; the
    "basic" class is always computed, and u-strong flags are conjoined with
    the basic flag so the inclusion chain holds by construction.
    """
    n = problem.n
    if n > ENUMERATION_LIMIT:
        raise ValueError(
            f"enumeration over 2^{n} supports refused (limit n <= {ENUMERATION_LIMIT})"
        )
    partition = problem.partition
    lam_coord = partition.coord_lambda()
    free = [j for j in range(n) if lam_coord[j] > 0.0]
    mandatory = frozenset(j for j in range(n) if lam_coord[j] == 0.0)

    entries: list[CatalogEntry] = []
    for mask_bits in range(1 << len(free)):
        chosen = {free[t] for t in range(len(free)) if mask_bits >> t & 1}
        I = frozenset(chosen) | mandatory
        z = restricted_minimize(problem, I)
        f_val = problem.smooth.eval(z)
        F_val = f_val + l0_norm(z, partition)
        basic = is_basic_local_min(problem, z, tol)
        flags = {BASIC_LABEL: basic}
        for req in requests:
            if req.kind == "uq":
                flags[req.label] = basic and is_uq_strong(problem, z, req.params, tol)
            else:
                flags[req.label] = basic and is_ue_strong(problem, z, req.params, tol)
        bitmask = 0
        for j in I:
            bitmask |= 1 << j
        entries.append(
            CatalogEntry(
                support=I,
                bitmask=bitmask,
                point=z,
                f_value=f_val,
                F_value=F_val,
                flags=flags,
            )
        )

    entries.sort(key=lambda e: e.bitmask)
    labels = [req.label for req in requests] + [BASIC_LABEL]
    conventions = {
        "tie_rule": TIE_RULE,
        "representative": "least-norm",
        "classify_tol": repr(tol),
        "objective": type(problem.smooth).__name__,
    }
    return MinimaCatalog(entries=entries, class_labels=labels, conventions=conventions)


def verify_inclusions(catalog: MinimaCatalog, order: list[str] | None = None) -> list[str]:
    """Check the nesting of classes and global-minimum membership.

    ``order`` lists class labels from sharpest (smallest) to loosest; the
    default is the catalog's label order, which enumerate_catalog builds as
    the requested classes followed by "basic". Returns a list of violation
    descriptions; an empty list means every inclusion holds and the global
    minimizer is flagged in every class.
    """
    if order is None:
        order = list(catalog.class_labels)
    violations: list[str] = []
    for a, b in zip(order, order[1:]):
        masks_b = {e.bitmask for e in catalog.members(b)}
        for e in catalog.members(a):
            if e.bitmask not in masks_b:
                violations.append(
                    f"support {e.bitmask:#x} is in class {a!r} but not in {b!r}"
                )
    gm = catalog.global_min
    for label in order:
        if not gm.flags.get(label, False):
            violations.append(
                f"global minimizer (support {gm.bitmask:#x}, F={gm.F_value:.6g}) "
                f"is not flagged in class {label!r}"
            )
    return violations


# Built-in small polynomial-fitting example used by the CLI --example2 flag.
EXAMPLE_ALPHA = (1.0, 1.1, 1.2, 1.3)
EXAMPLE_N = 7
EXAMPLE_P = 3.3
EXAMPLE_Q = 25.0
EXAMPLE_LAMBDA = 1.0
EXAMPLE_BETA = 1e-4

POWERS_ZERO = "powers-0"
POWERS_ONE = "powers-1"


def build_example_instance(exponent_convention: str = POWERS_ZERO) -> L0Problem:
    """The bundled 4x7 least squares instance with scalar blocks.

    Row r of the matrix holds powers of alpha_r (exponents 0..6 under
    "powers-0", 1..7 under "powers-1"), with 3.3 added on the first four
    diagonal entries; the target is 25 * ones(4); every coordinate carries
    penalty 1. The two exponent conventions exist because a geometric row of
    length 7 can start at either power; "powers-0" (leading-1 column) is the
    default used by the CLI and the tests.
    """
    if exponent_convention == POWERS_ZERO:
        start = 0
    elif exponent_convention == POWERS_ONE:
        start = 1
    else:
        raise ValueError(f"unknown exponent convention {exponent_convention!r}")
    A = np.array(
        [[a ** (start + c) for c in range(EXAMPLE_N)] for a in EXAMPLE_ALPHA], dtype=float
    )
    for r in range(4):
        A[r, r] += EXAMPLE_P
    b = EXAMPLE_Q * np.ones(4)
    oracle = LeastSquaresObjective(A, b)
    partition = BlockPartition.scalar(
        lam=np.full(EXAMPLE_N, EXAMPLE_LAMBDA),
        lipschitz=oracle.column_lipschitz(),
        global_lipschitz=oracle.spectral_lipschitz(),
    )
    return L0Problem(smooth=oracle, partition=partition)


def example_class_requests(problem: L0Problem) -> list[ClassRequest]:
    """The three classification columns used for the bundled instance.

    Sharpest first: exact model with beta = 1e-4, quadratic model at the
    per-block constants L_i, quadratic model at the global constant L_f.
    """
    partition = problem.partition
    L = np.asarray(partition.lipschitz)
    Lf = partition.global_lipschitz
    return [
        ClassRequest.exact("ue[beta=1e-4]", np.full(partition.num_blocks, EXAMPLE_BETA)),
        ClassRequest.quadratic("uq[M=Li]", L),
        ClassRequest.quadratic("uq[M=Lf]", np.full(partition.num_blocks, Lf)),
    ]
