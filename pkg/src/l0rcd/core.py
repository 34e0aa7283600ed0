"""Problem model: block structure, the weighted l0 penalty, support bookkeeping.

The objective being minimized everywhere in this package is

    F(x) = f(x) + sum_i lambda_i * (number of nonzero components in block i)

where f is smooth and convex with a known Lipschitz constant for each block
gradient. A component counts as nonzero iff it is not bit-exactly 0.0;
thresholding operations write literal zeros, so support tracking is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .objectives import SmoothOracle

# Relative slack for validating the global constant against the sum bound.
_LF_SUM_SLACK = 1e-9


@dataclass(frozen=True)
class BlockPartition:
    """Partition of the n coordinates into contiguous blocks.

    Each block i carries a nonnegative penalty weight ``lam[i]`` and a
    positive Lipschitz constant ``lipschitz[i]`` for the block gradient of
    the smooth term. ``global_lipschitz`` bounds the full gradient; it
    defaults to the (always valid) sum of the per-block constants.
    """

    block_sizes: tuple[int, ...]
    lam: tuple[float, ...]
    lipschitz: tuple[float, ...]
    global_lipschitz: float = 0.0
    offsets: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.block_sizes:
            raise ValueError("partition needs at least one block")
        if any(int(s) < 1 for s in self.block_sizes):
            raise ValueError("block sizes must be positive integers")
        if len(self.lam) != len(self.block_sizes) or len(self.lipschitz) != len(self.block_sizes):
            raise ValueError("lam and lipschitz must have one entry per block")
        if any(l < 0 for l in self.lam):
            raise ValueError("penalty weights must be nonnegative")
        if not any(l > 0 for l in self.lam):
            raise ValueError("at least one penalty weight must be positive")
        if any(L <= 0 for L in self.lipschitz):
            raise ValueError("Lipschitz constants must be positive")
        sum_L = float(sum(self.lipschitz))
        if self.global_lipschitz == 0.0:
            object.__setattr__(self, "global_lipschitz", sum_L)
        if self.global_lipschitz <= 0:
            raise ValueError("global Lipschitz constant must be positive")
        if self.global_lipschitz > sum_L * (1 + _LF_SUM_SLACK):
            raise ValueError(
                f"global Lipschitz constant {self.global_lipschitz} exceeds the "
                f"sum of block constants {sum_L}"
            )
        offs = [0]
        for s in self.block_sizes:
            offs.append(offs[-1] + int(s))
        object.__setattr__(self, "offsets", tuple(offs))

    @property
    def n(self) -> int:
        return self.offsets[-1]

    @property
    def num_blocks(self) -> int:
        return len(self.block_sizes)

    def block_slice(self, i: int) -> slice:
        """Coordinate range of block i."""
        return slice(self.offsets[i], self.offsets[i + 1])

    def block_of(self, j: int) -> int:
        """Index of the block containing coordinate j."""
        if not 0 <= j < self.n:
            raise IndexError(f"coordinate {j} out of range for n={self.n}")
        return int(np.searchsorted(self.offsets, j, side="right")) - 1

    def coord_lambda(self) -> np.ndarray:
        """Per-coordinate penalty weight (each coordinate inherits its block's)."""
        return np.repeat(np.asarray(self.lam, dtype=float), self.block_sizes)

    def coord_lipschitz(self) -> np.ndarray:
        """Per-coordinate Lipschitz constant (inherited from the block)."""
        return np.repeat(np.asarray(self.lipschitz, dtype=float), self.block_sizes)

    @staticmethod
    def scalar(lam, lipschitz, global_lipschitz: float = 0.0) -> "BlockPartition":
        """Convenience constructor for all-scalar blocks (n_i = 1)."""
        lam = tuple(float(v) for v in np.atleast_1d(lam))
        lip = tuple(float(v) for v in np.atleast_1d(lipschitz))
        return BlockPartition(
            block_sizes=(1,) * len(lam),
            lam=lam,
            lipschitz=lip,
            global_lipschitz=global_lipschitz,
        )


def _check_dim(x: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"expected vector of length {n}, got shape {x.shape}")
    return x


def l0_norm(x: np.ndarray, partition: BlockPartition) -> float:
    """Weighted count of nonzero components, sum_i lam_i * ||x_i||_0.

    Zero means bit-exact 0.0. Not a norm (fails homogeneity), but
    scale-invariant: l0_norm(c*x) = l0_norm(x) for c != 0.
    """
    x = _check_dim(x, partition.n)
    total = 0.0
    for i, lam_i in enumerate(partition.lam):
        if lam_i == 0.0:
            continue
        blk = x[partition.block_slice(i)]
        total += lam_i * int(np.count_nonzero(blk))
    return total


def support_of(x: np.ndarray, partition: BlockPartition) -> frozenset[int]:
    """The index set I(x): nonzero coordinates plus all zero-penalty coordinates.

    Coordinates living in blocks with lam_i = 0 are always included because
    the penalty never constrains them.
    """
    x = _check_dim(x, partition.n)
    idx = set(np.flatnonzero(x).tolist())
    for i, lam_i in enumerate(partition.lam):
        if lam_i == 0.0:
            sl = partition.block_slice(i)
            idx.update(range(sl.start, sl.stop))
    return frozenset(idx)


@dataclass(frozen=True)
class L0Problem:
    """A smooth convex oracle paired with a block partition.

    Immutable and safely shareable across concurrent solver runs.
    """

    smooth: "SmoothOracle"
    partition: BlockPartition
    strong_convexity: float | None = None

    def __post_init__(self) -> None:
        if self.smooth.dim != self.partition.n:
            raise ValueError(
                f"oracle dimension {self.smooth.dim} != partition dimension {self.partition.n}"
            )
        if self.strong_convexity is not None and self.strong_convexity < 0:
            raise ValueError("strong convexity parameter must be nonnegative")

    @property
    def n(self) -> int:
        return self.partition.n


def objective_F(problem: L0Problem, x: np.ndarray) -> float:
    """Full objective f(x) + l0_norm(x)."""
    x = _check_dim(x, problem.n)
    return problem.smooth.eval(x) + l0_norm(x, problem.partition)


@dataclass
class IterateState:
    """Mutable per-run solver state: point, support, objective, oracle cache.

    Exclusively owned by one solver run. ``support`` and ``f_value`` are kept
    consistent with ``x`` by the stepping code; ``refresh`` rebuilds them from
    scratch.
    """

    x: np.ndarray
    support: frozenset[int]
    f_value: float
    cache: np.ndarray

    @classmethod
    def from_point(cls, problem: L0Problem, x: np.ndarray) -> "IterateState":
        x = _check_dim(x, problem.n).copy()
        cache = problem.smooth.make_cache(x)
        return cls(
            x=x,
            support=support_of(x, problem.partition),
            f_value=problem.smooth.eval(x),
            cache=cache,
        )

    def objective(self, problem: L0Problem) -> float:
        return self.f_value + l0_norm(self.x, problem.partition)

    def refresh(self, problem: L0Problem) -> None:
        """Recompute support, f value, and cache from the current point."""
        self.support = support_of(self.x, problem.partition)
        self.cache = problem.smooth.make_cache(self.x)
        self.f_value = problem.smooth.eval(self.x)
