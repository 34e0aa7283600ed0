"""Command-line experiment harness.

Subcommands: solve, enumerate, tournament, benchmark, gradcheck. Instances
come from CSV files or seeded generators described in an INI config file
(see config.schema.ini at the repository root). Every emitted CSV embeds the
config hash and the RNG algorithm identifier; rerunning a subcommand with
the same config and --no-timestamp produces byte-identical outputs.

Exit codes: 0 success, 1 check failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .analysis import (
    ClassRequest,
    ENUMERATION_LIMIT,
    build_example_instance,
    enumerate_catalog,
    example_class_requests,
    verify_inclusions,
)
from .approx import (
    ApproxSpec,
    M_EQ_LIPSCHITZ_FACTOR,
    TIE_RULE,
    exact_uniform,
    separable_from_factor,
)
from .core import BlockPartition, L0Problem, l0_norm
from .objectives import (
    LeastSquaresObjective,
    LogisticL2Objective,
    finite_difference_error,
    load_labels_csv,
    load_matrix_csv,
    load_vector_csv,
)
from .solvers import (
    RNG_ALGORITHM,
    SolverConfig,
    make_rng,
    run_ihta,
    run_rcd_iht,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

_DEFAULT_PLANT_DENSITY = 0.2
_DEFAULT_START_DENSITY = 0.5
_DEFAULT_VALUE_RANGE = 1.0
_SUCCESS_RTOL = 1e-6


class ConfigError(Exception):
    """Invalid or missing configuration; maps to exit code 2."""


# ---------------------------------------------------------------------------
# instance and start generation


def seeded_rng(*entropy: int) -> np.random.Generator:
    """Philox generator keyed by an entropy tuple (master seed, indices...)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def generate_least_squares(
    m: int, n: int, seed: int, planted_density: float = _DEFAULT_PLANT_DENSITY
) -> tuple[LeastSquaresObjective, np.ndarray]:
    """Random LS instance: A entries iid U[-1,1], b = A @ planted sparse point.

    Returns the objective and the planted point. Draw order is fixed:
    matrix, then planted support, then planted values.
    """
    rng = seeded_rng(seed)
    A = rng.uniform(-1.0, 1.0, size=(m, n))
    mask = rng.random(n) < planted_density
    vals = rng.uniform(-1.0, 1.0, size=n)
    x_plant = np.where(mask, vals, 0.0)
    return LeastSquaresObjective(A, A @ x_plant), x_plant


def generate_logistic(
    m: int,
    n: int,
    seed: int,
    nu: float,
    planted_density: float = _DEFAULT_PLANT_DENSITY,
) -> tuple[LogisticL2Objective, np.ndarray]:
    """Random logistic instance: data iid U[-1,1], labels drawn from the
    model at a planted sparse point."""
    rng = seeded_rng(seed)
    data = rng.uniform(-1.0, 1.0, size=(m, n))
    mask = rng.random(n) < planted_density
    vals = rng.uniform(-1.0, 1.0, size=n)
    x_plant = np.where(mask, vals, 0.0)
    t = data @ x_plant
    prob = 1.0 / (1.0 + np.exp(-t))
    y = (rng.random(m) < prob).astype(float)
    return LogisticL2Objective(data, y, nu), x_plant


def random_start(
    n: int,
    rng: np.random.Generator,
    density: float = _DEFAULT_START_DENSITY,
    value_range: float = _DEFAULT_VALUE_RANGE,
) -> np.ndarray:
    """Random-support start: per-coordinate keep probability ``density``,
    kept values uniform on [-value_range, value_range]."""
    mask = rng.random(n) < density
    vals = rng.uniform(-value_range, value_range, size=n)
    return np.where(mask, vals, 0.0)


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    """Parsed experiment settings; see config.schema.ini for the key list."""

    problem_kind: str = "least_squares"
    m: int = 0
    n: int = 0
    instance_seed: int = 0
    nu: float = 0.5
    planted_density: float = _DEFAULT_PLANT_DENSITY
    matrix_csv: str | None = None
    rhs_csv: str | None = None
    labels_csv: str | None = None
    lam: float = 1.0
    block_sizes: tuple[int, ...] | None = None

    solver_names: tuple[str, ...] = ("uq",)
    uq_factor: float = M_EQ_LIPSCHITZ_FACTOR
    ue_beta: float = 1e-4
    ihta_factor: float = M_EQ_LIPSCHITZ_FACTOR
    max_iters: int = 0  # 0 means "choose from the dimension"

    trials: int = 1
    start_density: float = _DEFAULT_START_DENSITY
    value_range: float = _DEFAULT_VALUE_RANGE
    master_seed: int = 0

    sweep: tuple[float, ...] = ()

    solve_solver: str = "uq"
    solve_start: str = "zeros"

    config_hash: str = "builtin"
    raw_text: str = ""


def _parse_config_file(path: str) -> ExperimentConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    raw = p.read_bytes()
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(raw.decode("utf-8"))
    except (UnicodeDecodeError, configparser.Error) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc

    cfg = ExperimentConfig()
    cfg.raw_text = raw.decode("utf-8")
    cfg.config_hash = hashlib.sha256(raw).hexdigest()[:16]

    def get(section: str, key: str, cast, default):
        if parser.has_option(section, key):
            try:
                return cast(parser.get(section, key))
            except ValueError as exc:
                raise ConfigError(f"bad value for [{section}] {key}: {exc}") from exc
        return default

    cfg.problem_kind = get("problem", "kind", str, cfg.problem_kind).strip()
    cfg.m = get("problem", "m", int, cfg.m)
    cfg.n = get("problem", "n", int, cfg.n)
    cfg.instance_seed = get("problem", "seed", int, cfg.instance_seed)
    cfg.nu = get("problem", "nu", float, cfg.nu)
    cfg.planted_density = get("problem", "planted_density", float, cfg.planted_density)
    cfg.matrix_csv = get("problem", "matrix_csv", str, cfg.matrix_csv)
    cfg.rhs_csv = get("problem", "rhs_csv", str, cfg.rhs_csv)
    cfg.labels_csv = get("problem", "labels_csv", str, cfg.labels_csv)
    cfg.lam = get("problem", "lambda", float, cfg.lam)
    sizes = get("problem", "block_sizes", str, None)
    if sizes:
        cfg.block_sizes = tuple(int(s) for s in sizes.split(","))

    names = get("solvers", "list", str, ",".join(cfg.solver_names))
    cfg.solver_names = tuple(s.strip() for s in names.split(",") if s.strip())
    cfg.uq_factor = get("solvers", "uq_factor", float, cfg.uq_factor)
    cfg.ue_beta = get("solvers", "ue_beta", float, cfg.ue_beta)
    cfg.ihta_factor = get("solvers", "ihta_factor", float, cfg.ihta_factor)
    cfg.max_iters = get("solvers", "max_iters", int, cfg.max_iters)

    cfg.trials = get("starts", "trials", int, cfg.trials)
    cfg.start_density = get("starts", "density", float, cfg.start_density)
    cfg.value_range = get("starts", "value_range", float, cfg.value_range)
    cfg.master_seed = get("starts", "seed", int, cfg.master_seed)

    sweep = get("sweep", "lambdas", str, None)
    if sweep:
        cfg.sweep = tuple(float(s) for s in sweep.split(","))

    cfg.solve_solver = get("solve", "solver", str, cfg.solve_solver).strip()
    cfg.solve_start = get("solve", "start", str, cfg.solve_start).strip()

    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1")
    return cfg


def build_problem(cfg: ExperimentConfig, lam: float | None = None) -> L0Problem:
    """Instantiate the configured problem, optionally overriding the penalty."""
    lam_val = cfg.lam if lam is None else lam
    kind = cfg.problem_kind
    if kind in ("least_squares", "ls"):
        if cfg.matrix_csv:
            if not cfg.rhs_csv:
                raise ConfigError("least squares from CSV needs rhs_csv")
            try:
                A = load_matrix_csv(cfg.matrix_csv)
                b = load_vector_csv(cfg.rhs_csv)
            except OSError as exc:
                raise ConfigError(str(exc)) from exc
            oracle = LeastSquaresObjective(A, b)
        else:
            if cfg.m < 1 or cfg.n < 1:
                raise ConfigError("generated least squares needs positive m and n")
            oracle, _ = generate_least_squares(
                cfg.m, cfg.n, cfg.instance_seed, cfg.planted_density
            )
        global_L = oracle.spectral_lipschitz()
    elif kind == "logistic":
        if cfg.matrix_csv:
            if not cfg.labels_csv:
                raise ConfigError("logistic from CSV needs labels_csv")
            try:
                data = load_matrix_csv(cfg.matrix_csv)
                y = load_labels_csv(cfg.labels_csv)
            except OSError as exc:
                raise ConfigError(str(exc)) from exc
            oracle = LogisticL2Objective(data, y, cfg.nu)
        else:
            if cfg.m < 1 or cfg.n < 1:
                raise ConfigError("generated logistic needs positive m and n")
            oracle, _ = generate_logistic(
                cfg.m, cfg.n, cfg.instance_seed, cfg.nu, cfg.planted_density
            )
        global_L = 0.0  # defaults to the sum of block constants
    else:
        raise ConfigError(f"unknown problem kind {kind!r}")

    n = oracle.dim
    if cfg.block_sizes:
        if sum(cfg.block_sizes) != n:
            raise ConfigError(f"block_sizes sum to {sum(cfg.block_sizes)}, need {n}")
        sizes = cfg.block_sizes
    else:
        sizes = (1,) * n
    lipschitz = oracle.block_lipschitz(sizes)
    try:
        partition = BlockPartition(
            block_sizes=sizes,
            lam=(float(lam_val),) * len(sizes),
            lipschitz=tuple(float(v) for v in lipschitz),
            global_lipschitz=float(global_L),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid problem configuration: {exc}") from exc
    sigma = oracle.nu if isinstance(oracle, LogisticL2Objective) else None
    return L0Problem(smooth=oracle, partition=partition, strong_convexity=sigma)


def solver_spec(name: str, cfg: ExperimentConfig, problem: L0Problem) -> ApproxSpec | None:
    """ApproxSpec for a named coordinate solver; None marks the full-gradient one."""
    partition = problem.partition
    if name == "uq":
        return separable_from_factor(partition, cfg.uq_factor)
    if name == "ue":
        return exact_uniform(partition, cfg.ue_beta)
    if name == "ihta":
        return None
    raise ConfigError(f"unknown solver name {name!r} (expected uq, ue, or ihta)")


def _coordinate_max_iters(cfg: ExperimentConfig, n: int) -> int:
    return cfg.max_iters if cfg.max_iters > 0 else 400 * n


def _full_grad_max_iters(cfg: ExperimentConfig) -> int:
    return cfg.max_iters if cfg.max_iters > 0 else 2000


def run_named_solver(
    name: str,
    problem: L0Problem,
    x0: np.ndarray,
    cfg: ExperimentConfig,
    seed_entropy: tuple[int, ...],
):
    """Run one configured solver from x0; returns (state, trace)."""
    spec = solver_spec(name, cfg, problem)
    if spec is None:
        M_f = problem.partition.global_lipschitz * cfg.ihta_factor
        return run_ihta(problem, x0, M_f, max_iters=_full_grad_max_iters(cfg))
    seed = int(np.random.SeedSequence(seed_entropy).generate_state(1)[0])
    config = SolverConfig(
        approx=spec,
        max_iters=_coordinate_max_iters(cfg, problem.n),
        seed=seed,
    )
    return run_rcd_iht(problem, x0, config)


# ---------------------------------------------------------------------------
# output helpers


class OutputWriter:
    """CSV emission with embedded metadata lines and aligned stdout tables."""

    def __init__(self, out_dir: str, config_hash: str, no_timestamp: bool) -> None:
        self.out_dir = Path(out_dir)
        self.config_hash = config_hash
        self.no_timestamp = no_timestamp
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def meta_lines(self) -> list[list[str]]:
        lines = [
            ["#config_hash", self.config_hash],
            ["#rng", RNG_ALGORITHM],
            ["#tie_rule", TIE_RULE],
        ]
        if not self.no_timestamp:
            lines.append(["#timestamp", datetime.now(timezone.utc).isoformat()])
        return lines

    def write_csv(self, name: str, header: list[str], rows) -> Path:
        path = self.out_dir / name
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for line in self.meta_lines():
                writer.writerow(line)
            writer.writerow(header)
            for row in rows:
                writer.writerow(row)
        return path


def print_table(header: list[str], rows: list[list[str]]) -> None:
    cols = [header] + rows
    widths = [max(len(str(r[c])) for r in cols) for c in range(len(header))]
    for r in cols:
        print("  ".join(str(v).ljust(w) for v, w in zip(r, widths)))


def _fmt(v: float) -> str:
    return repr(float(v))


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(cfg: ExperimentConfig, writer: OutputWriter) -> int:
    problem = build_problem(cfg)
    n = problem.n
    if cfg.solve_start == "zeros":
        x0 = np.zeros(n)
    elif cfg.solve_start == "random":
        x0 = random_start(n, seeded_rng(cfg.master_seed, 0), cfg.start_density, cfg.value_range)
    else:
        raise ConfigError(f"unknown start kind {cfg.solve_start!r}")

    state, trace = run_named_solver(cfg.solve_solver, problem, x0, cfg, (cfg.master_seed, 0, 0))
    F = trace.final_F
    sparsity = int(np.count_nonzero(state.x))

    writer.write_csv(
        "solution.csv",
        ["index", "value"],
        ([j, _fmt(v)] for j, v in enumerate(state.x)),
    )
    writer.write_csv(
        "trace.csv",
        ["k", "i_k", "F", "step_norm", "support_changed"],
        (
            [k, b, _fmt(Fv), _fmt(s), c]
            for k, b, Fv, s, c in zip(
                range(trace.iterations),
                trace.blocks,
                trace.F,
                trace.step_norms,
                trace.support_changed.astype(int),
            )
        ),
    )
    print_table(
        ["solver", "F", "nonzeros", "iterations", "stop"],
        [[cfg.solve_solver, f"{F:.10g}", str(sparsity), str(trace.iterations), trace.metadata["stop"]]],
    )
    return EXIT_OK


def _enumerate_requests(problem: L0Problem, cfg: ExperimentConfig) -> list[ClassRequest]:
    partition = problem.partition
    L = np.asarray(partition.lipschitz)
    reqs: list[ClassRequest] = []
    if all(s == 1 for s in partition.block_sizes):
        reqs.append(ClassRequest.exact("ue[beta=%g]" % cfg.ue_beta, np.full(partition.num_blocks, cfg.ue_beta)))
    reqs.append(ClassRequest.quadratic("uq[M=Li]", L))
    reqs.append(
        ClassRequest.quadratic(
            "uq[M=Lf]", np.full(partition.num_blocks, partition.global_lipschitz)
        )
    )
    return reqs


def cmd_enumerate(cfg: ExperimentConfig, writer: OutputWriter, example2: bool) -> int:
    if example2:
        problem = build_example_instance()
        requests = example_class_requests(problem)
    else:
        problem = build_problem(cfg)
        requests = _enumerate_requests(problem, cfg)
    if problem.n > ENUMERATION_LIMIT:
        raise ConfigError(
            f"instance dimension {problem.n} exceeds the enumeration limit {ENUMERATION_LIMIT}"
        )

    catalog = enumerate_catalog(problem, requests)
    violations = verify_inclusions(catalog)
    counts = catalog.counts()

    flag_cols = list(catalog.class_labels)
    writer.write_csv(
        "catalog.csv",
        ["support_bitmask", "F"] + flag_cols,
        (
            [e.bitmask, _fmt(e.F_value)] + [int(e.flags[c]) for c in flag_cols]
            for e in catalog.entries
        ),
    )
    writer.write_csv(
        "counts.csv",
        ["class", "count"],
        ([label, counts[label]] for label in catalog.class_labels),
    )

    order = list(reversed(catalog.class_labels))  # largest class first for display
    print_table(
        ["Class of local minima"] + order,
        [["Number of local minima"] + [str(counts[c]) for c in order]],
    )
    gm = catalog.global_min
    print(
        f"global minimum: F = {gm.F_value:.10g} at support bitmask {gm.bitmask:#x} "
        f"({sorted(gm.support)})"
    )
    print(
        "conventions: "
        + ", ".join(f"{k}={v}" for k, v in sorted(catalog.conventions.items()))
    )
    if violations:
        print("inclusion violations:", file=sys.stderr)
        for v in violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _global_f_table(problem: L0Problem) -> list[tuple[float, int]]:
    """Per-support (smooth value, nonzero count) pairs for computing the
    global optimum under any penalty level."""
    catalog = enumerate_catalog(problem, [])
    return [(e.f_value, int(np.count_nonzero(e.point))) for e in catalog.entries]


def cmd_tournament(cfg: ExperimentConfig, writer: OutputWriter) -> int:
    if not cfg.sweep:
        raise ConfigError("tournament needs [sweep] lambdas")
    base_problem = build_problem(cfg, lam=1.0)
    if base_problem.n > ENUMERATION_LIMIT:
        raise ConfigError(
            f"tournament certifies the optimum by enumeration; n={base_problem.n} "
            f"exceeds the limit {ENUMERATION_LIMIT}"
        )
    f_table = _global_f_table(base_problem)
    n = base_problem.n

    starts = [
        random_start(n, seeded_rng(cfg.master_seed, t), cfg.start_density, cfg.value_range)
        for t in range(cfg.trials)
    ]

    rows = []
    for li, lam in enumerate(cfg.sweep):
        problem = build_problem(cfg, lam=lam)
        F_star = min(f + lam * nnz for f, nnz in f_table)
        successes = []
        for si, name in enumerate(cfg.solver_names):
            count = 0
            for t, x0 in enumerate(starts):
                _, trace = run_named_solver(
                    name, problem, x0, cfg, (cfg.master_seed, li, si, t)
                )
                if abs(trace.final_F - F_star) <= _SUCCESS_RTOL * (1.0 + abs(F_star)):
                    count += 1
            successes.append(count)
        rows.append([lam, F_star] + successes)

    writer.write_csv(
        "tournament.csv",
        ["lambda", "F_star"] + [f"success_{s}" for s in cfg.solver_names],
        ([_fmt(r[0]), _fmt(r[1])] + r[2:] for r in rows),
    )
    print_table(
        ["lambda", "F_star"] + list(cfg.solver_names),
        [[f"{r[0]:g}", f"{r[1]:.6g}"] + [str(c) for c in r[2:]] for r in rows],
    )
    print(f"trials per cell: {cfg.trials}")
    return EXIT_OK


def cmd_benchmark(cfg: ExperimentConfig, writer: OutputWriter) -> int:
    problem = build_problem(cfg)
    n = problem.n
    starts = [
        random_start(n, seeded_rng(cfg.master_seed, t), cfg.start_density, cfg.value_range)
        for t in range(cfg.trials)
    ]
    rows = []
    for si, name in enumerate(cfg.solver_names):
        best = None
        for t, x0 in enumerate(starts):
            state, trace = run_named_solver(name, problem, x0, cfg, (cfg.master_seed, 0, si, t))
            nnz = int(np.count_nonzero(state.x))
            iters = trace.iterations
            cand = (trace.final_F, nnz, iters)
            if best is None or cand[0] < best[0]:
                best = cand
        F_best, nnz, iters = best
        full_iters = iters / n if name != "ihta" else float(iters)
        rows.append([name, F_best, nnz, iters, full_iters])

    writer.write_csv(
        "benchmark.csv",
        ["solver", "F_best", "nonzeros", "iterations", "full_iterations"],
        ([r[0], _fmt(r[1]), r[2], r[3], _fmt(r[4])] for r in rows),
    )
    print_table(
        ["solver", "F_best", "nonzeros", "iterations", "full_iterations"],
        [[r[0], f"{r[1]:.10g}", str(r[2]), str(r[3]), f"{r[4]:.6g}"] for r in rows],
    )
    return EXIT_OK


def cmd_gradcheck(cfg: ExperimentConfig, writer: OutputWriter) -> int:
    problem = build_problem(cfg)
    oracle = problem.smooth
    n = problem.n
    rng = seeded_rng(cfg.master_seed, 97)

    worst_fd = 0.0
    worst_fd_coord = -1
    for _ in range(5):
        x = rng.uniform(-1.0, 1.0, size=n)
        err, j = finite_difference_error(oracle, x, h=1e-6)
        if err > worst_fd:
            worst_fd, worst_fd_coord = err, j

    # cache coherence over 1000 random single-block updates
    partition = problem.partition
    x = rng.uniform(-1.0, 1.0, size=n)
    cache = oracle.make_cache(x)
    for _ in range(1000):
        i = int(partition.num_blocks * rng.random())
        sl = partition.block_slice(i)
        old = x[sl].copy()
        new = rng.uniform(-1.0, 1.0, size=sl.stop - sl.start)
        x[sl] = new
        oracle.update_cache(cache, sl, old, new)
    fresh = oracle.make_cache(x)
    denom = 1.0 + float(np.linalg.norm(fresh))
    cache_err = float(np.linalg.norm(cache - fresh)) / denom

    fd_pass = worst_fd <= 1e-5
    cache_pass = cache_err <= 1e-8
    writer.write_csv(
        "gradcheck.csv",
        ["check", "worst_error", "threshold", "passed"],
        [
            ["finite_difference", _fmt(worst_fd), _fmt(1e-5), int(fd_pass)],
            ["cache_coherence", _fmt(cache_err), _fmt(1e-8), int(cache_pass)],
        ],
    )
    print_table(
        ["check", "worst error", "threshold", "status"],
        [
            ["finite_difference", f"{worst_fd:.3e}", "1e-05", "pass" if fd_pass else "FAIL"],
            ["cache_coherence", f"{cache_err:.3e}", "1e-08", "pass" if cache_pass else "FAIL"],
        ],
    )
    if not fd_pass:
        print(
            f"worst finite-difference offender: coordinate {worst_fd_coord} "
            f"(relative error {worst_fd:.3e})",
            file=sys.stderr,
        )
    return EXIT_OK if fd_pass and cache_pass else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l0rcd",
        description=(
            "Coordinate descent with hard thresholding for l0-regularized "
            "problems, plus a brute-force local-minima enumerator."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("solve", "run one solver on one instance"),
        ("enumerate", "enumerate supports and classify local minimizers"),
        ("tournament", "λ sweep x solvers x random starts, success counts vs the certified optimum"),
        ("benchmark", "run all configured solvers, report best F / sparsity / iterations"),
        ("gradcheck", "finite-difference and cache-coherence verification"),
    ]:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="path to INI config (see config.schema.ini)")
        sp.add_argument("--seed", type=int, help="override the master experiment seed")
        sp.add_argument("--out", default="out", help="output directory (default: ./out)")
        sp.add_argument(
            "--no-timestamp",
            action="store_true",
            help="omit the timestamp metadata line for byte-identical reruns",
        )
        if name == "enumerate":
            sp.add_argument(
                "--example2",
                action="store_true",
                help="use the built-in 4x7 polynomial least squares instance",
            )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    try:
        if args.config:
            cfg = _parse_config_file(args.config)
        else:
            if args.command == "enumerate" and getattr(args, "example2", False):
                cfg = ExperimentConfig(config_hash="builtin-example2")
            else:
                raise ConfigError("--config is required for this command")
        if args.seed is not None:
            cfg.master_seed = args.seed
        writer = OutputWriter(args.out, cfg.config_hash, args.no_timestamp)

        if args.command == "solve":
            return cmd_solve(cfg, writer)
        if args.command == "enumerate":
            return cmd_enumerate(cfg, writer, getattr(args, "example2", False))
        if args.command == "tournament":
            return cmd_tournament(cfg, writer)
        if args.command == "benchmark":
            return cmd_benchmark(cfg, writer)
        if args.command == "gradcheck":
            return cmd_gradcheck(cfg, writer)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
