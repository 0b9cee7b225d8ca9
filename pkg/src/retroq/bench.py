"""Benchmark harness: random-trial gap counting, MUB scans, single-shot reports.

Every trial i draws its inputs from the dedicated stream ``(master_seed, i)``,
so results are independent of worker scheduling and the emitted CSV is
byte-identical for any thread count. Rows are sorted by trial index before
writing; counts are aggregated with order-insensitive integer sums.

CSV files start with a ``# schema=1`` line followed by the header row; floats
are written with ``repr`` (shortest round-trip form).
"""
from __future__ import annotations

import math
import multiprocessing
import os
from dataclasses import dataclass
from functools import partial

from .errors import ValidationError, ZeroProbabilityOutcomeError
from .eur import EurRecord, eur_record, go_information_gain
from .quantum import (
    STATE_ENSEMBLES,
    DensityMatrix,
    Povm,
    RngStream,
    counterexample_state,
    mub_pair,
    random_density_matrix,
    random_pvm,
    random_rank_one_povm,
)
from .retrodiction import bayesian_inverse, retro_joint
from .serialize import density_matrix_to_obj, matrix_to_obj, povm_to_obj

GAP_TOL = 1e-9
VALIDITY_TOL = 1e-9

BENCH_COLUMNS = ("trial", "d", "n", "h_m", "h_n", "h_gamma", "r_mutual",
                 "eur1", "eur2", "eur3", "gap13", "gap23", "gap21", "eur2_finite")
SCAN_COLUMNS = ("p", "theta", "gap", "eur1", "eur2", "eur3", "h_m", "h_n", "h_gamma")
SCHEMA_LINE = "# schema=1"

BENCH_MODES = ("bench-pvm", "bench-povm")


class EurValidityError(RuntimeError):
    """A trial violated h_m + h_n >= max(bounds); carries the serialized inputs."""

    def __init__(self, message: str, counterexample: dict):
        super().__init__(message)
        self.counterexample = counterexample

    def __reduce__(self):
        return (EurValidityError, (self.args[0], self.counterexample))


@dataclass(frozen=True)
class BenchConfig:
    mode: str
    d: int
    trials: int
    master_seed: int
    n: int | None = None
    threads: int | None = None
    out: str | None = None
    eur3_no_log: bool = False
    state_ensemble: str = "uniform-spectrum"
    gap_tol: float = GAP_TOL
    validity_tol: float = VALIDITY_TOL

    def __post_init__(self):
        if self.mode not in BENCH_MODES:
            raise ValidationError(f"mode must be one of {BENCH_MODES}, got {self.mode!r}")
        if self.d < 1:
            raise ValidationError(f"dimension must be >= 1, got {self.d}")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        n = self.d if self.n is None else self.n
        if self.mode == "bench-pvm" and n != self.d:
            raise ValidationError(f"bench-pvm requires n = d, got n={n}, d={self.d}")
        if self.mode == "bench-povm" and n < self.d:
            raise ValidationError(f"bench-povm requires n >= d, got n={n}, d={self.d}")
        if self.state_ensemble not in STATE_ENSEMBLES:
            raise ValidationError(
                f"state_ensemble must be one of {STATE_ENSEMBLES}, got {self.state_ensemble!r}")
        object.__setattr__(self, "n", n)

    @property
    def outcomes(self) -> int:
        return self.n if self.n is not None else self.d


@dataclass
class GapCounts:
    """Strict-inequality counts over the finite-eur2 trials of a run."""

    trials: int = 0
    count_eur1_lt_eur3: int = 0
    count_eur2_lt_eur3: int = 0
    count_eur2_lt_eur1: int = 0
    infinite_eur2_count: int = 0

    def add(self, record: EurRecord, gap_tol: float = GAP_TOL) -> None:
        self.trials += 1
        if record.gap13 < -gap_tol:
            self.count_eur1_lt_eur3 += 1
        if not record.eur2_finite:
            self.infinite_eur2_count += 1
            return
        if record.gap23 < -gap_tol:
            self.count_eur2_lt_eur3 += 1
        if record.gap21 < -gap_tol:
            self.count_eur2_lt_eur1 += 1

    def to_jsonable(self) -> dict:
        out = dict(self.__dict__)
        out["fraction_eur1_lt_eur3"] = self.count_eur1_lt_eur3 / self.trials if self.trials else 0.0
        out["fraction_eur2_lt_eur3"] = self.count_eur2_lt_eur3 / self.trials if self.trials else 0.0
        out["fraction_eur2_lt_eur1"] = self.count_eur2_lt_eur1 / self.trials if self.trials else 0.0
        return out


def draw_trial_inputs(cfg: BenchConfig, trial: int) -> tuple:
    """Deterministic (state, M, N) for one trial index."""
    gen = RngStream(cfg.master_seed, trial).generator()
    gamma = random_density_matrix(cfg.d, gen, ensemble=cfg.state_ensemble)
    if cfg.mode == "bench-pvm":
        m = random_pvm(cfg.d, gen)
        n = random_pvm(cfg.d, gen)
    else:
        m = random_rank_one_povm(cfg.d, cfg.outcomes, gen)
        n = random_rank_one_povm(cfg.d, cfg.outcomes, gen)
    return gamma, m, n


def _check_validity(cfg: BenchConfig, trial: int, record: EurRecord,
                    gamma: DensityMatrix, m: Povm, n: Povm) -> None:
    lhs = record.h_m + record.h_n
    bound = max(record.eur1, record.eur3, record.eur2 if record.eur2_finite else -math.inf)
    if lhs < bound - cfg.validity_tol:
        dump = {
            "note": "entropy sum fell below an uncertainty bound",
            "trial": trial,
            "master_seed": cfg.master_seed,
            "mode": cfg.mode,
            "record": record_to_jsonable(record),
            "state": density_matrix_to_obj(gamma),
            "povm_m": povm_to_obj(m),
            "povm_n": povm_to_obj(n),
        }
        raise EurValidityError(
            f"trial {trial}: H(M)+H(N) = {lhs!r} < bound {bound!r}", dump)


def bench_trial(cfg: BenchConfig, trial: int) -> EurRecord:
    gamma, m, n = draw_trial_inputs(cfg, trial)
    record = eur_record(gamma, m, n, eur3_no_log=cfg.eur3_no_log)
    _check_validity(cfg, trial, record, gamma, m, n)
    return record


def _trial_pair(cfg: BenchConfig, trial: int) -> tuple:
    return trial, bench_trial(cfg, trial)


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        return max(1, os.cpu_count() or 1)
    if threads < 1:
        raise ValidationError(f"threads must be >= 1, got {threads}")
    return threads


def bench_records(cfg: BenchConfig) -> list:
    """All (trial, record) pairs, sorted by trial index."""
    threads = _resolve_threads(cfg.threads)
    indices = range(cfg.trials)
    if threads == 1 or cfg.trials < 4:
        pairs = [_trial_pair(cfg, i) for i in indices]
    else:
        chunk = max(1, cfg.trials // (threads * 16))
        with multiprocessing.Pool(processes=threads) as pool:
            pairs = list(pool.imap_unordered(partial(_trial_pair, cfg), indices, chunksize=chunk))
    pairs.sort(key=lambda tr: tr[0])
    return pairs


def _fmt(value: float) -> str:
    return repr(float(value))


def _bench_row(cfg: BenchConfig, trial: int, r: EurRecord) -> str:
    cells = [str(trial), str(cfg.d), str(cfg.outcomes)]
    cells += [_fmt(v) for v in (r.h_m, r.h_n, r.h_gamma, r.r_mutual,
                                r.eur1, r.eur2, r.eur3, r.gap13, r.gap23, r.gap21)]
    cells.append("1" if r.eur2_finite else "0")
    return ",".join(cells)


def _write_csv(path: str, header: tuple, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(SCHEMA_LINE + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(row + "\n")


def run_bench(cfg: BenchConfig) -> GapCounts:
    """Run all trials, write the per-trial CSV (if configured), return counts."""
    pairs = bench_records(cfg)
    counts = GapCounts()
    for _, record in pairs:
        counts.add(record, cfg.gap_tol)
    if cfg.out:
        _write_csv(cfg.out, BENCH_COLUMNS, [_bench_row(cfg, t, r) for t, r in pairs])
    return counts


def grid_values(step: float, lo: float, hi: float) -> list:
    """Inclusive arithmetic grid, robust to floating-point step accumulation."""
    if not (0 < step <= hi - lo):
        raise ValidationError(f"grid step must lie in (0, {hi - lo}], got {step!r}")
    count = int(math.floor((hi - lo) / step + 1e-9))
    return [min(lo + i * step, hi) for i in range(count + 1)]


def run_mub_scan(d: int, p_step: float, theta_step: float, out: str | None,
                 basis_index: int = 0, eur3_no_log: bool = False) -> list:
    """Sweep the MUB counterexample family over (p, theta in degrees).

    Returns the rows as tuples matching SCAN_COLUMNS and writes the CSV when
    ``out`` is given. ``gap`` is eur2 - eur3, the quantity whose negative
    region marks the counterexamples.
    """
    m, n = mub_pair(d)
    p_values = grid_values(p_step, 0.0, 1.0)
    theta_values = grid_values(theta_step, 0.0, 90.0)
    rows = []
    for p in p_values:
        for theta in theta_values:
            gamma = counterexample_state(d, p, math.radians(theta), basis_index)
            r = eur_record(gamma, m, n, eur3_no_log=eur3_no_log)
            rows.append((p, theta, r.gap23, r.eur1, r.eur2, r.eur3, r.h_m, r.h_n, r.h_gamma))
    if out:
        _write_csv(out, SCAN_COLUMNS, [",".join(_fmt(v) for v in row) for row in rows])
    return rows


def record_to_jsonable(r: EurRecord) -> dict:
    out = {}
    for key, value in r.__dict__.items():
        if isinstance(value, float) and not math.isfinite(value):
            out[key] = repr(value)
        else:
            out[key] = value
    return out


def single_report(gamma: DensityMatrix, m: Povm, n: Povm, eur3_no_log: bool = False) -> dict:
    """Full diagnostic report for one explicit (state, M, N) triple."""
    record = eur_record(gamma, m, n, eur3_no_log=eur3_no_log)
    joint = retro_joint(gamma, m, n)

    def inverses(povm: Povm) -> list:
        out = []
        for x in range(povm.n_outcomes):
            try:
                out.append(matrix_to_obj(bayesian_inverse(gamma, povm, x).mat))
            except ZeroProbabilityOutcomeError:
                out.append(None)  # no retrodicted state for an impossible outcome
        return out

    return {
        "dim": gamma.dim,
        "outcomes_m": m.n_outcomes,
        "outcomes_n": n.n_outcomes,
        "record": record_to_jsonable(record),
        "retro_joint": [[float(v) for v in row] for row in joint.probs],
        "row_marginal": [float(v) for v in joint.row_marginal],
        "col_marginal": [float(v) for v in joint.col_marginal],
        "mutual_retrodictability": float(record.r_mutual),
        "go_information_gain": float(go_information_gain(gamma, m, n)),
        "bayesian_inverse_m": inverses(m),
        "bayesian_inverse_n": inverses(n),
    }
