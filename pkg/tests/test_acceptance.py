"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one ``ACCEPTANCE <name>: PASS/FAIL`` line (run with ``-s``
to see them live). The benchmark reproduction tests are Monte-Carlo heavy
and dominate the runtime of the whole suite.
"""
import math
import time
from collections import deque

import numpy as np
import pytest

from retroq import (
    DensityMatrix,
    Povm,
    RngStream,
    mutual_retrodictability,
    random_density_matrix,
    random_full_rank_povm,
    random_pvm,
    random_rank_one_povm,
    retro_joint,
    go_information_gain,
    instrument_state_mn,
    instrument_state_nm,
    verify_theorem1,
    verify_theorem2,
    von_neumann_entropy,
)
from retroq.bench import BenchConfig, EurValidityError, _check_validity, run_bench, run_mub_scan
from retroq.verify import TAU_KINDS, draw_tau

SEED_TABLE1 = 20_260_810
SEED_TABLE2 = 20_260_811
SEED_THEOREM3 = 20_260_812
SEED_ORACLE = 20_260_813
SEED_STRUCT = 20_260_814
TRIALS = 100_000
RUNTIME_LIMIT_S = 600.0

ORACLE_DIVERGENCES = ("umegaki", "petz:0.5", "petz:2", "sandwiched:0.5",
                      "sandwiched:2", "geometric:1.5", "bs")


def _report(name: str, ok: bool, detail: str):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def _run_table_config(mode, d, n, seed, tmp_path):
    out = tmp_path / f"{mode}-d{d}-n{n or d}.csv"
    cfg = BenchConfig(mode=mode, d=d, n=n, trials=TRIALS, master_seed=seed, out=str(out))
    t0 = time.time()
    counts = run_bench(cfg)
    elapsed = time.time() - t0
    return counts, elapsed, out


@pytest.mark.parametrize("d,f13_target,f23_band", [
    (2, 0.763, (0.00394, 0.0015)),
    (3, 0.440, None),
    (4, 0.394, None),
])
def test_table1_reproduction(d, f13_target, f23_band, tmp_path):
    counts, elapsed, out = _run_table_config("bench-pvm", d, None, SEED_TABLE1 + d, tmp_path)
    f13 = counts.count_eur1_lt_eur3 / counts.trials
    ok = abs(f13 - f13_target) <= 0.010
    ok = ok and counts.count_eur2_lt_eur1 == 0
    if f23_band is None:
        ok = ok and counts.count_eur2_lt_eur3 == 0
        f23_text = f"count23={counts.count_eur2_lt_eur3}"
    else:
        f23 = counts.count_eur2_lt_eur3 / counts.trials
        ok = ok and abs(f23 - f23_band[0]) <= f23_band[1]
        f23_text = f"f23={f23:.5f} vs {f23_band[0]}+-{f23_band[1]}"
    ok = ok and elapsed <= RUNTIME_LIMIT_S
    _report(
        f"table1-d{d}", ok,
        f"f13={f13:.4f} vs {f13_target}+-0.010, {f23_text}, "
        f"count21={counts.count_eur2_lt_eur1}, inf_eur2={counts.infinite_eur2_count}, "
        f"{elapsed:.0f}s<=600s")

    # EUR validity criterion, row-level: re-check every CSV row of this run
    violations = 0
    rows = 0
    for line in out.read_text().splitlines()[2:]:
        cells = line.split(",")
        h_m, h_n = float(cells[3]), float(cells[4])
        eur1, eur2, eur3 = float(cells[7]), float(cells[8]), float(cells[9])
        bound = max(eur1, eur3, eur2 if math.isfinite(eur2) else -math.inf)
        rows += 1
        if h_m + h_n < bound - 1e-9:
            violations += 1
    _report(f"eur-validity-rows-d{d}", violations == 0 and rows == TRIALS,
            f"{violations} violations over {rows} rows")


@pytest.mark.parametrize("d,n", [(2, 3), (2, 4), (3, 4)])
def test_table2_qualitative(d, n, tmp_path):
    counts, elapsed, _ = _run_table_config("bench-povm", d, n, SEED_TABLE2 + 10 * d + n, tmp_path)
    f13 = counts.count_eur1_lt_eur3 / counts.trials
    ok = (counts.count_eur2_lt_eur3 == 0 and counts.count_eur2_lt_eur1 == 0
          and 0.35 <= f13 <= 0.55 and elapsed <= RUNTIME_LIMIT_S)
    _report(f"table2-d{d}n{n}", ok,
            f"f13={f13:.4f} in [0.35,0.55], count23={counts.count_eur2_lt_eur3}, "
            f"count21={counts.count_eur2_lt_eur1}, {elapsed:.0f}s<=600s")


def _negative_component(rows, start, threshold=-1e-6):
    """Size of the contiguous gap<threshold region containing ``start`` (0 if outside)."""
    ps = sorted({r[0] for r in rows})
    ts = sorted({r[1] for r in rows})
    pi = {v: i for i, v in enumerate(ps)}
    ti = {v: i for i, v in enumerate(ts)}
    grid = np.full((len(ps), len(ts)), np.nan)
    for p, t, gap, *_ in rows:
        grid[pi[p], ti[t]] = gap
    mask = grid < threshold
    si = (pi[start[0]], ti[start[1]])
    if not mask[si]:
        return 0
    seen = {si}
    queue = deque([si])
    while queue:
        i, j = queue.popleft()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (i + di, j + dj)
            if 0 <= nb[0] < mask.shape[0] and 0 <= nb[1] < mask.shape[1] \
                    and nb not in seen and mask[nb]:
                seen.add(nb)
                queue.append(nb)
    return len(seen)


@pytest.mark.parametrize("d", [3, 5])
def test_mub_counterexample_region(d, tmp_path):
    out = tmp_path / f"mub-d{d}.csv"
    run_mub_scan(d, 0.01, 1.0, str(out))
    rows = []
    for line in out.read_text().splitlines()[2:]:
        cells = [float(v) for v in line.split(",")]
        rows.append(tuple(cells))
    size = _negative_component(rows, (0.75, 45.0))
    _report(f"mub-counterexample-d{d}", size > 0,
            f"contiguous gap23 < -1e-6 region containing (p=0.75, theta=45deg) "
            f"has {size} grid points of {len(rows)}")


def test_theorem3_property_suite():
    per_dim = 10_000
    results = []
    for d in (2, 3, 4):
        violations = 0
        stream = RngStream(SEED_THEOREM3, d)
        for i in range(per_dim):
            gen = stream.child(i)
            gamma = random_density_matrix(d, gen)
            if i % 2 == 0:
                m, n = random_pvm(d, gen), random_pvm(d, gen)
            else:
                m, n = (random_rank_one_povm(d, d + 1, gen),
                        random_rank_one_povm(d, d + 1, gen))
            r = mutual_retrodictability(gamma, m, n)
            if not (-1e-12 <= r <= von_neumann_entropy(gamma) + 1e-9):
                violations += 1
        results.append((d, violations))
    total = sum(v for _, v in results)
    _report("theorem3-bound", total == 0,
            f"0 violations required; got {results} over {per_dim} triples per dim")

    # tightness witnesses
    worst_eq = 0.0
    worst_pure = 0.0
    stream = RngStream(SEED_THEOREM3, 99)
    for i in range(300):
        d = (2, 3, 4)[i % 3]
        gen = stream.child(i)
        gamma = random_density_matrix(d, gen)
        _, v = np.linalg.eigh(gamma.mat)
        pvm = Povm(tuple(np.outer(v[:, k], v[:, k].conj()) for k in range(d)))
        worst_eq = max(worst_eq,
                       abs(mutual_retrodictability(gamma, pvm, pvm) - von_neumann_entropy(gamma)))
        vec = gen.standard_normal(d) + 1j * gen.standard_normal(d)
        pure = DensityMatrix.pure(vec)
        worst_pure = max(worst_pure,
                         abs(mutual_retrodictability(pure, random_pvm(d, gen), random_pvm(d, gen))))
    _report("theorem3-tightness", worst_eq <= 1e-9 and worst_pure <= 1e-12,
            f"|R-H| <= 1e-9 (worst {worst_eq:.2e}); pure |R| <= 1e-12 (worst {worst_pure:.2e})")


@pytest.mark.parametrize("divergence", ORACLE_DIVERGENCES)
def test_theorem1_oracle(divergence):
    instances = 100
    candidates = 1_000
    worst_err = 0.0
    beats = 0
    strict_failures = 0
    for i in range(instances):
        d = 2 if i < instances // 2 else 3
        stream = RngStream(SEED_ORACLE, i)
        gen = stream.generator()
        gamma = random_density_matrix(d, gen)          # Hilbert-Schmidt: full rank a.s.
        povm = random_full_rank_povm(d, d, gen)
        tau = draw_tau(d, gen, TAU_KINDS[i % len(TAU_KINDS)])
        report = verify_theorem1(gamma, povm, tau, divergence, candidates, stream)
        worst_err = max(worst_err, report.minimizer_abs_error)
        beats += report.n_beating_candidates
        strict_failures += report.n_strict_increase_failures + report.n_monotonicity_violations
        assert report.passed, (divergence, report.counterexample)
    _report(f"theorem1-{divergence}", worst_err <= 1e-8 and beats == 0 and strict_failures == 0,
            f"{instances} instances x {candidates}+ candidates: "
            f"max |min - classical| = {worst_err:.2e} <= 1e-8, beats={beats}")


def test_theorem2_oracle():
    instances = 100
    candidates = 1_000
    worst_err = 0.0
    beats = 0
    for i in range(instances):
        d = 2 if i < instances // 2 else 3
        stream = RngStream(SEED_ORACLE + 1, i)
        gen = stream.generator()
        gamma = random_density_matrix(d, gen)
        povm = random_full_rank_povm(d, d, gen)
        tau = draw_tau(d, gen, TAU_KINDS[i % len(TAU_KINDS)])
        report = verify_theorem2(gamma, povm, tau, candidates, stream)
        worst_err = max(worst_err, report.minimizer_abs_error)
        beats += report.n_beating_candidates
        assert report.passed, report.counterexample
    _report("theorem2-trace-distance", worst_err <= 1e-9 and beats == 0,
            f"max |min - 0.5 sum|tau-p|| = {worst_err:.2e} <= 1e-9, beats={beats}")


def test_structural_identities():
    triples = 1_000
    worst = dict(symmetry=0.0, marginal=0.0, cell=0.0, go=0.0, trace_excess=0.0)
    stream = RngStream(SEED_STRUCT, 0)
    for i in range(triples):
        d = (2, 3, 4)[i % 3]
        gen = stream.child(i)
        gamma = random_density_matrix(d, gen)
        if i % 2 == 0:
            m, n = random_pvm(d, gen), random_pvm(d, gen)
        else:
            m, n = random_rank_one_povm(d, d + 1, gen), random_rank_one_povm(d, d + 1, gen)
        joint = retro_joint(gamma, m, n)
        swapped = retro_joint(gamma, n, m)
        worst["symmetry"] = max(worst["symmetry"], float(np.abs(joint.probs - swapped.probs.T).max()))
        worst["marginal"] = max(
            worst["marginal"],
            float(np.abs(joint.row_marginal - m.outcome_probabilities(gamma)).max()),
            float(np.abs(joint.col_marginal - n.outcome_probabilities(gamma)).max()))
        sg = gamma.sqrt
        cell_err = 0.0
        for x in range(m.n_outcomes):
            t_x = sg @ m[x] @ sg
            for y in range(n.n_outcomes):
                cell = n.sqrts[y] @ t_x @ n.sqrts[y]
                cell_err = max(cell_err, abs(float(np.trace(cell).real) - joint.probs[x, y]))
        worst["cell"] = max(worst["cell"], cell_err)
        worst["go"] = max(worst["go"],
                          abs(go_information_gain(gamma, m, n) - von_neumann_entropy(gamma)))
        for state in (instrument_state_mn(gamma, m, n), instrument_state_nm(gamma, m, n)):
            worst["trace_excess"] = max(worst["trace_excess"],
                                        float(np.trace(state).real) - 1.0)
    ok = (worst["symmetry"] <= 1e-10 and worst["marginal"] <= 1e-9 and worst["cell"] <= 1e-10
          and worst["go"] <= 1e-9 and worst["trace_excess"] <= 1e-9)
    _report("structural-identities", ok,
            f"{triples} triples: symmetry={worst['symmetry']:.2e}<=1e-10, "
            f"marginals={worst['marginal']:.2e}<=1e-9, cells={worst['cell']:.2e}<=1e-10, "
            f"GO={worst['go']:.2e}<=1e-9, trace-1<={worst['trace_excess']:.2e}<=1e-9")


def test_eur_validity_guard_trips_on_violation():
    # the abort-with-counterexample mechanism itself
    from retroq.eur import EurRecord

    cfg = BenchConfig(mode="bench-pvm", d=2, trials=1, master_seed=0, threads=1)
    gamma, m, n = __import__("retroq.bench", fromlist=["draw_trial_inputs"]).draw_trial_inputs(cfg, 0)
    bad = EurRecord(h_m=0.1, h_n=0.1, h_gamma=1.0, r_mutual=0.0,
                    eur1=2.0, eur2=2.0, eur3=2.0, gap13=0.0, gap23=0.0, gap21=0.0,
                    rank_one_ok=True, eur2_finite=True)
    with pytest.raises(EurValidityError) as exc:
        _check_validity(cfg, 0, bad, gamma, m, n)
    dump = exc.value.counterexample
    ok = all(key in dump for key in ("trial", "record", "state", "povm_m", "povm_n"))
    _report("eur-validity-guard", ok, "violating trial aborts with serialized counterexample")


def test_determinism_across_thread_counts(tmp_path):
    out1, out2 = tmp_path / "t1.csv", tmp_path / "t2.csv"
    base = dict(mode="bench-pvm", d=3, trials=500, master_seed=31337)
    run_bench(BenchConfig(**base, threads=1, out=str(out1)))
    run_bench(BenchConfig(**base, threads=2, out=str(out2)))
    identical = out1.read_bytes() == out2.read_bytes()
    _report("determinism", identical,
            "threads=1 and threads=2 produce byte-identical CSV for identical config/seed")
