"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is echoed in the pytest terminal
summary under "acceptance criteria".
"""
import csv
import json
import math
import time

import numpy as np
import pytest

from beamplace.cli import main
from beamplace.geometry import GroundUser, angular_separation
from beamplace.graph import VisibilityGraph, build_graph
from beamplace.scenario import ScenarioConfig, generate, save_config
from beamplace.solvers import SolverParams, kmeans, solve, solve_exact

from acceptance_log import criterion
from instances import SAT, make_instance
from oracles import brute_force_mcc, cycle_edges, dot_angle, ecef, petersen_edges

TREND_SIZES = [100, 500, 1000, 1500]
TREND_TRIALS = 30


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_c01_feasibility_suite():
    with criterion(1, "feasibility of every solver on 1000 random instances, < 60 s") as info:
        rng = np.random.default_rng(20240601)
        t0 = time.perf_counter()
        checked = 0
        for i in range(1000):
            n = int(rng.integers(2, 201))
            users, g = make_instance(i, n)
            algos = ["greedy", "bkmeans"] + (["exact"] if n <= SolverParams().exact_limit else [])
            for algo in algos:
                sol = solve(algo, users, SAT, g, SolverParams(seed=i))
                problems = sol.violations(users, SAT, g)
                assert not problems, f"instance {i} (n={n}) {algo}: {problems}"
                checked += 1
        elapsed = time.perf_counter() - t0
        info.append(f"{checked} solutions, {elapsed:.1f} s")
        assert elapsed < 60.0


def test_c02_oracle_dominance():
    with criterion(2, "exact <= min(greedy, bkmeans) on 200 instances n <= 14, equality >= 50%, < 5 min") as info:
        rng = np.random.default_rng(7)
        t0 = time.perf_counter()
        equal_min = equal_greedy = 0
        for i in range(200):
            n = int(rng.integers(2, 15))
            users, g = make_instance(10_000 + i, n)
            params = SolverParams(seed=i)
            ex = solve_exact(g, params).nab
            gr = solve("greedy", users, SAT, g, params).nab
            bk = solve("bkmeans", users, SAT, g, params).nab
            assert ex <= min(gr, bk), f"instance {i}: exact {ex}, greedy {gr}, bkmeans {bk}"
            equal_min += ex == min(gr, bk)
            equal_greedy += ex == gr
        elapsed = time.perf_counter() - t0
        info.append(f"equal to best heuristic {equal_min}/200, to greedy {equal_greedy}/200, {elapsed:.1f} s")
        assert equal_min >= 100 and equal_greedy >= 100
        assert elapsed < 300.0


@pytest.mark.parametrize(
    "name,n,edges,expected",
    [
        ("K_8", 8, [(i, k) for i in range(8) for k in range(i + 1, 8)], 1),
        ("edgeless_9", 9, [], 9),
        ("C_5", 5, cycle_edges(5), 3),
        ("C_6", 6, cycle_edges(6), 3),
        ("Petersen", 10, petersen_edges(), 5),
    ],
)
def test_c03_known_value_graphs(name, n, edges, expected):
    with criterion(3, f"exact MCC on {name} = {expected}, cross-checked by exhaustive partitions"):
        assert brute_force_mcc(n, edges) == expected
        assert solve_exact(VisibilityGraph.from_edges(n, edges), SolverParams()).nab == expected


def test_c04_geometry_oracle():
    with criterion(4, "law-of-cosines separation vs dot-product oracle on 10,000 pairs, < 1e-9 rad") as info:
        rng = np.random.default_rng(404)
        sp = SAT.position
        worst = 0.0
        for _ in range(10_000):
            la1, lo1, la2, lo2 = rng.uniform(-8.0, 8.0, 4)
            got = math.radians(angular_separation(GroundUser(0, la1, lo1), GroundUser(1, la2, lo2), SAT))
            want = dot_angle(sp, ecef(la1, lo1), ecef(la2, lo2))
            worst = max(worst, abs(got - want))
        info.append(f"max error {worst:.2e} rad")
        assert worst < 1e-9


@pytest.fixture(scope="module")
def trend_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("trend")
    t0 = time.perf_counter()
    rc = main(["compare", "--trials", str(TREND_TRIALS), "--sizes", ",".join(map(str, TREND_SIZES)),
               "--algos", "greedy,bkmeans", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    assert rc == 0
    summary = {(r["solver"], int(r["n"])): r for r in read_rows(out / "summary.csv")}
    manifest = json.loads((out / "manifest.json").read_text())
    return summary, manifest, elapsed


def _fields(summary, key, n):
    return float(summary[("greedy", n)][key]), float(summary[("bkmeans", n)][key])


def _manifest_reports(manifest, check, n, holds):
    rec = [c for c in manifest["trend_checks"] if c["check"] == check and c["n"] == n]
    assert len(rec) == 1 and rec[0]["holds"] == holds


def test_c05_trend_active_beams(trend_run):
    summary, manifest, elapsed = trend_run
    with criterion(5, "mean NAB greedy <= bkmeans at n in {100, 500, 1000, 1500}, 30 trials, < 15 min") as info:
        for n in TREND_SIZES:
            g, b = _fields(summary, "mean_nab", n)
            info.append(f"n={n}: {g:.1f} vs {b:.1f}")
            _manifest_reports(manifest, "nab_greedy_le_bkmeans", n, g <= b)
            assert g <= b
        info.append(f"{elapsed:.0f} s")
        assert elapsed < 900.0


def test_c06_trend_load_gap(trend_run):
    summary, manifest, _ = trend_run
    with criterion(6, "mean load gap bkmeans <= greedy at n >= 500") as info:
        for n in [s for s in TREND_SIZES if s >= 500]:
            g, b = _fields(summary, "mean_load_gap", n)
            info.append(f"n={n}: {g:.2f} vs {b:.2f}")
            _manifest_reports(manifest, "load_gap_bkmeans_le_greedy", n, b <= g)
            assert b <= g


def test_c07_trend_scgnr(trend_run):
    summary, manifest, _ = trend_run
    with criterion(7, "mean-of-mean and mean-of-min SCGNR bkmeans >= greedy at every size") as info:
        for n in TREND_SIZES:
            gm, bm = _fields(summary, "mean_mean_scgnr_db", n)
            gn, bn = _fields(summary, "mean_min_scgnr_db", n)
            info.append(f"n={n}: mean {bm - gm:+.3f} dB, min {bn - gn:+.3f} dB")
            _manifest_reports(manifest, "mean_scgnr_bkmeans_ge_greedy", n, bm >= gm)
            _manifest_reports(manifest, "min_scgnr_bkmeans_ge_greedy", n, bn >= gn)
            assert bm >= gm and bn >= gn
        assert manifest["model_parameters"]["link"]["rolloff_coeff"] == 12.0


def test_c08_kmeans_monotone_and_converges():
    with criterion(8, "K-Means WCSS non-increasing on 1000 seeded runs, converged within I = 400") as info:
        rng = np.random.default_rng(88)
        params = SolverParams()
        assert params.i_max == 400
        worst_iters = 0
        sizes = [20, 100, 300, 1500]
        pools = {n: generate(ScenarioConfig(n_users=n, seed=n)).ecef for n in sizes}
        for r in range(1000):
            n = sizes[r % len(sizes)] if r % 50 else 1500
            pts = pools[n] if r % 7 else generate(ScenarioConfig(n_users=n, seed=r)).ecef
            k = int(rng.integers(1, n + 1))
            st = kmeans(pts, k, params.with_seed(r))
            h = np.asarray(st.wcss_history)
            rises = np.diff(h)
            # floating-point slack only: the objective is at least 1 km^2 scale
            assert (rises <= 1e-12 * h[0]).all(), f"run {r}: WCSS increased by {rises.max()}"
            assert st.converged and st.iterations <= 400, f"run {r}: {st.iterations} iterations"
            worst_iters = max(worst_iters, st.iterations)
        info.append(f"max iterations {worst_iters}")


def test_c09_scale():
    with criterion(9, "1500 users: graph build < 2 s, greedy < 10 s") as info:
        users = generate(ScenarioConfig(n_users=1500, seed=9))
        t0 = time.perf_counter()
        g = build_graph(users, SAT)
        t_build = time.perf_counter() - t0
        t0 = time.perf_counter()
        sol = solve("greedy", users, SAT, g, SolverParams())
        t_greedy = time.perf_counter() - t0
        assert sol.violations(users, SAT, g) == []
        info.append(f"build {t_build:.2f} s, greedy {t_greedy:.2f} s")
        assert t_build < 2.0 and t_greedy < 10.0


def test_c10_determinism(tmp_path):
    with criterion(10, "repeated compare runs give byte-identical data CSVs") as info:
        cfg = tmp_path / "cfg.json"
        save_config(ScenarioConfig(seed=1234), cfg)
        outs = []
        for name in ("first", "second"):
            out = tmp_path / name
            rc = main(["compare", "--config", str(cfg), "--trials", "4", "--sizes", "100,500",
                       "--algos", "greedy,bkmeans", "--out", str(out)])
            assert rc == 0
            outs.append(out)
        files = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*.csv"))
        assert files
        for rel in files:
            assert (outs[0] / rel).read_bytes() == (outs[1] / rel).read_bytes(), str(rel)
        info.append(f"{len(files)} files compared")
