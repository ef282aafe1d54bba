"""Acceptance criteria, one test per criterion.

Each test records a one-line PASS/FAIL verdict that is printed in the
terminal summary (see ``conftest.py``). Run on its own with
``pytest tests/test_acceptance.py`` or ``python3 tests/test_acceptance.py``.
"""

import itertools
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import wilcoxon as scipy_wilcoxon

from conftest import random_measure
from choquetknn.choquet import (
    alpha_choquet_distance,
    AlphaDistanceSpec,
    choquet_distance,
    choquet_distance_matrix,
    choquet_integral,
    choquet_integral_ascending,
    choquet_integral_descending,
    choquet_integral_mobius,
    choquet_similarity,
)
from choquetknn.data import load_csv
from choquetknn.experiments import run_synthetic
from choquetknn.fuzzyrough import GammaMeasure
from choquetknn.knn import cross_validate, predict_from_distances
from choquetknn.measure import (
    AdditiveMeasure,
    DualMeasure,
    ExplicitMeasure,
    Measure,
    dual,
    mixture,
    mobius_transform,
    to_explicit,
)
from choquetknn.stats import wilcoxon_signed_rank
from choquetknn.worked_example import run_worked_example

DATA = Path(__file__).parent / "data"
RESULTS: dict[int, str] = {}


class Verdict:
    """Collects named sub-checks and records a single line for the criterion."""

    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.failed: list[str] = []
        self.notes: list[str] = []
        self.start = time.perf_counter()

    def check(self, ok: bool, what: str) -> None:
        if not ok:
            self.failed.append(what)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def finish(self, budget: float | None = None) -> None:
        elapsed = time.perf_counter() - self.start
        if budget is not None:
            self.check(elapsed < budget, f"runtime {elapsed:.1f}s >= {budget:g}s")
        status = "FAIL" if self.failed else "PASS"
        detail = "; ".join(self.failed) if self.failed else ", ".join(self.notes)
        line = f"criterion {self.number} {status}: {self.title} ({elapsed:.2f}s) {detail}".rstrip()
        RESULTS[self.number] = line
        print(line)
        assert not self.failed, line


def test_criterion_1_worked_example():
    v = Verdict(1, "worked example within 5e-3")
    res = run_worked_example()
    v.check(res.passed, f"{len(res.failures)} cells off: " + ", ".join(c.where for c in res.failures[:5]))
    t = res.tables
    spot = [
        ("d_mu[x1,x2]", t["d_mu"][0, 1], 0.135),
        ("d_mu[x3,x4]", t["d_mu"][2, 3], 0.2),
        ("d_w[x1,x2]", t["d_w"][0, 1], 0.22),
        ("d_gamma[x3,x4]", t["d_gamma"][2, 3], 1.91),
        ("d_gamma[x1,x2]", t["d_gamma"][0, 1], 0.18),
        ("alpha .5 [x3,x4]", t["d_gamma_alpha_0.5"][2, 3], 0.96),
        ("alpha 1 [x3,x4]", t["d_gamma_alpha_1"][2, 3], 0.0),
        ("dual gamma {cough}", res.listings["gamma_dual"][4], 1.65),
        ("sym gamma {cough}", res.listings["gamma_sym"][4], 2.65),
    ]
    for name, actual, expected in spot:
        v.check(abs(actual - expected) <= 5e-3 + 1e-9, f"{name}={actual:.4f} vs {expected}")
    gamma_listing = [res.listings["gamma"][k] for k in (1, 2, 4, 3, 5, 6, 7)]
    v.check(np.allclose(gamma_listing, [0.0, 1.1, 3.65, 2.0, 3.65, 3.65, 3.65], atol=5e-3), "gamma listing")
    v.check(np.allclose(res.shapley, [0.2, 0.4, 0.4], atol=5e-3), "shapley values")
    v.note(f"{len(res.checks)} cells compared")
    v.finish(budget=1.0)


def test_criterion_2_formulation_equivalence():
    v = Verdict(2, "four integral forms agree within 1e-9")
    rng = np.random.default_rng(2024)
    worst = 0.0
    for trial in range(1000):
        m = int(rng.integers(1, 7))
        mu = random_measure(rng, m)
        f = rng.random(m)
        if trial % 4 == 0:  # force ties
            f = np.round(f * 3) / 3
        forms = [
            choquet_integral(f, mu),
            choquet_integral_ascending(f, mu),
            choquet_integral_descending(f, mu),
            choquet_integral_mobius(f, mobius_transform(mu)),
        ]
        worst = max(worst, np.ptp(forms))
    v.check(worst <= 1e-9, f"max spread {worst:.2e}")
    v.note(f"1000 pairs, max spread {worst:.1e}")
    v.finish(budget=10.0)


def _random_instance(rng):
    m = int(rng.integers(1, 7))
    return m, random_measure(rng, m), rng.random(m), rng.random(m)


def test_criterion_3_algebraic_identities():
    v = Verdict(3, "algebraic identities on 500 instances each")
    rng = np.random.default_rng(3)
    n = 500
    tol, tol_sum = 1e-12, 1e-9
    bad = {k: 0 for k in ("involution", "complement", "mixture", "additive_dual", "additive", "alpha", "monotone", "similarity")}
    for _ in range(n):
        m, mu, x, y = _random_instance(rng)
        masks = np.arange(1 << m)
        T = mu.total
        vals = mu.evaluate_many(masks)
        dd = DualMeasure(DualMeasure(mu)).evaluate_many(masks)
        bad["involution"] += not (dual(dual(mu)) is mu and np.max(np.abs(dd - vals)) <= tol)
        du = dual(mu).evaluate_many(masks)
        bad["complement"] += not np.max(np.abs(du + mu.evaluate_many(mu.full ^ masks) - T)) <= tol

        s = mixture(mu, 0.5)
        bad["mixture"] += not np.max(np.abs(dual(s).evaluate_many(masks) - s.evaluate_many(masks))) <= tol

        w = rng.random(m)
        add = AdditiveMeasure(w)
        bad["additive_dual"] += not np.max(np.abs(dual(add).evaluate_many(masks) - add.evaluate_many(masks))) <= tol_sum
        bad["additive"] += not abs(choquet_distance(x, y, add) - np.sum(w * np.abs(x - y))) <= tol

        alpha = float(rng.random())
        lhs = alpha_choquet_distance(x, y, AlphaDistanceSpec(mu, alpha))
        rhs = choquet_distance(x, y, to_explicit(mixture(mu, alpha)))
        bad["alpha"] += not abs(lhs - rhs) <= tol

        bigger = ExplicitMeasure(mu.table + np.concatenate([[0.0], rng.random((1 << m) - 1)]))
        if not all(bigger.table[k] >= bigger.table[k & ~(1 << a)] for k in range(1 << m) for a in range(m)):
            bigger = ExplicitMeasure(mu.table * (1.0 + rng.random()))
        bad["monotone"] += not choquet_distance(x, y, mu) <= choquet_distance(x, y, bigger) + tol

        bound = 1.0 + 2.0 * float(rng.random())
        sim = choquet_similarity(x, y, mu, bound)
        bad["similarity"] += not abs(sim - (T - choquet_distance(x, y, dual(mu)) / bound)) <= tol
    for name, count in bad.items():
        v.check(count == 0, f"{name}: {count}/{n} violations")
    v.note(f"{len(bad)} identities x {n}")
    v.finish()


def test_criterion_4_duplicate_robustness():
    v = Verdict(4, "duplicated column leaves CFR distances and 5-NN unchanged")
    rng = np.random.default_rng(4)
    worst = 0.0
    instances = 0
    for _ in range(40):
        n = int(rng.integers(8, 51))
        m = int(rng.integers(1, 5))
        X = rng.random((n, m))
        if rng.random() < 0.3:
            X = np.round(X * 4) / 4  # exercise ties
        y = rng.integers(0, int(rng.integers(2, 4)), n)
        y[:2] = [0, 1]
        col = int(rng.integers(0, m))
        Xd = np.column_stack([X, X[:, col]])
        mu, mud = GammaMeasure(X, y), GammaMeasure(Xd, y)
        for alpha in (0.0, 0.5, 1.0):
            D = choquet_distance_matrix(X, mu, alpha)
            Dd = choquet_distance_matrix(Xd, mud, alpha)
            worst = max(worst, float(np.max(np.abs(D - Dd))))
            k = min(5, n - 1)
            # leave-one-out predictions: exclude self by pushing the diagonal out
            p = predict_from_distances(D + np.diag(np.full(n, np.inf)), y, k)
            pd = predict_from_distances(Dd + np.diag(np.full(n, np.inf)), y, k)
            v.check(np.array_equal(p, pd), f"5-NN predictions differ (n={n}, m={m}, alpha={alpha})")
            instances += 1
    v.check(worst <= 1e-12, f"max distance gap {worst:.2e}")
    v.note(f"{instances} (dataset, alpha) cases, max gap {worst:.1e}")
    v.finish()


def test_criterion_5_synthetic_properties():
    v = Verdict(5, "synthetic redundancy experiment properties")
    ms = range(16)
    dup = run_synthetic("duplicates", ms, seed=42)
    acc = {(r.distance, r.m): r.accuracy for r in dup}
    cfr = [acc["CFR.5", m] for m in ms]
    man_drop = acc["MAN", 0] - acc["MAN", 15]
    mah_drop = acc["MAH1", 0] - acc["MAH1", 15]
    v.check(np.ptp(cfr) < 0.01, f"CFR.5 range {np.ptp(cfr):.4f}")
    v.check(man_drop >= 0.05, f"MAN drop {man_drop:.4f}")
    v.check(mah_drop < man_drop, f"MAH1 drop {mah_drop:.4f} vs MAN {man_drop:.4f}")
    cor = run_synthetic("correlated", ms, ["MAN", "MI"], seed=42, sigma=0.1)
    cacc = {(r.distance, r.m): r.accuracy for r in cor}
    losing = [m for m in range(5, 16) if cacc["MI", m] < cacc["MAN", m]]
    v.check(not losing, f"MI below MAN at m={losing}")
    v.note(
        f"CFR.5 range {np.ptp(cfr):.4f}, MAN drop {man_drop:.3f}, MAH1 drop {mah_drop:.3f}, "
        f"MI-MAN at m=15 {cacc['MI', 15] - cacc['MAN', 15]:+.3f}"
    )
    v.finish(budget=300.0)


def test_criterion_6_benchmark_spot_check():
    v = Verdict(6, "iris/wisconsin 5-fold CV spot check")
    targets = {"iris": (0.947, 0.947), "wisconsin": (0.964, 0.960)}
    for name, (man, cfr) in targets.items():
        rep = cross_validate(load_csv(DATA / f"{name}.csv"), ["MAN", "CFR.5"], k=5, folds=5, seed=42, name=name)
        got_man, got_cfr = rep.means["MAN"], rep.means["CFR.5"]
        v.check(abs(got_man - man) <= 0.03, f"{name} MAN {got_man:.3f} vs {man}")
        v.check(abs(got_cfr - cfr) <= 0.04, f"{name} CFR.5 {got_cfr:.3f} vs {cfr}")
        v.note(f"{name} MAN {got_man:.3f} CFR.5 {got_cfr:.3f}")
    v.finish(budget=120.0)


def _oracle(a, b):
    """Statistic and two-sided p by listing every sign assignment."""
    d = np.asarray(a, float) - np.asarray(b, float)
    d = d[d != 0]
    n = d.size
    if n == 0:
        return 0.0, 1.0
    mags = np.abs(d)
    ranks = np.array([np.sum(mags < x) + (np.sum(mags == x) + 1) / 2.0 for x in mags])
    w = ranks[d > 0].sum()
    null = np.array([np.dot(s, ranks) for s in itertools.product((0, 1), repeat=n)])
    p = 2.0 * min(np.mean(null <= w + 1e-9), np.mean(null >= w - 1e-9))
    return min(w, ranks.sum() - w), min(1.0, p)


def test_criterion_7_wilcoxon():
    v = Verdict(7, "signed-rank test vs enumeration oracle and approximation")
    rng = np.random.default_rng(7)
    grid = np.linspace(0.0, 1.0, 6)
    cases = 0
    for _ in range(300):
        n = int(rng.integers(1, 11))
        a, b = rng.choice(grid, n), rng.choice(grid, n)
        res = wilcoxon_signed_rank(a, b)
        stat, p = _oracle(a, b)
        ok = abs(res.statistic - stat) <= 1e-12 and abs(res.pvalue - p) <= 1e-12
        v.check(ok, f"mismatch at a={a.tolist()}, b={b.tolist()}")
        cases += 1
    worst = 0.0
    for n in range(15, 26):
        for _ in range(20):
            a, b = rng.normal(size=n), rng.normal(0.3, 1.0, size=n)
            exact = wilcoxon_signed_rank(a, b, method="exact").pvalue
            approx = wilcoxon_signed_rank(a, b, method="normal").pvalue
            worst = max(worst, abs(exact - approx))
            ref = scipy_wilcoxon(a, b, method="exact").pvalue
            v.check(abs(exact - ref) <= 1e-9, f"exact p differs from scipy at n={n}")
    v.check(worst <= 0.02, f"approximation gap {worst:.4f}")
    v.note(f"{cases} grid samples, approximation gap {worst:.4f}")
    v.finish()


class CountingMeasure(Measure):
    """Passes evaluations through to ``base`` and counts every subset request."""

    def __init__(self, base: Measure):
        self.base = base
        self.ground_size = base.ground_size
        self.requests = 0

    def _value(self, mask: int) -> float:
        self.requests += 1
        return self.base.evaluate(mask)


def test_criterion_8_performance():
    v = Verdict(8, "m evaluations per distance, cached gamma matrix")
    rng = np.random.default_rng(8)
    for _ in range(200):
        m = int(rng.integers(1, 9))
        wrapped = CountingMeasure(random_measure(rng, m))
        x, y = rng.random(m), rng.random(m)
        if rng.random() < 0.3:
            y[: m // 2] = x[: m // 2]  # zero differences still take m evaluations
        choquet_distance(x, y, wrapped)
        v.check(wrapped.requests == m, f"{wrapped.requests} evaluations for m={m}")
    n, m = 200, 10
    X = rng.random((n, m))
    y = (X[:, 0] + 0.3 * rng.random(n) > 0.65).astype(int)
    t0 = time.perf_counter()
    mu = GammaMeasure(X, y)
    D = choquet_distance_matrix(X, mu)
    elapsed = time.perf_counter() - t0
    info = mu.cache_info()
    bound = n * (n - 1) // 2 * m
    v.check(info.requests <= bound, f"{info.requests} requests > {bound}")
    v.check(info.hit_rate >= 0.9, f"hit rate {info.hit_rate:.3f}")
    v.check(elapsed < 30.0, f"matrix took {elapsed:.1f}s")
    v.check(np.array_equal(D, D.T) and np.all(np.diag(D) == 0), "matrix not symmetric with zero diagonal")
    v.note(f"{info.requests} requests, {info.evaluations} evaluations, hit rate {info.hit_rate:.4f}, {elapsed:.2f}s")
    v.finish()


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
