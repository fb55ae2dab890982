"""Acceptance suite: one test per criterion, each logging a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` and read the "acceptance
criteria" section at the end of the output.
"""

import io
import json
import math

import numpy as np
import pytest

from oracles import grid_mk_three_point, two_point
from vecmk import cli
from vecmk.errors import MassNotZero
from vecmk.experiments import counterexample_run, interval_bound_check, theorem_campaign
from vecmk.functions import FunctionSample, integrate
from vecmk.linalg import inner
from vecmk.measures import DiscreteVectorMeasure, dirac, dirac_difference
from vecmk.norms import hanin_norm, induced_metric, mk_norm, mkstar_norm, variation_norm
from vecmk.solvers import scalar_kr_exact
from vecmk.space import random_space, validate

SEED = 20240601


def _space(rng, m):
    return random_space(rng, m, scale=float(rng.uniform(0.3, 3.0)))


def _unit(rng, n, cplx):
    x = rng.normal(size=n) + (1j * rng.normal(size=n) if cplx else 0)
    return x / np.linalg.norm(x)


@pytest.fixture(scope="module")
def campaign():
    return theorem_campaign(seed=0, instances=200)


def test_criterion_01_dirac_mk(criterion):
    def body():
        rng = np.random.default_rng(SEED + 1)
        worst = 0.0
        for k in range(20):
            s = _space(rng, int(rng.integers(2, 9)))
            x = _unit(rng, int(rng.integers(1, 5)), cplx=k % 4 == 3)
            cert = mk_norm(dirac(s, int(rng.integers(0, s.size)), x))
            worst = max(worst, abs(cert.value - 1.0))
        return worst <= 1e-6, f"20 spaces, max |mk - 1| = {worst:.3g}"

    criterion(1, "mk(delta_t x) = 1", body)


def test_criterion_02_mkstar_dirac_difference(criterion):
    def body():
        rng = np.random.default_rng(SEED + 2)
        worst = 0.0
        for k in range(20):
            s = _space(rng, int(rng.integers(2, 9)))
            a, b = (int(v) for v in rng.choice(s.size, size=2, replace=False))
            x = _unit(rng, int(rng.integers(1, 5)), cplx=k % 4 == 3)
            cert = mkstar_norm(dirac_difference(s, a, b, x))
            worst = max(worst, abs(cert.value - s.dist[a, b]))
        return worst <= 1e-6, f"20 spaces, max |mkstar - d(a,b)| = {worst:.3g}"

    criterion(2, "mkstar(delta_a x - delta_b x) = d(a,b)", body)


def test_criterion_03_induced_mkstar_metric(criterion):
    def body():
        rng = np.random.default_rng(SEED + 3)
        worst = 0.0
        for k in range(5):
            s = _space(rng, 6)
            x = _unit(rng, 2, cplx=k % 2 == 1)
            worst = max(worst, float(np.abs(induced_metric(s, "mkstar", x) - s.dist).max()))
        return worst <= 1e-6, f"5 six-point spaces, max entry error {worst:.3g}"

    criterion(3, "induced mkstar metric = dist", body)


def test_criterion_04_two_point_closed_forms(criterion):
    def body():
        worst = 0.0
        for d in (0.1, 0.5, 1.0, 2.0, 3.0, 10.0):
            mu = DiscreteVectorMeasure(validate([[0, d], [d, 0]]), [1.0, -1.0])
            want = two_point(d)
            got = {"variation": variation_norm(mu).value, "mk": mk_norm(mu).value,
                   "mkstar": mkstar_norm(mu).value, "hanin": hanin_norm(mu).value}
            worst = max(worst, max(abs(got[k] - want[k]) for k in want))
        # second route for mk: grid search with the mass-free third point far away
        grid = 0.0
        for d in (0.5, 1.0, 2.0):
            dist = np.array([[0, d, 50], [d, 0, 50], [50, 50, 0]], float)
            grid = max(grid, abs(grid_mk_three_point(dist, np.array([1.0, -1.0, 0.0])) - 2 * d / (2 + d)))
        ok = worst <= 1e-6 and grid <= 5e-3
        return ok, f"closed forms max error {worst:.3g}; grid cross-check max error {grid:.3g}"

    criterion(4, "two-point closed forms", body)


def test_criterion_05_sandwich_campaign(criterion, campaign):
    def body():
        skip = {"gap <= 1e-6*max(1,value)", "solves converge (no NonConvergence)"}
        checks = [c for c in campaign.checks if c.claim not in skip]
        worst = min(checks, key=lambda c: c.worst_slack)
        ok = all(c.worst_slack >= -1e-6 for c in checks)
        return ok, (f"{len(checks)} claims over 200 balanced instances; "
                    f"worst slack {worst.worst_slack:.3g} ({worst.claim})")

    criterion(5, "inequality chains on 200 random measures", body)


def test_criterion_06_gap_closure(criterion, campaign):
    def body():
        gap = campaign.check("gap <= 1e-6*max(1,value)")
        conv = campaign.check("solves converge (no NonConvergence)")
        ok = gap.passed and gap.instances > 0 and conv.passed
        return ok, (f"{gap.instances} certificates, worst gap slack {gap.worst_slack:.3g}; "
                    f"{conv.instances} solves, nonconvergence {'none' if conv.passed else 'seen'}")

    criterion(6, "duality gap closure and no NonConvergence", body)


def test_criterion_07_scalar_oracles(criterion):
    def body():
        rng = np.random.default_rng(SEED + 7)
        worst_kr = worst_grid = 0.0
        for _ in range(50):
            s = _space(rng, 3)
            w = rng.uniform(-1, 1, size=3)
            wb = w - w.mean()
            bal = DiscreteVectorMeasure(s, wb)
            worst_kr = max(worst_kr, abs(mkstar_norm(bal).value - scalar_kr_exact(bal)))
            worst_grid = max(worst_grid, abs(mk_norm(DiscreteVectorMeasure(s, w)).value
                                             - grid_mk_three_point(s.dist, w)))
        ok = worst_kr <= 1e-6 and worst_grid <= 5e-3
        return ok, f"50 instances; mkstar vs exact {worst_kr:.3g}, mk vs grid {worst_grid:.3g}"

    criterion(7, "scalar oracle equivalence", body)


def test_criterion_08_counterexample(criterion):
    def body():
        rep = counterexample_run(10_000, 100)
        by_claim = {c.claim: c for c in rep.checks}
        norm_ok = by_claim["mkstar(mu^p) = ||b^p|| within gap + 1/N"].passed
        sq_ok = by_claim["| ||b^p||^2 - pi^2/6 | <= 1/N"].passed
        const_ok = by_claim["||b^p|| = ||b^1||"].passed
        late = [r["pairing"] for r in rep.rows if r["p"] >= 50]
        weak_ok = max(late) < 0.05
        detail = (f"mkstar = ||b^p||: {norm_ok}; ||b^p||^2 ~ pi^2/6: {sq_ok}; "
                  f"constant norms: {const_ok}; decreasing pairings: "
                  f"{by_claim['(b^1|b^p) strictly decreasing in p'].passed}; "
                  f"pairing < 0.05 for p >= 50: {weak_ok} "
                  f"(pairing at p=50 is {late[0]:.4f}, at p=100 {late[-1]:.4f})")
        return rep.passed and weak_ok, detail

    criterion(8, "counterexample, N=1e4, P=100", body)


def test_criterion_09_interval_bound(criterion):
    def body():
        rep = interval_bound_check(1.0, 101, 100)
        worst = min(rep.checks, key=lambda c: c.worst_slack)
        return rep.passed, (f"100 pairs on 101 points; worst slack {worst.worst_slack:.3g} "
                            f"({worst.claim}); min rho/d {rep.observations['min_ratio_rho_over_d']:.6f}")

    criterion(9, "2d/3 <= rho_MK <= d on [0, 1]", body)


def test_criterion_10_error_contract(criterion, tmp_path):
    def body():
        rng = np.random.default_rng(SEED + 10)
        raised = 0
        for k in range(20):
            s = _space(rng, int(rng.integers(2, 9)))
            n = int(rng.integers(1, 5))
            atoms = rng.uniform(-1, 1, size=(s.size, n))
            if k % 3 == 0:
                atoms = atoms + 1j * rng.uniform(-1, 1, size=atoms.shape)
            try:
                mkstar_norm(DiscreteVectorMeasure(s, atoms))
            except MassNotZero:
                raised += 1
        path = tmp_path / "dirac.json"
        path.write_text(json.dumps({"schema": "vecmk/1", "space": {"dist": [[0, 1], [1, 0]]},
                                    "measures": {"delta": {"atoms": [[1.0], [0.0]]}}}))
        err = io.StringIO()
        code = cli.main(["norm", str(path), "--measure", "delta", "--kind", "mkstar"], io.StringIO(), err)
        ok = raised == 20 and code == 2 and "MassNotZero" in err.getvalue()
        return ok, f"MassNotZero on {raised}/20 unbalanced measures; CLI exit code {code}"

    criterion(10, "mkstar on unbalanced measures", body)


def test_criterion_11_integral_identities(criterion):
    def body():
        rng = np.random.default_rng(SEED + 11)
        worst = 0.0

        def c(*shape):
            return rng.normal(size=shape) + 1j * rng.normal(size=shape)

        def err(a, b):
            return abs(a - b) / max(1.0, abs(a), abs(b))

        for _ in range(100):
            m, n = int(rng.integers(2, 9)), int(rng.integers(1, 5))
            s = random_space(rng, m)
            f, g = FunctionSample(s, c(m, n)), FunctionSample(s, c(m, n))
            mu, nu = DiscreteVectorMeasure(s, c(m, n)), DiscreteVectorMeasure(s, c(m, n))
            al, be = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
            # linear in f, conjugate-linear in mu
            worst = max(worst, err(integrate(f.scale(al) + g.scale(be), mu),
                                   al * integrate(f, mu) + be * integrate(g, mu)))
            worst = max(worst, err(integrate(f, mu.scale(al) + nu.scale(be)),
                                   np.conj(al) * integrate(f, mu) + np.conj(be) * integrate(f, nu)))
            # |int f dmu| <= ||mu|| ||f||
            excess = abs(integrate(f, mu)) - mu.total_variation() * f.sup_norm()
            worst = max(worst, excess / max(1.0, mu.total_variation() * f.sup_norm()))
            # int f d(delta_t x) = (f(t)|x)
            t, x = int(rng.integers(0, m)), c(n)
            worst = max(worst, err(integrate(f, dirac(s, t, x)), inner(f.values[t], x)))
            # rank-one product rule
            gs, ws, xv, yv = c(m), c(m), c(n), c(n)
            lhs = integrate(FunctionSample.from_scalar(s, gs, xv), DiscreteVectorMeasure.from_scalar(s, ws, yv))
            rhs = integrate(FunctionSample.from_scalar(s, gs), DiscreteVectorMeasure.from_scalar(s, ws)) * inner(xv, yv)
            worst = max(worst, err(lhs, rhs))
        return worst <= 1e-12, f"100 complex instances, worst relative defect {worst:.3g}"

    criterion(11, "integral identities", body)


def test_counterexample_tail_arithmetic():
    # the sub-claim of criterion 8 that fails, recomputed in closed form:
    # b^1 stops at index N, so (b^1|b^p) = sum_{k <= N-p+1} 1/(k (k+p-1))
    # = (H_{N-p+1} + H_{p-1} - H_N) / (p-1) by partial fractions
    N = 10_000
    H = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, N + 1))])
    for p, want in ((50, 0.0913), (100, 0.0522)):
        closed = (H[N - p + 1] + H[p - 1] - H[N]) / (p - 1)
        assert closed == pytest.approx(want, abs=5e-4)
        rep = counterexample_run(N, p)
        assert rep.observations["pairing_at_P"] == pytest.approx(closed, rel=1e-12)
    assert math.pi ** 2 / 6 == pytest.approx(1.644934, abs=1e-6)
