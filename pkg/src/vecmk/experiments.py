"""Reproductions and randomized verification campaigns.

Every inequality ``L <= R`` is checked between certified brackets: its slack
is ``upper(R) - lower(L)``, so a check fails only when the brackets prove a
violation beyond the solver gaps. Equalities ``N = c`` use the distance from
``c`` to the bracket ``[lower(N), upper(N)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameters, MassNotZero, NonConvergence
from .measures import DiscreteVectorMeasure, dirac, dirac_difference
from .norms import hanin_norm, mk_norm, mkstar_norm, variation_norm
from .solvers import NormCertificate, SolverConfig, scalar_kr_exact
from .space import interval_grid, random_space, validate

SLACK_TOL = 1e-6


@dataclass
class Check:
    claim: str
    instances: int = 0
    worst_slack: float = math.inf
    tol: float = SLACK_TOL

    def record(self, slack: float) -> None:
        self.instances += 1
        self.worst_slack = min(self.worst_slack, float(slack))

    @property
    def passed(self) -> bool:
        return self.worst_slack >= -self.tol

    def to_json(self) -> dict:
        return {"claim": self.claim, "instances": self.instances,
                "worst_slack": self.worst_slack, "passed": self.passed}


@dataclass
class CampaignReport:
    name: str
    checks: list[Check] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    seed: int | None = None
    rows: list[dict] = field(default_factory=list)
    observations: dict = field(default_factory=dict)

    def check(self, claim: str, tol: float = SLACK_TOL) -> Check:
        for c in self.checks:
            if c.claim == claim:
                return c
        c = Check(claim, tol=tol)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "config": self.config,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "observations": self.observations,
            "rows": self.rows,
        }

    def to_text(self) -> str:
        width = max([len(c.claim) for c in self.checks] + [5])
        lines = [f"{self.name} (seed={self.seed})",
                 f"{'claim':<{width}}  {'n':>5}  {'worst slack':>13}  result"]
        for c in self.checks:
            lines.append(f"{c.claim:<{width}}  {c.instances:>5}  {c.worst_slack:>13.6e}  "
                         f"{'PASS' if c.passed else 'FAIL'}")
        if self.rows:
            keys = list(self.rows[0])
            lines.append("")
            lines.append("  ".join(f"{k:>22}" for k in keys))
            for r in self.rows:
                lines.append("  ".join(f"{_fmt(r[k]):>22}" for k in keys))
        for k, v in self.observations.items():
            lines.append(f"{k}: {_fmt(v)}")
        lines.append("PASSED" if self.passed else "FAILED")
        return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _le(lhs: NormCertificate | float, rhs: NormCertificate | float, c_lhs=1.0, c_rhs=1.0) -> float:
    """Bracket-aware slack of ``c_lhs * lhs <= c_rhs * rhs``."""
    lo = lhs.lower_bound if isinstance(lhs, NormCertificate) else lhs
    up = rhs.upper_bound if isinstance(rhs, NormCertificate) else rhs
    return c_rhs * up - c_lhs * lo


def _eq(cert: NormCertificate, target: float) -> float:
    """Minus the distance from ``target`` to the certified bracket."""
    return -max(cert.lower_bound - target, target - cert.upper_bound, 0.0)


# -- counterexample -----------------------------------------------------------


def shifted_sequence(N: int, p: int, length: int) -> np.ndarray:
    """``b^p``: ``p - 1`` zeros followed by ``1, 1/2, ..., 1/N``, padded to ``length``."""
    b = np.zeros(length)
    b[p - 1:p - 1 + N] = 1.0 / np.arange(1, N + 1)
    return b


def counterexample_run(N: int, P: int, config: SolverConfig | None = None) -> CampaignReport:
    """Constant MK* norms with vanishing weak pairings on a two-point space.

    ``mu^p = delta_1 b^p - delta_2 b^p`` with ``d(1, 2) = 1``, where ``b^p``
    is the harmonic sequence shifted right by ``p - 1``. Each ``b^p`` keeps
    its first ``N`` nonzero terms, so all of them have the same norm and the
    common ambient dimension is ``N + P - 1``.
    """
    if not (isinstance(N, (int, np.integer)) and isinstance(P, (int, np.integer))) or not N >= P >= 2:
        raise BadParameters(f"need integers N >= P >= 2, got N={N!r}, P={P!r}")
    config = config or SolverConfig()
    space = validate([[0.0, 1.0], [1.0, 0.0]], labels=["1", "2"])
    dim = N + P - 1
    tail = 1.0 / N
    target = math.pi ** 2 / 6
    report = CampaignReport("counterexample", config={"N": N, "P": P, **config.to_dict()})
    c_norm = report.check("mkstar(mu^p) = ||b^p|| within gap + 1/N", tol=0.0)
    c_sq = report.check("| ||b^p||^2 - pi^2/6 | <= 1/N", tol=0.0)
    c_const = report.check("||b^p|| = ||b^1||", tol=1e-12)
    c_dec = report.check("(b^1|b^p) strictly decreasing in p", tol=0.0)

    b1 = shifted_sequence(N, 1, dim)
    norm1 = float(np.linalg.norm(b1))
    prev = None
    for p in range(1, P + 1):
        bp = shifted_sequence(N, p, dim)
        nb = float(np.linalg.norm(bp))
        mu = DiscreteVectorMeasure(space, np.stack([bp, -bp]))
        cert = mkstar_norm(mu, config)
        pairing = float(b1 @ bp)
        c_norm.record(tail + _eq(cert, nb))
        c_sq.record(tail - abs(nb * nb - target))
        c_const.record(-abs(nb - norm1))
        if prev is not None:
            c_dec.record(prev - pairing if pairing < prev else -abs(pairing - prev) - 1.0)
        prev = pairing
        report.rows.append({"p": p, "norm_b": nb, "mkstar_lower": cert.lower_bound,
                            "mkstar_upper": cert.upper_bound, "pairing": pairing})
    report.observations["pairing_at_P"] = prev
    if P >= 50:
        report.observations["pairing_at_50"] = report.rows[49]["pairing"]
    return report


# -- interval discretization --------------------------------------------------


def interval_bound_check(A: float, m: int, pairs: int, seed: int = 0,
                         config: SolverConfig | None = None) -> CampaignReport:
    """Check ``2 d / (2 + A) <= rho_MK <= d`` on sampled pairs of a grid of ``[0, A]``."""
    if not (A > 0) or not (isinstance(m, (int, np.integer)) and m >= 2):
        raise BadParameters(f"need A > 0 and m >= 2, got A={A!r}, m={m!r}")
    total = m * (m - 1) // 2
    if not (isinstance(pairs, (int, np.integer)) and 1 <= pairs <= total):
        raise BadParameters(f"pairs must be in 1..{total}, got {pairs!r}")
    config = config or SolverConfig()
    space = interval_grid(A, m)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(m, 1)
    chosen = np.sort(rng.choice(total, size=pairs, replace=False))
    report = CampaignReport("interval_bound", seed=seed,
                            config={"A": A, "m": m, "pairs": pairs, **config.to_dict()})
    c_low = report.check("2 d/(2 + A) <= rho_MK")
    c_weak = report.check("d/(1 + A) <= rho_MK")
    c_up = report.check("rho_MK <= d")
    ratios = []
    for k in chosen:
        a, b = int(iu[k]), int(ju[k])
        d = float(space.dist[a, b])
        cert = mk_norm(dirac_difference(space, a, b, [1.0]), config)
        c_low.record(_le(2 * d / (2 + A), cert))
        c_weak.record(_le(d / (1 + A), cert))
        c_up.record(_le(cert, d))
        ratios.append(cert.value / d)
    report.observations["min_ratio_rho_over_d"] = float(min(ratios))
    report.observations["max_ratio_rho_over_d"] = float(max(ratios))
    return report


# -- randomized theorem campaign ---------------------------------------------


def _random_atoms(rng: np.random.Generator, m: int, n: int, cplx: bool, balanced: bool) -> np.ndarray:
    atoms = rng.uniform(-1.0, 1.0, size=(m, n))
    if cplx:
        atoms = atoms + 1j * rng.uniform(-1.0, 1.0, size=(m, n))
    if balanced:
        atoms = atoms - atoms.mean(axis=0)
    return atoms


def _random_unit(rng: np.random.Generator, n: int, cplx: bool) -> np.ndarray:
    x = rng.normal(size=n) + (1j * rng.normal(size=n) if cplx else 0)
    return x / np.linalg.norm(x)


class _Runner:
    """Calls a norm and turns NonConvergence into a recorded failure."""

    def __init__(self, report: CampaignReport, config: SolverConfig):
        self.report = report
        self.config = config
        self.failures = report.check("solves converge (no NonConvergence)", tol=0.0)

    def __call__(self, fn, mu) -> NormCertificate:
        try:
            cert = fn(mu, self.config)
            self.failures.record(0.0)
        except NonConvergence as exc:
            self.failures.record(-1.0)
            cert = exc.certificate
        return cert


def _check_balanced(report: CampaignReport, run: _Runner, mu: DiscreteVectorMeasure,
                    rng: np.random.Generator) -> float:
    """All chains for one balanced measure; returns the observed ``rho_MK / d``."""
    space = mu.space
    m, n, cplx = space.size, mu.dim, mu.field == "complex"
    D = space.diameter
    var = variation_norm(mu)
    mk = run(mk_norm, mu)
    ms = run(mkstar_norm, mu)
    h = run(hanin_norm, mu)

    report.check("mk <= variation").record(_le(mk, var))
    chain = min(_le(mk, ms), _le(ms, var, c_rhs=D))
    report.check("mk <= mkstar <= variation*diam").record(chain)
    report.check("mkstar <= (diam+1)*mk").record(_le(ms, mk, c_rhs=D + 1))
    report.check("mk <= mkstar <= variation*diam (second chain as printed)").record(chain)
    report.check("mkstar <= max(diam,1)*hanin").record(_le(ms, h, c_rhs=max(D, 1.0)))
    report.check("hanin <= mkstar").record(_le(h, ms))
    report.check("mk/max(diam,1) <= hanin <= (diam+1)*mk").record(
        min(_le(mk, h, c_lhs=1.0 / max(D, 1.0)), _le(h, mk, c_rhs=D + 1)))
    report.check("hanin <= variation").record(_le(h, var))
    for cert in (mk, ms, h):
        report.check("gap <= 1e-6*max(1,value)", tol=0.0).record(
            1e-6 * max(1.0, cert.value) - cert.gap)

    # norm axioms: homogeneity and triangle inequality
    alpha = complex(rng.normal(), rng.normal()) if cplx else float(rng.normal()) * 2
    nu = DiscreteVectorMeasure(space, _random_atoms(rng, m, n, cplx, balanced=True))
    for fn, base in ((mk_norm, mk), (mkstar_norm, ms), (hanin_norm, h)):
        scaled = run(fn, mu.scale(alpha))
        a = abs(alpha)
        report.check("|alpha| N(mu) = N(alpha mu)").record(
            min(_le(scaled, base, c_rhs=a), _le(base, scaled, c_lhs=a)))
        n_nu = run(fn, nu)
        n_sum = run(fn, mu + nu)
        report.check("N(mu+nu) <= N(mu) + N(nu)").record(
            base.upper_bound + n_nu.upper_bound - n_sum.lower_bound)

    a, b = (int(v) for v in rng.choice(m, size=2, replace=False))
    x = _random_unit(rng, n, cplx)
    dd = dirac_difference(space, a, b, x)
    d = float(space.dist[a, b])
    mk_dd = run(mk_norm, dd)
    report.check("mk(delta_a x - delta_b x) <= d(a,b)").record(_le(mk_dd, d))
    report.check("mkstar(delta_a x - delta_b x) = d(a,b)").record(_eq(run(mkstar_norm, dd), d))

    if n == 1 and not cplx and m <= 4:
        exact = scalar_kr_exact(mu)
        report.check("mkstar = scalar_kr_exact (scalar, m <= 4)").record(_eq(ms, exact))
    return mk_dd.value / d


def _check_unbalanced(report: CampaignReport, run: _Runner, mu: DiscreteVectorMeasure) -> None:
    var = variation_norm(mu)
    mk = run(mk_norm, mu)
    h = run(hanin_norm, mu)
    report.check("mk <= variation").record(_le(mk, var))
    report.check("hanin <= variation").record(_le(h, var))
    try:
        mkstar_norm(mu, run.config)
        slack = -1.0
    except MassNotZero:
        slack = 0.0
    report.check("mkstar raises MassNotZero when unbalanced", tol=0.0).record(slack)


def verify_measures(measures: dict[str, DiscreteVectorMeasure], seed: int = 0,
                    config: SolverConfig | None = None) -> CampaignReport:
    """Run the campaign checks on given measures instead of random ones."""
    config = config or SolverConfig(seed=seed)
    rng = np.random.default_rng(seed)
    report = CampaignReport("verify", seed=seed, config={"measures": list(measures), **config.to_dict()})
    run = _Runner(report, config)
    for mu in measures.values():
        if mu.is_balanced():
            _check_balanced(report, run, mu, rng)
        else:
            _check_unbalanced(report, run, mu)
    return report


def theorem_campaign(seed: int = 0, instances: int = 200, max_points: int = 8, max_dim: int = 4,
                     unbalanced: int | None = None,
                     config: SolverConfig | None = None) -> CampaignReport:
    """Random spaces and measures checked against every norm inequality.

    ``instances`` balanced measures go through all chains; ``unbalanced``
    extra measures (default a quarter as many) check the claims that do not
    need zero mass. One zero measure, one Dirac measure and one Dirac
    difference on a space of diameter at most 1 are always included.
    """
    if max_points < 2 or max_dim < 1 or instances < 0:
        raise BadParameters("need max_points >= 2, max_dim >= 1, instances >= 0")
    config = config or SolverConfig(seed=seed)
    unbalanced = instances // 4 if unbalanced is None else unbalanced
    rng = np.random.default_rng(seed)
    report = CampaignReport("theorem_campaign", seed=seed, config={
        "instances": instances, "unbalanced": unbalanced, "max_points": max_points,
        "max_dim": max_dim, **config.to_dict()})
    run = _Runner(report, config)
    ratios = []

    def draw_space():
        m = int(rng.integers(2, max_points + 1))
        n = int(rng.integers(1, max_dim + 1))
        cplx = bool(rng.random() < 0.2)
        space = random_space(rng, m, scale=float(rng.uniform(0.3, 3.0)))
        return space, m, n, cplx

    for _ in range(instances):
        space, m, n, cplx = draw_space()
        mu = DiscreteVectorMeasure(space, _random_atoms(rng, m, n, cplx, balanced=True))
        ratios.append(_check_balanced(report, run, mu, rng))

    for _ in range(unbalanced):
        space, m, n, cplx = draw_space()
        mu = DiscreteVectorMeasure(space, _random_atoms(rng, m, n, cplx, balanced=False))
        _check_unbalanced(report, run, mu)

    # degenerate and closed-form instances
    space, m, n, cplx = draw_space()
    zero = DiscreteVectorMeasure.zero(space, n)
    worst = max(abs(c.upper_bound) for c in
                (variation_norm(zero), run(mk_norm, zero), run(mkstar_norm, zero), run(hanin_norm, zero)))
    report.check("zero measure has all norms 0", tol=0.0).record(-worst)

    t = int(rng.integers(0, m))
    x = _random_unit(rng, n, cplx)
    delta = dirac(space, t, x)
    report.check("mk(delta_t x) = 1").record(_eq(run(mk_norm, delta), 1.0))
    report.check("hanin(delta_t x) = 1").record(_eq(run(hanin_norm, delta), 1.0))

    small = random_space(rng, m)
    small = validate(small.dist / small.diameter * float(rng.uniform(0.3, 1.0)))
    a, b = (int(v) for v in rng.choice(m, size=2, replace=False))
    dd = dirac_difference(small, a, b, x)
    report.check("hanin(delta_a x - delta_b x) = d(a,b) when diam <= 1").record(
        _eq(run(hanin_norm, dd), float(small.dist[a, b])))

    if ratios:
        report.observations["min_ratio_mk_over_d"] = float(min(ratios))
        report.observations["max_ratio_mk_over_d"] = float(max(ratios))
    return report
