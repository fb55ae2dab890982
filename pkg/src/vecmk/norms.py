"""The four norms on discrete vector measures and the metrics they induce on T.

* variation: ``sum_i ||mu_i||``;
* MK: ``sup{|int f dmu| : ||f|| + ||f||_L <= 1}``;
* MK*: ``sup{|int f dmu| : ||f||_L <= 1}``, finite only on balanced measures;
* Hanin: ``inf{||nu||*_MK + ||mu - nu|| : nu balanced}``.

Complex measures are embedded in the real space of twice the dimension
before solving: multiplying ``f`` by a unit scalar changes neither ``||f||``
nor ``||f||_L``, so the supremum of ``|int f dmu|`` equals that of its real
part. Witness functions are mapped back to the complex field.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import MassNotZero, NonConvergence, NotUnitVector, UnknownName
from .functions import FunctionSample, integrate
from .linalg import COMPLEX, REAL, as_vector, basis_vector, realify, row_norms
from .measures import DiscreteVectorMeasure, dirac_difference
from .solvers import (
    BLSplit,
    BLUnit,
    FlowField,
    LipOnly,
    NormCertificate,
    SolverConfig,
    maximize_linear_over_ball,
)
from .space import FiniteMetricSpace

UNIT_TOL = 1e-12


class NormKind(str, enum.Enum):
    VARIATION = "variation"
    MK = "mk"
    MKSTAR = "mkstar"
    HANIN = "hanin"

    @classmethod
    def parse(cls, name: "str | NormKind") -> "NormKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "").replace("-", "").replace("*", "star")
        for kind in cls:
            if kind.value == key:
                return kind
        raise UnknownName(f"unknown norm kind {name!r}; expected one of "
                          f"{[k.value for k in cls]}")


def _complex_back(cert: NormCertificate) -> NormCertificate:
    f = cert.primal_witness
    if f is not None:
        f = FunctionSample(f.space, realify(f.values))
    flow = None if cert.dual_witness is None else FlowField(realify(cert.dual_witness.flow))
    rho = None if cert.dual_residual is None else realify(cert.dual_residual)
    return NormCertificate(cert.value, cert.lower_bound, cert.upper_bound, cert.gap,
                           f, flow, rho, cert.iterations, cert.converged, cert.kind)


def _solve(mu: DiscreteVectorMeasure, constraint, config: SolverConfig | None,
           kind: NormKind) -> NormCertificate:
    cplx = mu.field == COMPLEX
    try:
        cert = maximize_linear_over_ball(mu.to_real(), constraint, config)
    except NonConvergence as exc:
        cert = exc.certificate
        if cert is not None:
            cert.kind = kind.value
            if cplx:
                cert = _complex_back(cert)
        raise NonConvergence(str(exc), cert) from None
    cert.kind = kind.value
    return _complex_back(cert) if cplx else cert


def variation_norm(mu: DiscreteVectorMeasure) -> NormCertificate:
    """``|mu|(T)``, exact. The witness ``f_i = mu_i / ||mu_i||`` attains it."""
    norms = row_norms(mu.atoms)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(norms[:, None] > 0, mu.atoms / norms[:, None], 0)
    return NormCertificate.exact(float(norms.sum()), primal_witness=FunctionSample(mu.space, f),
                                 kind=NormKind.VARIATION.value)


def mk_norm(mu: DiscreteVectorMeasure, config: SolverConfig | None = None) -> NormCertificate:
    """Supremum of ``|int f dmu|`` over the bounded-Lipschitz unit ball."""
    return _solve(mu, BLUnit(), config, NormKind.MK)


def mkstar_norm(mu: DiscreteVectorMeasure, config: SolverConfig | None = None, *,
                extended: bool = False) -> NormCertificate:
    """Supremum of ``|int f dmu|`` over 1-Lipschitz ``f``.

    Any constant can be added to ``f``, so the value is infinite unless the
    total mass is zero. That case raises :class:`MassNotZero`, or returns an
    infinite certificate when ``extended`` is set.
    """
    if not mu.is_balanced():
        if extended:
            return NormCertificate(np.inf, np.inf, np.inf, 0.0, kind=NormKind.MKSTAR.value)
        raise MassNotZero(
            f"total mass {np.linalg.norm(mu.total_mass()):.3e} is not zero; "
            "the modified MK norm is infinite")
    return _solve(mu, LipOnly(1.0), config, NormKind.MKSTAR)


def hanin_norm(mu: DiscreteVectorMeasure, config: SolverConfig | None = None) -> NormCertificate:
    """``inf{||nu||*_MK + ||mu - nu||}`` over balanced ``nu``.

    With ``nu = div(pi)`` this is the flat-norm problem; its dual is the
    supremum of ``<f, mu>`` over ``||f|| <= 1, ||f||_L <= 1``, which is what
    gets solved.
    """
    return _solve(mu, BLSplit(1.0, 1.0), config, NormKind.HANIN)


def norm(mu: DiscreteVectorMeasure, kind: "NormKind | str",
         config: SolverConfig | None = None) -> NormCertificate:
    kind = NormKind.parse(kind)
    if kind is NormKind.VARIATION:
        return variation_norm(mu)
    if kind is NormKind.MK:
        return mk_norm(mu, config)
    if kind is NormKind.MKSTAR:
        return mkstar_norm(mu, config)
    return hanin_norm(mu, config)


def weak_seminorm(f: FunctionSample, mu: DiscreteVectorMeasure) -> float:
    """``p_f(mu) = |int f dmu|``."""
    return abs(integrate(f, mu))


def _unit_vector(x, n_default: int = 1) -> np.ndarray:
    x = basis_vector(n_default, 0) if x is None else as_vector(x)
    nx = float(np.linalg.norm(x))
    if abs(nx - 1.0) > UNIT_TOL:
        raise NotUnitVector(f"x must have norm 1, got {nx!r}")
    return x


def induced_metric_certificates(space: FiniteMetricSpace, kind: "NormKind | str", x=None,
                                config: SolverConfig | None = None,
                                workers: int = 1) -> dict[tuple[int, int], NormCertificate]:
    """Certificates of ``p(delta_t x - delta_s x)`` for every pair ``t < s``."""
    kind = NormKind.parse(kind)
    x = _unit_vector(x)
    pairs = [(i, j) for i in range(space.size) for j in range(i + 1, space.size)]

    def one(pair):
        return norm(dirac_difference(space, pair[0], pair[1], x), kind, config)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            certs = list(pool.map(one, pairs))
    else:
        certs = [one(p) for p in pairs]
    return dict(zip(pairs, certs))


def induced_metric_bounds(space: FiniteMetricSpace, kind: "NormKind | str", x=None,
                          config: SolverConfig | None = None,
                          workers: int = 1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(value, lower, upper)`` matrices of the induced metric."""
    certs = induced_metric_certificates(space, kind, x, config, workers)
    m = space.size
    out = np.zeros((3, m, m))
    for (i, j), c in certs.items():
        out[:, i, j] = out[:, j, i] = (c.value, c.lower_bound, c.upper_bound)
    return out[0], out[1], out[2]


def induced_metric(space: FiniteMetricSpace, kind: "NormKind | str", x=None,
                   config: SolverConfig | None = None, workers: int = 1) -> np.ndarray:
    """Matrix of ``rho_p(t, s) = p(delta_t x - delta_s x)`` for a unit vector ``x``.

    ``x`` defaults to the first basis vector. Only the upper triangle is
    solved; pairs are independent and run on ``workers`` threads.
    """
    return induced_metric_bounds(space, kind, x, config, workers)[0]


__all__ = [
    "NormKind", "variation_norm", "mk_norm", "mkstar_norm", "hanin_norm", "norm",
    "weak_seminorm", "induced_metric", "induced_metric_bounds", "induced_metric_certificates",
    "REAL", "COMPLEX",
]
