"""Certified convex solvers behind the norm computations.

Every norm computed here is the value of a pair of finite-dimensional convex
programs over the points of a finite metric space:

* primal: maximise ``<f, mu> = sum_i (f_i | mu_i)`` over functions ``f`` in a
  ball defined by a sup-norm bound and/or a Lipschitz bound;
* dual: minimise a weighted sum of norms over decompositions
  ``mu = rho + div(pi)`` into a residual ``rho`` (one vector per point) and a
  flow ``pi`` (one vector per pair of points).

Both sides are solved together by ADMM on the dual. The scaled multiplier of
the ADMM iteration gives the primal iterate through one least-squares step.
Every 50 iterations the constraints active at the current iterates are used
for an exact solve (least squares, NNLS, or Newton's method on the reduced
dual for vector-valued problems); its results are kept only when they
improve the certified bounds. Each reported bracket is certified: the lower bound is the objective of a
function that is rescaled onto the feasible set using its exact sup norm and
Lipschitz constant, and the upper bound is the cost of a decomposition whose
divergence residual has been repaired exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog, nnls

from .errors import InputError, NonConvergence, NotBalanced, NotScalar
from .functions import FunctionSample, lip_constant_of
from .linalg import REAL, complexify_to_real, realify, row_norms
from .measures import DiscreteVectorMeasure
from .space import FiniteMetricSpace

# -- configuration and result types -----------------------------------------


@dataclass(frozen=True)
class SolverConfig:
    tol_gap: float = 1e-8
    max_iter: int = 50_000
    seed: int = 0
    feas_tol: float = 1e-9

    @classmethod
    def from_dict(cls, d: dict | None) -> "SolverConfig":
        d = dict(d or {})
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InputError(f"unknown solver option(s): {sorted(unknown)}")
        cfg = cls(**d)
        if not (cfg.tol_gap > 0 and cfg.feas_tol > 0 and int(cfg.max_iter) >= 1):
            raise InputError(f"invalid solver configuration {d}")
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LipOnly:
    """The set ``{||f||_L <= r}``."""
    r: float = 1.0


@dataclass(frozen=True)
class BLSplit:
    """The set ``{||f(t)|| <= s for all t, ||f||_L <= r}``."""
    s: float
    r: float


@dataclass(frozen=True)
class BLUnit:
    """The bounded-Lipschitz unit ball ``{||f|| + ||f||_L <= 1}``."""


@dataclass
class FlowField:
    """Vector flow ``flow[i, j]`` sent from point ``i`` to point ``j``."""

    flow: np.ndarray

    def divergence(self) -> np.ndarray:
        """Net inflow at each point: ``sum_j (flow[j, i] - flow[i, j])``."""
        return self.flow.sum(axis=0) - self.flow.sum(axis=1)

    def cost(self, space: FiniteMetricSpace) -> float:
        return float((space.dist * row_norms(self.flow)).sum())


@dataclass
class NormCertificate:
    value: float
    lower_bound: float
    upper_bound: float
    gap: float
    primal_witness: FunctionSample | None = None
    dual_witness: FlowField | None = None
    dual_residual: np.ndarray | None = field(default=None, repr=False)
    iterations: int = 0
    converged: bool = True
    kind: str = ""

    @classmethod
    def exact(cls, value: float, **kw) -> "NormCertificate":
        return cls(value, value, value, 0.0, **kw)

    def scaled(self, c: float) -> "NormCertificate":
        """Certificate for the measure multiplied by ``c >= 0``."""
        return NormCertificate(
            self.value * c, self.lower_bound * c, self.upper_bound * c, self.gap * c,
            self.primal_witness,
            None if self.dual_witness is None else FlowField(self.dual_witness.flow * c),
            None if self.dual_residual is None else self.dual_residual * c,
            self.iterations, self.converged, self.kind)

    def to_json(self) -> dict:
        from .linalg import vector_to_json

        out = {
            "kind": self.kind,
            "value": self.value,
            "lower": self.lower_bound,
            "upper": self.upper_bound,
            "gap": self.gap,
            "witness_f": (None if self.primal_witness is None
                          else [vector_to_json(v) for v in self.primal_witness.values]),
            "iterations": self.iterations,
        }
        if not self.converged:
            out["converged"] = False
        return out


# -- graph operators ----------------------------------------------------------


def geodesic_edges(dist: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Pairs ``(i, j)``, ``i < j``, not shortcut by any third point.

    A pair with ``d(i, k) + d(k, j) <= d(i, j)`` carries a Lipschitz
    constraint implied by the two shorter ones, and a flow on it can be
    rerouted through ``k`` at no extra cost, so it is dropped.
    """
    m = dist.shape[0]
    shortcut = np.zeros((m, m), dtype=bool)
    for k in range(m):
        via = dist[:, k, None] + dist[None, k, :]
        hit = via <= dist * (1 + rtol)
        hit[k, :] = False
        hit[:, k] = False
        shortcut |= hit
    i, j = np.triu_indices(m, 1)
    keep = ~shortcut[i, j]
    return np.stack([i[keep], j[keep]], axis=1)


@dataclass(frozen=True, eq=False)
class _Operators:
    edges: np.ndarray      # (E, 2)
    weights: np.ndarray    # (E,) edge lengths
    offset: int            # number of residual rows stacked before the edge rows
    M: np.ndarray          # (m, offset + E): x -> rho + div(pi)
    Q: np.ndarray          # I - M^T (M M^T)^+ M, projector onto ker M
    P: np.ndarray          # M^T (M M^T)^+
    F: np.ndarray          # (M M^T)^+ M, least-squares recovery of f from M^T f


@lru_cache(maxsize=64)
def _operators(space: FiniteMetricSpace, with_residual: bool) -> _Operators:
    m = space.size
    edges = geodesic_edges(space.dist)
    E = len(edges)
    B = np.zeros((m, E))
    B[edges[:, 1], np.arange(E)] = 1.0
    B[edges[:, 0], np.arange(E)] = -1.0
    if with_residual:
        M = np.hstack([np.eye(m), B])
        K = np.linalg.inv(M @ M.T)
    else:
        M = B
        K = np.linalg.pinv(M @ M.T)
    P = M.T @ K
    Q = np.eye(M.shape[1]) - P @ M
    return _Operators(edges, space.dist[edges[:, 0], edges[:, 1]].copy(),
                      m if with_residual else 0, M, Q, P, K @ M)


def flow_from_edges(space: FiniteMetricSpace, edges: np.ndarray, pi: np.ndarray) -> FlowField:
    flow = np.zeros((space.size, space.size, pi.shape[1]))
    flow[edges[:, 0], edges[:, 1]] = pi
    return FlowField(flow)


# -- ADMM engine --------------------------------------------------------------


def _mcshane(f: np.ndarray, known: np.ndarray, dist: np.ndarray, clip: bool) -> np.ndarray:
    """Extend scalar ``f`` from the points ``known`` without raising its Lipschitz constant or sup."""
    if len(known) < 1 or len(known) == len(f):
        return f
    fk = f[known]
    dk = dist[np.ix_(known, known)]
    i, j = np.triu_indices(len(known), 1)
    L = float((np.abs(fk[i] - fk[j]) / dk[i, j]).max()) if i.size else 0.0
    ext = (fk[:, None] + L * dist[known, :]).min(axis=0)
    if clip:
        S = float(np.abs(fk).max())
        ext = np.clip(ext, -S, S)
    out = ext
    out[known] = fk
    return out


def _soft_threshold(V: np.ndarray, t: np.ndarray) -> np.ndarray:
    nv = row_norms(V)
    with np.errstate(divide="ignore", invalid="ignore"):
        shrink = np.where(nv > t, 1.0 - t / nv, 0.0)
    return V * shrink[:, None]


def _split_radius(a: np.ndarray, b: np.ndarray, w: np.ndarray, lam: float) -> float:
    """Optimal ``alpha`` for projecting onto ``{max_i ||a_i|| + max_e ||b_e||/w_e <= lam}``.

    The nearest point clips every ``a_i`` to radius ``alpha`` and every
    ``b_e`` to radius ``(lam - alpha) w_e``; the squared distance is convex
    and piecewise quadratic in ``alpha``, so the root of its piecewise linear
    derivative is found exactly between consecutive breakpoints.
    """
    def slope(al):
        al = np.atleast_1d(al)[:, None]
        return (np.maximum(b[None, :] - (lam - al) * w[None, :], 0.0) @ w
                - np.maximum(a[None, :] - al, 0.0).sum(axis=1))

    bps = np.concatenate([[0.0, lam], a, lam - b / w])
    bps = np.unique(np.clip(bps, 0.0, lam))
    s = slope(bps)
    if s[0] >= 0:
        return 0.0
    if s[-1] <= 0:
        return lam
    k = int(np.argmax(s >= 0))
    a0, a1, s0, s1 = bps[k - 1], bps[k], s[k - 1], s[k]
    return float(a0 - s0 * (a1 - a0) / (s1 - s0))


class _Problem:
    """One instance of the paired primal/dual programs, in normalised units."""

    def __init__(self, space: FiniteMetricSpace, constraint, b: np.ndarray):
        self.space = space
        self.constraint = constraint
        self.ops = _operators(space, not isinstance(constraint, LipOnly))
        self.b = b
        ops = self.ops
        m = space.size
        if isinstance(constraint, LipOnly):
            self.row_w = constraint.r * ops.weights
        elif isinstance(constraint, BLSplit):
            self.row_w = np.concatenate([np.full(m, float(constraint.s)),
                                         constraint.r * ops.weights])
        else:
            self.row_w = None
        self.c = ops.P @ b

    # dual objective -----------------------------------------------------

    def prox(self, V: np.ndarray, lam: float) -> np.ndarray:
        if self.row_w is not None:
            return _soft_threshold(V, lam * self.row_w)
        o = self.ops.offset
        na, nb = row_norms(V[:o]), row_norms(V[o:])
        w = self.ops.weights
        alpha = _split_radius(na, nb, w, lam)
        Pj = V.copy()
        with np.errstate(divide="ignore", invalid="ignore"):
            ca = np.where(na > alpha, alpha / na, 1.0)
            rb = (lam - alpha) * w
            cb = np.where(nb > rb, rb / nb, 1.0)
        Pj[:o] *= ca[:, None]
        Pj[o:] *= cb[:, None]
        return V - Pj

    def upper(self, X: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        """Cost of a decomposition, after repairing its divergence residual.

        Returns the cost, the repaired residual rows and the repaired edge rows
        (the star repair for flow-only problems is folded into ``extra``).
        """
        ops, o = self.ops, self.ops.offset
        e = self.b - ops.M @ X
        rho = X[:o] + e if o else None
        pi = X[o:]
        flow_cost = float(ops.weights @ row_norms(pi))
        if isinstance(self.constraint, LipOnly):
            # route the residual from point 0 along direct pairs
            extra = float(self.space.dist[0, 1:] @ row_norms(e[1:]))
            return self.constraint.r * (flow_cost + extra), e, pi
        res_cost = float(row_norms(rho).sum())
        if isinstance(self.constraint, BLSplit):
            return self.constraint.s * res_cost + self.constraint.r * flow_cost, rho, pi
        return max(res_cost, flow_cost), rho, pi

    # primal side --------------------------------------------------------

    def dual_norm(self, f: np.ndarray) -> float:
        """Gauge of the feasible set at ``f`` (feasible iff <= 1), over all pairs."""
        lip = lip_constant_of(f, self.space.dist)
        c = self.constraint
        if isinstance(c, LipOnly):
            return _ratio(lip, c.r)
        sup = float(row_norms(f).max())
        if isinstance(c, BLSplit):
            return max(_ratio(sup, c.s), _ratio(lip, c.r))
        return sup + lip

    # active-set polish -------------------------------------------------

    def _incidence(self, rho_rows: np.ndarray, edge_rows: np.ndarray) -> np.ndarray:
        m = self.space.size
        G = np.zeros((len(rho_rows) + len(edge_rows), m))
        G[np.arange(len(rho_rows)), rho_rows] = 1.0
        k = len(rho_rows) + np.arange(len(edge_rows))
        G[k, self.ops.edges[edge_rows, 1]] = 1.0
        G[k, self.ops.edges[edge_rows, 0]] = -1.0
        return G

    def polish_primal(self, Z: np.ndarray, f_ref: np.ndarray) -> np.ndarray | None:
        """Function satisfying the alignment conditions on the support of ``Z``.

        A nonzero residual row forces ``f_i`` along it at the sup-norm bound;
        a nonzero edge row forces ``f_b - f_a`` along it at the Lipschitz
        bound. The conditions are solved in the least-squares sense, staying
        as close as possible to ``f_ref`` in the free directions. Scalar
        functions are then re-extended off the touched points by McShane's
        formula, which keeps both the sup norm and the Lipschitz constant.
        """
        o, w = self.ops.offset, self.ops.weights
        nz = row_norms(Z) > 0
        rho_rows = np.flatnonzero(nz[:o])
        edge_rows = np.flatnonzero(nz[o:])
        if len(rho_rows) + len(edge_rows) == 0:
            return None
        G = self._incidence(rho_rows, edge_rows)
        Gp = np.linalg.pinv(G)
        n = Z.shape[1]
        a = np.zeros((G.shape[0], n))
        b = np.zeros((G.shape[0], n))
        if len(rho_rows):
            Zr = Z[rho_rows]
            a[:len(rho_rows)] = Zr / row_norms(Zr)[:, None]
        if len(edge_rows):
            Ze = Z[o + edge_rows]
            b[len(rho_rows):] = w[edge_rows, None] * Ze / row_norms(Ze)[:, None]
        c = self.constraint
        if isinstance(c, LipOnly):
            rhs = c.r * b
        elif isinstance(c, BLSplit):
            rhs = c.s * a + c.r * b
        else:
            # sup budget S and Lipschitz budget 1 - S: pick S with the smallest residual
            p = a - G @ (Gp @ a)
            q = b - G @ (Gp @ b)
            den = float(np.sum((p - q) ** 2))
            S = 0.5 if den == 0 else float(np.clip(-np.sum(q * (p - q)) / den, 0.0, 1.0))
            rhs = S * a + (1.0 - S) * b
        f = f_ref + Gp @ (rhs - G @ f_ref)
        if n == 1:
            touched = np.union1d(rho_rows, self.ops.edges[edge_rows].ravel())
            f = _mcshane(f[:, 0], touched, self.space.dist, o > 0)[:, None]
        return f

    def polish_dual(self, f: np.ndarray, rtol: float = 1e-7) -> np.ndarray | None:
        """Decomposition supported on the constraints that are tight at ``f``."""
        ops, o = self.ops, self.ops.offset
        m, n = f.shape
        c = self.constraint
        diff = f[ops.edges[:, 1]] - f[ops.edges[:, 0]]
        nd = row_norms(diff)
        ratio = nd / ops.weights
        lip = float(ratio.max()) if len(ratio) else 0.0
        edge_rows = np.flatnonzero((ratio >= lip * (1 - rtol)) & (nd > 0)) if lip > 0 else np.array([], int)
        if o:
            nf = row_norms(f)
            sup = float(nf.max())
            rho_rows = np.flatnonzero((nf >= sup * (1 - rtol)) & (nf > 0)) if sup > 0 else np.array([], int)
        else:
            rho_rows = np.array([], int)
        k1, k2 = len(rho_rows), len(edge_rows)
        if k1 + k2 == 0:
            return None
        cols = np.zeros((m, n, k1 + k2))
        for col, i in enumerate(rho_rows):
            cols[i, :, col] = f[i] / nf[i]
        for col, e in enumerate(edge_rows, start=k1):
            v = diff[e] / nd[e]
            cols[ops.edges[e, 1], :, col] += v
            cols[ops.edges[e, 0], :, col] -= v
        A = cols.reshape(m * n, k1 + k2)
        rhs = self.b.reshape(-1)
        if isinstance(c, BLUnit) and k1 and k2:
            # equal residual and flow costs, as required when both budgets are used
            bal = np.concatenate([np.ones(k1), -ops.weights[edge_rows]])
            scale = np.abs(A).max()
            A = np.vstack([A, scale * bal])
            rhs = np.append(rhs, 0.0)
        mags, _ = nnls(A, rhs, maxiter=50 * (k1 + k2) + 100)
        X = np.zeros((o + len(ops.edges), n))
        for col, i in enumerate(rho_rows):
            X[i] = mags[col] * f[i] / nf[i]
        for col, e in enumerate(edge_rows, start=k1):
            X[o + e] = mags[col] * diff[e] / nd[e]
        return X

    def newton_refine(self, Z: np.ndarray, f_ref: np.ndarray, steps: int = 8,
                      max_size: int = 1500):
        """Newton's method on the dual restricted to the support of ``Z``.

        Minimises ``sum_k c_k ||y_k||`` subject to ``G^T y = b`` over the
        nonzero rows of ``Z``; the multipliers of the equality constraint are
        the matching function. Vector-valued problems only: for scalars the
        restricted problem is a degenerate linear program.
        Returns ``(f, X)`` candidates, either of which may be ``None``.
        """
        o, m, n = self.ops.offset, self.space.size, Z.shape[1]
        rows = np.flatnonzero(row_norms(Z) > 1e-14 * max(row_norms(Z).max(), 1e-300))
        k = len(rows)
        if n == 1 or k == 0 or (k + m) * n > max_size:
            return None, None
        if self.row_w is not None:
            cw = self.row_w[rows]
        else:
            g = self.dual_norm(f_ref)
            S = float(row_norms(f_ref).max()) / g if g > 0 else 0.5
            cw = np.concatenate([np.full(o, S), (1.0 - S) * self.ops.weights])[rows]
        G = self.ops.M[:, rows].T
        A = np.kron(G.T, np.eye(n))
        Y = Z[rows].copy()
        lam = None
        for _ in range(steps):
            ny = row_norms(Y)
            keep = ny > 1e-13 * ny.max()
            u = np.zeros_like(Y)
            u[keep] = Y[keep] / ny[keep, None]
            H = np.zeros((k * n, k * n))
            for i in np.flatnonzero(keep):
                sl = slice(i * n, (i + 1) * n)
                H[sl, sl] = cw[i] * (np.eye(n) - np.outer(u[i], u[i])) / ny[i]
            grad = (cw[:, None] * u).ravel()
            K = np.block([[H, A.T], [A, np.zeros((m * n, m * n))]])
            rhs = np.concatenate([-grad, (self.b - G.T @ Y).ravel()])
            sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
            step = sol[:k * n].reshape(k, n)
            lam = sol[k * n:].reshape(m, n)
            phi = float(cw @ row_norms(Y))
            t = 1.0
            while t > 1e-3 and float(cw @ row_norms(Y + t * step)) > phi + 1e-15:
                t *= 0.5
            Y = Y + t * step
            if np.abs(step).max() * t <= 1e-14 * max(np.abs(Y).max(), 1e-300):
                break
        X = np.zeros((o + len(self.ops.edges), n))
        X[rows] = Y
        return (None if lam is None else -lam), X

    def lower(self, f: np.ndarray) -> tuple[float, np.ndarray]:
        g = self.dual_norm(f)
        if not np.isfinite(g) or g <= 0:
            return 0.0, np.zeros_like(f)
        val = float(np.sum(f * self.b))
        f = f * (np.sign(val) / g if val != 0 else 1.0 / g)
        return abs(val) / g, f


def _polish(prob: _Problem, Z: np.ndarray, low, high):
    """Alternate active-set polishing between the primal and the dual side.

    A dual support read off near-tight constraints (at increasingly loose
    tolerances) is fed back to the primal solve, since a least-squares fit
    with a slightly wrong support still yields a valid, if weaker, bound.
    Only improvements of the certified bounds are kept.
    """
    def try_primal(support_rows, low):
        fp = prob.polish_primal(support_rows, low[1])
        if fp is not None:
            lo, fp = prob.lower(fp)
            if lo > low[0]:
                return lo, fp
        return low

    def try_dual(f, rtol, high):
        Xp = prob.polish_dual(f, rtol)
        if Xp is not None:
            up = prob.upper(Xp)[0]
            if up < high[0]:
                return (up, Xp), Xp
        return high, Xp

    low = try_primal(Z, low)
    if high[0] - low[0] > 1e-15 * max(1.0, high[0]):
        f_n, X_n = prob.newton_refine(Z, low[1])
        if f_n is not None:
            lo, f_n = prob.lower(f_n)
            if lo > low[0]:
                low = (lo, f_n)
        if X_n is not None:
            up = prob.upper(X_n)[0]
            if up < high[0]:
                high = (up, X_n)
    for rtol in (1e-9, 1e-6, 1e-3):
        high, Xp = try_dual(low[1], rtol, high)
        if high[0] - low[0] <= 1e-15 * max(1.0, high[0]):
            break
        if Xp is not None:
            low = try_primal(Xp, low)
            high, _ = try_dual(low[1], 1e-9, high)
    return low, high


def _ratio(a: float, b: float) -> float:
    if b > 0:
        return a / b
    return 0.0 if a <= 1e-15 else np.inf


def solve(space: FiniteMetricSpace, atoms: np.ndarray, constraint,
          config: SolverConfig | None = None, kind: str = "") -> NormCertificate:
    """Certified value of ``sup{<f, mu> : f in constraint set}`` for real atoms.

    For :class:`LipOnly` the atoms must be balanced; the mean atom is removed
    before solving so that flows can carry the measure exactly.
    """
    config = config or SolverConfig()
    atoms = np.asarray(atoms, dtype=float)
    if atoms.ndim != 2 or atoms.shape[0] != space.size:
        raise InputError("atoms must be an (m, n) array")
    m, n = atoms.shape
    tv = float(row_norms(atoms).sum())
    if tv == 0.0:
        return NormCertificate.exact(
            0.0, primal_witness=FunctionSample(space, np.zeros((m, n))),
            dual_witness=FlowField(np.zeros((m, m, n))), kind=kind)

    b = atoms / tv
    if isinstance(constraint, LipOnly):
        b = b - b.mean(axis=0)
    prob = _Problem(space, constraint, b)
    ops = prob.ops
    Q, c = ops.Q, prob.c

    X = c.copy()
    Z = X.copy()
    U = np.zeros_like(X)
    tau = 1.0 / max(float(np.median(ops.weights)), 1e-12)
    relax = 1.6
    check_every = 10
    polish_every = 50
    adapt_until = max(200, config.max_iter // 5)

    best_lo, best_f = 0.0, np.zeros((m, n))
    best_up, best_X = np.inf, None
    it = 0
    converged = False
    while it < config.max_iter:
        it += 1
        X = Q @ (Z - U) + c
        Xh = relax * X + (1 - relax) * Z
        Z_old = Z
        Z = prob.prox(Xh + U, 1.0 / tau)
        U = U + Xh - Z

        if it % check_every and it != config.max_iter:
            continue
        Xf = Q @ Z + c
        up = prob.upper(Xf)[0]
        if up < best_up:
            best_up, best_X = up, Xf
        lo, f = prob.lower(ops.F @ (tau * U))
        if lo > best_lo:
            best_lo, best_f = lo, f
        if it % polish_every == 0:
            (best_lo, best_f), (best_up, best_X) = _polish(
                prob, Z, (best_lo, best_f), (best_up, best_X))
        if best_up - best_lo <= config.tol_gap * max(1.0, tv * 0.5 * (best_up + best_lo)) / tv:
            converged = True
            break
        if it <= adapt_until:
            r_prim = np.linalg.norm(X - Z)
            r_dual = tau * np.linalg.norm(Z - Z_old)
            if r_prim > 10 * r_dual:
                tau *= 2.0
                U /= 2.0
            elif r_dual > 10 * r_prim:
                tau /= 2.0
                U *= 2.0

    _, rho, pi = prob.upper(best_X)
    flow = flow_from_edges(space, ops.edges, pi * tv)
    if isinstance(constraint, LipOnly):
        flow.flow[0, 1:] += rho[1:] * tv
        rho = None
        # the star repair may cancel against existing flow; report what the witness costs
        best_up = min(best_up, constraint.r * flow.cost(space) / tv)
    else:
        rho = rho * tv
    lo, up = best_lo * tv, max(best_up, best_lo) * tv
    cert = NormCertificate(
        0.5 * (lo + up), lo, up, up - lo,
        primal_witness=FunctionSample(space, best_f),
        dual_witness=flow, dual_residual=rho,
        iterations=it, converged=converged, kind=kind)
    if not converged:
        raise NonConvergence(
            f"gap {cert.gap:.3e} above tolerance after {it} iterations", cert)
    return cert


# -- public operations --------------------------------------------------------


def _real_atoms(mu: DiscreteVectorMeasure) -> np.ndarray:
    if mu.field != REAL:
        raise InputError("solvers take real measures; embed complex ones with to_real()")
    return np.asarray(mu.atoms, dtype=float)


def maximize_linear_over_ball(mu: DiscreteVectorMeasure, constraint,
                              config: SolverConfig | None = None) -> NormCertificate:
    """Certified ``sup{<f, mu> : f in constraint set}`` for a real measure.

    ``constraint`` is :class:`LipOnly`, :class:`BLSplit` or :class:`BLUnit`.
    The Lipschitz-only supremum is finite only for balanced measures.
    """
    if isinstance(constraint, LipOnly) and not mu.is_balanced():
        raise NotBalanced("the Lipschitz-ball supremum is infinite for nonzero total mass")
    if isinstance(constraint, BLSplit) and (constraint.s < 0 or constraint.r < 0):
        raise InputError("BLSplit budgets must be nonnegative")
    if isinstance(constraint, LipOnly) and constraint.r < 0:
        raise InputError("Lipschitz radius must be nonnegative")
    return solve(mu.space, _real_atoms(mu), constraint, config)


def beckmann_min(mu: DiscreteVectorMeasure, config: SolverConfig | None = None) -> NormCertificate:
    """Minimum of ``sum d_ij ||pi_ij||`` over flows with divergence ``mu``.

    Solved jointly with its dual, the supremum of ``<f, mu>`` over
    1-Lipschitz ``f``; the certificate brackets both.
    """
    if not mu.is_balanced():
        raise NotBalanced("a flow can only carry a measure of zero total mass")
    return solve(mu.space, _real_atoms(mu), LipOnly(1.0), config, kind="beckmann")


def _projection_kkt(a: np.ndarray, x: np.ndarray, pairs: list, inc_pair: np.ndarray,
                    inc_ball: np.ndarray, dist: np.ndarray, r: float, s: float | None,
                    tol: float) -> np.ndarray | None:
    """Exact projection from the constraints Dykstra's increments mark as active.

    Newton's method on the KKT system with those constraints as equalities;
    negative multipliers are dropped and the solve repeated. Returns ``None``
    unless the result is feasible with nonnegative multipliers, in which case
    it is the projection.
    """
    m, n = x.shape
    scale = max(1.0, float(np.abs(a).max()))
    diffs = np.array([x[i] - x[j] for i, j in pairs]).reshape(len(pairs), n)
    nd2 = np.einsum("ij,ij->i", diffs, diffs)
    act = [e for e in range(len(pairs)) if np.abs(inc_pair[e]).max() > 1e-13 * scale and nd2[e] > 0]
    lam = {e: float(inc_pair[e, 0] @ diffs[e]) / nd2[e] for e in act}
    balls = []
    if s is not None:
        nb2 = np.einsum("ij,ij->i", x, x)
        balls = [i for i in range(m) if np.abs(inc_ball[i]).max() > 1e-13 * scale and nb2[i] > 0]
    mu = {i: float(inc_ball[i] @ x[i]) / nb2[i] for i in balls} if balls else {}
    if m * n + len(act) + len(balls) > 3000:
        return None
    for _ in range(4):
        z = x.copy()
        lv = np.array([lam[e] for e in act])
        mv = np.array([mu[i] for i in balls])
        for _ in range(30):
            k1, k2 = len(act), len(balls)
            N = m * n
            J = np.zeros((N + k1 + k2, N + k1 + k2))
            F = np.zeros(N + k1 + k2)
            J[:N, :N] = np.eye(N)
            F[:N] = (z - a).ravel()
            for c, e in enumerate(act):
                i, j = pairs[e]
                d = z[i] - z[j]
                si, sj = slice(i * n, (i + 1) * n), slice(j * n, (j + 1) * n)
                F[si] += lv[c] * d
                F[sj] -= lv[c] * d
                blk = lv[c] * np.eye(n)
                J[si, si] += blk
                J[sj, sj] += blk
                J[si, sj] -= blk
                J[sj, si] -= blk
                J[si, N + c] = d
                J[sj, N + c] = -d
                J[N + c, si] = d
                J[N + c, sj] = -d
                F[N + c] = 0.5 * (d @ d - (r * dist[i, j]) ** 2)
            for c, i in enumerate(balls):
                si = slice(i * n, (i + 1) * n)
                F[si] += mv[c] * z[i]
                J[si, si] += mv[c] * np.eye(n)
                J[si, N + k1 + c] = z[i]
                J[N + k1 + c, si] = z[i]
                F[N + k1 + c] = 0.5 * (z[i] @ z[i] - s * s)
            if np.abs(F).max() <= 1e-15 * scale * scale:
                break
            step = np.linalg.lstsq(J, -F, rcond=None)[0]
            z = z + step[:N].reshape(m, n)
            lv = lv + step[N:N + k1]
            mv = mv + step[N + k1:]
        neg_e = [e for c, e in enumerate(act) if lv[c] < 0]
        neg_b = [i for c, i in enumerate(balls) if mv[c] < 0]
        if not neg_e and not neg_b:
            break
        lam = {e: max(lv[c], 0.0) for c, e in enumerate(act)}
        mu = {i: max(mv[c], 0.0) for c, i in enumerate(balls)}
        act = [e for e in act if e not in neg_e]
        balls = [i for i in balls if i not in neg_b]
    else:
        return None
    if not np.all(np.isfinite(z)) or np.abs(F).max() > 1e-10 * scale * scale:
        return None
    if lip_constant_of(z, dist) > r + tol:
        return None
    if s is not None and float(row_norms(z).max()) > s + tol:
        return None
    return z


def _dykstra(x: np.ndarray, dist: np.ndarray, r: float, s: float | None,
             tol: float, max_sweeps: int, polish_every: int = 50) -> np.ndarray:
    m = x.shape[0]
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    inc_pair = np.zeros((len(pairs), 2, x.shape[1]))
    inc_ball = np.zeros_like(x)
    a = x
    x = x.copy()
    for sweep in range(1, max_sweeps + 1):
        start = x.copy()
        for e, (i, j) in enumerate(pairs):
            yi = x[i] + inc_pair[e, 0]
            yj = x[j] + inc_pair[e, 1]
            diff = yi - yj
            nd = float(np.linalg.norm(diff))
            lim = r * dist[i, j]
            if nd > lim:
                step = 0.5 * (nd - lim) / nd * diff
                xi, xj = yi - step, yj + step
            else:
                xi, xj = yi, yj
            inc_pair[e, 0] = yi - xi
            inc_pair[e, 1] = yj - xj
            x[i], x[j] = xi, xj
        if s is not None:
            y = x + inc_ball
            ny = row_norms(y)
            with np.errstate(divide="ignore", invalid="ignore"):
                x = y * np.where(ny > s, s / ny, 1.0)[:, None]
            inc_ball = y - x
        violation = lip_constant_of(x, dist) - r
        if s is not None:
            violation = max(violation, float(row_norms(x).max()) - s)
        if violation <= tol and np.abs(x - start).max() <= tol:
            return x
        if sweep % polish_every == 0:
            z = _projection_kkt(a, x, pairs, inc_pair, inc_ball, dist, r, s, tol)
            if z is not None:
                return z
    raise NonConvergence(f"Dykstra projection did not settle in {max_sweeps} sweeps")


def project_lip_ball(f: FunctionSample, r: float, *, sup_radius: float | None = None,
                     tol: float = 1e-10, max_sweeps: int = 100_000) -> FunctionSample:
    """Nearest function with Lipschitz constant at most ``r``.

    Dykstra's alternating projections over the pairwise sets
    ``{||f_i - f_j|| <= r d_ij}`` (and the balls ``{||f_i|| <= sup_radius}``
    when given); each pairwise step moves the two values symmetrically toward
    their midpoint.
    """
    if r < 0 or (sup_radius is not None and sup_radius < 0):
        raise InputError("radii must be nonnegative")
    if f.lip_constant() <= r and (sup_radius is None or f.sup_norm() <= sup_radius):
        return f
    vals = np.asarray(f.values)
    x = _dykstra(np.array(complexify_to_real(vals), dtype=float), f.space.dist, float(r),
                 sup_radius, tol, max_sweeps)
    return FunctionSample(f.space, realify(x) if np.iscomplexobj(vals) else x)


# -- exact scalar oracle ------------------------------------------------------


def _prufer_trees(m: int):
    """All labelled spanning trees of ``K_m``, as edge lists, in Pruefer order."""
    if m == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(m), repeat=m - 2):
        degree = [1] * m
        for v in seq:
            degree[v] += 1
        edges = []
        for v in seq:
            leaf = degree.index(1)
            edges.append((leaf, v))
            degree[leaf] -= 1
            degree[v] -= 1
        u, w = [i for i in range(m) if degree[i] == 1]
        edges.append((u, w))
        yield edges


def _kr_vertex_enumeration(w: np.ndarray, dist: np.ndarray) -> tuple[float, np.ndarray]:
    m = len(w)
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=m - 1)))
    i, j = np.triu_indices(m, 1)
    best, best_f = -np.inf, None
    for edges in _prufer_trees(m):
        adj = {v: [] for v in range(m)}
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        f = np.zeros((len(signs), m))
        order, seen, k = [0], {0}, 0
        for v in order:
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    order.append(u)
                    f[:, u] = f[:, v] + signs[:, k] * dist[v, u]
                    k += 1
        ok = np.all(np.abs(f[:, i] - f[:, j]) <= dist[i, j] * (1 + 1e-12), axis=1)
        if not ok.any():
            continue
        vals = np.where(ok, f @ w, -np.inf)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, best_f = float(vals[k]), f[k]
    return best, best_f


def _kr_transport_lp(w: np.ndarray, dist: np.ndarray) -> float:

    m = len(w)
    src, dst = np.clip(w, 0, None), np.clip(-w, 0, None)
    total = 0.5 * (src.sum() + dst.sum())
    src *= total / src.sum()
    dst *= total / dst.sum()
    A = np.zeros((2 * m, m * m))
    for k in range(m):
        A[k, k * m:(k + 1) * m] = 1.0
        A[m + k, k::m] = 1.0
    res = linprog(dist.ravel(), A_eq=A, b_eq=np.concatenate([src, dst]),
                  bounds=(0, None), method="highs")
    if res.status != 0:
        raise NonConvergence(f"transport LP failed: {res.message}")
    return float(res.fun)


def scalar_kr_exact(mu: DiscreteVectorMeasure, *, return_witness: bool = False):
    """Exact ``max{sum f_i mu_i : |f_i - f_j| <= d_ij}`` for a balanced scalar measure.

    Up to six points the polytope vertices are enumerated directly: a vertex
    pins ``f_0 = 0`` and makes ``m - 1`` constraints tight along a spanning
    tree. Larger spaces fall back to the transport linear program.
    """
    if mu.dim != 1 or mu.field != REAL:
        raise NotScalar("exact oracle needs a real scalar measure")
    if not mu.is_balanced():
        raise NotBalanced("the Lipschitz-ball supremum is infinite for nonzero total mass")
    w = mu.atoms[:, 0] - mu.atoms[:, 0].mean()
    if not np.any(w):
        return (0.0, np.zeros(len(w))) if return_witness else 0.0
    if mu.space.size <= 6:
        val, f = _kr_vertex_enumeration(w, mu.space.dist)
        return (val, f) if return_witness else val
    if return_witness:
        raise InputError("witness only available for spaces of at most six points")
    return _kr_transport_lp(w, mu.space.dist)
