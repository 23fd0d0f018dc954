"""Global C0 basis on [0, inf): log-Laguerre core block, scaled-Laguerre tail
block and a bridging function, plus a truncated-Legendre alternative.

Index layout for ``mode="allsm"`` (1-based, as in the public API)::

    1 .. N1              core functions on I1 = (0, L)
    N1+1 .. N1+N2        tail functions on I2 = (L, inf)
    N = N1 + N2 + 1      bridging function (nonzero on both sides)

Core functions are ``x * (L_n(t) - L_{n-1}(t))`` with ``x = r/L`` and
``t = -(gamma+1) ln x``.  For ``gamma = 4`` these are the differences
``S_n^(4,2) - S_{n-1}^(4,2)`` of log-orthogonal functions; every
``gamma`` spans the same space ``x * poly_{N1}(ln x)`` vanishing at x = 1,
and ``gamma = 0`` gives by far the best conditioned Gram matrices, so it
is the default.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .specfun import QuadratureRule, composite_legendre, graded_edges, gauss_rule, laguerre_table

MODES = ("allsm", "laguerre-only", "legendre-truncated")


@dataclass(frozen=True)
class GlobalBasisSpec:
    """Basis description.

    In ``laguerre-only`` mode L must be 0 and N1 0; the basis is
    ``Lhat_k - Lhat_{k-1}`` (k = 1..N2) on [0, inf).  In
    ``legendre-truncated`` mode the basis lives on (0, L) and has N1
    functions; N2 and beta are ignored.
    """

    L: float = 1.0
    N1: int = 40
    N2: int = 40
    beta: float = 1.0
    mode: str = "allsm"
    glof_gamma: float = 0.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown basis mode {self.mode!r}")
        if self.N1 < 0 or self.N2 < 0:
            raise ValueError("block sizes must be >= 0")
        if self.glof_gamma <= -1:
            raise ValueError("glof_gamma must exceed -1")
        if self.mode == "allsm":
            if self.L <= 0 or self.beta <= 0:
                raise ValueError("allsm needs L > 0 and beta > 0")
        elif self.mode == "laguerre-only":
            if self.beta <= 0 or self.N2 < 1:
                raise ValueError("laguerre-only needs beta > 0 and N2 >= 1")
            if self.N1 != 0 or self.L != 0:
                raise ValueError("laguerre-only uses N1 = 0 and L = 0")
        else:
            if self.L <= 0 or self.N1 < 1:
                raise ValueError("legendre-truncated needs L > 0 and N1 >= 1")

    @property
    def dim(self) -> int:
        if self.mode == "allsm":
            return self.N1 + self.N2 + 1
        if self.mode == "laguerre-only":
            return self.N2
        return self.N1

    @property
    def tail_slice(self) -> slice:
        """0-based rows of the scaled-Laguerre block."""
        if self.mode == "legendre-truncated":
            return slice(0, 0)
        return slice(self.N1, self.N1 + self.N2)

    def with_beta(self, beta: float) -> "GlobalBasisSpec":
        return GlobalBasisSpec(self.L, self.N1, self.N2, beta, self.mode, self.glof_gamma)

    @classmethod
    def slm(cls, N2: int, beta: float = 1.0) -> "GlobalBasisSpec":
        return cls(L=0.0, N1=0, N2=N2, beta=beta, mode="laguerre-only")


@dataclass(frozen=True)
class BasisEvaluation:
    index: int
    value: float
    derivative: float
    region: str


@dataclass(frozen=True)
class QuadratureOptions:
    """Knobs of the composite rules; ``refine=2`` halves every panel and
    stretches the cutoffs, roughly doubling the node count."""

    nodes_per_panel: int = 20
    refine: int = 1
    hmax: float = 4.0

    def __post_init__(self):
        if self.nodes_per_panel < 1 or self.refine < 1 or self.hmax <= 0:
            raise ValueError("invalid quadrature options")


def _laguerre_cutoff(n: int) -> float:
    # beyond the largest zero (~4n) where L_n(u)^2 e^{-u} is negligible
    return 4.0 * (n + 1) + 10.0 * math.sqrt(n + 1) + 50.0


def _core_cutoff(n: int, gamma: float) -> float:
    """Cutoff in u = ln(L/r) for core integrands e^{-u} P(t)^2, t = (gamma+1) u."""
    u = _laguerre_cutoff(n)
    if gamma == 0.0 or n == 0:
        return u
    g1 = gamma + 1.0
    lg = math.lgamma(n + 1)
    # crude bound |L_n(t)| <= e^{t/2} is too weak when t = g1 u, use t^n/n!
    while -u + 2.0 * max(0.0, n * math.log(g1 * u) - lg) > -110.0:
        u *= 1.1
    return u


def _refined_edges(U, h0, opts: QuadratureOptions):
    f = opts.refine
    return graded_edges(U * (1.0 + 0.25 * (f - 1)), h0 / f, opts.hmax / f)


def _rule_I1(spec: GlobalBasisSpec, opts: QuadratureOptions) -> QuadratureRule:
    """Rule in u = ln(L/r) on [0, U1]."""
    g1 = spec.glof_gamma + 1.0
    U = _core_cutoff(spec.N1, spec.glof_gamma)
    edges = _refined_edges(U, 1.0 / (4.0 * (spec.N1 + 1) * g1), opts)
    return composite_legendre(edges, opts.nodes_per_panel)


def _rule_I2(spec: GlobalBasisSpec, opts: QuadratureOptions) -> QuadratureRule:
    """Rule in u = beta (r - L) on [0, U2]."""
    U = _laguerre_cutoff(spec.N2)
    h0 = 1.0 / (4.0 * (spec.N2 + 1))
    # geometric grading resolves 1/r near the pole at u = -beta L
    bl = spec.beta * spec.L
    h0 = min(h0, 0.5 * bl) if bl > 0 else min(h0, 1e-3)
    return composite_legendre(_refined_edges(U, h0, opts), opts.nodes_per_panel)


def quadrature_grids(spec: GlobalBasisSpec, options: QuadratureOptions | None = None):
    """Quadrature rules transported to r.

    Returns ``(grid_I1, grid_I2)``; weights include the Jacobian so that
    ``sum(w * f(nodes))`` approximates the integral in r.  Either grid is
    ``None`` when its region is absent from the mode.  Both are composite
    Gauss-Legendre rules in a logarithmic (I1) or linear (I2) variable.
    """
    opts = options or QuadratureOptions()
    if spec.mode == "legendre-truncated":
        q = gauss_rule("gauss-legendre", spec.N1 + 20)
        r = 0.5 * spec.L * (q.nodes + 1.0)
        return QuadratureRule(r, 0.5 * spec.L * q.weights, "gauss-legendre"), None
    g2 = _rule_I2(spec, opts)
    grid2 = QuadratureRule(spec.L + g2.nodes / spec.beta, g2.weights / spec.beta, g2.kind)
    if spec.mode == "laguerre-only":
        return None, grid2
    g1 = _rule_I1(spec, opts)
    x = np.exp(-g1.nodes)
    # reverse so nodes increase in r
    grid1 = QuadratureRule((spec.L * x)[::-1], (spec.L * x * g1.weights)[::-1], g1.kind)
    return grid1, grid2


@dataclass(frozen=True)
class BasisSamples:
    """Weighted samples of the basis at quadrature nodes.

    ``val``, ``der`` and ``ovr`` hold sqrt(w) * phi, sqrt(w) * phi' and
    sqrt(w) * phi / r with shape (dim, nodes), so any inner product is a
    matrix product.  ``r`` may contain exact zeros (far end of the log
    grid); ``ovr`` is computed analytically there, never by division.
    """

    val: np.ndarray
    der: np.ndarray
    ovr: np.ndarray
    r: np.ndarray


def _core_block(N1, gamma, L, u, env_u):
    """Core values, r-derivatives and value/r at u, each times env_u = e^{-u/2}."""
    g1 = gamma + 1.0
    t = g1 * u
    v, d = laguerre_table(N1, t, envelope=0.5 / g1)
    P = v[1:] - v[:-1]
    dP = d[1:] - d[:-1]
    x = np.exp(-u)
    val = x * P
    der = (P - g1 * dP) / L
    ovr = P / L
    bridge = (x * env_u, env_u / L, env_u / L)
    return val, der, ovr, bridge


def _tail_block(N2, beta, u):
    """Lhat_k - Lhat_{k-1} (k = 1..N2) and the bridge tail at u = beta (r - L)."""
    v, d = laguerre_table(N2, u, envelope=0.5)
    sb = math.sqrt(beta)
    val = sb * (v[1:] - v[:-1])
    dl = d - 0.5 * v
    der = sb * beta * (dl[1:] - dl[:-1])
    e = np.exp(-0.5 * u)
    return val, der, (e, -0.5 * beta * e)


@lru_cache(maxsize=32)
def _core_samples(N1, gamma, L, opts: QuadratureOptions, grid_N1: int):
    q = _rule_I1(GlobalBasisSpec(L=L, N1=grid_N1, N2=0, beta=1.0, glof_gamma=gamma), opts)
    u = q.nodes
    env = np.exp(-0.5 * u)
    val, der, ovr, bridge = _core_block(N1, gamma, L, u, env)
    sw = np.sqrt(q.weights * L)
    out = tuple(a * sw for a in (val, der, ovr)) + tuple(b * sw for b in bridge) + (L * np.exp(-u),)
    for a in out:
        a.setflags(write=False)
    return out


def sample_core(spec: GlobalBasisSpec, opts: QuadratureOptions | None = None, grid_N1: int | None = None):
    """Weighted I1 samples: (val, der, ovr, bridge_val, bridge_der, bridge_ovr, r).

    The grid is the one built for ``grid_N1`` core functions (default
    ``spec.N1``), so specs of different sizes can share nodes.  Independent
    of beta and cached, so adaptive walks reuse them.
    """
    gN = spec.N1 if grid_N1 is None else max(grid_N1, spec.N1)
    return _core_samples(spec.N1, float(spec.glof_gamma), float(spec.L), opts or QuadratureOptions(), gN)


def sample_tail(spec: GlobalBasisSpec, opts: QuadratureOptions | None = None, grid_N2: int | None = None):
    """Weighted I2 samples: (val, der, ovr, bridge_val, bridge_der, bridge_ovr, r)."""
    opts = opts or QuadratureOptions()
    gN = spec.N2 if grid_N2 is None else max(grid_N2, spec.N2)
    q = _rule_I2(GlobalBasisSpec(spec.L, spec.N1, gN, spec.beta, spec.mode, spec.glof_gamma), opts)
    u = q.nodes
    r = spec.L + u / spec.beta
    val, der, (bv, bd) = _tail_block(spec.N2, spec.beta, u)
    sw = np.sqrt(q.weights / spec.beta)
    return (val * sw, der * sw, val * (sw / r), bv * sw, bd * sw, bv * (sw / r), r)


def sample_basis(spec: GlobalBasisSpec, options: QuadratureOptions | None = None,
                 grid: GlobalBasisSpec | None = None) -> BasisSamples:
    """All basis rows sampled on the concatenated quadrature grid.

    ``grid`` selects a (larger) spec whose quadrature is used instead.
    """
    opts = options or QuadratureOptions()
    grid = grid or spec
    N = spec.dim
    if spec.mode == "legendre-truncated":
        g1, _ = quadrature_grids(grid, opts)
        vals, ders = basis_values(spec, g1.nodes)
        sw = np.sqrt(g1.weights)
        return BasisSamples(vals * sw, ders * sw, vals * (sw / g1.nodes), g1.nodes)
    tv, td, to, bv2, bd2, bo2, r2 = sample_tail(spec, opts, grid.N2)
    if spec.mode == "laguerre-only":
        return BasisSamples(tv, td, to, r2)
    cv, cd, co, bv1, bd1, bo1, r1 = sample_core(spec, opts, grid.N1)
    n1, n2 = r1.size, r2.size
    out = [np.zeros((N, n1 + n2)) for _ in range(3)]
    sl = spec.tail_slice
    for arr, core, tail, b1, b2 in zip(out, (cv, cd, co), (tv, td, to), (bv1, bd1, bo1), (bv2, bd2, bo2)):
        arr[: spec.N1, :n1] = core
        arr[sl, n1:] = tail
        arr[-1, :n1] = b1
        arr[-1, n1:] = b2
    return BasisSamples(out[0], out[1], out[2], np.concatenate([r1, r2]))


def _legendre_rows(N, x):
    """P_{k+1}(x) - P_{k-1}(x), k = 1..N, and their x-derivatives."""
    P = np.zeros((N + 2, x.size))
    dP = np.zeros_like(P)
    P[0] = 1.0
    if N + 1 >= 1:
        P[1] = x
        dP[1] = 1.0
    for k in range(1, N + 1):
        P[k + 1] = ((2 * k + 1) * x * P[k] - k * P[k - 1]) / (k + 1)
        # P'_{k+1} = P'_{k-1} + (2k+1) P_k
        dP[k + 1] = dP[k - 1] + (2 * k + 1) * P[k]
    return P[2:] - P[:-2], dP[2:] - dP[:-2]


def basis_values(spec: GlobalBasisSpec, r) -> tuple[np.ndarray, np.ndarray]:
    """Unweighted values and r-derivatives of every basis function, shape (dim, len(r))."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0):
        raise ValueError("r must be non-negative")
    N = spec.dim
    vals = np.zeros((N, r.size))
    ders = np.zeros_like(vals)
    if spec.mode == "legendre-truncated":
        if np.any(r > spec.L):
            raise ValueError("r outside [0, L]")
        v, d = _legendre_rows(N, 2.0 * r / spec.L - 1.0)
        return v, d * (2.0 / spec.L)
    if spec.mode == "laguerre-only":
        v, d, _ = _tail_block(spec.N2, spec.beta, spec.beta * r)
        return v, d
    inner = r < spec.L
    outer = ~inner
    ri = r[inner]
    pos = ri > 0
    if np.any(inner):
        idx = np.flatnonzero(inner)
        # r = 0 limit: every core function and the bridge vanish
        rp = ri[pos]
        u = np.log(spec.L / rp)
        one = np.ones_like(u)
        # no e^{-u/2} envelope: basis_values is meant for moderate r
        g1 = spec.glof_gamma + 1.0
        v, d = laguerre_table(spec.N1, g1 * u)
        P = v[1:] - v[:-1]
        dP = d[1:] - d[:-1]
        x = rp / spec.L
        cols = idx[pos]
        vals[: spec.N1, cols] = x * P
        ders[: spec.N1, cols] = (P - g1 * dP) / spec.L
        vals[-1, cols] = x * one
        ders[-1, cols] = one / spec.L
        zero_cols = idx[~pos]
        ders[-1, zero_cols] = 1.0 / spec.L
        if spec.N1:
            # phi ~ x * (L_n(t) - L_{n-1}(t)), the derivative at x -> 0 diverges like ln
            ders[: spec.N1, zero_cols] = np.inf
    if np.any(outer):
        u = spec.beta * (r[outer] - spec.L)
        tv, td, (bv, bd) = _tail_block(spec.N2, spec.beta, u)
        vals[spec.tail_slice, outer] = tv
        ders[spec.tail_slice, outer] = td
        vals[-1, outer] = bv
        ders[-1, outer] = bd
    return vals, ders


def _region(spec: GlobalBasisSpec, n: int) -> str:
    if spec.mode == "legendre-truncated":
        return "I1"
    if spec.mode == "laguerre-only":
        return "I2"
    if n <= spec.N1:
        return "I1"
    if n <= spec.N1 + spec.N2:
        return "I2"
    return "both"


def eval_basis(spec: GlobalBasisSpec, n: int, r: float) -> BasisEvaluation:
    """Value and derivative of the 1-based basis function ``n`` at ``r``."""
    if not (1 <= n <= spec.dim):
        raise IndexError(f"basis index {n} outside 1..{spec.dim}")
    v, d = basis_values(spec, [r])
    return BasisEvaluation(n, float(v[n - 1, 0]), float(d[n - 1, 0]), _region(spec, n))


def legendre_truncated_basis(L: float, N: int, n: int, r: float) -> BasisEvaluation:
    """Function ``n`` of the N-term truncated Legendre basis on (0, L)."""
    spec = GlobalBasisSpec(L=L, N1=N, N2=0, mode="legendre-truncated")
    return eval_basis(spec, n, r)
