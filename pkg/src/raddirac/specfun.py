"""Orthogonal-function kernels and Gauss quadrature rules.

Everything here is a pure function of its inputs.  The vectorised
``laguerre_table`` is the workhorse used by the basis module; the scalar
functions mirror it for single-point evaluation and testing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "QuadratureRule",
    "laguerre_poly_sequence",
    "laguerre_poly_deriv_sequence",
    "laguerre_table",
    "scaled_laguerre_function",
    "glof",
    "gauss_rule",
    "composite_legendre",
    "erf",
]

RULE_KINDS = ("gauss-laguerre", "gauss-legendre", "log-mapped-composite")


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of a quadrature rule.

    For ``gauss-laguerre`` the weights include the factor ``exp(-x)``; the
    same rule with that factor divided back out is kept in
    ``scaled_weights`` (``w * exp(x)``), which stays finite for large rules
    where the plain weights underflow.
    """

    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    scaled_weights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if len(self.nodes) != len(self.weights) or len(self.nodes) < 1:
            raise ValueError("nodes and weights must be non-empty and of equal length")

    @property
    def count(self) -> int:
        return len(self.nodes)

    def integrate(self, values) -> float:
        """Apply the rule to samples of the integrand at ``nodes``."""
        return float(np.dot(self.weights, values))


def _check_finite(t):
    if not np.all(np.isfinite(t)):
        raise ValueError("argument must be finite")


def laguerre_poly_sequence(n_max: int, t: float) -> list[float]:
    """L_0(t), ..., L_{n_max}(t) by the three-term recurrence."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    _check_finite(t)
    out = [1.0]
    if n_max >= 1:
        out.append(1.0 - t)
    for n in range(1, n_max):
        out.append(((2 * n + 1 - t) * out[n] - n * out[n - 1]) / (n + 1))
    return out


def laguerre_poly_deriv_sequence(n_max: int, t: float) -> list[float]:
    """L_0'(t), ..., L_{n_max}'(t).

    Uses L_{n+1}' = L_n' - L_n, which needs no division by t and so is
    valid at the origin.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    _check_finite(t)
    vals = laguerre_poly_sequence(n_max, t)
    out = [0.0]
    for n in range(n_max):
        out.append(out[n] - vals[n])
    return out


def laguerre_table(n_max: int, t, envelope: float = 0.0):
    """Vectorised Laguerre values and derivatives times ``exp(-envelope*t)``.

    Returns two arrays of shape ``(n_max + 1, len(t))``.  Seeding the
    recurrence with the envelope keeps high degrees representable where
    ``L_n(t)`` itself would overflow.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    _check_finite(t)
    vals = np.empty((n_max + 1, t.size))
    ders = np.empty_like(vals)
    e = np.exp(-envelope * t)
    vals[0] = e
    ders[0] = 0.0
    if n_max >= 1:
        vals[1] = (1.0 - t) * e
        ders[1] = -e
    for n in range(1, n_max):
        vals[n + 1] = ((2 * n + 1 - t) * vals[n] - n * vals[n - 1]) / (n + 1)
        ders[n + 1] = ders[n] - vals[n]
    return vals, ders


def scaled_laguerre_function(n: int, beta: float, r: float) -> tuple[float, float]:
    """Orthonormal scaled Laguerre function sqrt(beta) L_n(beta r) exp(-beta r / 2).

    Returns ``(value, d/dr value)``.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if n < 0 or r < 0:
        raise ValueError("need n >= 0 and r >= 0")
    u = beta * r
    vals, ders = laguerre_table(n, [u], envelope=0.5)
    v = math.sqrt(beta) * vals[n, 0]
    d = math.sqrt(beta) * beta * (ders[n, 0] - 0.5 * vals[n, 0])
    return float(v), float(d)


def glof(n: int, gamma: float, mu: float, x: float) -> tuple[float, float]:
    """Generalised log-orthogonal function S_n^{(gamma,mu)}(x) and its x-derivative.

    S_n^{(gamma,mu)}(x) = x**((gamma-mu)/2) * L_n(-(gamma+1) log x), 0 < x <= 1.
    """
    if gamma <= -1:
        raise ValueError("gamma must exceed -1")
    if not (0.0 < x <= 1.0):
        raise ValueError("x must lie in (0, 1]")
    if n < 0:
        raise ValueError("n must be >= 0")
    p = 0.5 * (gamma - mu)
    t = -(gamma + 1.0) * math.log(x)
    ln = laguerre_poly_sequence(n, t)[n]
    dln = laguerre_poly_deriv_sequence(n, t)[n]
    xp = x**p
    value = xp * ln
    deriv = p * x ** (p - 1.0) * ln + xp * dln * (-(gamma + 1.0) / x)
    return value, deriv


def _newton_polish(x, f_and_df, sweeps=2):
    for _ in range(sweeps):
        f, df = f_and_df(x)
        x = x - f / df
    return x


def _gauss_laguerre(count: int) -> QuadratureRule:
    # scipy's nodes are accurate to a few ulps; our own Newton polish loses
    # ~1e-13 relative on the smallest nodes, which the weights amplify
    x, _ = special.roots_laguerre(count)
    # w e^x = 1 / (x (L_n'(x) e^{-x/2})^2), finite for any count
    _, ders = laguerre_table(count, x, envelope=0.5)
    scaled = 1.0 / (x * ders[count] ** 2)
    with np.errstate(under="ignore"):
        w = scaled * np.exp(-x)
    return QuadratureRule(x, w, "gauss-laguerre", scaled_weights=scaled)


def _legendre_and_deriv(n, x):
    p0 = np.ones_like(x)
    if n == 0:
        return p0, np.zeros_like(x)
    p1 = x.copy()
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


def _gauss_legendre(count: int) -> QuadratureRule:
    if count == 1:
        return QuadratureRule(np.array([0.0]), np.array([2.0]), "gauss-legendre")
    k = np.arange(1, count, dtype=float)
    off = k / np.sqrt(4.0 * k * k - 1.0)
    x = eigh_tridiagonal(np.zeros(count), off, eigvals_only=True)
    x = _newton_polish(np.sort(x), lambda z: _legendre_and_deriv(count, z))
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    _, dp = _legendre_and_deriv(count, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    return QuadratureRule(x, w, "gauss-legendre")


def composite_legendre(edges, order: int, kind: str = "log-mapped-composite") -> QuadratureRule:
    """Composite Gauss-Legendre rule over consecutive panels ``edges``."""
    edges = np.asarray(edges, dtype=float)
    base = _gauss_legendre(order)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (half * base.nodes + 0.5 * (a + b)).ravel()
    weights = (half * base.weights).ravel()
    return QuadratureRule(nodes, weights, kind)


def graded_edges(T: float, h0: float, hmax: float, growth: float = 2.0) -> np.ndarray:
    """Panel edges on [0, T]: widths start at h0 and grow geometrically to hmax."""
    if not (T > 0 and h0 > 0 and hmax > 0 and growth >= 1.0):
        raise ValueError("invalid panel layout")
    edges = [0.0]
    h = h0
    while edges[-1] < T:
        edges.append(min(edges[-1] + h, T))
        h = min(h * growth, hmax)
    return np.asarray(edges)


def gauss_rule(kind: str, count: int, **params) -> QuadratureRule:
    """Build a quadrature rule.

    ``gauss-laguerre`` takes its nodes from scipy; ``gauss-legendre`` uses
    the Golub-Welsch eigenvalue construction followed by Newton polishing.
    ``log-mapped-composite`` returns a rule in t = -(gamma+1) log x over
    [0, T]; here ``count`` is the number of Gauss-Legendre nodes per panel
    and ``params`` may set ``T`` (default 85), ``h0``, ``hmax`` and
    ``growth`` (panel widths double by default).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if kind == "gauss-laguerre":
        return _gauss_laguerre(count)
    if kind == "gauss-legendre":
        return _gauss_legendre(count)
    if kind == "log-mapped-composite":
        T = params.get("T", 85.0)
        edges = graded_edges(T, params.get("h0", 0.05), params.get("hmax", T), params.get("growth", 2.0))
        return composite_legendre(edges, count)
    raise ValueError(f"unknown rule kind {kind!r}")


def erf(x):
    """Error function (thin wrapper over scipy.special.erf)."""
    return special.erf(x)
