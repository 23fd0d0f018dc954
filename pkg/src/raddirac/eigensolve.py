"""Dense generalized eigensolves, state windowing, classification, normalization."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .assembly import AssembledSystem
from .basis import basis_values

CLASSES = ("physical", "spurious", "continuum-artifact")
DIM_CAP = 2000


class NumericalFailure(RuntimeError):
    """Raised when the eigenproblem cannot be solved reliably."""


@dataclass
class EigenEntry:
    binding_energy: float
    raw_eigenvalue: float
    coefficients: np.ndarray = field(repr=False)
    residual: float
    classification: str = "physical"
    branch: str | None = None

    def record(self, with_coefficients=False) -> dict:
        out = {
            "binding_energy": self.binding_energy,
            "raw_eigenvalue": self.raw_eigenvalue,
            "residual": self.residual,
            "classification": self.classification,
        }
        if self.branch is not None:
            out["branch"] = self.branch
        if with_coefficients:
            out["coefficients"] = [float(x) for x in self.coefficients]
        return out


@dataclass
class EigenSolution:
    entries: list[EigenEntry]
    mode: str
    system: AssembledSystem | None = field(default=None, repr=False)
    solver: str = "cholesky"

    @property
    def energies(self) -> np.ndarray:
        return np.array([e.binding_energy for e in self.entries])

    def physical(self) -> list[EigenEntry]:
        return [e for e in self.entries if e.classification == "physical"]

    def record(self, with_coefficients=False) -> dict:
        return {
            "mode": self.mode,
            "solver": self.solver,
            "entries": [e.record(with_coefficients) for e in self.entries],
        }


def _equilibrate(*mats, ref):
    s = 1.0 / np.sqrt(np.abs(np.diag(ref)))
    return s, [m * s[:, None] * s[None, :] for m in mats]


def _a_orthonormal(A):
    """Lower Cholesky factor of the equilibrated A; None if A is not SPD."""
    try:
        return sla.cholesky(A, lower=True)
    except np.linalg.LinAlgError:
        return None


def _congruence(Lc, P):
    """Lc^{-1} P Lc^{-T}."""
    T = sla.solve_triangular(Lc, P, lower=True)
    T = sla.solve_triangular(Lc, T.T, lower=True)
    return 0.5 * (T + T.T)


def _qz(P, Q):
    """General QZ solve of P x = lam Q x, keeping numerically real eigenvalues."""
    lam, X = sla.eig(P, Q)
    ok = np.isfinite(lam)
    lam, X = lam[ok], X[:, ok]
    keep = np.abs(lam.imag) <= 1e-12 * np.maximum(np.abs(lam.real), 1.0)
    return lam[keep].real, X[:, keep].real


def _rq(v, P, Q):
    return float(v @ P @ v) / float(v @ Q @ v)


def solve_gep(system: AssembledSystem, count: int = 10, window: tuple[float, float] | None = None,
              overlap_tol: float = 1e-13) -> EigenSolution:
    """Solve the assembled problem and return up to ``count`` states in the window.

    All modes are reduced with the Cholesky factor of A (the Gram matrix of
    D Phi), which is well conditioned for this basis, while the plain
    overlap M is not.  In those coordinates

    ``idom``: B c = mu A c becomes a symmetric standard problem; binding
    energies come from the Rayleigh quotient c^T K c / c^T B c, equal to
    1/mu - mc^2 without the cancellation.  QZ on (B, A) is the fallback
    when A fails to factor.
    ``sdom``: A c = E^2 M c becomes the standard problem for M with
    eigenvalue 1/E^2; eps = E^2 - m^2c^4 is the Rayleigh quotient of
    (S, M), and the branch E = +sqrt(E^2) is reported, flagged ambiguous.
    ``raw``: B c = E M c; directions where the reduced M is below
    ``overlap_tol`` times its largest eigenvalue (|E| beyond ~3e6 mc^2)
    are dropped, then the binding energy is the Rayleigh quotient of (R, M).

    The default window is the mass gap (-2mc^2, 0) shrunk by 1e-8 c^2; for
    confining potentials the upper edge moves to +mc^2.
    """
    n = system.dim
    if n > DIM_CAP:
        raise NumericalFailure(f"dimension {n} exceeds cap {DIM_CAP}")
    mc2 = system.consts.mc2
    # gap margin on the electron rest-energy scale, so heavy particles keep shallow wells
    delta = 1e-8 * system.consts.c ** 2
    if window is None:
        lo = -2.0 * mc2 + delta
        hi = mc2 if system.potential.confining else -delta
    else:
        lo, hi = window
    mode = system.operator_mode
    if mode not in ("idom", "sdom", "raw"):
        raise ValueError(f"unknown mode {mode!r}")

    s = 1.0 / np.sqrt(np.diag(system.A))
    sc = lambda m: m * s[:, None] * s[None, :]
    A, B, M, K = sc(system.A), sc(system.B), sc(system.M), sc(system.K)
    Lc = _a_orthonormal(A)
    candidates = []   # (vector in equilibrated coords, binding, raw eigenvalue)
    solver = "cholesky"

    if mode == "idom":
        if Lc is None:
            mu, X = _qz(B, A)
            solver = "qz"
        else:
            mu, Y = np.linalg.eigh(_congruence(Lc, B))
            X = sla.solve_triangular(Lc.T, Y, lower=False)
        for j in np.argsort(-mu):
            if mu[j] <= 0:
                break
            v = X[:, j]
            candidates.append((v, _rq(v, K, B), float(mu[j])))
    else:
        if Lc is None:
            raise NumericalFailure("A is not positive definite")
        Mt = _congruence(Lc, M)
        if mode == "sdom":
            S = sc(system.S)
            nu, Y = np.linalg.eigh(Mt)
            X = sla.solve_triangular(Lc.T, Y, lower=False)
            for j in np.argsort(-nu):
                if nu[j] <= 0:
                    break
                v = X[:, j]
                eps = _rq(v, S, M)
                tot2 = mc2 * mc2 + eps
                if tot2 <= 0:
                    continue
                candidates.append((v, eps / (math.sqrt(tot2) + mc2), tot2))
        else:
            R = sc(system.R)
            w, U = np.linalg.eigh(Mt)
            keep = w > overlap_tol * w.max()
            Yk = U[:, keep] / np.sqrt(w[keep])
            E, Z = np.linalg.eigh(_congruence_plain(Yk, _congruence(Lc, B)))
            X = sla.solve_triangular(Lc.T, Yk @ Z, lower=False)
            solver = f"cholesky+canonical({int(keep.sum())}/{n})"
            for j in range(E.size):
                v = X[:, j]
                candidates.append((v, _rq(v, R, M), float(E[j])))

    entries = []
    for v, eb, raw in candidates:
        if not (lo < eb < hi):
            continue
        norm2 = float(v @ M @ v)
        if norm2 <= 0:
            continue
        entries.append(_entry(v, eb, raw, mode, A, B, M, s, mc2, norm2))
    entries.sort(key=lambda en: en.binding_energy)
    return EigenSolution(entries[:count], mode, system, solver)


def _congruence_plain(Y, P):
    T = Y.T @ P @ Y
    return 0.5 * (T + T.T)


def _entry(v, eb, raw, mode, A, B, M, s, mc2, norm2):
    """Mode-specific relative residual on the equilibrated pencil, then M-normalize."""
    E = eb + mc2
    if mode == "idom":
        Av = A @ v
        res = np.linalg.norm(B @ v - Av / E) / (np.linalg.norm(Av) / abs(E))
    elif mode == "sdom":
        Mv = M @ v
        res = np.linalg.norm(A @ v - E * E * Mv) / np.linalg.norm(A @ v)
    else:
        Mv = M @ v
        res = np.linalg.norm(B @ v - E * Mv) / np.linalg.norm(B @ v)
    c = s * (v / math.sqrt(norm2))
    return EigenEntry(eb, raw, c, float(res))


def fix_phase(solution: EigenSolution) -> EigenSolution:
    """Flip each eigenvector so that F > 0 near the origin."""
    sys_ = solution.system
    if sys_ is None:
        return solution
    spec = sys_.layout.upper_spec
    r0 = _small_r(spec)
    vals, _ = basis_values(spec, [r0])
    nu = sys_.layout.n_upper
    for e in solution.entries:
        F0 = float(vals[:, 0] @ e.coefficients[:nu])
        if F0 < 0:
            e.coefficients = -e.coefficients
    return solution


def _small_r(spec):
    if spec.mode == "allsm":
        return spec.L * 1e-8
    if spec.mode == "laguerre-only":
        return 1e-6 / spec.beta
    return spec.L * 1e-6


def classify_states(solution: EigenSolution, oracle: Callable[[int], float] | list | None = None,
                    tol: float = 1e-6, enriched: EigenSolution | None = None,
                    stable_tol: float = 1e-8) -> EigenSolution:
    """Label entries physical / spurious / continuum-artifact.

    With an oracle (list of reference binding energies, or callable of the
    0-based level index) an entry is physical if it lies within ``tol``
    relative of some reference level not already claimed.  Otherwise, with
    an ``enriched`` solution, an entry is physical if some enriched entry
    lies within ``stable_tol`` relative.  Entries that fail outside the
    mass gap are continuum artifacts.
    """
    mc2 = solution.system.consts.mc2 if solution.system is not None else None
    refs = None
    if oracle is not None:
        if callable(oracle):
            refs = [oracle(i) for i in range(len(solution.entries) + 5)]
        else:
            refs = list(oracle)
    claimed = set()
    for e in solution.entries:
        ok = False
        if refs is not None:
            for i, ref in enumerate(refs):
                if i not in claimed and abs(e.binding_energy - ref) <= tol * abs(ref):
                    claimed.add(i)
                    ok = True
                    break
        elif enriched is not None:
            ok = any(abs(e.binding_energy - o.binding_energy) <= stable_tol * abs(o.binding_energy)
                     for o in enriched.entries)
        else:
            ok = True
        in_gap = mc2 is None or (-2 * mc2 < e.binding_energy < 0)
        e.classification = "physical" if ok else ("spurious" if in_gap else "continuum-artifact")
    return solution


def normalize_and_sample(entry: EigenEntry, layout, r_grid) -> tuple[np.ndarray, np.ndarray]:
    """Sample F and G of a solved state on ``r_grid``.

    Coefficients are already normalized so that the integral of F^2 + G^2 is 1;
    the sign follows :func:`fix_phase`.
    """
    c = np.asarray(entry.coefficients)
    if not np.any(c):
        raise ValueError("zero coefficient vector")
    r = np.asarray(r_grid, dtype=float)
    vu, _ = basis_values(layout.upper_spec, r)
    F = c[: layout.n_upper] @ vu
    if layout.lower_spec is not None:
        vl, _ = basis_values(layout.lower_spec, r)
        G = c[layout.n_upper:] @ vl
    else:
        G = np.zeros_like(F)
    return F, G


def idom_residual(system: AssembledSystem, entry: EigenEntry) -> float:
    """||B c - mu A c|| / ||A c|| with mu = 1 / (E_b + mc^2), in unscaled matrices."""
    c = entry.coefficients
    mu = 1.0 / (entry.binding_energy + system.consts.mc2)
    Ac = system.A @ c
    return float(np.linalg.norm(system.B @ c - mu * Ac) / np.linalg.norm(Ac))
