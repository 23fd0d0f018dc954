"""Galerkin matrices of the radial Dirac operator over a spinor basis.

Spinor DOF ``i < n_upper`` is (phi_i, 0); DOF ``n_upper + j`` is (0, phi_j).
With D = D' + mc^2 sigma_z, where D' carries the potential and the
kinetic terms, the assembled matrices are

    A = <D Phi, D Phi>          B = <Phi, D Phi>          M = <Phi, Phi>
    K = A - mc^2 B              (IDOM Rayleigh numerator, binding scale)
    S = A - m^2 c^4 M           (SDOM, shifted squared operator)
    R = B - mc^2 M              (raw operator, binding scale)

K, S and R are accumulated from D' directly, so none of them suffers the
cancellation of subtracting c^2-sized numbers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .basis import GlobalBasisSpec, QuadratureOptions, sample_core, sample_tail, sample_basis
from .potentials import PhysicsConstants, Potential

OPERATOR_MODES = ("idom", "sdom", "raw")


@dataclass(frozen=True)
class SpinorLayout:
    """Upper (F) and lower (G) component bases; ``lower_spec=None`` means k_lower = 0."""

    upper_spec: GlobalBasisSpec
    lower_spec: GlobalBasisSpec | None = None

    def __post_init__(self):
        lo = self.lower_spec
        if lo is not None:
            up = self.upper_spec
            if (up.mode, up.L, up.beta, up.glof_gamma) != (lo.mode, lo.L, lo.beta, lo.glof_gamma):
                raise ValueError("upper and lower specs must share mode, L, beta and gamma")

    @classmethod
    def balanced(cls, spec: GlobalBasisSpec) -> "SpinorLayout":
        return cls(spec, spec)

    @property
    def n_upper(self) -> int:
        return self.upper_spec.dim

    @property
    def k_lower(self) -> int:
        return 0 if self.lower_spec is None else self.lower_spec.dim

    @property
    def dim(self) -> int:
        return self.n_upper + self.k_lower

    @property
    def grid_spec(self) -> GlobalBasisSpec:
        """Spec whose quadrature is large enough for both components."""
        up, lo = self.upper_spec, self.lower_spec or self.upper_spec
        return GlobalBasisSpec(up.L, max(up.N1, lo.N1), max(up.N2, lo.N2), up.beta, up.mode, up.glof_gamma)

    def with_beta(self, beta: float) -> "SpinorLayout":
        lo = None if self.lower_spec is None else self.lower_spec.with_beta(beta)
        return SpinorLayout(self.upper_spec.with_beta(beta), lo)


def split_dim(dim: int, template: GlobalBasisSpec) -> GlobalBasisSpec:
    """A spec of the template's kind with total dimension ``dim``.

    In allsm mode the core and tail blocks share the DOFs as evenly as
    possible (core gets the extra one).
    """
    if template.mode == "allsm":
        if dim < 1:
            raise ValueError("allsm needs dim >= 1")
        n1 = (dim - 1 + 1) // 2
        return GlobalBasisSpec(template.L, n1, dim - 1 - n1, template.beta, "allsm", template.glof_gamma)
    if template.mode == "laguerre-only":
        return GlobalBasisSpec.slm(dim, template.beta)
    return GlobalBasisSpec(template.L, dim, 0, template.beta, "legendre-truncated")


@dataclass(frozen=True)
class AssembledSystem:
    A: np.ndarray
    B: np.ndarray
    M: np.ndarray
    K: np.ndarray
    layout: SpinorLayout
    operator_mode: str
    consts: PhysicsConstants
    potential: Potential
    kappa: int
    S: np.ndarray | None = field(default=None, repr=False)
    R: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def symmetry_error(self) -> float:
        """max|B - B^T| / max|B| before symmetrisation."""
        return self._b_asym


def apply_dirac(pot: Potential, kappa: int, consts: PhysicsConstants, f, g, fp, gp, r):
    """Pointwise action of the radial Dirac operator on (f, g) with derivatives (f', g')."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("apply_dirac needs r > 0")
    V = pot.evaluate(r)
    c, mc2 = consts.c, consts.mc2
    upper = (V + mc2) * f - c * (gp - kappa * g / r)
    lower = c * (fp + kappa * f / r) + (V - mc2) * g
    return upper, lower


def _component_rows(val, der, ovr, rv, kappa, c):
    """D' samples of (phi, 0) and (0, phi), each split into (upper, lower) components."""
    vphi = rv * ovr
    as_upper = (vphi, c * (der + kappa * ovr))
    as_lower = (-c * (der - kappa * ovr), vphi)
    return as_upper, as_lower


def _region_products(up, lo, rv, kappa, consts, need):
    """Matrix contributions of one region.

    ``up``/``lo`` are (val, der, ovr) sample triples for the upper and lower
    rows (``lo`` may be None).  Returns a dict keyed by matrix name.
    """
    c, mc2 = consts.c, consts.mc2
    (uu, ul), _ = _component_rows(*up, rv, kappa, c)
    zu = np.zeros_like(up[0])
    if lo is not None:
        _, (lu, ll) = _component_rows(*lo, rv, kappa, c)
        zl = np.zeros_like(lo[0])
        Pu = np.vstack([uu, lu])          # D' upper component
        Pl = np.vstack([ul, ll])          # D' lower component
        Fu = np.vstack([up[0], zl])
        Fl = np.vstack([zu, lo[0]])
    else:
        Pu, Pl, Fu, Fl = uu, ul, up[0], zu
    DU = Pu + mc2 * Fu
    DL = Pl - mc2 * Fl
    out = {}
    out["A"] = DU @ DU.T + DL @ DL.T
    out["B"] = Fu @ DU.T + Fl @ DL.T
    out["M"] = Fu @ Fu.T + Fl @ Fl.T
    out["K"] = Pu @ DU.T + (Pl - 2.0 * mc2 * Fl) @ DL.T
    if "S" in need:
        X = Pu @ Fu.T - Pl @ Fl.T
        out["S"] = Pu @ Pu.T + Pl @ Pl.T + mc2 * (X + X.T)
    if "R" in need:
        out["R"] = Fu @ Pu.T + Fl @ (Pl - 2.0 * mc2 * Fl).T
    return out


def _need(mode):
    return {"idom": (), "sdom": ("S",), "raw": ("R",)}[mode]


def _scatter(total, part, rows):
    total[np.ix_(rows, rows)] += part


@lru_cache(maxsize=16)
def _core_products(upper: GlobalBasisSpec, lower, pot, kappa, consts, opts, grid_N1, need):
    """beta-independent I1 contributions on the compact (core + bridge) rows."""
    cu = sample_core(upper, opts, grid_N1)
    up = (np.vstack([cu[0], cu[3]]), np.vstack([cu[1], cu[4]]), np.vstack([cu[2], cu[5]]))
    lo = None
    if lower is not None:
        cl = sample_core(lower, opts, grid_N1)
        lo = (np.vstack([cl[0], cl[3]]), np.vstack([cl[1], cl[4]]), np.vstack([cl[2], cl[5]]))
    rv = pot.rv(cu[6])
    out = _region_products(up, lo, rv, kappa, consts, need)
    for m in out.values():
        m.setflags(write=False)
    return out


def _rows(spec: GlobalBasisSpec, region: str, offset: int) -> np.ndarray:
    if region == "I1":
        idx = list(range(spec.N1)) + [spec.dim - 1]
    else:
        idx = list(range(spec.N1, spec.N1 + spec.N2)) + [spec.dim - 1]
    return np.asarray(idx) + offset


def assemble(layout: SpinorLayout, pot: Potential, kappa: int,
             consts: PhysicsConstants = PhysicsConstants(), mode: str = "idom",
             options: QuadratureOptions | None = None) -> AssembledSystem:
    """Assemble the Galerkin matrices for ``layout``.

    Every mode gets A, B, M and K; ``sdom`` adds S and ``raw`` adds R.
    """
    if mode not in OPERATOR_MODES:
        raise ValueError(f"unknown operator mode {mode!r}")
    if kappa == 0:
        raise ValueError("kappa must be nonzero")
    opts = options or QuadratureOptions()
    need = _need(mode)
    up_spec, lo_spec = layout.upper_spec, layout.lower_spec
    n = layout.dim
    nu = layout.n_upper
    names = ("A", "B", "M", "K") + need
    mats = {k: np.zeros((n, n)) for k in names}
    grid = layout.grid_spec

    if up_spec.mode == "allsm":
        core = _core_products(up_spec, lo_spec, pot, kappa, consts, opts, grid.N1, need)
        rows = _rows(up_spec, "I1", 0)
        if lo_spec is not None:
            rows = np.concatenate([rows, _rows(lo_spec, "I1", nu)])
        for k in names:
            _scatter(mats[k], core[k], rows)
        tu = sample_tail(up_spec, opts, grid.N2)
        up = (np.vstack([tu[0], tu[3]]), np.vstack([tu[1], tu[4]]), np.vstack([tu[2], tu[5]]))
        lo = None
        rows = _rows(up_spec, "I2", 0)
        if lo_spec is not None:
            tl = sample_tail(lo_spec, opts, grid.N2)
            lo = (np.vstack([tl[0], tl[3]]), np.vstack([tl[1], tl[4]]), np.vstack([tl[2], tl[5]]))
            rows = np.concatenate([rows, _rows(lo_spec, "I2", nu)])
        tail = _region_products(up, lo, pot.rv(tu[6]), kappa, consts, need)
        for k in names:
            _scatter(mats[k], tail[k], rows)
    else:
        su = sample_basis(up_spec, opts, grid)
        lo = None
        if lo_spec is not None:
            sl = sample_basis(lo_spec, opts, grid)
            lo = (sl.val, sl.der, sl.ovr)
        part = _region_products((su.val, su.der, su.ovr), lo, pot.rv(su.r), kappa, consts, need)
        for k in names:
            mats[k] += part[k]

    for k, m in mats.items():
        if not np.all(np.isfinite(m)):
            raise FloatingPointError(f"non-finite entries in assembled {k}")
    B = mats["B"]
    asym = float(np.abs(B - B.T).max() / max(np.abs(B).max(), 1e-300))
    for k in names:
        mats[k] = 0.5 * (mats[k] + mats[k].T)
    sys_ = AssembledSystem(mats["A"], mats["B"], mats["M"], mats["K"], layout, mode, consts, pot, kappa,
                           S=mats.get("S"), R=mats.get("R"))
    object.__setattr__(sys_, "_b_asym", asym)
    return sys_


def write_matrix(fh, name: str, M: np.ndarray) -> None:
    """Plain-text dump: ``# name rows cols`` then one row per line, 17 significant digits."""
    fh.write(f"# {name} {M.shape[0]} {M.shape[1]}\n")
    for row in M:
        fh.write(" ".join(f"{x:.16e}" for x in row) + "\n")


def read_matrices(path) -> dict[str, np.ndarray]:
    out = {}
    with open(path) as fh:
        lines = fh.read().splitlines()
    i = 0
    while i < len(lines):
        _, name, nr, nc = lines[i].split()
        nr, nc = int(nr), int(nc)
        out[name] = np.array([[float(x) for x in lines[i + 1 + k].split()] for k in range(nr)]).reshape(nr, nc)
        i += 1 + nr
    return out


def dump_system(system: AssembledSystem, path) -> None:
    """Write A and B (and S or R when present) to one text file."""
    with open(path, "w") as fh:
        for name in ("A", "B", "M", "S", "R"):
            m = getattr(system, name)
            if m is not None:
                write_matrix(fh, name, m)
