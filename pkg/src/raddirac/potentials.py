"""Potential models, physical constants and closed-form reference energies.

All quantities are in Hartree atomic units.  Every potential exposes
``rv(r) = r * V(r)``, which is finite at the origin for all members; the
assembly uses it so that no quadrature node ever divides by ``r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy import special

C_AU = 137.035999084

# conversion constants (fixed, not CODATA-latest, so tables reproduce)
BOHR_NM = 5.291772e-2
HARTREE_EV = 27.211385
ELECTRON_MASS_AMU = 5.48578e-4

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class PhysicsConstants:
    c: float = C_AU
    mass: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and self.mass > 0):
            raise ValueError("c and mass must be positive")

    @property
    def mc2(self) -> float:
        return self.mass * self.c * self.c


@dataclass(frozen=True)
class QuantumState:
    n: int
    kappa: int

    def __post_init__(self):
        if self.kappa == 0:
            raise ValueError("kappa must be nonzero")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        # n >= |kappa| for kappa < 0, n > kappa for kappa > 0
        if self.n < abs(self.kappa) or (self.kappa > 0 and self.n == self.kappa):
            raise ValueError(f"n={self.n} not allowed for kappa={self.kappa}")

    @property
    def radial_number(self) -> int:
        return self.n - abs(self.kappa)


class Potential:
    """Base class.  Subclasses implement ``rv``; ``evaluate`` derives from it."""

    kind = "potential"
    # sign flip of V at large r is irrelevant; this flags a spectrum without continuum
    confining = False
    singular = False

    def rv(self, r):
        raise NotImplementedError

    def evaluate(self, r):
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr <= 0):
            if self.singular:
                raise ValueError(f"{self.kind} potential is singular at r <= 0")
            return self._origin_value(r_arr)
        return self.rv(r_arr) / r_arr

    def _origin_value(self, r):
        out = np.empty_like(r)
        pos = r > 0
        out[pos] = self.rv(r[pos]) / r[pos]
        out[~pos] = self.origin_limit()
        return out if out.ndim else float(out)

    def origin_limit(self) -> float:
        raise ValueError(f"{self.kind} has no finite origin value")

    def coulomb_charge(self) -> float:
        """-lim_{r->0} r V(r); sets the r^s behaviour at the origin."""
        return -float(self.rv(np.array([0.0]))[0])

    def params(self) -> dict:
        return {"kind": self.kind, **asdict(self)}


@dataclass(frozen=True)
class Coulomb(Potential):
    Z: float
    kind = "coulomb"
    singular = True

    def __post_init__(self):
        if self.Z <= 0:
            raise ValueError("Z must be positive")

    def rv(self, r):
        return np.full_like(np.asarray(r, dtype=float), -self.Z)


@dataclass(frozen=True)
class GaussianNucleus(Potential):
    Z: float
    R: float
    kind = "gaussian"

    def __post_init__(self):
        if self.Z <= 0 or self.R <= 0:
            raise ValueError("Z and R must be positive")

    def rv(self, r):
        return -self.Z * special.erf(np.asarray(r, dtype=float) / self.R)

    def origin_limit(self):
        return -2.0 * self.Z / (_SQRT_PI * self.R)

    def evaluate(self, r):
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < 0):
            raise ValueError("r must be non-negative")
        x = r_arr / self.R
        small = np.abs(x) < 1e-3
        out = np.empty_like(x)
        xs = x[small]
        # erf(x)/x series; avoids 0/0 at the origin
        out[small] = -(2.0 * self.Z / (_SQRT_PI * self.R)) * (1 - xs**2 / 3 + xs**4 / 10 - xs**6 / 42)
        xb = x[~small]
        out[~small] = -self.Z * special.erf(xb) / r_arr[~small]
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class Yukawa(Potential):
    V0: float
    lam: float
    kind = "yukawa"
    singular = True

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")

    def rv(self, r):
        return -self.V0 * np.exp(-self.lam * np.asarray(r, dtype=float))


@dataclass(frozen=True)
class Hellmann(Potential):
    Z: float
    V0: float
    lam: float
    kind = "hellmann"
    singular = True

    def __post_init__(self):
        if self.Z < 0 or self.lam < 0:
            raise ValueError("need Z >= 0 and lambda >= 0")

    def rv(self, r):
        return -self.Z + self.V0 * np.exp(-self.lam * np.asarray(r, dtype=float))


@dataclass(frozen=True)
class Morse(Potential):
    De: float
    re: float
    alpha: float
    kind = "morse"

    def __post_init__(self):
        if not (self.De > 0 and self.re > 0 and self.alpha > 0):
            raise ValueError("De, re and alpha must be positive")

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        e = np.exp(-self.alpha * (r - self.re))
        return self.De * (e * e - 2.0 * e)

    def rv(self, r):
        r = np.asarray(r, dtype=float)
        return r * self.evaluate(r)

    def origin_limit(self):
        return float(self.evaluate(0.0))


@dataclass(frozen=True)
class Harmonic(Potential):
    k: float = 1.0
    kind = "harmonic"
    confining = True

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be positive")

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        return 0.5 * self.k * r * r

    def rv(self, r):
        r = np.asarray(r, dtype=float)
        return 0.5 * self.k * r**3

    def origin_limit(self):
        return 0.0


def evaluate(pot: Potential, r):
    """V(r) in Hartree."""
    return pot.evaluate(r)


def make_potential(kind: str, **params) -> Potential:
    """Build a potential from a kind name and keyword parameters.

    ``lambda`` is accepted as an alias for ``lam``.
    """
    table = {
        "coulomb": Coulomb,
        "gaussian": GaussianNucleus,
        "yukawa": Yukawa,
        "hellmann": Hellmann,
        "morse": Morse,
        "harmonic": Harmonic,
    }
    if kind not in table:
        raise ValueError(f"unknown potential {kind!r}; choose from {sorted(table)}")
    if "lambda" in params:
        params["lam"] = params.pop("lambda")
    cls = table[kind]
    names = set(cls.__dataclass_fields__)
    params = {k: v for k, v in params.items() if k in names and v is not None}
    missing = names - set(params) - ({"k"} if kind == "harmonic" else set())
    if missing:
        raise ValueError(f"{kind} potential needs parameters {sorted(missing)}")
    return cls(**params)


def singularity_exponent(Z: float, kappa: int, consts: PhysicsConstants = PhysicsConstants()) -> float:
    """s = sqrt(kappa^2 - (Z/c)^2)."""
    arg = kappa * kappa - (Z / consts.c) ** 2
    if kappa == 0 or arg <= 0:
        raise ValueError("imaginary singularity exponent: need |kappa| > Z/c")
    return math.sqrt(arg)


def coulomb_exact_energy(Z: float, state: QuantumState, consts: PhysicsConstants = PhysicsConstants()) -> float:
    """Closed-form Dirac-Coulomb binding energy (total minus mc^2)."""
    c = consts.c
    s = singularity_exponent(Z, state.kappa, consts)
    a = Z / c
    d = state.radial_number + s
    mc2 = consts.mc2
    # E - mc^2 = mc^2 (1/sqrt(1+q) - 1) = -mc^2 q / (sqrt(1+q)(1+sqrt(1+q)))
    q = (a / d) ** 2
    root = math.sqrt(1.0 + q)
    return -mc2 * q / (root * (1.0 + root))


def coulomb_levels(Z: float, kappa: int, count: int, consts: PhysicsConstants = PhysicsConstants()) -> list[float]:
    """First ``count`` closed-form binding energies for fixed kappa."""
    n0 = abs(kappa) if kappa < 0 else kappa + 1
    return [coulomb_exact_energy(Z, QuantumState(n0 + i, kappa), consts) for i in range(count)]


def asymptotic_decay_rate(E_binding: float, consts: PhysicsConstants = PhysicsConstants()) -> float:
    """lambda = sqrt(m^2 c^2 - (E/c)^2) for total energy E = E_binding + mc^2."""
    c, m = consts.c, consts.mass
    if not (-2 * consts.mc2 < E_binding < 0):
        raise ValueError("energy is not inside the mass gap")
    # m^2c^2 - E^2/c^2 = -eb (2 mc^2 + eb) / c^2, free of cancellation
    return math.sqrt(-E_binding * (2 * m * c * c + E_binding)) / c


_UNITS = {
    ("hartree", "ev"): HARTREE_EV,
    ("bohr", "nm"): BOHR_NM,
    ("amu", "me"): 1.0 / ELECTRON_MASS_AMU,
}


def unit_conversions(value: float, from_unit: str, to_unit: str) -> float:
    """Linear unit conversion between Hartree/eV, Bohr/nm and amu/electron masses."""
    a, b = from_unit.lower(), to_unit.lower()
    if a == b:
        return value
    if (a, b) in _UNITS:
        return value * _UNITS[(a, b)]
    if (b, a) in _UNITS:
        return value / _UNITS[(b, a)]
    # inverse lengths
    if (a, b) == ("1/nm", "1/bohr"):
        return value * BOHR_NM
    if (a, b) == ("1/bohr", "1/nm"):
        return value / BOHR_NM
    raise ValueError(f"unsupported unit pair {from_unit} -> {to_unit}")


def morse_from_molecular(De_eV: float, re_nm: float, mu_amu: float, alpha_per_nm: float):
    """Morse potential and constants in atomic units from spectroscopic units."""
    pot = Morse(
        De=unit_conversions(De_eV, "ev", "hartree"),
        re=unit_conversions(re_nm, "nm", "bohr"),
        alpha=unit_conversions(alpha_per_nm, "1/nm", "1/bohr"),
    )
    return pot, PhysicsConstants(mass=unit_conversions(mu_amu, "amu", "me"))


def nuclear_rms_radius_fm(Z: int) -> float:
    """Root-mean-square nuclear charge radius, 0.836 A^(1/3) + 0.570 fm.

    The mass number A uses a rounded empirical fit to the valley of
    stability, A ~ 2.5 Z for heavy elements; see :func:`mass_number`.
    """
    A = mass_number(Z)
    return 0.836 * A ** (1.0 / 3.0) + 0.570


def mass_number(Z: int) -> float:
    """Approximate mass number from the semi-empirical stability line."""
    # Z = A / (1.98 + 0.0155 A^(2/3)), solved by fixed-point iteration
    A = 2.0 * Z
    for _ in range(50):
        A = Z * (1.98 + 0.0155 * A ** (2.0 / 3.0))
    return A


def gaussian_nuclear_R(Z: int, A: float | None = None) -> float:
    """Gaussian width R (Bohr) in V = -Z erf(r/R)/r for a given charge radius.

    For a Gaussian charge distribution <r^2> = 3 R^2 / 2.
    """
    A = mass_number(Z) if A is None else A
    rms_fm = 0.836 * A ** (1.0 / 3.0) + 0.570
    rms_bohr = rms_fm * 1e-6 / BOHR_NM
    return math.sqrt(2.0 / 3.0) * rms_bohr


def morse_nonrel_energy(pot: Morse, consts: PhysicsConstants = PhysicsConstants(), v: int = 0) -> float:
    """Nonrelativistic 1D Morse level -De + w(v+1/2) - w^2 (v+1/2)^2 / (4 De), w = alpha sqrt(2 De / m).

    The s-wave radial problem differs from this only by the wall at r = 0,
    which is negligible for alpha re >> 1; useful as a cross-check.
    """
    w = pot.alpha * math.sqrt(2.0 * pot.De / consts.mass)
    x = v + 0.5
    return -pot.De + w * x - (w * x) ** 2 / (4.0 * pot.De)


def morse_width(pot: Morse, consts: PhysicsConstants = PhysicsConstants()) -> float:
    """Harmonic length 1/sqrt(m w) of the well bottom."""
    w = pot.alpha * math.sqrt(2.0 * pot.De / consts.mass)
    return 1.0 / math.sqrt(consts.mass * w)
