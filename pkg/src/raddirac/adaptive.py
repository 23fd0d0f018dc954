"""Frequency indicator and the directional search for the Laguerre scale beta."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .assembly import SpinorLayout, assemble
from .basis import QuadratureOptions
from .eigensolve import EigenSolution, solve_gep
from .potentials import PhysicsConstants, Potential, asymptotic_decay_rate
from .specfun import gauss_rule, laguerre_table

STOP_REASONS = ("threshold-met", "indicator-increase", "bound-hit", "initial-ok")


@dataclass(frozen=True)
class AdaptiveConfig:
    nu: float = 2.0
    beta0: float = 1.0
    beta_min: float = 1e-4
    beta_max: float = 1e5
    mode_index: int = 0
    tail_divisor: int = 3
    f0: float | None = None    # None: reference_threshold at the solve's N2
    max_steps: int = 60

    def __post_init__(self):
        if not self.nu > 1:
            raise ValueError("nu must exceed 1")
        if not (self.beta_min < self.beta0 < self.beta_max):
            raise ValueError("need beta_min < beta0 < beta_max")
        if self.mode_index < 0:
            raise ValueError("mode_index must be >= 0")


@dataclass
class AdaptiveStep:
    beta: float
    indicator: float
    q: float | None = None
    accepted: bool = True


@dataclass
class AdaptiveTrace:
    steps: list[AdaptiveStep] = field(default_factory=list)
    final_beta: float | None = None
    stop_reason: str | None = None
    f0: float | None = None

    def record(self) -> dict:
        return {
            "final_beta": self.final_beta,
            "stop_reason": self.stop_reason,
            "f0": self.f0,
            "steps": [{"beta": s.beta, "indicator": s.indicator, "q": s.q, "accepted": s.accepted}
                      for s in self.steps],
        }


def frequency_indicator(coefficients, weights=None, M: int | None = None) -> float:
    """sqrt(sum of the last M weighted squares / total weighted squares)."""
    c = np.asarray(coefficients, dtype=float)
    g = np.ones_like(c) if weights is None else np.asarray(weights, dtype=float)
    n = c.size
    if M is None:
        M = (n - 1) // 3
    if not (1 <= M <= n):
        raise ValueError("need 1 <= M <= N + 1")
    e = g * c * c
    total = e.sum()
    if total == 0:
        raise ValueError("indicator undefined for all-zero coefficients")
    return math.sqrt(e[n - M:].sum() / total)


@lru_cache(maxsize=64)
def _model_coefficients(N: int) -> np.ndarray:
    q = gauss_rule("gauss-laguerre", 200)
    # int f dr = sum W f with W = w e^u; f = sin(r) e^{-r} L_l(r) e^{-r/2}
    v, _ = laguerre_table(N, q.nodes, envelope=1.5)
    return v @ (q.scaled_weights * np.sin(q.nodes))


def model_projection_residual(N: int) -> float:
    """L2 norm of sin(r)e^{-r} minus its projection on Lhat_0..Lhat_N (beta = 1)."""
    c = _model_coefficients(N)
    r = np.linspace(0.0, 60.0, 120001)
    v, _ = laguerre_table(N, r, envelope=0.5)
    diff = np.sin(r) * np.exp(-r) - c @ v
    return math.sqrt(np.trapezoid(diff * diff, r))


def reference_threshold(N: int = 80) -> float:
    """Indicator of the best fit of sin(r) e^{-r} by Lhat_0..Lhat_N at beta = 1."""
    if N < 10:
        raise ValueError("N must be >= 10")
    return frequency_indicator(_model_coefficients(N), M=N // 3)


def laguerre_coefficients(coefficients, layout: SpinorLayout) -> np.ndarray:
    """Upper-component far-field coefficients in the Lhat_0..Lhat_N2 expansion.

    On I2, F = sum_k a_k (Lhat_k - Lhat_{k-1}) + b e^{-u/2}, and
    e^{-u/2} = Lhat_0 / sqrt(beta).
    """
    spec = layout.upper_spec
    if spec.mode == "legendre-truncated":
        raise ValueError("no Laguerre block in legendre-truncated mode")
    a = np.asarray(coefficients[spec.tail_slice], dtype=float)
    b = float(coefficients[spec.dim - 1]) if spec.mode == "allsm" else 0.0
    c = np.zeros(spec.N2 + 1)
    c[:-1] -= a
    c[1:] += a
    c[0] += b / math.sqrt(spec.beta)
    return c


class _Solver:
    """Memoised solves over beta for one problem."""

    def __init__(self, layout, pot, kappa, consts, mode, options, count, window=None):
        self.layout, self.pot, self.kappa, self.consts = layout, pot, kappa, consts
        self.mode, self.options, self.count, self.window = mode, options, count, window
        self.cache: dict[float, EigenSolution] = {}

    def __call__(self, beta: float) -> EigenSolution:
        if beta not in self.cache:
            sys_ = assemble(self.layout.with_beta(beta), self.pot, self.kappa, self.consts,
                            self.mode, self.options)
            self.cache[beta] = solve_gep(sys_, self.count, self.window)
        return self.cache[beta]


def _indicator_of(sol: EigenSolution, i: int, M: int) -> float | None:
    if i >= len(sol.entries):
        return None
    return frequency_indicator(laguerre_coefficients(sol.entries[i].coefficients, sol.system.layout), M=M)


def adapt_beta(layout: SpinorLayout, pot: Potential, kappa: int,
               consts: PhysicsConstants = PhysicsConstants(), cfg: AdaptiveConfig = AdaptiveConfig(),
               mode: str = "idom", options: QuadratureOptions | None = None, count: int | None = None,
               window: tuple[float, float] | None = None, _solver: _Solver | None = None):
    """Directional geometric search on beta for eigenmode ``cfg.mode_index``.

    Returns ``(beta, solution, trace)``.  The initial solve is accepted when
    its indicator is within ``nu * f0``.  Otherwise beta/nu and beta*nu are
    probed, the walk heads towards the smaller indicator, and it keeps
    multiplying while the indicator does not increase and beta stays inside
    [beta_min, beta_max].
    """
    N2 = layout.upper_spec.N2
    if N2 < 9:
        raise ValueError("adaptation needs N2 >= 9")
    i = cfg.mode_index
    M = N2 // cfg.tail_divisor
    f0 = reference_threshold(max(N2, 10)) if cfg.f0 is None else cfg.f0
    solve = _solver or _Solver(layout, pot, kappa, consts, mode, options, max(count or 0, i + 1), window)
    trace = AdaptiveTrace(f0=f0)
    nu = cfg.nu

    beta = cfg.beta0
    sol = solve(beta)
    f = _indicator_of(sol, i, M)
    if f is None:
        raise ValueError(f"eigenmode {i} not found at beta0 = {beta}")
    trace.steps.append(AdaptiveStep(beta, f))

    def finish(reason):
        trace.final_beta = beta
        trace.stop_reason = reason
        return beta, sol, trace

    if f <= nu * f0:
        return finish("initial-ok")

    probes = {}
    for b in (beta / nu, beta * nu):
        if cfg.beta_min <= b <= cfg.beta_max:
            probes[b] = _indicator_of(solve(b), i, M)
    f_down = probes.get(beta / nu)
    f_up = probes.get(beta * nu)
    # head towards the smaller indicator; a missing mode counts as +inf
    fd = math.inf if f_down is None else f_down
    fu = math.inf if f_up is None else f_up
    q = nu if fu < fd else 1.0 / nu

    for _ in range(cfg.max_steps):
        bt = beta * q
        if not (cfg.beta_min <= bt <= cfg.beta_max):
            return finish("bound-hit")
        st = solve(bt)
        ft = _indicator_of(st, i, M)
        if ft is None:
            return finish("bound-hit")
        if ft > f:
            trace.steps.append(AdaptiveStep(bt, ft, q, accepted=False))
            return finish("indicator-increase")
        beta, sol, f = bt, st, ft
        trace.steps.append(AdaptiveStep(beta, f, q))
        if f <= f0:
            return finish("threshold-met")
    return finish("bound-hit")


@dataclass
class AdaptiveResult:
    energies: list[float]
    betas: list[float]
    traces: list[AdaptiveTrace]
    solutions: list[EigenSolution] = field(repr=False)

    def entry(self, i):
        return self.solutions[i].entries[i]


def decay_seed(E_binding: float, consts: PhysicsConstants, nu: float = 2.0, cfg: AdaptiveConfig | None = None) -> float:
    """beta = 2 lambda(E), so that e^{-beta r/2} matches the bound-state tail.

    Rounded to an integer power of ``nu`` (so walks share cached solves)
    and clipped to the configured bounds.
    """
    lam = asymptotic_decay_rate(E_binding, consts)
    b = nu ** round(math.log(2.0 * lam) / math.log(nu))
    if cfg is not None:
        b = min(max(b, cfg.beta_min * nu), cfg.beta_max / nu)
    return b


def find_start(solver, beta0: float, index: int, cfg: AdaptiveConfig, max_tries: int = 40) -> float | None:
    """First beta in beta0, beta0*nu, beta0/nu, beta0*nu^2, ... at which mode ``index`` exists."""
    for k in range(max_tries):
        j = (k + 1) // 2 * (1 if k % 2 else -1)
        b = beta0 * cfg.nu ** j
        if not (cfg.beta_min <= b <= cfg.beta_max):
            continue
        if index < len(solver(b).entries):
            return b
    return None


def adaptive_states(layout: SpinorLayout, pot: Potential, kappa: int, n_states: int,
                    consts: PhysicsConstants = PhysicsConstants(), cfg: AdaptiveConfig = AdaptiveConfig(),
                    mode: str = "idom", options: QuadratureOptions | None = None,
                    seed: str = "decay", window: tuple[float, float] | None = None) -> AdaptiveResult:
    """Adapt beta separately for each of the first ``n_states`` eigenmodes.

    ``seed`` picks where each walk starts:

    * ``"fixed"``: every mode starts from cfg.beta0.
    * ``"chain"``: mode i starts from the beta chosen for mode i-1.
    * ``"decay"``: a solve at cfg.beta0 (or at the previous mode's beta)
      gives an energy estimate E_i, and the walk starts at 2 lambda(E_i).

    A start where the mode is badly resolved can leave the greedy walk
    stuck on a flat, noisy indicator; the decay seed avoids that for
    non-confining potentials (confining ones fall back to chaining).
    When the mode is missing at the start (e.g. a heavy particle whose
    bound states need a much larger beta), beta is scanned outwards in
    powers of nu.  Solves are shared across modes.  States that cannot be
    found anywhere end the list.
    """
    if seed not in ("fixed", "chain", "decay"):
        raise ValueError(f"unknown seed rule {seed!r}")
    solver = _Solver(layout, pot, kappa, consts, mode, options, n_states, window)
    out = AdaptiveResult([], [], [], [])
    for i in range(n_states):
        b0 = cfg.beta0
        if seed != "fixed" and out.betas:
            b0 = out.betas[-1]
        start = find_start(solver, b0, i, cfg)
        if start is None:
            break
        b0 = start
        if seed == "decay" and not pot.confining:
            eb = solver(b0).entries[i].binding_energy
            if -2 * consts.mc2 < eb < 0:
                b1 = decay_seed(eb, consts, cfg.nu, cfg)
                if i < len(solver(b1).entries):
                    b0 = b1
        c = AdaptiveConfig(cfg.nu, b0, cfg.beta_min, cfg.beta_max, i, cfg.tail_divisor, cfg.f0, cfg.max_steps)
        try:
            beta, sol, trace = adapt_beta(layout, pot, kappa, consts, c, mode, options, n_states, window,
                                          _solver=solver)
        except ValueError:
            break
        out.energies.append(sol.entries[i].binding_energy)
        out.betas.append(beta)
        out.traces.append(trace)
        out.solutions.append(sol)
    return out
