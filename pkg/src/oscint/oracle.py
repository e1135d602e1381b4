"""Independent numerical ground truth for the closed forms.

Three routes that never touch the index-derivative machinery:

* ODE cascade.  With c_k(τ) = ∫_{−∞}^τ e^{i(τ²−s²)} I_{k−1}(s) ds = a_k + i b_k,
  the nested integral obeys the regular first-order system
      I_k' = a_k,  a_k' = I_{k−1} − 2τ b_k,  b_k' = 2τ a_k,   I_0 = 1.
  All levels are integrated together with DOP853.  Initial values at the
  finite start time come from the large-|τ| expansion of c_k in powers of
  1/τ, which is exact to far below the solver tolerance at τ ≤ −30.
* Nested quadrature.  The kernel cos(τ₁² − τ₂²) = Re[e^{iτ₁²} e^{−iτ₂²}]
  factorises, so each pair of integrations becomes two cumulative Gauss–
  Legendre integrals on panels no wider than a quarter of the local
  oscillation period.  The part of the domain left of the cutoff is added
  from the same asymptotic expansion.
* Bloch equations u' = Ω × u with Ω = (2√(2ν), 0, 2τ), whose population
  u_z = 1 − 2 P_LZ ties the integrals to the transition probability.

``verify_identity`` checks the parabolic-cylinder identities by evaluating
their integral sides with the panel quadrature.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import legendre
from scipy.integrate import solve_ivp

from . import closedform, specfun
from .errors import DomainError, IntegrationError, QuadratureError

log = logging.getLogger(__name__)

Laurent = dict[int, complex]
LAURENT_ORDER = 40


@dataclass(frozen=True)
class GridSpec:
    """Integration window and sampling grid.

    ``tau_start`` stands in for −∞; samples are ``n_points`` equispaced values
    from ``sample_from`` (default ``tau_start``) to ``tau_end``.
    """

    tau_start: float = -40.0
    tau_end: float = 10.0
    n_points: int = 321
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    sample_from: float | None = None

    def __post_init__(self):
        if not self.tau_start < self.tau_end:
            raise DomainError(f"need tau_start < tau_end, got {self.tau_start}, {self.tau_end}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise DomainError(f"n_points must be an integer ≥ 2, got {self.n_points}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        lo = self.first_sample
        if not self.tau_start <= lo < self.tau_end:
            raise DomainError(f"sample_from {lo} outside [{self.tau_start}, {self.tau_end})")

    @property
    def first_sample(self) -> float:
        return self.tau_start if self.sample_from is None else float(self.sample_from)

    def samples(self) -> np.ndarray:
        return np.linspace(self.first_sample, self.tau_end, int(self.n_points))


@dataclass(frozen=True)
class SampledCurve:
    tau: np.ndarray
    values: np.ndarray
    err: np.ndarray

    def __post_init__(self):
        if len(self.tau) != len(self.values) or len(self.tau) != len(self.err):
            raise DomainError("tau, values and err must have equal length")

    def at(self, tau: float) -> float:
        idx = int(np.argmin(np.abs(self.tau - tau)))
        if abs(self.tau[idx] - tau) > 1e-9 * max(1.0, abs(tau)):
            raise DomainError(f"τ = {tau} is not a sample point")
        return self.values[idx]


# ------------------------------------------------------ large-|τ| expansions


def _l_add(x: Laurent, y: Laurent) -> Laurent:
    out = dict(x)
    for j, v in y.items():
        out[j] = out.get(j, 0j) + v
    return out


def _l_scale(x: Laurent, f: complex, shift: int = 0, order: int = LAURENT_ORDER) -> Laurent:
    return {j + shift: f * v for j, v in x.items() if j + shift <= order}


def _l_deriv(x: Laurent) -> Laurent:
    return {j + 1: -j * v for j, v in x.items() if j != 0}


def _l_mul(x: Laurent, y: Laurent, order: int = LAURENT_ORDER) -> Laurent:
    out: Laurent = {}
    for i, u in x.items():
        for j, v in y.items():
            if i + j <= order:
                out[i + j] = out.get(i + j, 0j) + u * v
    return out


def _l_integrate(x: Laurent) -> Laurent:
    """∫_{−∞}^τ term by term; needs every power to be τ^{−2} or faster."""
    out: Laurent = {}
    for j, v in x.items():
        if v == 0:
            continue
        if j < 2:
            raise DomainError(f"τ^{-j} term is not integrable at −∞")
        out[j - 1] = v / (1 - j)
    return out


def laurent_eval(x: Laurent, tau: float) -> tuple[complex, float]:
    """Value of Σ v_j τ^{−j} and the size of its last retained term."""
    total = 0j
    last = 0.0
    for j in sorted(x):
        term = x[j] * tau ** (-j)
        total += term
        if x[j] != 0:
            last = abs(term)
    return total, last


def nested_asymptotics(source: Laurent, order: int = LAURENT_ORDER) -> Laurent:
    """Expansion of c(τ) = ∫_{−∞}^τ e^{i(τ²−s²)} f(s) ds for f given in powers of 1/τ.

    c solves c' = 2iτc + f without oscillating part, so c = Σ c_m with
    c_0 = −f/(2iτ) and c_{m+1} = c_m'/(2iτ).
    """
    c: Laurent = {}
    term = _l_scale(source, 0.5j, 1, order)
    while term:
        c = _l_add(c, term)
        term = _l_scale(_l_deriv(term), -0.5j, 1, order)
    return c


@lru_cache(maxsize=None)
def cascade_asymptotics(k_max: int, order: int = LAURENT_ORDER) -> tuple[tuple[Laurent, Laurent], ...]:
    """For k = 1..k_max, the (I_k, c_k) expansions about τ = −∞."""
    f: Laurent = {0: 1 + 0j}
    out = []
    for _ in range(k_max):
        c = nested_asymptotics(f, order)
        ik = _l_integrate({j: v.real + 0j for j, v in c.items()})
        out.append((ik, c))
        f = ik
    return tuple(out)


def cascade_initial_state(k_max: int, tau: float) -> tuple[np.ndarray, float]:
    """(I_1, a_1, b_1, …, I_K, a_K, b_K) at large negative τ, with an error bound."""
    if tau > -8:
        raise DomainError(f"the start time {tau} is too close to the crossing")
    y = []
    err = 0.0
    for ik, c in cascade_asymptotics(k_max):
        iv, e1 = laurent_eval(ik, tau)
        cv, e2 = laurent_eval(c, tau)
        y.extend([iv.real, cv.real, cv.imag])
        err = max(err, e1, e2)
    return np.array(y), err


# ------------------------------------------------------------------ ODE routes


def _integrate(rhs, y0, t0: float, t_eval: np.ndarray, rtol: float, atol: float) -> np.ndarray:
    sol = solve_ivp(rhs, (t0, float(t_eval[-1])), y0, method="DOP853", t_eval=t_eval,
                    rtol=rtol, atol=atol)
    if sol.status != 0:
        where = float(sol.t[-1]) if len(sol.t) else t0
        raise IntegrationError(f"integration stopped at τ = {where}: {sol.message}", tau=where)
    return sol.y


def _cascade_rhs(k_max: int):
    def rhs(t, y):
        s = y.reshape(k_max, 3)
        dy = np.empty_like(s)
        dy[:, 0] = s[:, 1]
        dy[0, 1] = 1.0 - 2.0 * t * s[0, 2]
        dy[1:, 1] = s[:-1, 0] - 2.0 * t * s[1:, 2]
        dy[:, 2] = 2.0 * t * s[:, 1]
        return dy.ravel()
    return rhs


def _with_error(rhs, y0, grid: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    taus = grid.samples()
    tight = _integrate(rhs, y0, grid.tau_start, taus, grid.rel_tol, grid.abs_tol)
    loose = _integrate(rhs, y0, grid.tau_start, taus, grid.rel_tol * 100, grid.abs_tol * 100)
    return taus, tight, np.abs(tight - loose)


def ode_cascade(k_max: int, grid: GridSpec = GridSpec()) -> list[SampledCurve]:
    """I_1 … I_{k_max} on the grid from one joint integration."""
    if int(k_max) != k_max or k_max < 1:
        raise DomainError(f"k_max must be ≥ 1, got {k_max}")
    y0, ic_err = cascade_initial_state(k_max, grid.tau_start)
    taus, y, err = _with_error(_cascade_rhs(k_max), y0, grid)
    return [SampledCurve(taus, y[3 * k], err[3 * k] + ic_err) for k in range(k_max)]


def ode_i1(grid: GridSpec = GridSpec()) -> SampledCurve:
    return ode_cascade(1, grid)[0]


def ode_j1(grid: GridSpec = GridSpec()) -> SampledCurve:
    """J₁(τ) = −∫_{τ_start}^τ b₁ with J₁(τ_start) = 0, b₁ = Im ∫_{−∞}^τ e^{i(τ²−s²)} ds.

    J₁ diverges logarithmically at −∞, so its value depends on τ_start
    through −½ ln|τ_start|; the closed form takes the same reference time.
    """
    state, ic_err = cascade_initial_state(1, grid.tau_start)
    y0 = np.array([0.0, state[1], state[2]])

    def rhs(t, y):
        return [-y[2], 1.0 - 2.0 * t * y[2], 2.0 * t * y[1]]

    taus, y, err = _with_error(rhs, y0, grid)
    return SampledCurve(taus, y[0], err[0] + ic_err)


def bloch_initial_state(nu: float, tau: float) -> np.ndarray:
    """Adiabatic-following Bloch vector at large negative τ, to first order."""
    eps = 2.0 * math.sqrt(2.0 * nu)
    r = math.hypot(eps, 2.0 * tau)
    u = np.array([-eps / r, -2.0 * eps / r ** 3, -2.0 * tau / r])
    return u / np.linalg.norm(u)


def bloch_integrate(nu: float, grid: GridSpec = GridSpec()) -> SampledCurve:
    """(u_x, u_y, u_z) for u' = Ω × u, Ω = (2√(2ν), 0, 2τ), from u(−∞) = (0, 0, 1)."""
    nu = float(nu)
    if not nu > 0:
        raise DomainError(f"ν must be positive, got {nu}")
    eps = 2.0 * math.sqrt(2.0 * nu)

    def rhs(t, u):
        return [-2.0 * t * u[1], 2.0 * t * u[0] - eps * u[2], eps * u[1]]

    taus, y, err = _with_error(rhs, bloch_initial_state(nu, grid.tau_start), grid)
    drift = np.abs(np.linalg.norm(y, axis=0) - 1.0)
    if drift.max() > 1e-6:
        bad = float(taus[int(np.argmax(drift))])
        raise IntegrationError(f"Bloch norm drifted by {drift.max():.2e}", tau=bad)
    return SampledCurve(taus, y.T.copy(), err.max(axis=0) + drift)


def perturbation_partial_sums(nu: float, k_max: int, grid: GridSpec = GridSpec()) -> np.ndarray:
    """Rows K = 0..k_max of Σ_{k≤K} (−8ν)^k I_k(τ) on the grid."""
    curves = ode_cascade(k_max, grid)
    rows = [np.ones(grid.n_points)]
    for k, c in enumerate(curves, start=1):
        rows.append(rows[-1] + (-8.0 * nu) ** k * c.values)
    return np.array(rows)


# --------------------------------------------------------- panel quadrature

_GL_NODES = 12


@lru_cache(maxsize=None)
def _gl_tables(m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes, weights and the cumulative matrix S with ∫_{−1}^{x_i} p = Σ S_ij p(x_j)."""
    x, w = legendre.leggauss(m)
    vander = legendre.legvander(x, m - 1)
    integ = np.column_stack([legendre.legval(x, legendre.legint(np.eye(m)[j], lbnd=-1))
                             for j in range(m)])
    return x, w, integ @ np.linalg.inv(vander)


class PanelMesh:
    """Gauss–Legendre panels on [a, b] no wider than scale·π/(4|τ| + 1)."""

    def __init__(self, a: float, b: float, scale: float = 1.0, m: int = _GL_NODES):
        if not a < b:
            raise DomainError(f"empty interval [{a}, {b}]")
        edges = [a]
        t = a
        while t < b:
            h = scale * math.pi / (4 * abs(t) + 1)
            h = min(h, scale * math.pi / (4 * abs(t + h) + 1))
            t = min(b, t + h)
            if b - t < 1e-12:
                t = b
            edges.append(t)
        self.edges = np.array(edges)
        self.h = np.diff(self.edges)
        self.x, self.w, self.s = _gl_tables(m)
        self.nodes = self.edges[:-1, None] + (self.x[None, :] + 1.0) * self.h[:, None] / 2

    def cumulative(self, f: np.ndarray, start: complex = 0.0) -> tuple[np.ndarray, complex]:
        """∫_a^t f at every node, plus the full integral to b, offset by ``start``."""
        half = self.h / 2
        inner = half[:, None] * (f @ self.s.T)
        totals = half * (f @ self.w)
        offsets = start + np.concatenate(([0.0], np.cumsum(totals)[:-1]))
        return offsets[:, None] + inner, start + totals.sum()

    def integral(self, f: np.ndarray) -> complex:
        return (self.h / 2 * (f @ self.w)).sum()


def _nested_pass(mesh: PanelMesh, source: np.ndarray, h_start: complex, q_start: float):
    """Inner H = ∫ e^{−is²} f and outer Q = ∫ Re[e^{it²} H] on the mesh."""
    t = mesh.nodes
    h_nodes, h_end = mesh.cumulative(np.exp(-1j * t * t) * source, h_start)
    c_nodes = np.exp(1j * t * t) * h_nodes
    q_nodes, q_end = mesh.cumulative(c_nodes.real, q_start)
    return q_nodes.real, float(np.real(q_end)), c_nodes, h_end


def _quad_nested_once(k: int, tau: float, cutoff: float, scale: float) -> float:
    mesh = PanelMesh(-cutoff, tau, scale)
    source = np.ones_like(mesh.nodes)
    value = 1.0
    for ik, c in cascade_asymptotics(k):
        c0 = laurent_eval(c, -cutoff)[0]
        q0 = laurent_eval(ik, -cutoff)[0].real
        source, value, _, _ = _nested_pass(mesh, source, cmath.exp(-1j * cutoff ** 2) * c0, q0)
    return value


def quad_nested(k: int, tau: float, cutoff: float, tol: float | None = None) -> float:
    """I_k(τ), k ≤ 2, by nested panel quadrature over [−cutoff, τ].

    Panels are halved until two successive results agree to tol/10
    (default tol: 1e-3 for k = 1, 5e-3 for k = 2).
    """
    if k not in (1, 2):
        raise DomainError(f"quad_nested supports k = 1, 2; got {k}")
    if not cutoff > 0 or not -cutoff < tau:
        raise DomainError(f"need −cutoff < τ, got cutoff={cutoff}, τ={tau}")
    if cutoff < 8:
        raise DomainError("cutoff must be at least 8 for the tail expansion")
    tol = (1e-3 if k == 1 else 5e-3) if tol is None else tol
    scale = 1.0
    prev = _quad_nested_once(k, tau, cutoff, scale)
    for _ in range(6):
        scale /= 2
        cur = _quad_nested_once(k, tau, cutoff, scale)
        if abs(cur - prev) <= tol / 10:
            return cur
        prev = cur
    raise QuadratureError(f"quad_nested({k}, {tau}) did not settle", estimate=prev,
                          error=abs(cur - prev))


# ------------------------------------------------------------ identity checks


def _pcf_tail(p: complex, order: int = LAURENT_ORDER) -> Laurent:
    """Σ_s (−1)^s (−p)_{2s} / (s! (2z²)^s) with z = −iμ₀τ, as powers of 1/τ."""
    out: Laurent = {0: 1 + 0j}
    term = 1 + 0j
    for s in range(order // 2):
        term *= -(-p + 2 * s) * (-p + 2 * s + 1) / ((s + 1) * 4j)
        out[2 * s + 2] = term
    return out


def _conj(x: Laurent) -> Laurent:
    return {j: v.conjugate() for j, v in x.items()}


def modsq_asymptotics(p: complex) -> Laurent:
    """|D_p(−iμ₀τ)|² for τ → −∞ in powers of 1/τ (Re p ∈ {0, −1})."""
    if p.real not in (0.0, -1.0):
        raise DomainError("only Re p = 0 or −1 have a Laurent expansion")
    tail = _pcf_tail(p)
    factor = 2.0 ** p.real * math.exp(-math.pi * p.imag / 2)
    return _l_scale(_l_mul(tail, _conj(tail)), factor, int(-2 * p.real))


def coherence_asymptotics(nu: float) -> Laurent:
    """D_{−iν}(−iμ₀τ) D*_{−iν−1}(−iμ₀τ) for τ → −∞ in powers of 1/τ."""
    prod = _l_mul(_pcf_tail(complex(0, -nu)), _conj(_pcf_tail(complex(-1, -nu))))
    factor = -math.exp(math.pi * nu / 2) * cmath.exp(0.25j * math.pi) / math.sqrt(2.0)
    return _l_scale(prod, factor, 1)


@lru_cache(maxsize=65536)
def _pcf_pair(nu: float, t: float) -> tuple[complex, complex]:
    z = closedform.pcf_argument(t)
    return specfun.pcf(complex(0, -nu), z), specfun.pcf(complex(-1, -nu), z)


def _pairs_on(mesh: PanelMesh, nu: float) -> tuple[np.ndarray, np.ndarray]:
    flat = [_pcf_pair(nu, float(t)) for t in mesh.nodes.ravel()]
    d0 = np.array([f[0] for f in flat]).reshape(mesh.nodes.shape)
    dm = np.array([f[1] for f in flat]).reshape(mesh.nodes.shape)
    return d0, dm


@lru_cache(maxsize=65536)
def _d_minus_one(t: float) -> complex:
    return specfun.pcf(-1.0, closedform.pcf_argument(t))


def _population_source(nu: float) -> tuple[Laurent, Callable[[np.ndarray, np.ndarray], np.ndarray]]:
    # B = |D_{−iν−1}|² − |D_{−iν}|²/ν
    lau = _l_add(modsq_asymptotics(complex(-1, -nu)), _l_scale(modsq_asymptotics(complex(0, -nu)), -1 / nu))
    return lau, lambda d0, dm: np.abs(dm) ** 2 - np.abs(d0) ** 2 / nu


@dataclass(frozen=True)
class SampleResidual:
    tau: float
    nu: float
    residual: float
    passed: bool
    error: str | None = None


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    tol: float
    results: tuple[SampleResidual, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.results), default=0.0)


IDENTITY_CUTOFF = 12.0


def _conservation(tau, nu):
    d0, dm = _pcf_pair(nu, tau)
    return abs(nu * math.exp(-math.pi * nu / 2) * (abs(dm) ** 2 + abs(d0) ** 2 / nu) - 1)


def _initial_population(tau, nu):
    d0, dm = _pcf_pair(nu, tau)
    return abs(-nu * math.exp(-math.pi * nu / 2) * (abs(dm) ** 2 - abs(d0) ** 2 / nu) - 1)


def _fresnel_modulus(tau, nu):
    c, s = specfun.fresnel(math.sqrt(2 / math.pi) * tau)
    return abs(abs(_d_minus_one(tau)) ** 2 - math.pi * ((0.5 + c) ** 2 + (0.5 + s) ** 2))


def _r_antiderivative(tau, nu):
    if tau == 0:
        return 0.0
    lo, hi = sorted((0.0, tau))
    mesh = PanelMesh(lo, hi, 0.5)
    f = np.array([cmath.exp(0.5j * t * t) * _d_minus_one(float(t)) for t in mesh.nodes.ravel()])
    integral = mesh.integral(f.reshape(mesh.nodes.shape)) * (1 if tau > 0 else -1)
    return abs(integral - 1j * closedform.MU0 * specfun.r_function(tau))


def _inner_population_integral(tau, nu):
    # ∫_{−∞}^τ e^{−is²} B(s) ds, anchored at −cutoff by its expansion
    lau, fn = _population_source(nu)
    cut = IDENTITY_CUTOFF
    mesh = PanelMesh(-cut, tau, 0.5)
    d0, dm = _pairs_on(mesh, nu)
    c0 = laurent_eval(nested_asymptotics(lau), -cut)[0]
    return mesh, d0, dm, lau, fn(d0, dm), cmath.exp(-1j * cut * cut) * c0


def _coherence(tau, nu, conjugate=False):
    mesh, d0, dm, lau, b, h0 = _inner_population_integral(tau, nu)
    _, h_end = mesh.cumulative(np.exp(-1j * mesh.nodes ** 2) * b, h0)
    d0t, dmt = _pcf_pair(nu, tau)
    # ∫_{−∞}^τ e^{−i(τ²−s²)} B = e^{−iτ²} conj(H)
    rhs = -closedform.MU0 * nu * cmath.exp(-1j * tau * tau) * np.conj(h_end)
    lhs = d0t * dmt.conjugate()
    if conjugate:
        return abs(lhs.conjugate() - np.conj(rhs))
    return abs(lhs - rhs)


def _coherence_integrand(d0, dm, sign):
    x = cmath.exp(-0.25j * math.pi) * d0 * np.conj(dm)
    return x + sign * np.conj(x)


def _coherence_tail(nu, sign, at):
    lau = _l_scale(coherence_asymptotics(nu), cmath.exp(-0.25j * math.pi))
    part = (lambda v: v.real) if sign > 0 else (lambda v: v.imag)
    # the leading τ^{-1} term is real; drop its rounding residue before integrating
    lau = {j: 2 * (1 if sign > 0 else 1j) * (part(v) if abs(part(v)) > 1e-14 * abs(v) else 0.0)
           for j, v in lau.items()}
    return laurent_eval(_l_integrate(lau), at)[0]


def _population_from_coherence(tau, nu):
    cut = IDENTITY_CUTOFF
    mesh = PanelMesh(-cut, tau, 0.5)
    d0, dm = _pairs_on(mesh, nu)
    total = _coherence_tail(nu, -1, -cut) + mesh.integral(_coherence_integrand(d0, dm, -1))
    return abs(abs(_pcf_pair(nu, tau)[1]) ** 2 - 1j * math.sqrt(2) * total)


def _double_cos(tau, nu):
    # ∫∫ cos(τ₁² − τ₂²) B(τ₂) anchored at −∞
    mesh, d0, dm, lau, b, h0 = _inner_population_integral(tau, nu)
    cut = IDENTITY_CUTOFF
    q0 = laurent_eval(_l_integrate({j: v.real + 0j for j, v in nested_asymptotics(lau).items()}), -cut)[0].real
    _, q_end, _, _ = _nested_pass(mesh, b, h0, q0)
    return mesh, d0, dm, q_end


def _cos_double_integral(tau, nu):
    mesh, d0, dm, q = _double_cos(tau, nu)
    lhs = _coherence_tail(nu, -1, -IDENTITY_CUTOFF) + mesh.integral(_coherence_integrand(d0, dm, -1))
    return abs(lhs - 2 * nu * math.sqrt(2) * q)


def _sin_double_integral(tau, nu):
    # both sides diverge like ln|τ| at −∞: compare increments from −cutoff
    mesh, d0, dm, lau, b, h0 = _inner_population_integral(tau, nu)
    h_nodes, _ = mesh.cumulative(np.exp(-1j * mesh.nodes ** 2) * b, h0)
    sin_part = (np.exp(1j * mesh.nodes ** 2) * h_nodes).imag
    rhs = 2 * nu * math.sqrt(2) * mesh.integral(sin_part)
    lhs = mesh.integral(_coherence_integrand(d0, dm, +1))
    return abs(lhs - rhs)


def _modulus_double_integral(tau, nu):
    _, _, _, q = _double_cos(tau, nu)
    return abs(abs(_pcf_pair(nu, tau)[1]) ** 2 + 4 * nu * q)


def _i2_double_integral(tau, nu):
    cut = IDENTITY_CUTOFF
    mesh = PanelMesh(-cut, tau, 0.5)
    src = np.array([abs(_d_minus_one(float(t))) ** 2 for t in mesh.nodes.ravel()]).reshape(mesh.nodes.shape)
    lau = modsq_asymptotics(-1 + 0j)
    c = nested_asymptotics(lau)
    h0 = cmath.exp(-1j * cut * cut) * laurent_eval(c, -cut)[0]
    q0 = laurent_eval(_l_integrate({j: v.real + 0j for j, v in c.items()}), -cut)[0].real
    _, q, _, _ = _nested_pass(mesh, src, h0, q0)
    fam = closedform.modified_family(1, tau)
    lhs = math.pi * abs(fam[0]) ** 2 + 4 * (fam[0] * fam[1].conjugate()).imag
    return abs(lhs - 16 * q)


IDENTITIES: dict[str, tuple[str, Callable[[float, float], float]]] = {
    "conservation": ("ν e^{−πν/2}[|D_{−iν−1}|² + |D_{−iν}|²/ν] = 1", _conservation),
    "initial_population": ("−ν e^{−πν/2}[|D_{−iν−1}|² − |D_{−iν}|²/ν] → 1 as τ → −∞", _initial_population),
    "fresnel_modulus": ("|D_{−1}|² = π([½+C]² + [½+S]²)", _fresnel_modulus),
    "r_antiderivative": ("∫₀^τ e^{is²/2} D_{−1}(−iμ₀s) ds = iμ₀ 𝓡(τ)", _r_antiderivative),
    "coherence": ("D_{−iν} D*_{−iν−1} = −μ₀ν ∫ e^{−i(τ²−s²)} B(s) ds", _coherence),
    "coherence_conjugate": ("D*_{−iν} D_{−iν−1} = −μ̄₀ν ∫ e^{i(τ²−s²)} B(s) ds",
                            lambda t, n: _coherence(t, n, conjugate=True)),
    "population_from_coherence": ("|D_{−iν−1}|² = i√2 ∫ [e^{−iπ/4} D_{−iν}D*_{−iν−1} − c.c.]",
                                  _population_from_coherence),
    "cos_double_integral": ("∫ [e^{−iπ/4} D_{−iν}D*_{−iν−1} − c.c.] = 2√2ν ∫∫ cos(τ₁²−τ₂²) B",
                            _cos_double_integral),
    "sin_double_integral": ("∫ [e^{−iπ/4} D_{−iν}D*_{−iν−1} + c.c.] = 2√2ν ∫∫ sin(τ₁²−τ₂²) B",
                            _sin_double_integral),
    "modulus_double_integral": ("|D_{−iν−1}|² = −4ν ∫∫ cos(τ₁²−τ₂²) B", _modulus_double_integral),
    "i2_double_integral": ("π|D_{−1}|² + 4 Im[D_{−1} 𝒟^{(1)*}_{−1}] = 16 ∫∫ cos(τ₁²−τ₂²) |D_{−1}|²",
                           _i2_double_integral),
}

NU_FREE = {"fresnel_modulus", "r_antiderivative", "i2_double_integral"}


def verify_identity(which: str, samples: Sequence[tuple[float, float]], tol: float) -> IdentityReport:
    """Residual of one identity at each (τ, ν) sample.

    B(s) = |D_{−iν−1}(−iμ₀s)|² − |D_{−iν}(−iμ₀s)|²/ν throughout.  Integrals
    from −∞ run on panels from −12 with the left tail taken from the
    large-|τ| expansions; the logarithmically divergent sine identity is
    compared as increments from −12.
    """
    if which not in IDENTITIES:
        raise DomainError(f"unknown identity {which!r}; choose from {sorted(IDENTITIES)}")
    fn = IDENTITIES[which][1]
    out = []
    for tau, nu in samples:
        tau, nu = float(tau), float(nu)
        if which not in NU_FREE and not nu > 0:
            out.append(SampleResidual(tau, nu, math.inf, False, "ν must be positive"))
            continue
        try:
            res = float(fn(tau, nu))
            out.append(SampleResidual(tau, nu, res, bool(res <= tol)))
        except (ArithmeticError, DomainError) as exc:
            out.append(SampleResidual(tau, nu, math.inf, False, str(exc)))
    return IdentityReport(which, tol, tuple(out))


# ------------------------------------------------------------------ spectrum


def fourier_spectrum(curve: SampledCurve, oversample: int = 8) -> SampledCurve:
    """|Σ f(τ_j) e^{iωτ_j} Δτ| on a zero-padded FFT grid, ω ascending."""
    tau = np.asarray(curve.tau, dtype=float)
    if len(tau) < 2:
        raise DomainError("need at least two samples")
    steps = np.diff(tau)
    dt = steps.mean()
    if not np.allclose(steps, dt, rtol=1e-9, atol=0):
        raise DomainError("fourier_spectrum needs a uniform grid")
    f = np.asarray(curve.values, dtype=float)
    n = len(f) * oversample
    spec = np.fft.fftshift(np.fft.ifft(f, n) * n * dt)
    omega = np.fft.fftshift(np.fft.fftfreq(n, dt)) * 2 * math.pi
    return SampledCurve(omega, np.abs(spec), np.zeros(n))
