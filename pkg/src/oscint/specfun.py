"""Special-function kernel.

Gamma and polygamma at real arguments, Bell polynomials, Fresnel integrals,
the complex error function, parabolic cylinder functions D_p(z) and their
index-derivative generalisation 𝒟^{(k)}_p(z), and the 2F2(1,1;b1,b2;w)
series.

The parabolic cylinder series

    D_p(z) = e^{-z²/4}/Γ(-p) Σ_n (-z)^n/n! 2^{(n-p-2)/2} Γ((n-p)/2)

converges for every z but its terms grow to roughly e^{|z|²/2} before they
decay, so the sum cancels catastrophically in double precision once |z|
exceeds a few units.  The series and the 2F2 sum therefore run in a private
mpmath context whose working precision is sized from a cheap float scan of
the term magnitudes.  Everything returned to callers is a Python float or
complex.
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError, DomainError, QuadratureError, RangeError

EULER_GAMMA = 0.57721566490153286061
LN2 = math.log(2.0)
SQRT_PI = math.sqrt(math.pi)

_local = threading.local()


def _ctx() -> mpmath.ctx_mp.MPContext:
    # one context per thread: mpmath mutates precision while it works
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = mpmath.ctx_mp.MPContext()
        _local.ctx = ctx
    return ctx


@dataclass(frozen=True)
class SeriesTruncation:
    """Stopping rule for the convergent series in this module.

    Summation stops once three consecutive terms fall below
    ``abs_tol * (1 + |partial sum|)``; ``max_terms`` bounds the work.
    """

    abs_tol: float = 1e-14
    max_terms: int = 1_000_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise DomainError(f"max_terms must be a positive integer, got {self.max_terms}")


DEFAULT_TRUNCATION = SeriesTruncation()


@dataclass(frozen=True)
class ModifiedPCFSpec:
    """One evaluation of 𝒟^{(order)}_{index}(argument)."""

    order: int
    index: complex
    argument: complex
    trunc: SeriesTruncation = field(default=DEFAULT_TRUNCATION)

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 0:
            raise DomainError(f"derivative order must be a non-negative integer, got {self.order}")
        index = complex(self.index)
        if not index.real < 0:
            raise DomainError(f"index must have negative real part, got {index}")
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "argument", complex(self.argument))


# ---------------------------------------------------------------- exact numbers


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with B_1 = -1/2."""
    if n < 0:
        raise DomainError("Bernoulli index must be non-negative")
    if n == 0:
        return Fraction(1)
    if n > 1 and n % 2 == 1:
        return Fraction(0)
    acc = Fraction(0)
    for j in range(n):
        acc += math.comb(n + 1, j) * bernoulli(j)
    return -acc / (n + 1)


def zeta_even_rational(s: int) -> Fraction:
    """Rational q with ζ(s) = q·π^s for even s ≥ 2."""
    if s < 2 or s % 2:
        raise DomainError("zeta_even_rational needs an even argument ≥ 2")
    half = s // 2
    return Fraction((-1) ** (half + 1) * 2 ** (s - 1)) * bernoulli(s) / math.factorial(s)


@lru_cache(maxsize=None)
def zeta_int(s: int) -> float:
    """Riemann ζ(s) for integer s ≥ 2 by Euler–Maclaurin summation."""
    if int(s) != s or s < 2:
        raise DomainError(f"zeta_int needs an integer ≥ 2, got {s}")
    if s % 2 == 0:
        return float(zeta_even_rational(s)) * math.pi ** s
    n = 12
    total = math.fsum(j ** -float(s) for j in range(1, n))
    total += n ** (1.0 - s) / (s - 1) + 0.5 * n ** -float(s)
    rising = float(s)
    for j in range(1, 12):
        total += float(bernoulli(2 * j)) / math.factorial(2 * j) * rising * n ** (-s - 2 * j + 1.0)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return total


# ------------------------------------------------------------ gamma, polygamma


def _is_pole(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def gamma_positive(x: float) -> float:
    """Γ(x) for real x > 0; exact products at integers and half-integers."""
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"gamma_positive needs a finite x > 0, got {x}")
    if x > 171.6:
        raise RangeError(f"Γ({x}) overflows double precision")
    if 2 * x == math.floor(2 * x):
        if x == math.floor(x):
            return float(math.factorial(int(x) - 1))
        g = SQRT_PI
        t = 0.5
        while t < x:
            g *= t
            t += 1.0
        return g
    return math.gamma(x)


def _polygamma_asymptotic(r: int, x):
    # large-|x| expansion; x may be complex
    if r == 0:
        acc = (cmath.log(x) if isinstance(x, complex) else math.log(x)) - 0.5 / x
        x2 = x * x
        p = x2
        for k in range(1, 14):
            acc -= float(bernoulli(2 * k)) / (2 * k * p)
            p *= x2
        return acc
    sign = -1.0 if r % 2 == 0 else 1.0
    acc = math.factorial(r - 1) / x ** r + math.factorial(r) / (2 * x ** (r + 1))
    x2 = x * x
    p = x ** (r + 2)
    for k in range(1, 14):
        acc += float(bernoulli(2 * k)) * math.factorial(2 * k + r - 1) / (math.factorial(2 * k) * p)
        p *= x2
    return sign * acc


def _polygamma_shifted(r: int, x, threshold: float):
    # ψ^{(r)}(x) = ψ^{(r)}(x+N) − Σ_{j<N} (−1)^r r! / (x+j)^{r+1}
    coef = (-1) ** r * math.factorial(r)
    acc = 0.0
    while abs(x) < threshold:
        acc += coef / x ** (r + 1)
        x = x + 1
    return _polygamma_asymptotic(r, x) - acc


def polygamma(r: int, x: float) -> float:
    """ψ^{(r)}(x) for real x away from the poles at non-positive integers.

    Integers and half-integers up to 64 use the closed values at 1 and 1/2
    with the upward recurrence; other arguments are shifted above 20 + r and
    summed with the asymptotic expansion.
    """
    if int(r) != r or r < 0:
        raise DomainError(f"polygamma order must be a non-negative integer, got {r}")
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"polygamma needs a finite argument, got {x}")
    if _is_pole(x):
        raise DomainError(f"polygamma has a pole at {x}")
    if 0 < x <= 64 and 2 * x == math.floor(2 * x):
        if x == math.floor(x):
            start = 1.0
            base = -EULER_GAMMA if r == 0 else (-1) ** (r + 1) * math.factorial(r) * zeta_int(r + 1)
        else:
            start = 0.5
            if r == 0:
                base = -EULER_GAMMA - 2 * LN2
            else:
                base = (-1) ** (r + 1) * math.factorial(r) * (2 ** (r + 1) - 1) * zeta_int(r + 1)
        coef = (-1) ** r * math.factorial(r)
        terms = [base]
        t = start
        while t < x:
            terms.append(coef / t ** (r + 1))
            t += 1.0
        return math.fsum(terms)
    return _polygamma_shifted(r, x, 20.0 + r)


def polygamma_line(r: int, nu: float) -> complex:
    """ψ^{(r)}(1 + iν) for real ν: the only complex arguments the library needs."""
    if int(r) != r or r < 0:
        raise DomainError(f"polygamma order must be a non-negative integer, got {r}")
    nu = float(nu)
    if nu == 0.0:
        return complex(polygamma(r, 1.0))
    return complex(_polygamma_shifted(r, complex(1.0, nu), 20.0 + r))


def index_log_derivative(nu: float) -> float:
    """φ_ν = ψ(−ν) − ln2/2, the logarithmic ν-derivative factor of D_ν."""
    return polygamma(0, -float(nu)) - 0.5 * LN2


# -------------------------------------------------------------- Bell polynomials


def bell_partial(n: int, j: int, x: Sequence):
    """Partial Bell polynomial B_{n,j}(x_1, …, x_{n-j+1}).

    Works over any ring whose elements accept ``+`` and ``*`` with ints.
    """
    if j < 1 or j > n:
        raise DomainError(f"bell_partial needs 1 ≤ j ≤ n, got n={n}, j={j}")
    if len(x) != n - j + 1:
        raise DomainError(f"bell_partial({n}, {j}) takes {n - j + 1} arguments, got {len(x)}")
    memo: dict[tuple[int, int], object] = {}

    def b(m: int, q: int):
        if m == 0 and q == 0:
            return 1
        if m == 0 or q == 0 or q > m:
            return 0
        key = (m, q)
        if key not in memo:
            acc = 0
            for i in range(1, m - q + 2):
                acc = acc + math.comb(m - 1, i - 1) * x[i - 1] * b(m - i, q - 1)
            memo[key] = acc
        return memo[key]

    return b(n, j)


def bell_complete_table(n: int, x: Sequence) -> list:
    """[Y_0, …, Y_n] for the complete Bell polynomials of x_1, …, x_n."""
    if len(x) < n:
        raise DomainError(f"need {n} arguments, got {len(x)}")
    ys = [1]
    for m in range(n):
        acc = 0
        for i in range(m + 1):
            acc = acc + math.comb(m, i) * ys[m - i] * x[i]
        ys.append(acc)
    return ys


def bell_complete(n: int, x: Sequence):
    """Complete Bell polynomial Y_n(x_1, …, x_n)."""
    if n < 1:
        raise DomainError(f"bell_complete needs n ≥ 1, got {n}")
    if len(x) != n:
        raise DomainError(f"bell_complete({n}) takes {n} arguments, got {len(x)}")
    return bell_complete_table(n, x)[n]


# --------------------------------------------------------- parabolic cylinder


def _digits_for(log_peak: float, extra: float = 22.0) -> int:
    return max(20, int(math.ceil(log_peak / math.log(10.0) + extra)))


def _log_abs_gamma(w: complex) -> float:
    if w.imag == 0.0:
        return math.lgamma(w.real)
    return float(_ctx().loggamma(mpmath.mpc(w.real, w.imag)).real)


def _series_scan(p: complex, z: complex, kmax: int) -> tuple[float, int]:
    """Peak log-magnitude of the series terms and the index past the peak."""
    az = abs(z)
    if az == 0.0:
        return 0.0, 1
    log_z = math.log(az) + 0.5 * LN2
    peak = -math.inf
    n = 0
    last = -math.inf
    while True:
        xr = (n - p.real) / 2.0
        val = n * log_z - math.lgamma(n + 1.0) + math.lgamma(xr)
        if kmax:
            val += kmax * math.log(abs(math.log(xr + 1.0)) + 3.0)
        peak = max(peak, val)
        if n > az * az + 8 and val < last:
            return peak, n
        last = val
        n += 1


def _modified_series(p: complex, z: complex, kmax: int, trunc: SeriesTruncation,
                     post_exp: complex = 0j) -> tuple[list[complex], int]:
    """Σ-series for 𝒟^{(k)}_p(z), k = 0..kmax, each scaled by e^{post_exp}.

    Even and odd n form two chains whose Gamma argument x = (n−p)/2 steps by
    one, so Γ and ψ^{(r)} advance by their recurrences instead of being
    re-evaluated per term.
    """
    p = complex(p)
    z = complex(z)
    log_peak, n_peak = _series_scan(p, z, kmax)
    log_pref = (-(z * z).real / 4.0 - _log_abs_gamma(-p) + (-p.real - 2.0) / 2.0 * LN2
                + post_exp.real)
    dps = _digits_for(max(0.0, log_peak + log_pref) + kmax * 2.0)
    ctx = _ctx()
    with ctx.workdps(dps):
        pp = ctx.mpc(p.real, p.imag) if p.imag else ctx.mpf(p.real)
        zz = ctx.mpc(z.real, z.imag)
        xs = [-pp / 2, (1 - pp) / 2]
        gam = [ctx.gamma(xs[0]), ctx.gamma(xs[1])]
        psis = [[ctx.psi(r, xs[c]) for r in range(kmax)] for c in (0, 1)]
        rfact = [(-1) ** r * math.factorial(r) for r in range(kmax)]
        halves = [ctx.mpf(-0.5) ** k for k in range(kmax + 1)]
        pref = ctx.exp(-zz * zz / 4 + ctx.mpc(post_exp.real, post_exp.imag)) \
            * ctx.power(2, (-pp - 2) / 2) / ctx.gamma(-pp)
        # magnitudes stay in mp: the terms can pass 1e308 before cancelling
        pref_abs = abs(pref)
        step = -zz * ctx.sqrt(2)
        coef = ctx.mpf(1)
        sums = [ctx.mpc(0)] * (kmax + 1)
        quiet = 0
        n = 0
        while True:
            c = n & 1
            base = coef * gam[c]
            if kmax:
                ys = bell_complete_table(kmax, psis[c])
                terms = [base * ys[k] * halves[k] for k in range(kmax + 1)]
            else:
                terms = [base]
            biggest = ctx.zero
            for k in range(kmax + 1):
                sums[k] += terms[k]
                biggest = max(biggest, abs(terms[k]))
            if n >= n_peak:
                scale = 1 + pref_abs * max(abs(s) for s in sums)
                quiet = quiet + 1 if pref_abs * biggest < trunc.abs_tol * scale else 0
                if quiet >= 3:
                    break
            if n + 1 >= trunc.max_terms:
                partial = [complex(pref * s) for s in sums]
                raise ConvergenceError(
                    f"parabolic cylinder series not converged after {n + 1} terms",
                    partial_sum=partial, terms=n + 1)
            x = xs[c]
            gam[c] *= x
            if kmax:
                inv = 1 / x
                pw = inv
                row = psis[c]
                for r in range(kmax):
                    row[r] += rfact[r] * pw
                    pw *= inv
            xs[c] = x + 1
            n += 1
            coef *= step / n
        return [complex(pref * s) for s in sums], n + 1


def pcf_series_terms(nu: complex, z: complex, count: int) -> list[complex]:
    """First ``count`` unscaled terms a_n of the parabolic cylinder series."""
    p = complex(nu)
    out = []
    for n in range(count):
        x = (n - p) / 2
        g = complex(_ctx().gamma(mpmath.mpc(x.real, x.imag)))
        out.append((-complex(z)) ** n / math.factorial(n) * 2 ** ((n - p - 2) / 2) * g)
    return out


def pcf_series(nu: complex, z: complex, trunc: SeriesTruncation = DEFAULT_TRUNCATION) -> complex:
    """D_ν(z) from the convergent power series; requires Re ν < 0."""
    nu = complex(nu)
    if not nu.real < 0:
        raise DomainError(f"pcf_series needs Re ν < 0, got {nu}")
    return _modified_series(nu, complex(z), 0, trunc)[0][0]


def gamma_index_deriv(k: int, n: int, nu: complex) -> complex:
    """∂^k/∂ν^k Γ((n−ν)/2) = (−1/2)^k Γ(x) Y_k(ψ(x), …, ψ^{(k−1)}(x)), x = (n−ν)/2."""
    if int(k) != k or k < 0 or int(n) != n or n < 0:
        raise DomainError("k and n must be non-negative integers")
    nu = complex(nu)
    x = (n - nu) / 2
    if x.imag == 0.0:
        xr = x.real
        if _is_pole(xr):
            raise DomainError(f"Γ has a pole at {xr}")
        g = gamma_positive(xr) if xr > 0 else math.gamma(xr)
        psis = [polygamma(r, xr) for r in range(k)]
        return complex(g * (-0.5) ** k * bell_complete_table(k, psis)[k])
    ctx = _ctx()
    with ctx.workdps(30):
        xm = ctx.mpc(x.real, x.imag)
        psis = [ctx.psi(r, xm) for r in range(k)]
        return complex(ctx.gamma(xm) * ctx.mpf(-0.5) ** k * bell_complete_table(k, psis)[k])


def pcf_modified_family(kmax: int, nu: complex, z: complex,
                        trunc: SeriesTruncation = DEFAULT_TRUNCATION) -> tuple[complex, ...]:
    """(𝒟^{(0)}_ν(z), …, 𝒟^{(kmax)}_ν(z)) from one pass over the series."""
    if int(kmax) != kmax or kmax < 0:
        raise DomainError(f"kmax must be a non-negative integer, got {kmax}")
    nu = complex(nu)
    if not nu.real < 0:
        raise DomainError(f"modified parabolic cylinder functions need Re ν < 0, got {nu}")
    return tuple(_modified_series(nu, complex(z), int(kmax), trunc)[0])


def pcf_modified(spec: ModifiedPCFSpec) -> complex:
    """𝒟^{(k)}_ν(z): the series with Γ((n−ν)/2) replaced by its k-th ν-derivative."""
    return _modified_series(spec.index, spec.argument, spec.order, spec.trunc)[0][spec.order]


def _pcf_large(p: complex, z: complex) -> tuple[complex, float] | None:
    """Large-|z| expansion of D_p(z); None when it cannot reach ~1e-15."""
    z2 = 2 * z * z
    ctx = _ctx()
    # z²/4 reaches 1e9 and more, so the exponents need extra digits
    with ctx.workdps(30):
        zm = ctx.mpc(z.real, z.imag)
        pm = ctx.mpc(p.real, p.imag)
        lzm = ctx.log(zm)
        zzm = zm * zm / 4
        lead = complex(ctx.exp(pm * lzm - zzm))

    def series(first, ratio):
        total = first
        term = first
        prev = abs(term)
        for s in range(400):
            term = term * ratio(s)
            mag = abs(term)
            if mag > prev:
                return total, prev
            total += term
            if mag <= 1e-17 * abs(total):
                return total, mag
            prev = mag
        return total, prev

    s1, e1 = series(1 + 0j, lambda s: -(-p + 2 * s) * (-p + 2 * s + 1) / ((s + 1) * z2))
    if e1 > 1e-15 * abs(s1):
        return None
    val = lead * s1
    err = abs(val) * e1
    ph = cmath.phase(z)
    if abs(ph) > math.pi / 2:
        s2, e2 = series(1 + 0j, lambda s: (1 + p + 2 * s) * (2 + p + 2 * s) / ((s + 1) * z2))
        if e2 > 1e-15 * abs(s2):
            return None
        sign = 1 if ph > 0 else -1
        with ctx.workdps(30):
            rgam = complex(ctx.rgamma(-pm))
            other = complex(ctx.exp(zzm + (-pm - 1) * lzm))
        if rgam != 0:
            second = -math.sqrt(2 * math.pi) * rgam * cmath.exp(sign * 1j * math.pi * p) \
                * other * s2
            val += second
            err += abs(second) * e2
    return val, err


def pcf(nu: complex, z: complex) -> complex:
    """D_ν(z) for any complex index.

    Large |z| uses the asymptotic expansion with its Stokes-sector
    correction; otherwise the power series, reached through the three-term
    recurrence D_{p+1} = z D_p − p D_{p−1} when Re ν ≥ 0.
    """
    p = complex(nu)
    z = complex(z)
    if abs(z) >= 5.5 and abs(z) * abs(z) > 4 * abs(p) + 16:
        large = _pcf_large(p, z)
        if large is not None:
            return large[0]
    if p.real < 0:
        return pcf_series(p, z)
    steps = int(math.floor(p.real)) + 1
    q = p - steps
    lower = pcf_series(q - 1, z)
    upper = pcf_series(q, z)
    for _ in range(steps):
        lower, upper = upper, z * upper - q * lower
        q += 1
    return upper


def pcf_via_integral(nu: complex, z: complex) -> complex:
    """D_ν(z) from e^{−z²/4}/Γ(−ν) ∫₀^∞ e^{−xz−x²/2} x^{−ν−1} dx (Re ν < 0).

    Independent check on the series.  The algebraic endpoint factor
    x^{−Re ν−1} is handed to QUADPACK as a weight; the upper limit X is the
    first point where the integrand bound drops below 1e-16.
    """
    nu = complex(nu)
    z = complex(z)
    if not nu.real < 0:
        raise DomainError(f"pcf_via_integral needs Re ν < 0, got {nu}")
    alpha = -nu.real - 1.0
    omega = -nu.imag

    def log_bound(x):
        return -x * z.real - 0.5 * x * x + alpha * math.log(x)

    peak = max(log_bound(x) for x in np.linspace(1e-3, 10 + abs(z), 400))
    upper = max(1.0, -z.real)
    while log_bound(upper) > peak - 40.0:
        upper *= 1.25

    def phase(x):
        return cmath.exp(-x * z - 0.5 * x * x + 1j * omega * math.log(x)) if x > 0 else \
            (1.0 if omega == 0 else 0.0)

    parts = []
    errs = []
    for fn in (lambda x: phase(x).real, lambda x: phase(x).imag):
        val, err = integrate.quad(fn, 0.0, upper, weight="alg", wvar=(alpha, 0.0), limit=400,
                                  epsabs=1e-13, epsrel=1e-12)
        parts.append(val)
        errs.append(err)
    total = complex(parts[0], parts[1])
    err = math.hypot(*errs)
    value = cmath.exp(-z * z / 4) / complex(special.gamma(-nu)) * total
    if err > 1e-9 * max(1.0, abs(total)):
        raise QuadratureError("parabolic cylinder integral did not converge", estimate=value, error=err)
    return value


# ------------------------------------------------------ error function, Fresnel

ERF_SWITCH_RADIUS = 6.0
ERF_OVERFLOW_EXPONENT = 700.0


def _erfc_continued_fraction(z: complex) -> complex:
    # Laplace continued fraction, modified Lentz; Re z > 0
    tiny = 1e-300
    f = z
    c = z
    d = 0j
    for j in range(1, 5000):
        a = j / 2.0
        d = z + a * d
        d = tiny if d == 0 else d
        d = 1 / d
        c = z + a / c
        c = tiny if c == 0 else c
        delta = c * d
        f *= delta
        if abs(delta - 1) < 1e-16:
            return cmath.exp(-z * z) / (SQRT_PI * f)
    raise ConvergenceError(f"erfc continued fraction did not converge at {z}")


def erf_complex(z: complex) -> complex:
    """erf(z) for complex z.

    For |z| < 6, or near the imaginary axis, erfc(z) = e^{−z²/2}D_{−1}(√2 z)/√(π/2)
    through the parabolic cylinder series; otherwise the Laplace continued
    fraction for erfc, reflected through oddness when Re z < 0.  Results
    with |e^{−z²}| above e^{700} raise RangeError.
    """
    z = complex(z)
    if z == 0:
        return 0j
    if -(z * z).real > ERF_OVERFLOW_EXPONENT:
        raise RangeError(f"erf({z}) overflows double precision")
    if abs(z) >= ERF_SWITCH_RADIUS and abs(z.real) >= 2.0:
        if z.real > 0:
            return 1 - _erfc_continued_fraction(z)
        return _erfc_continued_fraction(-z) - 1
    if z.real < 0:
        return -erf_complex(-z)
    d = _modified_series(-1.0 + 0j, math.sqrt(2.0) * z, 0, DEFAULT_TRUNCATION,
                         post_exp=-z * z / 2)[0][0]
    return 1 - d / math.sqrt(math.pi / 2)


def fresnel(x: float) -> tuple[float, float]:
    """(C(x), S(x)) = ∫₀^x (cos, sin)(πt²/2) dt, so that C(∞) = S(∞) = 1/2."""
    x = float(x)
    if math.isnan(x):
        raise DomainError("fresnel argument is NaN")
    if math.isinf(x):
        return (0.5, 0.5) if x > 0 else (-0.5, -0.5)
    if x < 0:
        c, s = fresnel(-x)
        return -c, -s
    if x > 1e7:
        # leading asymptotic term; the erf argument would lose all phase accuracy
        t = math.pi * x * x / 2
        return 0.5 + math.sin(t) / (math.pi * x), 0.5 - math.cos(t) / (math.pi * x)
    w = (1 + 1j) / 2 * erf_complex(SQRT_PI / 2 * (1 - 1j) * x)
    return w.real, w.imag


# ------------------------------------------------------------------- 2F2 and R


def hyp2f2_11(b1: float, b2: float, w: complex,
              trunc: SeriesTruncation = DEFAULT_TRUNCATION) -> complex:
    """₂F₂(1, 1; b1, b2; w) by direct summation with the term recurrence."""
    for b in (b1, b2):
        if b <= 0 and b == math.floor(b):
            raise DomainError(f"lower parameter {b} is a non-positive integer")
    w = complex(w)
    aw = abs(w)
    log_t = 0.0
    peak = 0.0
    n = 0
    while n < 8 or log_t > peak - 60 or n < aw:
        if aw == 0:
            break
        log_t += math.log((n + 1) * aw / abs((b1 + n) * (b2 + n)))
        peak = max(peak, log_t)
        n += 1
        if n > trunc.max_terms:
            break
    ctx = _ctx()
    with ctx.workdps(_digits_for(peak)):
        ww = ctx.mpc(w.real, w.imag)
        bb1 = ctx.mpf(b1)
        bb2 = ctx.mpf(b2)
        term = ctx.mpf(1)
        total = ctx.mpc(1)
        quiet = 0
        for n in range(trunc.max_terms):
            term = term * (n + 1) * ww / ((bb1 + n) * (bb2 + n))
            total += term
            if float(abs(term)) < trunc.abs_tol * (1 + float(abs(total))):
                quiet += 1
                if quiet >= 3:
                    return complex(total)
            else:
                quiet = 0
        raise ConvergenceError("2F2 series not converged", partial_sum=complex(total),
                               terms=trunc.max_terms)


def r_function(tau: float) -> complex:
    """𝓡(τ) = (π/4) erf(e^{−iπ/4} τ) + (τ²/2) ₂F₂(1,1;3/2,2;iτ²).

    d𝓡/dτ = ∫_{−∞}^τ e^{i(τ²−s²)} ds and 𝓡(0) = 0.
    """
    tau = float(tau)
    if not math.isfinite(tau):
        raise DomainError("r_function needs a finite τ")
    if tau == 0.0:
        return 0j
    e = erf_complex(cmath.exp(-0.25j * math.pi) * tau)
    return math.pi / 4 * e + tau * tau / 2 * hyp2f2_11(1.5, 2.0, 1j * tau * tau)
