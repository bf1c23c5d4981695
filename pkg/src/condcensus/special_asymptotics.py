"""Complexified sphere transforms and steepest-descent asymptotics.

This module realizes numerically the transform of the uniform measure on the
unit sphere at a complex frequency, the transform of the radial bump
exp(-1/(1-|x|^2)), and the two-saddle asymptotics of both, governed by the
complex parameter

    N(xi) = sqrt(|Re xi|^2 - |Im xi|^2 + 2i |Re xi| |Im xi| cos theta)

(principal square root).  "d" is the Euclidean dimension throughout.

Branch policy for the two-saddle sums: each summand is kept only while its
argument stays within the principal sector |arg(+-N)| <= 2 pi / 3; outside the
transition strip |arg N -+ pi/2| > pi/6 this reduces to the dominant saddle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConfigurationError, OscillationBudgetError, PrecisionError
from .quadrature import integrate

BRANCH_SECTOR = 2 * math.pi / 3
BRANCH_FLAG_TOL = 1e-6


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^{d-1} in R^d."""
    return 2 * math.pi ** (d / 2) / math.exp(gammaln(d / 2))


def complexified_norm(rho: float, t: float, theta: float) -> complex:
    """N(xi) from (|Re xi|, |Im xi|, angle): principal sqrt of
    rho^2 - t^2 + 2 i rho t cos(theta)."""
    if rho < 0 or t < 0:
        raise ConfigurationError("rho and t are norms; must be >= 0")
    return cmath.sqrt(rho * rho - t * t + 2j * rho * t * math.cos(theta))


def _branch_terms(N: complex):
    """The admissible summands (+N and/or -N) with a boundary flag."""
    terms = []
    flagged = False
    for sign in (+1, -1):
        z = sign * N
        a = abs(cmath.phase(z))
        if a <= BRANCH_SECTOR:
            terms.append(z)
        if abs(a - BRANCH_SECTOR) < BRANCH_FLAG_TOL:
            flagged = True
    return terms, flagged


# --------------------------------------------------------------------------
# Fourier transform of the sphere
# --------------------------------------------------------------------------


def sphere_transform(N: complex, d: int, *, rel_tol: float = 1e-11) -> complex:
    """|omega_{d-2}| int_0^pi e^{N cos phi} sin^{d-2}(phi) dphi for d >= 2.

    Relative tolerance 1e-10 is guaranteed for |N| <= 500; larger frequencies
    raise PrecisionError with the node-count diagnostic.
    """
    if d < 2:
        raise ConfigurationError("sphere_transform needs d >= 2")
    if abs(N) > 500:
        raise PrecisionError(
            f"|N| = {abs(N):.1f} exceeds the supported budget (500)",
            required_nodes=int(64 * abs(N)))
    omega = sphere_area(d - 1)
    panels = max(8, int(abs(N) / 2))

    def f(phi):
        return np.exp(N * np.cos(phi)) * np.sin(phi) ** (d - 2)

    val = integrate(f, 0.0, math.pi, rel_tol=rel_tol, initial_panels=panels,
                    abs_floor=1e-300)
    return omega * val


def sphere_transform_bessel(N: complex, d: int, *, dps: int = 30) -> complex:
    """Independent closed form (2 pi)^{d/2} (iN)^{1-d/2} J_{d/2-1}(iN).

    Evaluated in arbitrary precision; the removable singularity at N = 0 is
    the total sphere measure.
    """
    import mpmath

    if N == 0:
        return sphere_area(d)
    with mpmath.workdps(dps):
        z = mpmath.mpc(N.real, N.imag) if isinstance(N, complex) else mpmath.mpf(N)
        nu = mpmath.mpf(d) / 2 - 1
        val = (2 * mpmath.pi) ** (mpmath.mpf(d) / 2) * (1j * z) ** (-nu) \
            * mpmath.besselj(nu, 1j * z)
        return complex(val)


def sphere_asymptotic(N: complex, d: int) -> complex:
    """Two-saddle main term (2 pi / |N|)^{(d-1)/2} (c_+ e^N + c_- e^{-N}),
    c_{+-} = (+-N/|N|)^{(1-d)/2}; remainder is one power of N down."""
    if abs(N) < 5:
        raise ConfigurationError("asymptotic regime needs |N| >= 5")
    terms, _ = _branch_terms(N)
    r = abs(N)
    total = 0j
    for z in terms:
        c = (z / r) ** ((1 - d) / 2)
        total += c * cmath.exp(z)
    return (2 * math.pi / r) ** ((d - 1) / 2) * total


# --------------------------------------------------------------------------
# scaled complex values (for quantities of size e^{+-2000})
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledComplex:
    """A complex number m * exp(off), for magnitudes beyond float range."""

    m: complex
    off: float

    def normalized(self) -> "ScaledComplex":
        a = abs(self.m)
        if a == 0:
            return ScaledComplex(0j, 0.0)
        return ScaledComplex(self.m / a, self.off + math.log(a))

    def ratio(self, other: "ScaledComplex") -> complex:
        return self.m / other.m * cmath.exp(self.off - other.off)

    def to_complex(self) -> complex:
        log_mag = self.off + (math.log(abs(self.m)) if self.m else -math.inf)
        if log_mag > 705:
            raise PrecisionError(
                f"value of magnitude e^{log_mag:.0f} exceeds float range; "
                "use the scaled representation")
        return self.m * math.exp(self.off)

    def sci_parts(self) -> tuple[str, str]:
        """Decimal scientific strings for (Re, Im), any exponent size."""
        return (_sci(self.m.real, self.off), _sci(self.m.imag, self.off))


def _sci(x: float, off: float) -> str:
    if x == 0:
        return "0"
    log10 = (math.log(abs(x)) + off) / math.log(10)
    e10 = math.floor(log10)
    mant = 10 ** (log10 - e10)
    return f"{'-' if x < 0 else ''}{mant:.12f}e{e10:+03d}"


# --------------------------------------------------------------------------
# the inner integral I(s, u) and its steepest-descent asymptotics
# --------------------------------------------------------------------------


def I_integral_scaled(s: complex, u: float, d: int, *,
                      rel_tol: float = 1e-11) -> ScaledComplex:
    """I(s,u) = int_{-1}^{1} e^{s x - u/(1-x^2)} (1-x^2)^{(d-1)/2} dx,
    as a ScaledComplex (the magnitude reaches e^{|Re s|}).

    The integrand vanishes to infinite order at both endpoints; resolution is
    set by the oscillation |Im s| and the endpoint scale sqrt(u).
    """
    s = complex(s)
    if u < 1:
        raise ConfigurationError("u >= 1 required (u = 1/(1 - t^2), t in [0,1))")
    if abs(s) > 2000 and abs(abs(cmath.phase(s)) - math.pi / 2) < math.pi / 12:
        raise OscillationBudgetError(
            f"|s| = {abs(s):.0f} with arg s near +-pi/2 exceeds the "
            "oscillation budget (|s| <= 2000)")

    p = (d - 1) / 2
    off = abs(s.real)  # peel the exponential peak so |integrand| <= 1

    def f(x):
        y = 1.0 - x * x
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            vals = np.exp(s * x - off - u / y) * y ** p
        return np.where(y > 0, vals, 0.0)

    # float64 floor: severe cancellation can push |I| far below the integrand
    # peak; stop once refinements move less than eps * peak
    xs = np.linspace(-1 + 1e-9, 1 - 1e-9, 4001)
    peak_log = float(np.max(s.real * xs - off - u / (1 - xs * xs)))
    floor = 4e-15 * math.exp(peak_log)

    panels = max(16, int(abs(s.imag) / 2), int(4 * math.sqrt(u)))
    m = integrate(f, -1.0, 1.0, rel_tol=rel_tol, initial_panels=panels,
                  abs_floor=floor)
    return ScaledComplex(m, off).normalized()


def I_integral(s: complex, u: float, d: int, *, rel_tol: float = 1e-11) -> complex:
    """Plain-complex I(s,u) for moderate |Re s|; see I_integral_scaled."""
    return I_integral_scaled(s, u, d, rel_tol=rel_tol).to_complex()


def I_asymptotic_scaled(s: complex, u: float, d: int) -> ScaledComplex:
    """The displayed truncation of the steepest-descent expansion:

        sum_{+-} sqrt(pi)/(2 sqrt(u)) (2u/(+-s))^{(d+2)/4}
                 exp(+-s - sqrt(+-2us) - u/4),

    valid for u << |s|, with relative accuracy O(u^{3/2}/sqrt(|s|)).
    """
    if u < 1:
        raise ConfigurationError("u >= 1 required")
    terms, _ = _branch_terms(complex(s))
    off = abs(complex(s).real)
    total = 0j
    for z in terms:
        pref = math.sqrt(math.pi) / (2 * math.sqrt(u)) * (2 * u / z) ** ((d + 2) / 4)
        total += pref * cmath.exp(z - off - cmath.sqrt(2 * u * z) - u / 4)
    return ScaledComplex(total, off).normalized()


def I_asymptotic(s: complex, u: float, d: int) -> complex:
    return I_asymptotic_scaled(s, u, d).to_complex()


# --------------------------------------------------------------------------
# transform of the bump e^{-1/(1-|x|^2)} in R^d
# --------------------------------------------------------------------------


def g_hat(N: complex, d: int, *, rel_tol: float = 1e-10) -> complex:
    """Bump transform via the radial representation
    int_0^1 e^{-1/(1-r^2)} omega_hat(r N) r^{d-1} dr  (d >= 2),
    or directly I(N, 1) for d = 1."""
    if d < 1:
        raise ConfigurationError("d >= 1 required")
    if d == 1:
        return I_integral(N, 1.0, 1, rel_tol=rel_tol)
    omega = sphere_area(d - 1)
    pnl_phi = max(8, int(abs(N) / 2))

    def inner(r_nodes: np.ndarray) -> np.ndarray:
        # omega_hat(r N)/|omega_{d-2}| on a vector of radii, one phi-quadrature
        def f(phi):
            # outer product: radii x phi nodes
            return (np.exp(np.multiply.outer(r_nodes * N, np.cos(phi)))
                    * np.sin(phi) ** (d - 2))

        x0, w0 = np.polynomial.legendre.leggauss(32)
        total = np.zeros(len(r_nodes), dtype=complex)
        prev = None
        panels = pnl_phi
        while True:
            edges = np.linspace(0, math.pi, panels + 1)
            half = 0.5 * np.diff(edges)
            mid = 0.5 * (edges[1:] + edges[:-1])
            phi = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
            vals = f(phi).reshape(len(r_nodes), panels, 32)
            total = (vals * w0[None, None, :]).sum(axis=2) @ half
            if prev is not None and np.allclose(total, prev, rtol=rel_tol / 4,
                                                atol=1e-300):
                return total
            if panels > 5000:
                raise PrecisionError("phi-quadrature stalled", required_nodes=panels * 32)
            prev = total
            panels *= 2

    def outer(r):
        y = 1.0 - r * r
        with np.errstate(over="ignore", divide="ignore"):
            damp = np.where(y > 0, np.exp(-1.0 / np.where(y > 0, y, 1.0)), 0.0)
        return damp * inner(r) * r ** (d - 1)

    val = integrate(outer, 0.0, 1.0, rel_tol=rel_tol, initial_panels=16,
                    abs_floor=1e-300)
    return omega * val


def g_hat_2d(N: complex, d: int, *, rel_tol: float = 1e-10) -> complex:
    """Independent double-integral representation
    |omega_{d-2}| int_0^1 int_{-1}^1 e^{N x - u_t/(1-x^2)} (1-x^2)^{(d-1)/2}
    dx t^{d-2} dt, with u_t = 1/(1-t^2)  (d >= 2)."""
    if d < 2:
        raise ConfigurationError("the double-integral form needs d >= 2")
    omega = sphere_area(d - 1)

    def outer(t):
        u = 1.0 / (1.0 - t * t)
        vals = np.array([I_integral(N, float(ui), d, rel_tol=rel_tol / 4)
                         if ui < 750 else 0.0 for ui in u])
        return vals * t ** (d - 2)

    val = integrate(outer, 0.0, 1.0 - 1e-12, rel_tol=rel_tol, initial_panels=8,
                    abs_floor=1e-300)
    return omega * val


def g_hat_asymptotic(N: complex, d: int) -> tuple[complex, bool]:
    """The two-saddle main term

        (2 pi)^{d/2} / (8e)^{1/4} sum_{+-} e^{+-N - sqrt(+-2N)} / (+-N)^{d/2+1/4}

    with the branch policy above.  Returns (value, boundary_flag); the flag is
    set when arg N sits within 1e-6 of the sector cutover.
    """
    terms, flagged = _branch_terms(complex(N))
    pref = (2 * math.pi) ** (d / 2) / (8 * math.e) ** 0.25
    total = 0j
    for z in terms:
        total += cmath.exp(z - cmath.sqrt(2 * z)) / z ** (d / 2 + 0.25)
    return pref * total, flagged


# --------------------------------------------------------------------------
# error scans
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    d: int
    s: complex
    u: float
    quad: ScaledComplex
    asym: ScaledComplex

    @property
    def rel_err(self) -> float:
        return abs(self.quad.ratio(self.asym) - 1.0)


def isu_scan(s_values, u_values, d_values, *, rel_tol: float = 1e-11,
             workers: int = 1) -> list[ScanRow]:
    """Tabulate I(s,u) against its asymptotics on a parameter grid."""
    from .rng import deterministic_map

    grid = [(d, float(u), complex(s))
            for d in d_values for u in u_values for s in s_values]

    def row(args):
        d, u, s = args
        return ScanRow(d=d, s=s, u=u,
                       quad=I_integral_scaled(s, u, d, rel_tol=rel_tol),
                       asym=I_asymptotic_scaled(s, u, d))

    return deterministic_map(row, grid, workers)


def fit_exponent(xs, errs) -> float:
    """Least-squares slope of log err against log x."""
    xs = np.log(np.asarray(xs, dtype=float))
    errs = np.log(np.asarray(errs, dtype=float))
    return float(np.polyfit(xs, errs, 1)[0])


def envelope_constant(rows: list[ScanRow]) -> float:
    """Smallest C with rel_err <= C u^{3/2} |s|^{-1/2} across the scan."""
    return max(r.rel_err * abs(r.s) ** 0.5 / r.u ** 1.5 for r in rows)
