"""The archimedean unitary-dual parameter space.

A discrete datum lists, for each infinite place of the field, an ordered block
decomposition: at a real place the blocks are GL1 characters sgn^eps or GL2
discrete series of weight k >= 2; at a complex place they are GL1 characters
z -> (z/|z|)^k.  The continuous parameter attaches one (possibly complex)
number per block.

Conventions fixed here (the source material leaves them open):

* the conductor normalization constant is c = 1;
* the conductor multiplies one factor (1 + |mu|) per Gamma_R-parameter and per
  embedding, so complex places contribute their factors squared -- this is the
  convention under which the conductor zeta function converges exactly for
  Re s > n - 1/d;
* Lebesgue measure on the tempered parameter space uses orthonormal
  coordinates for the block trace form (block coordinates weighted by
  [F_v:R] * block size) and is divided by (2 pi)^dim, so that localizer
  normalizations come out to R^{-dim} exactly;
* Harish-Chandra constants C_M are set to 1 and flagged: densities are exact
  up to one positive constant per block shape, except for zero-dimensional
  components, where atoms carry mass deg(delta) and conductor-1 points have
  mass one.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, replace
from typing import Iterator, Sequence

import numpy as np
from scipy.special import loggamma

from .errors import ConfigurationError, DivergenceError, UnsupportedCaseError
from .number_field import FieldDescriptor
from . import rng as _rng

TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------------------
# discrete data
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    gl: int          # 1 or 2
    param: int       # eps for GL1/R, weight k for GL2/R, character index k for GL1/C

    def size(self) -> int:
        return self.gl


@dataclass(frozen=True)
class PlaceDatum:
    type: str                    # "R" or "C"
    blocks: tuple[Block, ...]

    def __post_init__(self):
        for b in self.blocks:
            if self.type == "C" and b.gl != 1:
                raise ConfigurationError("complex places only carry GL1 blocks")
            if self.type == "R" and b.gl == 2 and b.param < 2:
                raise ConfigurationError("GL2 discrete-series weight must be >= 2")
            if self.type == "R" and b.gl == 1 and b.param not in (0, 1):
                raise ConfigurationError("GL1 sign exponent must be 0 or 1")

    @property
    def n(self) -> int:
        return sum(b.gl for b in self.blocks)

    @property
    def degree_over_R(self) -> int:
        return 1 if self.type == "R" else 2


@dataclass(frozen=True)
class DiscreteDatum:
    places: tuple[PlaceDatum, ...]

    def __post_init__(self):
        ns = {p.n for p in self.places}
        if len(ns) != 1:
            raise ConfigurationError(f"block sizes disagree across places: {ns}")

    @property
    def n(self) -> int:
        return self.places[0].n

    @property
    def degree(self) -> int:
        """Formal degree proxy deg(delta) = prod over GL2 blocks of (k - 1)."""
        deg = 1
        for p in self.places:
            for b in p.blocks:
                if b.gl == 2:
                    deg *= b.param - 1
        return deg

    @property
    def weight(self) -> int:
        """Max block weight, the cutoff proxy for enumeration."""
        w = 0
        for p in self.places:
            for b in p.blocks:
                w = max(w, abs(b.param))
        return w

    @property
    def is_spherical(self) -> bool:
        return all(b.gl == 1 and b.param == 0 for p in self.places for b in p.blocks)

    def block_index(self) -> list[tuple[int, PlaceDatum, Block]]:
        return [(vi, p, b) for vi, p in enumerate(self.places) for b in p.blocks]

    def to_json(self) -> dict:
        places = []
        for p in self.places:
            blocks = []
            for b in p.blocks:
                if p.type == "R" and b.gl == 1:
                    blocks.append({"gl": 1, "eps": b.param})
                else:
                    blocks.append({"gl": b.gl, "k": b.param})
            places.append({"type": p.type, "blocks": blocks})
        return {"places": places}

    @staticmethod
    def from_json(obj: dict | str) -> "DiscreteDatum":
        if isinstance(obj, str):
            obj = json.loads(obj)
        places = []
        for p in obj["places"]:
            blocks = []
            for b in p["blocks"]:
                param = b.get("eps", b.get("k"))
                blocks.append(Block(gl=b["gl"], param=param))
            places.append(PlaceDatum(type=p["type"], blocks=tuple(blocks)))
        return DiscreteDatum(places=tuple(places))


def spherical_datum(F: FieldDescriptor, n: int) -> DiscreteDatum:
    """The everywhere-unramified datum: n trivial GL1 blocks per place."""
    places = tuple(
        PlaceDatum(type=t, blocks=tuple(Block(1, 0) for _ in range(n)))
        for t in F.infinite_places)
    return DiscreteDatum(places=places)


@dataclass(frozen=True)
class SpectralPoint:
    """(delta, nu): one continuous parameter per block, complex in general."""

    delta: DiscreteDatum
    nu: tuple[complex, ...]
    trace_zero: bool = True

    def __post_init__(self):
        space = SpectralSpace(self.delta)
        if len(self.nu) != space.num_blocks:
            raise ConfigurationError("nu has wrong number of block coordinates")
        if self.trace_zero:
            t = sum(w * z for w, z in zip(space.weights, self.nu))
            if abs(t) > 1e-9 * (1 + max(abs(z) for z in self.nu)):
                raise ConfigurationError(f"trace-zero flag set but weighted trace = {t}")


# --------------------------------------------------------------------------
# the parameter space h_M
# --------------------------------------------------------------------------


class SpectralSpace:
    """Coordinates on the trace-zero continuous parameter space of a datum.

    Block coordinates x_b carry the weight w_b = [F_v:R] * (block size) in the
    trace form; h_M is the hyperplane sum_b w_b x_b = 0.  Orthonormal
    coordinates for h_M (and its central/semisimple split) are exposed for
    quadrature and sampling.
    """

    def __init__(self, delta: DiscreteDatum):
        self.delta = delta
        self.index = delta.block_index()
        self.num_blocks = len(self.index)
        self.weights = np.array(
            [p.degree_over_R * b.gl for (_vi, p, b) in self.index], dtype=float)
        self.dim = self.num_blocks - 1
        sq = np.sqrt(self.weights)
        u = sq / np.linalg.norm(sq)
        # orthonormal basis of the hyperplane orthogonal to u, pulled back to
        # block coordinates (columns of .basis, shape (num_blocks, dim))
        full = np.linalg.svd(np.eye(self.num_blocks) - np.outer(u, u))[0][:, : self.dim]
        self.basis = full / sq[:, None]
        # central subspace h_G: per-place constants, intersected with trace zero
        self._place_of_block = np.array([vi for (vi, _p, _b) in self.index])
        self.num_places = len(delta.places)
        self.dim_central = self.num_places - 1

    # mapping between h_M coordinates and block coordinates
    def blocks_from_coords(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=x.dtype if np.iscomplexobj(x) else float)
        return x @ self.basis.T

    def coords_from_blocks(self, nu: np.ndarray) -> np.ndarray:
        nu = np.asarray(nu)
        return nu @ (self.basis * self.weights[:, None])

    def inner(self, a: np.ndarray, b: np.ndarray):
        return np.sum(self.weights * a * b, axis=-1)

    def norm(self, a: np.ndarray):
        return np.sqrt(np.abs(np.sum(self.weights * np.asarray(a) ** 2, axis=-1)))

    def weighted_trace(self, nu: np.ndarray):
        return np.sum(self.weights * nu, axis=-1)

    def central_projection(self, nu: np.ndarray) -> np.ndarray:
        """Project block coordinates onto h_G (per-place constants, trace zero)."""
        nu = np.asarray(nu)
        out = np.zeros_like(nu)
        for vi in range(self.num_places):
            sel = self._place_of_block == vi
            wsel = self.weights[sel]
            out[..., sel] = (np.sum(nu[..., sel] * wsel, axis=-1) / wsel.sum())[..., None]
        return out

    # Weyl group: permutations of identical blocks within each place
    def weyl_elements(self) -> list[np.ndarray]:
        groups: list[list[int]] = []
        offset = 0
        for p in self.delta.places:
            key = {}
            for j, b in enumerate(p.blocks):
                key.setdefault((b.gl, b.param), []).append(offset + j)
            groups.extend(key.values())
            offset += len(p.blocks)
        perms_per_group = [list(itertools.permutations(g)) for g in groups]
        elements = []
        for combo in itertools.product(*perms_per_group):
            perm = np.arange(self.num_blocks)
            for g, image in zip(groups, combo):
                perm[g] = image
            elements.append(perm)
        return elements


# --------------------------------------------------------------------------
# conductor exponents, conductor, majorizer
# --------------------------------------------------------------------------


def mu_parameters(delta: DiscreteDatum, nu: Sequence[complex]):
    """The multiset of n Gamma-shifts per place, with the place multiplicity.

    Returns a list of (multiplicity d_v, [mu_1..mu_n]) pairs, one per place.
    Real-place GL2 blocks of weight k contribute the duplicated pair
    (k-1)/2 + nu and (k+1)/2 + nu; complex-place characters contribute
    |k|/2 + nu, repeated once per conjugate embedding via the multiplicity.
    """
    out = []
    it = iter(nu)
    vals = {vi: [] for vi in range(len(delta.places))}
    for (vi, p, b), z in zip(delta.block_index(), it):
        if p.type == "R" and b.gl == 1:
            vals[vi].append(b.param + z)
        elif p.type == "R" and b.gl == 2:
            vals[vi].append((b.param - 1) / 2 + z)
            vals[vi].append((b.param + 1) / 2 + z)
        else:
            vals[vi].append(abs(b.param) / 2 + z)
    for vi, p in enumerate(delta.places):
        out.append((p.degree_over_R, vals[vi]))
    return out


def conductor(delta: DiscreteDatum, nu: Sequence[complex]) -> float:
    """Iwaniec-Sarnak archimedean conductor prod_u prod_j (1 + |mu_uj|), c = 1."""
    q = 1.0
    for mult, mus in mu_parameters(delta, nu):
        place = 1.0
        for m in mus:
            place *= 1.0 + abs(m)
        q *= place ** mult
    return q


def _pair_param(b: Block, place_type: str) -> float:
    if place_type == "C":
        return b.param
    return b.param if b.gl == 2 else b.param


def beta(delta: DiscreteDatum, nu: Sequence[complex]) -> float:
    """Plancherel majorizer deg(delta) * prod over places and block pairs i<j of
    (1 + | |k_i - k_j| + nu_i - nu_j |), with the complex-place factors squared."""
    val = float(delta.degree)
    idx = 0
    for p in delta.places:
        m = len(p.blocks)
        zs = nu[idx: idx + m]
        place = 1.0
        for i in range(m):
            for j in range(i + 1, m):
                gap = abs(_pair_param(p.blocks[i], p.type) - _pair_param(p.blocks[j], p.type))
                place *= 1.0 + abs(gap + zs[i] - zs[j])
        val *= place ** p.degree_over_R
        idx += m
    return val


# vectorized versions over (N, B) tempered block coordinates ------------------


def conductor_many(delta: DiscreteDatum, t: np.ndarray) -> np.ndarray:
    """conductor(delta, i*t) for an (N, B) array of tempered block coordinates."""
    t = np.atleast_2d(t)
    q = np.ones(t.shape[0])
    for col, (vi, p, b) in enumerate(delta.block_index()):
        d_v = p.degree_over_R
        if p.type == "R" and b.gl == 1:
            shifts = [b.param]
        elif p.type == "R" and b.gl == 2:
            shifts = [(b.param - 1) / 2, (b.param + 1) / 2]
        else:
            shifts = [abs(b.param) / 2]
        for s in shifts:
            q *= (1.0 + np.hypot(s, t[:, col])) ** d_v
    return q


def beta_many(delta: DiscreteDatum, t: np.ndarray) -> np.ndarray:
    t = np.atleast_2d(t)
    val = np.full(t.shape[0], float(delta.degree))
    idx = 0
    for p in delta.places:
        m = len(p.blocks)
        for i in range(m):
            for j in range(i + 1, m):
                gap = abs(_pair_param(p.blocks[i], p.type) - _pair_param(p.blocks[j], p.type))
                val *= (1.0 + np.hypot(gap, t[:, idx + i] - t[:, idx + j])) ** p.degree_over_R
        idx += m
    return val


# --------------------------------------------------------------------------
# Plancherel density
# --------------------------------------------------------------------------


def _gamma_ratio_R(a):
    """Gamma_R(1+a)/Gamma_R(a) elementwise; zero at the pole a = 0."""
    a = np.asarray(a, dtype=complex)
    with np.errstate(all="ignore"):
        out = np.exp(loggamma((1 + a) / 2) - loggamma(a / 2)) / math.sqrt(math.pi)
    return np.where(a == 0, 0.0, out)


def _pair_density(place_type: str, bi: Block, bj: Block, z):
    """gamma(0, sigma_i x ~sigma_j) gamma(0, ~sigma_i x sigma_j) for one block pair.

    z is the difference nu_i - nu_j of continuous parameters.
    """
    z = np.asarray(z, dtype=complex)
    if place_type == "C":
        half = abs(bi.param - bj.param) / 2
        return (half + z) * (half - z) / TWO_PI ** 2
    if bi.gl == 1 and bj.gl == 1:
        par = abs(bi.param - bj.param)
        return _gamma_ratio_R(par + z) * _gamma_ratio_R(par - z)
    if bi.gl == 2 and bj.gl == 2:
        lo = abs(bi.param - bj.param) / 2
        hi = (bi.param + bj.param) / 2 - 1
        return (lo + z) * (lo - z) * (hi + z) * (hi - z) / TWO_PI ** 4
    k = bi.param if bi.gl == 2 else bj.param
    half = (k - 1) / 2
    return (half + z) * (half - z) / TWO_PI ** 2


def density_supported(delta: DiscreteDatum) -> bool:
    return delta.n <= 2 or delta.is_spherical


def plancherel_density(delta: DiscreteDatum, nu: Sequence[complex] | np.ndarray,
                       *, vectorized: bool = False):
    """Harish-Chandra density mu_M^G(delta, nu), up to the normalization C_M.

    Supported cases: n <= 2 at every place, or the spherical datum for any n.
    Other combinations raise UnsupportedCaseError rather than returning a wrong
    constant.  On the tempered axis the returned value is real and >= 0; for
    n = 2 real even/odd principal series it is (t/pi) tanh(pi t) resp.
    (t/pi) coth(pi t) in the parameter nu = (it, -it).
    """
    if not density_supported(delta):
        raise UnsupportedCaseError(
            f"Plancherel density implemented only for n <= 2 or spherical data; "
            f"got n = {delta.n} and a ramified datum")
    if vectorized:
        t = np.atleast_2d(np.asarray(nu, dtype=float))
        val = np.ones(t.shape[0], dtype=complex)
        idx = 0
        for p in delta.places:
            m = len(p.blocks)
            for i in range(m):
                for j in range(i + 1, m):
                    z = 1j * (t[:, idx + i] - t[:, idx + j])
                    val *= _pair_density(p.type, p.blocks[i], p.blocks[j], z)
            idx += m
        return np.real(val)
    val = 1.0 + 0j
    idx = 0
    for p in delta.places:
        m = len(p.blocks)
        zs = nu[idx: idx + m]
        for i in range(m):
            for j in range(i + 1, m):
                val *= complex(_pair_density(p.type, p.blocks[i], p.blocks[j],
                                             zs[i] - zs[j]))
        idx += m
    if abs(val.imag) < 1e-12 * (1 + abs(val.real)):
        return val.real
    return val


# --------------------------------------------------------------------------
# shell masses (Monte Carlo over the trace-zero tempered space)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ShellMass:
    value: float
    stderr: float
    samples: int
    flagged: bool


def shell_mass(F: FieldDescriptor, n: int, Q: float,
               delta: DiscreteDatum | None = None, *,
               samples: int = 200_000, seed: int = 1, workers: int = 1) -> ShellMass:
    """Monte Carlo estimate of the beta-measure of the conductor shell
    {nu in i h_M^*: Q <= q(delta, nu) <= 2Q}.

    Importance sampling uses a defensive mixture of product-Cauchy proposals in
    chart coordinates, with scales matched to the bulk and to the spikes of the
    conductor hyperboloid.  Deterministic given (seed, workers).
    """
    if Q < 1:
        raise ConfigurationError("Q must be >= 1")
    if delta is None:
        delta = spherical_datum(F, n)
    space = SpectralSpace(delta)
    if space.dim == 0:
        q = conductor_many(delta, np.zeros((1, space.num_blocks)))[0]
        b = beta_many(delta, np.zeros((1, space.num_blocks)))[0]
        inside = Q <= q <= 2 * Q
        return ShellMass(value=b if inside else 0.0, stderr=0.0, samples=1, flagged=False)

    B = space.num_blocks
    # chart: free block coordinates x_1..x_{B-1}; the last is fixed by trace 0
    w = space.weights
    jac = np.linalg.norm(np.sqrt(w)) / math.sqrt(w[-1])
    d_avg = sum(p.degree_over_R for p in delta.places) * delta.n / B
    scales = [max(1.0, Q ** (1.0 / (B * d_avg))), max(2.0, Q ** 0.5), 1.0]

    def block(args):
        bi, m = args
        gen = _rng.generator(seed, bi)
        mix = gen.integers(0, len(scales), size=m)
        x = gen.standard_cauchy(size=(m, B - 1))
        x *= np.array(scales)[mix][:, None]
        full = np.empty((m, B))
        full[:, : B - 1] = x
        full[:, B - 1] = -(x * w[: B - 1]).sum(axis=1) / w[-1]
        # mixture density wrt Lebesgue measure on the chart
        dens = np.zeros(m)
        for s in scales:
            dens += np.prod(s / (math.pi * (s * s + x * x)), axis=1) / len(scales)
        q = conductor_many(delta, full)
        vals = np.where((q >= Q) & (q <= 2 * Q),
                        beta_many(delta, full) * jac / dens, 0.0)
        return vals.sum(), (vals ** 2).sum(), m

    chunks = _rng.partition(samples)
    parts = _rng.deterministic_map(block, list(enumerate(chunks)), workers)
    totals = math.fsum(p[0] for p in parts)
    sq_totals = math.fsum(p[1] for p in parts)
    count = sum(p[2] for p in parts)

    mean = totals / count
    var = max(sq_totals / count - mean ** 2, 0.0)
    stderr = math.sqrt(var / count)
    flagged = mean > 0 and stderr > 0.5 * mean
    return ShellMass(value=mean, stderr=stderr, samples=count, flagged=flagged)


def shell_mass_slope(F: FieldDescriptor, n: int, *, exponents=range(4, 13),
                     delta: DiscreteDatum | None = None, samples: int = 200_000,
                     seed: int = 1, workers: int = 1):
    """Dyadic shell masses at Q = 2^j and the least-squares slope of
    log mass against log Q."""
    rows = []
    for j in exponents:
        sm = shell_mass(F, n, float(2 ** j), delta,
                        samples=samples, seed=seed + j, workers=workers)
        rows.append((float(2 ** j), sm))
    qs = np.log([r[0] for r in rows])
    ms = np.log([max(r[1].value, 1e-300) for r in rows])
    slope = float(np.polyfit(qs, ms, 1)[0])
    return slope, rows


# --------------------------------------------------------------------------
# enumeration of discrete data and the archimedean conductor zeta function
# --------------------------------------------------------------------------


def _real_place_data(n: int, weight_cutoff: int) -> list[tuple[Block, ...]]:
    out = []

    def rec(remaining: int, acc: list[Block]):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for eps in (0, 1):
            rec(remaining - 1, acc + [Block(1, eps)])
        if remaining >= 2:
            for k in range(2, weight_cutoff + 1):
                rec(remaining - 2, acc + [Block(2, k)])

    rec(n, [])
    # canonical form: sort blocks (GL2 first by weight, then GL1 by eps)
    canon = {tuple(sorted(b, key=lambda x: (-x.gl, x.param))) for b in out}
    return sorted(canon, key=lambda bl: [(-b.gl, b.param) for b in bl])


def _complex_place_data(n: int, weight_cutoff: int) -> list[tuple[Block, ...]]:
    ks = range(-weight_cutoff, weight_cutoff + 1)
    combos = itertools.combinations_with_replacement(sorted(ks), n)
    return [tuple(Block(1, k) for k in combo) for combo in combos]


def discrete_data(F: FieldDescriptor, n: int, weight_cutoff: int) -> Iterator[DiscreteDatum]:
    """All discrete data with every block weight <= weight_cutoff."""
    per_place = []
    for t in F.infinite_places:
        per_place.append(_real_place_data(n, weight_cutoff) if t == "R"
                         else _complex_place_data(n, weight_cutoff))
    for combo in itertools.product(*per_place):
        places = tuple(PlaceDatum(type=t, blocks=blocks)
                       for t, blocks in zip(F.infinite_places, combo))
        yield DiscreteDatum(places=places)


def component_conductor_integral(delta: DiscreteDatum, s: float, *,
                                 rel_tol: float = 1e-9) -> float:
    """C_M deg(delta) int q(delta,nu)^{-s} mu(delta,nu) dnu over i h_M^*, C_M = 1.

    Zero-dimensional components are atoms of mass deg(delta).
    """
    space = SpectralSpace(delta)
    if space.dim == 0:
        q = conductor_many(delta, np.zeros((1, space.num_blocks)))[0]
        return delta.degree * q ** (-s)
    from .quadrature import integrate_real

    if space.dim == 1:
        def f(x):
            pts = x[:, None] * space.basis[:, 0][None, :]
            q = conductor_many(delta, pts)
            dens = plancherel_density(delta, pts, vectorized=True)
            return q ** (-s) * dens

        # integrand decays like q^{-s} ~ |x|^{-s * (power)}: integrate on a
        # widening window until the tail is negligible
        half = 1.0
        prev = None
        while True:
            val = integrate_real(f, -half, half, rel_tol=rel_tol,
                                 initial_panels=max(16, int(half)))
            if prev is not None and abs(val - prev) <= 10 * rel_tol * abs(val):
                return delta.degree * val / TWO_PI
            prev = val
            half *= 2
            if half > 2 ** 24:
                raise DivergenceError("conductor integral did not stabilize")
    raise UnsupportedCaseError(
        "continuous components of dimension >= 2 are not integrated exactly; "
        "use shell_mass based estimates")


def arch_zeta(F: FieldDescriptor, n: int, s: float, *,
              weight_cutoff: int = 40, rel_tol: float = 1e-9) -> tuple[float, float]:
    """Archimedean conductor zeta function Z_infty(s) with a truncation bound.

    Sums component integrals over discrete data of weight <= weight_cutoff and
    returns (value, tail_bound), the bound covering every omitted datum.
    Convergence requires Re s > n - 1/d.
    """
    d = F.degree
    if s <= n - 1.0 / d:
        raise DivergenceError(f"arch zeta diverges for Re s <= n - 1/d = {n - 1/d}")
    if n > 2:
        # spherical-only coverage (labeled); no ramified tail is attempted
        raise UnsupportedCaseError(
            "arch_zeta sums the full dual only for n <= 2; for n >= 3 restrict "
            "to the spherical component via component_conductor_integral")
    total = 0.0
    for delta in discrete_data(F, n, weight_cutoff):
        total += component_conductor_integral(delta, s, rel_tol=rel_tol)
    return total, _arch_zeta_tail(F, n, s, weight_cutoff)


def _arch_zeta_tail(F: FieldDescriptor, n: int, s: float, K: int) -> float:
    """Upper bound for the contribution of data with some block weight > K.

    Real-place discrete series atoms D_k, k > K, have conductor >= k^2/8 and
    degree k - 1; complex-place characters chi_k, |k| > K, contribute the
    squared factor (1 + |k|/2)^2 regardless of the continuous parameter.  All
    bounds are integral comparisons; the finitely many sign characters at real
    places are always enumerated exactly.
    """
    if F.degree == 1:
        if n == 1:
            return 0.0
        # sum_{k>K} (k-1) q(D_k)^{-s} with q(D_k) >= k^2/8 for k >= 2
        return 8.0 ** s * K ** (2 - 2 * s) / (2 * s - 2)
    if F.r2 == 1 and F.r1 == 0:
        if n == 1:
            # sum_{|k|>K} (1+|k|/2)^{-2s} <= 4 (1+K/2)^{1-2s} / (2s-1)
            return 4 * (1 + K / 2.0) ** (1 - 2 * s) / (2 * s - 1)
        if n == 2:
            return _tail_complex_pairs(K, s)
    raise UnsupportedCaseError(
        "no closed truncation bound for this (field, n); compare against a "
        "doubled weight cutoff instead")


def _tail_complex_pairs(K: int, s: float) -> float:
    """Tail over character pairs (k1, k2) at one complex place with
    max(|k1|, |k2|) > K, for n = 2 conductor zeta at Re s > 2.

    On the 1-d tempered line nu = (ix, -ix) the density is
    (g^2/4 + 4x^2)/(2 pi)^2 with g = |k1 - k2| <= 2 kmax, and the conductor is
    at least (1 + kmax/2)^2 (1 + |x|)^2.  Integrating x out leaves, per kmax,
    at most 2(2 kmax + 1) pairs.
    """
    if s <= 2:
        raise DivergenceError("complex-place pair tail needs Re s > 2")

    def per_kmax(kmax: float) -> float:
        x_int = (kmax ** 2 * 2 / (2 * s - 1) + 8 / (2 * s - 3)) / TWO_PI ** 2
        return 2 * (2 * kmax + 1) * x_int * (1 + kmax / 2.0) ** (-2 * s) / TWO_PI

    total = sum(per_kmax(k) for k in range(K + 1, K + 2001))
    # integral remainder: per_kmax is decreasing once kmax^3 (kmax/2)^{-2s} is
    remainder_scale = per_kmax(K + 2000) * (K + 2000) / (2 * s - 4)
    return total + remainder_scale


def arch_volume(F: FieldDescriptor, n: int, X: float, *,
                weight_cutoff: int = 40, spherical_only: bool = False,
                rel_tol: float = 1e-9) -> float:
    """Plancherel volume of the archimedean conductor ball q(pi) <= X.

    Same normalization conventions as arch_zeta; spherical_only restricts the
    coverage (mandatory for n >= 3).
    """
    if X < 1:
        return 0.0
    if n > 2 and not spherical_only:
        raise UnsupportedCaseError("full dual coverage only for n <= 2")
    data = ([spherical_datum(F, n)] if spherical_only
            else list(discrete_data(F, n, weight_cutoff)))
    total = 0.0
    for delta in data:
        total += _component_ball_volume(delta, X, rel_tol=rel_tol)
    return total


def _component_ball_volume(delta: DiscreteDatum, X: float, *, rel_tol=1e-9) -> float:
    space = SpectralSpace(delta)
    if space.dim == 0:
        q = conductor_many(delta, np.zeros((1, space.num_blocks)))[0]
        return delta.degree if q <= X else 0.0
    if space.dim == 1:
        from .quadrature import integrate_real

        # find the window where q <= X along the 1-d parameter
        def qline(x):
            return conductor_many(delta, np.atleast_1d(x)[:, None] * space.basis[:, 0][None, :])

        if qline(np.array([0.0]))[0] > X:
            return 0.0
        hi = 1.0
        while qline(np.array([hi]))[0] <= X or qline(np.array([-hi]))[0] <= X:
            hi *= 2
            if hi > 2 ** 40:
                raise DivergenceError("conductor ball appears unbounded")

        def f(x):
            pts = x[:, None] * space.basis[:, 0][None, :]
            q = conductor_many(delta, pts)
            dens = plancherel_density(delta, pts, vectorized=True)
            return np.where(q <= X, dens, 0.0)

        val = integrate_real(f, -hi, hi, rel_tol=rel_tol,
                             initial_panels=64, max_nodes=2 ** 22)
        return delta.degree * val / TWO_PI
    raise UnsupportedCaseError("ball volumes in dimension >= 2 not implemented")
