"""Boxes, half-spaces and the geometric expansion of the log-partition function.

The large-box expansion splits ln Z(box) into per-site cluster densities:
the bulk density rho_infty (whole lattice), face corrections rho_halfspace -
rho_infty summed along the inward normal, and higher corner/edge corrections
by inclusion-exclusion over intersections of half-spaces.  The coefficient
routines evaluate these rooted, region-compensated cluster integrals with
common random numbers across the region variants, so the differences vanish
identically away from the boundary.

`fit_geometric` recovers the coefficients from measured ln Z values by
weighted least squares against exact site-count (or raw power) basis columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Sequence

import numpy as np

from loopgas.cluster import _zeta_matrix, ursell, ursell_cache
from loopgas.loops import HARD_CORE, CompositeLoop, LoopConfiguration, self_energy, static_loop
from loopgas.model import ModelParams, ValidationError, Vec, convergence_diagnostics, decay_constant, E
from loopgas.parallel import derive_seed, sample_blocks, task_rng
from loopgas.pathint import (
    ALL_SPACE,
    AllSpace,
    LoopSampler,
    SeriesEstimate,
    Truncation,
    _ball_sites,
    boundary_correction,
    confined,
    kernel_for,
    poisson_tail,
)


@dataclass(frozen=True)
class HalfSpace:
    """Lattice half-space {r : ell(r) >= 0} with ell(r) = sign * r[axis] + c."""

    axis: int
    sign: int
    c: float = 0.0

    def functional(self, r: Vec) -> float:
        return self.sign * r[self.axis] + self.c

    def __contains__(self, r) -> bool:
        return self.functional(tuple(r)) >= 0.0


@dataclass(frozen=True)
class Intersection:
    """Intersection of regions; membership requires membership in each."""

    regions: tuple

    def __contains__(self, r) -> bool:
        return all(r in reg for reg in self.regions)


@dataclass(frozen=True)
class Box:
    """Integer parallelepiped {r : 0 <= r_i <= floor(scale * a_i)}."""

    extents: tuple[int, ...]
    scale: float = 1.0

    def __post_init__(self):
        extents = tuple(int(a) for a in self.extents)
        if not extents or any(a < 1 for a in extents):
            raise ValidationError("box extents must be positive integers")
        if len(extents) > 3:
            raise ValidationError("dimension at most 3")
        if self.scale <= 0:
            raise ValidationError("scale must be positive")
        object.__setattr__(self, "extents", extents)

    @property
    def d(self) -> int:
        return len(self.extents)

    @property
    def sides(self) -> tuple[int, ...]:
        return tuple(int(math.floor(self.scale * a)) for a in self.extents)

    def sites(self) -> list[Vec]:
        return [tuple(r) for r in product(*(range(s + 1) for s in self.sides))]

    def site_count(self) -> int:
        return math.prod(s + 1 for s in self.sides)

    def __contains__(self, r) -> bool:
        r = tuple(r)
        if len(r) != self.d:
            return False
        return all(0 <= c <= s for c, s in zip(r, self.sides))

    def halfspaces(self) -> list[HalfSpace]:
        out = []
        for i, s in enumerate(self.sides):
            out.append(HalfSpace(axis=i, sign=1, c=0.0))
            out.append(HalfSpace(axis=i, sign=-1, c=float(s)))
        return out

    def faces(self) -> list[HalfSpace]:
        return self.halfspaces()

    def edges(self) -> list[tuple[HalfSpace, HalfSpace]]:
        return [
            (a, b)
            for a, b in combinations(self.halfspaces(), 2)
            if a.axis != b.axis
        ]

    def vertices(self) -> list[tuple[HalfSpace, ...]]:
        per_axis = [
            [hs for hs in self.halfspaces() if hs.axis == i] for i in range(self.d)
        ]
        return [tuple(choice) for choice in product(*per_axis)]


def config_indicator(X: CompositeLoop, omega, hs: HalfSpace) -> bool:
    """True iff the configuration exits the half-space by at least one unit.

    Implements the step-function device H(-inf ell - 1): the infimum of the
    affine functional over all loops and times (attained at visited sites)
    must be <= -1.
    """
    loops_list = [X] + list(omega.loops if isinstance(omega, LoopConfiguration) else omega)
    inf_ell = min(hs.functional(s) for lp in loops_list for s in lp.visited)
    return -inf_ell - 1.0 >= 0.0


@dataclass(frozen=True)
class GeometricCoefficients:
    """Fitted or computed expansion coefficients, one value per order when
    the potentials are lattice-symmetric."""

    A0: SeriesEstimate
    A1: SeriesEstimate | None = None
    A2: SeriesEstimate | None = None
    A3: SeriesEstimate | None = None
    symmetric: bool = True


def _one_body_region(loop, unit, params, region, corrected) -> complex:
    """Per-loop weight: phase, self-energy, confinement, compensation."""
    import cmath

    v = self_energy(loop, params.psi)
    if v == HARD_CORE:
        return 0.0
    w = unit * cmath.exp(-v)
    if isinstance(region, AllSpace):
        return w
    if not confined(loop, region):
        return 0.0
    if corrected:
        w *= boundary_correction(loop, params.pi, region)
    return w


def _rooted_density(
    base: Vec,
    regions: Sequence[tuple[float, object]],
    params: ModelParams,
    trunc: Truncation,
    *,
    corrected: bool,
    stream: str,
) -> tuple[complex, float, list[complex]]:
    """sum over (sign, region) of sign * rho_region(base) by common-sample MC.

    rho_region is the rooted cluster density: loops rooted at base, companions
    within r_max of it, all confined to the region with boundary compensation.
    Returns (value, stat_error, per-order terms).
    """
    root_sampler = LoopSampler(params, trunc, [base])
    offsets = _ball_sites(params.d, trunc.r_max)
    comp_sampler = LoopSampler(
        params, trunc, [tuple(b + o for b, o in zip(base, off)) for off in offsets]
    )
    n_cap = min(trunc.cluster_n_max, ursell_cache().n_max)
    psi = params.psi
    value = 0.0 + 0.0j
    var = 0.0
    terms: list[complex] = []
    if root_sampler.total_mass == 0.0:
        return 0.0, 0.0, []
    for m in range(n_cap):
        pref = root_sampler.total_mass * comp_sampler.total_mass**m / (
            math.factorial(m) * (m + 1)
        )
        base_seed = derive_seed(trunc.seed, "mc", f"{stream}/m{m}")
        s1 = 0.0 + 0.0j
        s2 = 0.0
        count = 0
        for block_id, n_block in sample_blocks(trunc.samples):
            rng = task_rng(base_seed, block_id)
            for _ in range(n_block):
                root, unit0 = root_sampler.sample(rng)
                draws = [comp_sampler.sample(rng) for _ in range(m)]
                all_loops = [root] + [lp for lp, _ in draws]
                phi = (
                    ursell(_zeta_matrix(all_loops, psi)) if m > 0 else 1.0 + 0.0j
                )
                term = 0.0 + 0.0j
                if phi != 0.0:
                    for sign, region in regions:
                        w = _one_body_region(root, unit0, params, region, corrected)
                        for lp, u in draws:
                            if w == 0.0:
                                break
                            w *= _one_body_region(lp, u, params, region, corrected)
                        if w != 0.0:
                            term += sign * w * phi
                s1 += term
                s2 += abs(term) ** 2
                count += 1
        mean = s1 / count
        v_ps = max(s2 / count - abs(mean) ** 2, 0.0)
        value += pref * mean
        var += pref * pref * v_ps / count
        terms.append(pref * mean)
    return value, math.sqrt(var), terms


def coeff_A0(params: ModelParams, trunc: Truncation, *, stream: str = "A0") -> SeriesEstimate:
    """Bulk (per-site) cluster density: the grand-canonical pressure times beta.

    sum_j z^j/j int P_00 e^{-v} sum_m (1/m!) int mu^m phi(X, omega)/(m+1).
    Exact same-site enumeration for an empty hopping potential.
    """
    origin = (0,) * params.d
    if params.pi.is_empty:
        # only same-site clusters survive a hard-core-dominated static model;
        # wider psi couplings are enumerated over the interaction range
        return _static_rooted_exact(origin, [(1.0, ALL_SPACE)], params, trunc)
    value, se, terms = _rooted_density(
        origin, [(1.0, ALL_SPACE)], params, trunc, corrected=False, stream=stream
    )
    tail = _coeff_tail(terms, params, trunc)
    return SeriesEstimate(value, se, tail, meta={"terms": terms, "order": 0})


def _static_rooted_exact(base, regions, params, trunc) -> SeriesEstimate:
    psi = params.psi
    n_cap = min(trunc.cluster_n_max, ursell_cache().n_max)
    reach = psi.max_coord
    value = 0.0 + 0.0j
    for m in range(n_cap):
        span = reach * m
        offs = _ball_sites(params.d, span) if span > 0 else [(0,) * params.d]
        sites = [tuple(b + o for b, o in zip(base, off)) for off in offs]
        term = 0.0 + 0.0j
        for tup in product(sites, repeat=m):
            all_loops = [static_loop(base, 1, params.beta)] + [
                static_loop(r, 1, params.beta) for r in tup
            ]
            phi = ursell(_zeta_matrix(all_loops, psi)) if m > 0 else 1.0 + 0.0j
            if phi == 0.0:
                continue
            for sign, region in regions:
                w = 1.0 + 0.0j
                for lp in all_loops:
                    w *= _one_body_region(lp, 1.0, params, region, corrected=False)
                    if w == 0.0:
                        break
                term += sign * w * phi
        value += (params.z ** (m + 1) / (math.factorial(m) * (m + 1))) * term
    zq = abs(params.z) * math.exp(params.beta * params.norms.psi_norm)
    tail = zq ** (n_cap + 1) / (1.0 - zq) if zq < 1.0 else math.inf
    return SeriesEstimate(value, 0.0, tail, meta={"backend": "exact"})


def _coeff_tail(terms: Sequence[complex], params: ModelParams, trunc: Truncation) -> float:
    """Order tail for rooted cluster densities: geometric in the
    interaction-strength ratio p when inside the radius, else observed ratio."""
    from loopgas.cluster import _cluster_tail

    p = convergence_diagnostics(params).p
    tail, _heuristic = _cluster_tail(list(terms), p)
    return tail


def corner_coefficient(
    order: int,
    params: ModelParams,
    trunc: Truncation,
    *,
    corrected: bool = True,
    r_cap: int | None = None,
    stream: str | None = None,
) -> SeriesEstimate:
    """Geometric coefficient of the given order (1 = face, 2 = edge/corner,
    3 = vertex) for the symmetric potentials case.

    order-fold inclusion-exclusion of rooted densities over the intersections
    of coordinate half-spaces, summed over the base-site grid within r_cap of
    the corner.  corrected=True matches region-restricted Hamiltonians; False
    reproduces the pure-exclusion convention.
    """
    if order < 1 or order > params.d:
        raise ValidationError("order must be between 1 and d")
    if params.pi.is_empty and params.psi.is_empty:
        return SeriesEstimate(0.0, meta={"order": order, "note": "static hard-core model"})
    cap = trunc.r_max if r_cap is None else r_cap
    stream = stream or f"A{order}"
    axes = tuple(range(order))
    half = {i: HalfSpace(axis=i, sign=1, c=0.0) for i in axes}
    regions: list[tuple[float, object]] = []
    for k in range(order + 1):
        for sub in combinations(axes, k):
            sign = (-1.0) ** (order - k)
            if k == 0:
                regions.append((sign, ALL_SPACE))
            else:
                regions.append((sign, Intersection(tuple(half[i] for i in sub))))
    value = 0.0 + 0.0j
    var = 0.0
    term_profile = []
    for rvec in product(range(cap + 1), repeat=order):
        base = tuple(list(rvec) + [0] * (params.d - order))
        if params.pi.is_empty:
            est = _static_rooted_exact(base, regions, params, trunc)
            v, se = est.value, 0.0
        else:
            v, se, _terms = _rooted_density(
                base, regions, params, trunc, corrected=corrected,
                stream=f"{stream}/r{'_'.join(map(str, rvec))}",
            )
        value += v
        var += se * se
        term_profile.append((rvec, complex(v)))
    tail = _grid_tail(term_profile, cap, params.l, order)
    return SeriesEstimate(
        value,
        math.sqrt(var),
        tail,
        meta={"order": order, "r_cap": cap, "corrected": corrected, "profile": term_profile},
    )


def coeff_A1(params: ModelParams, trunc: Truncation, *, corrected: bool = True, r_cap=None) -> SeriesEstimate:
    return corner_coefficient(1, params, trunc, corrected=corrected, r_cap=r_cap)


def coeff_A2(params: ModelParams, trunc: Truncation, *, corrected: bool = True, r_cap=None) -> SeriesEstimate:
    return corner_coefficient(2, params, trunc, corrected=corrected, r_cap=r_cap)


def coeff_A3(params: ModelParams, trunc: Truncation, *, corrected: bool = True, r_cap=None) -> SeriesEstimate:
    return corner_coefficient(3, params, trunc, corrected=corrected, r_cap=r_cap)


def _grid_tail(profile, cap: int, l: float, order: int) -> float:
    """Tail of the base-site grid sum from the (1 + r)^{-l} decay shape.

    The constant is calibrated on the computed terms (largest observed
    |term| (1 + |r|)^l); zero when every computed term already vanished.
    """
    scale = 0.0
    for rvec, v in profile:
        w = (1.0 + max(rvec)) ** l
        scale = max(scale, abs(v) * w)
    if scale == 0.0:
        return 0.0
    tail = 0.0
    for s in range(cap + 1, cap + 200):
        # shells at distance s have O(s^{order-1}) grid points
        tail += scale * (2 * s + 1) ** (order - 1) * (1.0 + s) ** (-l)
    return tail


def remainder_bound_check(
    R_grid: Sequence[float], params: ModelParams, trunc: Truncation, box: Box
):
    """Shape of the dominant parallel-face remainder: C R^d (1 + R)^{-l}.

    Pass iff the values are non-increasing along the grid (o(1) behavior).
    """
    from loopgas.pathint import CheckRow

    n = params.norms
    diag = convergence_diagnostics(params)
    if diag.q_l < 1.0:
        C = decay_constant(params.l, diag.p)
        if math.isfinite(C):
            C *= (1.0 + params.beta * E * n.Ml) * diag.q_l / (1.0 - diag.q_l)
        note = ""
    else:
        C, note = 1.0, "radius violated: unit constant used for the shape"
    vol = math.prod(box.extents)
    rows = []
    prev = math.inf
    for R in R_grid:
        val = C * vol * float(R) ** box.d * (1.0 + float(R)) ** (-params.l)
        rows.append(
            CheckRow("remainder", None, float(R), val, 0.0, 0.0, prev, passed=val <= prev, note=note)
        )
        prev = val
    return rows


def spanning_term(R: float, params: ModelParams, trunc: Truncation, box: Box) -> float:
    """Direct truncated evaluation of the dominant large-loop exclusion term:
    loops reaching distance R, summed with the stability fugacity weights and
    multiplied by the box site count."""
    kern = kernel_for(params)
    b = params.beta
    x = abs(params.z) * math.exp(b * (kern.M + params.norms.M0.real + params.norms.psi_norm) + 1.0)
    total = 0.0
    for j in range(1, trunc.j_max + 1):
        mt = kern.M * j * b
        lhs = 0.0
        for nj in range(trunc.n_max + 1):
            pw = math.exp(-mt + (nj * math.log(mt) if nj else 0.0) - math.lgamma(nj + 1)) if mt > 0 else (1.0 if nj == 0 else 0.0)
            mass = sum(
                prod
                for _seq, prod, _ph, sup in kern.closed_stats(nj)
                if sup >= R
            ) if mt > 0 else 0.0
            lhs += pw * mass * math.exp(nj)
        total += (x**j / j) * lhs
    vol = math.prod(box.extents)
    return vol * float(R) ** box.d * total


@dataclass(frozen=True)
class FitResult:
    """Weighted least-squares decomposition of ln Z against geometric columns."""

    names: tuple[str, ...]
    values: tuple[float, ...]
    errors: tuple[float, ...]
    covariance: np.ndarray
    residuals: tuple[float, ...]
    predictions: tuple[float, ...]

    def coefficient(self, name: str) -> tuple[float, float]:
        i = self.names.index(name)
        return self.values[i], self.errors[i]

    def csv_rows(self) -> list[list]:
        return [[n, v, e] for n, v, e in zip(self.names, self.values, self.errors)]


def _design_columns(box: Box, R: float, site_count_basis: bool) -> tuple[tuple[str, ...], list[float]]:
    d = box.d
    a = box.extents
    if site_count_basis:
        sides = [int(math.floor(R * ai)) for ai in a]
        cols = [math.prod(s + 1 for s in sides)]
        names = ["volume"]
        if d >= 1:
            face_total = 0.0
            for i in range(d):
                others = math.prod(sides[k] + 1 for k in range(d) if k != i)
                face_total += 2 * others
            cols.append(face_total)
            names.append("face")
        if d >= 2:
            edge_total = 0.0
            for i, k in combinations(range(d), 2):
                others = math.prod(sides[q] + 1 for q in range(d) if q not in (i, k))
                edge_total += 4 * others
            cols.append(edge_total)
            names.append("edge")
        if d >= 3:
            cols.append(float(2**d))
            names.append("vertex")
        return tuple(names), [float(c) for c in cols]
    # raw powers with exact geometric multipliers: R^d vol, R^{d-1} face
    # areas, R^{d-2} edge lengths, vertex count
    names = ["volume"]
    cols = [float(R) ** d * math.prod(a)]
    names.append("face")
    cols.append(float(R) ** (d - 1) * sum(2.0 * math.prod(a[k] for k in range(d) if k != i) for i in range(d)))
    if d >= 2:
        names.append("edge")
        cols.append(
            float(R) ** (d - 2)
            * sum(4.0 * math.prod(a[q] for q in range(d) if q not in (i, k)) for i, k in combinations(range(d), 2))
        )
    if d >= 3:
        names.append("vertex")
        cols.append(float(2**d))
    return tuple(names), cols


def fit_geometric(
    data: Sequence[tuple[float, float, float]],
    box: Box,
    *,
    site_count_basis: bool = True,
) -> FitResult:
    """Weighted least squares of (R, lnZ, err) rows against geometric columns.

    With the site-count basis the volume coefficient is the per-site bulk
    density and the face coefficient the per-face boundary density; the last
    column is a free constant slot (corner bookkeeping is not pinned down).
    """
    rows = [(float(R), float(v), float(e)) for R, v, e in data]
    if len({R for R, _, _ in rows}) < box.d + 2:
        raise ValidationError("need at least d + 2 distinct R values")
    names = None
    X = []
    y = []
    w = []
    for R, v, e in rows:
        nm, cols = _design_columns(box, R, site_count_basis)
        names = nm
        X.append(cols)
        y.append(v)
        w.append(1.0 / max(e, 1e-14) ** 2)
    X = np.asarray(X)
    y = np.asarray(y)
    W = np.diag(w)
    gram = X.T @ W @ X
    if np.linalg.matrix_rank(gram) < gram.shape[0]:
        raise ValidationError("rank-deficient design: add more R values")
    cov = np.linalg.inv(gram)
    beta = cov @ X.T @ W @ y
    pred = X @ beta
    resid = y - pred
    errors = np.sqrt(np.diag(cov))
    return FitResult(
        names=tuple(names),
        values=tuple(float(b) for b in beta),
        errors=tuple(float(e) for e in errors),
        covariance=cov,
        residuals=tuple(float(r) for r in resid),
        predictions=tuple(float(p) for p in pred),
    )


def fit_csv_rows(fit: FitResult, data: Sequence[tuple[float, float, float]]) -> list[list]:
    """(R, lnZ, prediction, residual) rows for external plotting."""
    return [
        [R, v, p, r]
        for (R, v, _e), p, r in zip(data, fit.predictions, fit.residuals)
    ]
