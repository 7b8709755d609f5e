"""Integration against the closed-worldline path measures.

The underlying process is compound Poisson on Z^d: jump times arrive at rate
M = (1/2) sum |pi(r)|, jump vectors are drawn from q(r) = |pi(r)| / (2M).  The
signed kernel replaces q(r) by -pi(r) / (2M); its integral over closed paths
of time-length t with a jump-count functional h is

    e^{-Mt} sum_n (Mt)^n / n!  sum_{r_1+...+r_n=0} prod_i (-pi(r_i)/(2M)) h(n, r)

which this module evaluates exactly (pruned enumeration over closed jump
sequences, or a displacement-convolution table when h ignores the jumps).
The one-loop measure over a site set additionally carries the fugacity weight
z^j/j per winding count j, the kernel normalization e^{j beta (M + M0)}, the
self-interaction e^{-v}, and (for bounded regions) the boundary compensation
factor of `boundary_correction`.

Monte Carlo estimators sample the positive closed-path law exactly (Poisson
jump count conditioned on closure via bridge tables, uniform sorted times)
and reweight by the signs/phases, in fixed sample blocks with counter-based
RNG streams so results are reproducible across worker counts.
"""

from __future__ import annotations

import cmath
import csv
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from loopgas.loops import HARD_CORE, CompositeLoop, self_energy, static_loop
from loopgas.model import E, ModelParams, Potential, ValidationError, Vec
from loopgas.parallel import derive_seed, parallel_map, sample_blocks, task_rng


@dataclass(frozen=True)
class SeriesEstimate:
    """Numeric value with statistical error and a truncation-tail bound."""

    value: complex
    stat_error: float = 0.0
    tail_bound: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if not (self.stat_error >= 0.0 and math.isfinite(self.stat_error)):
            raise ValidationError("stat_error must be finite and non-negative")
        if not (self.tail_bound >= 0.0):
            # +inf is allowed: it reports an out-of-radius truncation honestly
            raise ValidationError("tail_bound must be non-negative")


@dataclass(frozen=True)
class Truncation:
    """All truncation knobs in one place; every estimate records the ones it used."""

    j_max: int = 3
    n_max: int = 12
    r_max: int = 8
    cluster_n_max: int = 4
    samples: int = 20000
    seed: int = 0

    def __post_init__(self):
        for name in ("j_max", "n_max", "r_max", "cluster_n_max", "samples"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be positive")
        if self.seed < 0:
            raise ValidationError("seed must be a non-negative 64-bit integer")


class AllSpace:
    """Unbounded region: no confinement, no boundary compensation.

    Site sums over it are realized as the sup-norm ball of radius r_max; the
    integrand must vanish beyond that reach for the sum to be exact.
    """

    def __contains__(self, site) -> bool:
        return True


ALL_SPACE = AllSpace()

_KERNEL_CACHE: dict = {}
_KERNEL_LOCK = threading.Lock()


def _origin(d: int) -> Vec:
    return (0,) * d


def _add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def _eucl(v: Vec) -> float:
    return math.sqrt(sum(c * c for c in v))


class JumpKernel:
    """Cached jump tables for one transverse potential.

    Holds the jump distribution q, the sign/phase factors -pi/|pi|, the
    displacement-convolution tables p_m(x) (probability that m jumps sum to
    x), and the enumerated closed jump sequences with their products and
    running sup norms.
    """

    def __init__(self, pi: Potential, d: int):
        self.pi = pi
        self.d = d
        items = sorted(pi.support.items())
        self.vectors: list[Vec] = [v for v, _ in items]
        vals = [val for _, val in items]
        self.M = 0.5 * sum(abs(v) for v in vals)
        if self.M > 0:
            self.q = [abs(val) / (2.0 * self.M) for val in vals]
            self.phases = [-val / abs(val) for val in vals]
        else:
            self.q = []
            self.phases = []
        self.phase_of = {v: ph for v, ph in zip(self.vectors, self.phases)}
        self.axis_max = tuple(
            max((abs(v[i]) for v in self.vectors), default=0) for i in range(d)
        )
        self._dist: list[dict[Vec, float]] = [{_origin(d): 1.0}]
        self._closed: dict[int, list] = {}
        self._lock = threading.Lock()

    def dist(self, m: int) -> dict[Vec, float]:
        """p_m: law of the sum of m iid jumps (dict over displacements)."""
        with self._lock:
            while len(self._dist) <= m:
                prev = self._dist[-1]
                nxt: dict[Vec, float] = {}
                for x, p in prev.items():
                    for v, qv in zip(self.vectors, self.q):
                        y = _add(x, v)
                        nxt[y] = nxt.get(y, 0.0) + p * qv
                self._dist.append(nxt)
            return self._dist[m]

    def closed_mass(self, n: int) -> float:
        """c_n = sum over closed n-jump sequences of prod q."""
        return self.dist(n).get(_origin(self.d), 0.0)

    def closed_stats(self, n: int) -> list:
        """All closed n-jump sequences as (seq, prod_q, prod_phase, sup_norm)."""
        with self._lock:
            cached = self._closed.get(n)
        if cached is not None:
            return cached
        out: list = []
        seq: list[Vec] = []
        origin = _origin(self.d)

        def rec(pos: Vec, depth: int, prod: float, phase: complex, sup: float):
            if depth == n:
                if pos == origin:
                    out.append((tuple(seq), prod, phase, sup))
                return
            rem = n - depth - 1
            for v, qv, ph in zip(self.vectors, self.q, self.phases):
                nxt = _add(pos, v)
                # prune branches that can no longer return to the origin
                if any(abs(c) > rem * a for c, a in zip(nxt, self.axis_max)):
                    continue
                seq.append(v)
                rec(nxt, depth + 1, prod * qv, phase * ph, max(sup, _eucl(nxt)))
                seq.pop()

        rec(origin, 0, 1.0, 1.0 + 0.0j, 0.0)
        with self._lock:
            self._closed[n] = out
        return out

    def closed_poisson_weights(self, t: float, n_max: int) -> np.ndarray:
        """w_n = e^{-Mt} (Mt)^n / n! * c_n for n = 0..n_max."""
        mt = self.M * t
        out = np.zeros(n_max + 1)
        for n in range(n_max + 1):
            cn = self.closed_mass(n)
            if cn > 0.0:
                out[n] = math.exp(-mt + n * math.log(mt) - math.lgamma(n + 1)) * cn
        return out

    def sample_bridge(self, n: int, rng: np.random.Generator) -> list[Vec]:
        """Exact draw of a closed n-jump sequence under the conditioned q law."""
        seq: list[Vec] = []
        pos = _origin(self.d)
        for m in range(n, 0, -1):
            pm1 = self.dist(m - 1)
            weights = np.array(
                [
                    qv * pm1.get(tuple(-c for c in _add(pos, v)), 0.0)
                    for v, qv in zip(self.vectors, self.q)
                ]
            )
            total = weights.sum()
            if total <= 0.0:
                raise ValidationError("bridge sampling reached an unclosable state")
            k = int(rng.choice(len(self.vectors), p=weights / total))
            v = self.vectors[k]
            seq.append(v)
            pos = _add(pos, v)
        return seq


def kernel_for(params: ModelParams) -> JumpKernel:
    key = (params.d, params.pi.key())
    with _KERNEL_LOCK:
        kern = _KERNEL_CACHE.get(key)
        if kern is None:
            kern = JumpKernel(params.pi, params.d)
            _KERNEL_CACHE[key] = kern
        return kern


def poisson_tail(mt: float, n_max: int, h_sup: Callable[[int], float]) -> float:
    """e^{-mt} sum_{n > n_max} (mt)^n/n! h_sup(n), summed to convergence."""
    if mt <= 0.0:
        return 0.0
    total = 0.0
    n = n_max + 1
    while True:
        term = math.exp(-mt + n * math.log(mt) - math.lgamma(n + 1)) * h_sup(n)
        total += term
        if n > n_max + 10 and term < 1e-17 * max(total, 1e-300):
            break
        if n > n_max + 5000:
            break
        n += 1
    return total


def _jump_series(
    j: int,
    hs: Sequence[Callable],
    params: ModelParams,
    n_max: int,
    absolute: bool,
) -> list[complex]:
    """Closed-path expectations of several h(n, jumps) at once, exactly."""
    kern = kernel_for(params)
    t = j * params.beta
    if kern.M == 0.0:
        return [complex(h(0, ())) for h in hs]
    mt = kern.M * t
    acc = [0.0 + 0.0j for _ in hs]
    for n in range(n_max + 1):
        pw = math.exp(-mt + (n * math.log(mt) if n else 0.0) - math.lgamma(n + 1))
        for seq, prod, phase, _sup in kern.closed_stats(n):
            w = prod if absolute else prod * phase
            for i, h in enumerate(hs):
                acc[i] += pw * w * h(n, seq)
    return acc


def integrate_jump_functional(
    j: int,
    h: Callable,
    params: ModelParams,
    trunc: Truncation,
    *,
    h_sup: Callable[[int], float],
    absolute: bool = False,
) -> SeriesEstimate:
    """Closed-path integral of a jump functional h(n, jump_vectors).

    Signed kernel by default; absolute=True integrates against the positive
    law instead.  h_sup(n) must dominate |h| over all closed n-jump sequences;
    it feeds the Poisson truncation tail (which carries the extra factor 1/2
    because the closed-sequence product sums never exceed 1/2 for n >= 1).
    """
    if j < 1:
        raise ValidationError("windings j must be >= 1")
    value = _jump_series(j, [h], params, trunc.n_max, absolute)[0]
    kern = kernel_for(params)
    mt = kern.M * j * params.beta
    tail = 0.5 * poisson_tail(mt, trunc.n_max, h_sup)
    return SeriesEstimate(
        value=value,
        tail_bound=tail,
        meta={"j": j, "n_max": trunc.n_max, "absolute": absolute, "backend": "exact"},
    )


def sample_closed_loop(
    j: int,
    params: ModelParams,
    rng: np.random.Generator,
    trunc: Truncation,
) -> tuple[CompositeLoop, complex]:
    """Draw a closed loop under the normalized positive path law.

    Returns (loop, weight) with weight = (positive total mass) * (product of
    jump phases), so that the weighted sample mean estimates the signed-kernel
    integral over closed paths with at most n_max jumps.
    """
    kern = kernel_for(params)
    t = j * params.beta
    if kern.M == 0.0:
        return static_loop(_origin(params.d), j, params.beta), 1.0 + 0.0j
    weights = kern.closed_poisson_weights(t, trunc.n_max)
    mass = weights.sum()
    n = int(rng.choice(len(weights), p=weights / mass))
    seq = kern.sample_bridge(n, rng)
    times = np.sort(rng.random(n)) * t
    loop = CompositeLoop(_origin(params.d), j, tuple(zip(times.tolist(), seq)), params.beta)
    phase = 1.0 + 0.0j
    for v in seq:
        phase *= kern.phase_of[v]
    return loop, mass * phase


def boundary_correction(loop: CompositeLoop, pi: Potential, region) -> complex:
    """Kinetic boundary compensation for a loop measured inside a region.

    The whole-lattice path kernel carries the diagonal rate of every hopping
    partner; a Hamiltonian restricted to a finite region lacks the partners
    outside it.  The mismatch exponentiates along the worldline:

        exp( -(1/2) int_0^{j beta} sum_{v : X(t)+v not in region} pi(v) dt ).

    Returns 1 for an empty potential or an all-containing region.
    """
    if pi.is_empty or isinstance(region, AllSpace):
        return 1.0 + 0.0j
    total = 0.0 + 0.0j
    pos = loop.base
    prev_t = 0.0
    events = list(loop.jumps) + [(loop.length, None)]
    for t, v in events:
        dt = t - prev_t
        if dt > 0.0:
            rate = sum(
                val for w, val in pi.support.items() if _add(pos, w) not in region
            )
            total += dt * rate
        if v is not None:
            pos = _add(pos, v)
        prev_t = t
    return cmath.exp(-0.5 * total)


def confined(loop: CompositeLoop, region) -> bool:
    return all(s in region for s in loop.visited)


class LoopSampler:
    """Importance sampler for the one-loop measure rooted on a finite site set.

    The proposal draws the base site uniformly, the winding count j with
    probability proportional to the absolute mass |z|^j/j e^{j beta (M+Re M0)}
    Z+_j, and the path from the positive bridge law.  `total_mass` times the
    mean of unit_weight * g(X) estimates the signed one-loop integral of g
    (self-energy and region factors are applied by the caller).
    """

    def __init__(self, params: ModelParams, trunc: Truncation, sites: Sequence[Vec]):
        self.params = params
        self.trunc = trunc
        self.sites = tuple(tuple(s) for s in sites)
        if not self.sites:
            raise ValidationError("site set must be non-empty")
        kern = kernel_for(params)
        self.kern = kern
        b = params.beta
        m0 = params.norms.M0
        self.n_weights: list[np.ndarray] = []
        self.masses = np.zeros(trunc.j_max)
        self.units: list[complex] = []
        for j in range(1, trunc.j_max + 1):
            if kern.M == 0.0:
                zplus = 1.0
                self.n_weights.append(np.array([1.0]))
            else:
                w = kern.closed_poisson_weights(j * b, trunc.n_max)
                zplus = float(w.sum())
                self.n_weights.append(w / zplus if zplus > 0 else w)
            abs_pref = (abs(params.z) ** j / j) * math.exp(j * b * (kern.M + m0.real))
            cplx_pref = (params.z**j / j) * cmath.exp(j * b * (kern.M + m0))
            self.masses[j - 1] = abs_pref * zplus
            self.units.append(cplx_pref / abs_pref if abs_pref > 0 else 0.0 + 0.0j)
        self.total_mass = float(self.masses.sum()) * len(self.sites)
        self._j_probs = self.masses / self.masses.sum() if self.masses.sum() > 0 else None

    def sample(self, rng: np.random.Generator) -> tuple[CompositeLoop, complex]:
        """Returns (loop, unit-modulus weight); valid only when total_mass > 0."""
        site = self.sites[int(rng.integers(len(self.sites)))]
        j = 1 + int(rng.choice(self.trunc.j_max, p=self._j_probs))
        t = j * self.params.beta
        if self.kern.M == 0.0:
            loop = static_loop(site, j, self.params.beta)
            return loop, self.units[j - 1]
        n = int(rng.choice(len(self.n_weights[j - 1]), p=self.n_weights[j - 1]))
        seq = self.kern.sample_bridge(n, rng)
        times = np.sort(rng.random(n)) * t
        loop = CompositeLoop(site, j, tuple(zip(times.tolist(), seq)), self.params.beta)
        phase = self.units[j - 1]
        for v in seq:
            phase *= self.kern.phase_of[v]
        return loop, phase

    def tail_bound(self, g_sup: float = 1.0, corrected: bool = False) -> float:
        """Truncation tail for integrals of |g| <= g_sup against the loop measure.

        Uses |e^{-v}| <= e^{j beta ||psi||}, the closed-path mass bound
        Z+_j <= 1, the 1/2 device for the per-j Poisson jump tail, and (when
        the boundary compensation is in play) |c| <= e^{j beta M}.
        """
        p = self.params
        kern = self.kern
        rate = p.beta * (kern.M + p.norms.M0.real + p.norms.psi_norm)
        if corrected:
            rate += p.beta * kern.M
        n_tail = 0.0
        for j in range(1, self.trunc.j_max + 1):
            mt = kern.M * j * p.beta
            n_tail += (
                (abs(p.z) ** j / j)
                * math.exp(j * rate)
                * 0.5
                * poisson_tail(mt, self.trunc.n_max, lambda n: 1.0)
            )
        x = abs(p.z) * math.exp(rate)
        if x >= 1.0:
            return math.inf
        j_tail = -math.log(1.0 - x) - sum(
            x**j / j for j in range(1, self.trunc.j_max + 1)
        )
        return len(self.sites) * g_sup * (n_tail + j_tail)


def _mc_reduce(block_results: list[tuple[complex, float, int]]):
    """Combine per-block (sum, sum of |term|^2, count) into mean and std error."""
    s1 = 0.0 + 0.0j
    s2 = 0.0
    n = 0
    for bs1, bs2, bn in block_results:
        s1 += bs1
        s2 += bs2
        n += bn
    mean = s1 / n
    if n > 1:
        var = max(s2 / n - abs(mean) ** 2, 0.0) * n / (n - 1)
        se = math.sqrt(var / n)
    else:
        se = 0.0
    return mean, se, n


def mc_expectation(
    sample_term: Callable[[np.random.Generator], complex],
    n_samples: int,
    seed: int,
    stream: str,
    threads: int = 1,
) -> tuple[complex, float]:
    """Block-wise Monte Carlo mean of a per-sample term, reproducibly.

    The block partition and per-block RNG streams depend only on (seed,
    stream, n_samples), never on the worker count.
    """
    base = derive_seed(seed, "mc", stream)

    def run_block(block):
        block_id, count = block
        rng = task_rng(base, block_id)
        s1 = 0.0 + 0.0j
        s2 = 0.0
        for _ in range(count):
            term = sample_term(rng)
            s1 += term
            s2 += abs(term) ** 2
        return s1, s2, count

    results = parallel_map(run_block, sample_blocks(n_samples), threads)
    mean, se, _ = _mc_reduce(results)
    return mean, se


def mu_z_integral(
    region,
    h: Callable[[CompositeLoop], complex],
    params: ModelParams,
    trunc: Truncation,
    *,
    absolute: bool = False,
    corrected: bool = True,
    jumps_only: bool = False,
    h_sup: float = 1.0,
    threads: int = 1,
    stream: str = "mu_z",
) -> SeriesEstimate:
    """One-loop-measure integral sum_{r in region} sum_j (z^j/j) E[... h].

    region is a finite site container (exposes sites() or is iterable, plus
    membership) or ALL_SPACE, in which case sites are the sup-norm ball of
    radius r_max and h must vanish beyond that reach.  The integrand carries
    the self-energy factor e^{-v} (zero on inadmissible loops), confinement
    to the region, and, when corrected, the boundary compensation factor.
    absolute=True integrates |h| d|mu_z| (phases dropped, e^{-Re v}, |c|).
    jumps_only=True switches to the exact enumeration backend; it requires h
    to be independent of the jump times, which is only sound without boundary
    compensation and with j_max = 1 unless pi is empty.
    """
    if isinstance(region, AllSpace):
        sites = tuple(_ball_sites(params.d, trunc.r_max))
        corrected = False
    elif hasattr(region, "sites"):
        sites = tuple(region.sites())
    else:
        sites = tuple(tuple(s) for s in region)
    kern = kernel_for(params)
    apply_corr = corrected and not params.pi.is_empty and not isinstance(region, AllSpace)

    if jumps_only:
        if apply_corr:
            raise ValidationError("exact backend cannot carry the boundary compensation")
        if trunc.j_max > 1 and not params.pi.is_empty:
            raise ValidationError("exact backend requires j_max = 1 for a nonzero pi")
        return _mu_z_exact(region, sites, h, params, trunc, absolute, h_sup)

    sampler = LoopSampler(params, trunc, sites)
    if sampler.total_mass == 0.0:
        return SeriesEstimate(0.0, meta={"backend": "mc", "sites": len(sites)})

    psi = params.psi

    def term(rng: np.random.Generator) -> complex:
        loop, unit = sampler.sample(rng)
        if not confined(loop, region):
            return 0.0 + 0.0j
        v = self_energy(loop, psi)
        if v == HARD_CORE:
            return 0.0 + 0.0j
        c = boundary_correction(loop, params.pi, region) if apply_corr else 1.0
        if absolute:
            return math.exp(-v.real) * abs(c) * abs(h(loop))
        return unit * cmath.exp(-v) * c * h(loop)

    mean, se = mc_expectation(term, trunc.samples, trunc.seed, stream, threads)
    tail = sampler.tail_bound(g_sup=h_sup, corrected=apply_corr)
    return SeriesEstimate(
        value=sampler.total_mass * mean,
        stat_error=sampler.total_mass * se,
        tail_bound=tail,
        meta={
            "backend": "mc",
            "sites": len(sites),
            "samples": trunc.samples,
            "j_max": trunc.j_max,
            "n_max": trunc.n_max,
            "corrected": apply_corr,
        },
    )


def _mu_z_exact(region, sites, h, params, trunc, absolute, h_sup) -> SeriesEstimate:
    kern = kernel_for(params)
    b = params.beta
    m0 = params.norms.M0
    total = 0.0 + 0.0j
    for j in range(1, trunc.j_max + 1):
        if kern.M == 0.0:
            # static loops only; windings >= 2 stack on one site (inadmissible)
            if j >= 2:
                continue
            pref = params.z**j / j
            for r in sites:
                loop = static_loop(r, j, b)
                if confined(loop, region):
                    val = h(loop)
                    total += abs(pref) * abs(val) if absolute else pref * val
            continue
        pref = (params.z**j / j) * cmath.exp(j * b * (kern.M + m0))
        if absolute:
            pref = abs(pref)
        mt = kern.M * j * b
        for r in sites:
            acc = 0.0 + 0.0j
            for n in range(trunc.n_max + 1):
                pw = math.exp(-mt + (n * math.log(mt) if n else 0.0) - math.lgamma(n + 1))
                for seq, prod, phase, _sup in kern.closed_stats(n):
                    # representative loop with evenly spaced times; h must not use them
                    t = j * b
                    times = [(i + 1) * t / (n + 1) for i in range(n)]
                    loop = CompositeLoop(r, j, tuple(zip(times, seq)), b)
                    if not confined(loop, region):
                        continue
                    w = prod if absolute else prod * phase
                    acc += pw * w * (abs(h(loop)) if absolute else h(loop))
            total += pref * acc
    tail = LoopSampler(params, trunc, sites).tail_bound(g_sup=h_sup)
    return SeriesEstimate(
        value=total,
        tail_bound=tail,
        meta={"backend": "exact", "sites": len(sites), "j_max": trunc.j_max},
    )


def _ball_sites(d: int, r_max: int) -> Iterable[Vec]:
    rng = range(-r_max, r_max + 1)
    if d == 1:
        return [(x,) for x in rng]
    if d == 2:
        return [(x, y) for x in rng for y in rng]
    return [(x, y, z) for x in rng for y in rng for z in rng]


@dataclass(frozen=True)
class CheckRow:
    """One line of a numeric bound check: lhs + errors versus a closed-form rhs."""

    check: str
    j: int | None
    R: float | None
    lhs: complex
    stat_error: float
    tail_bound: float
    bound: float
    passed: bool
    applicable: bool = True
    note: str = ""


CHECK_CSV_HEADER = [
    "check_name",
    "j",
    "R",
    "lhs_re",
    "lhs_im",
    "stat_error",
    "tail_bound",
    "bound",
    "pass",
]


def write_check_csv(rows: Iterable[CheckRow], fileobj) -> None:
    writer = csv.writer(fileobj)
    writer.writerow(CHECK_CSV_HEADER)
    for r in rows:
        writer.writerow(
            [
                r.check,
                "" if r.j is None else r.j,
                "" if r.R is None else r.R,
                repr(r.lhs.real),
                repr(r.lhs.imag),
                repr(r.stat_error),
                repr(r.tail_bound),
                repr(r.bound),
                r.passed,
            ]
        )


def lemma1_check(j: int, params: ModelParams, trunc: Truncation) -> list[CheckRow]:
    """Positive-law moment bounds for e^N, e^N N, e^N N^2 on closed paths.

    The stated right-hand sides presume M > 0 (their derivation divides by
    2M); at M = 0 the e^N integral is 1 > 1/2, so the check is reported as
    not applicable rather than failed.
    """
    kern = kernel_for(params)
    b = params.beta
    m = kern.M
    t = j * b
    names = ("lemma1a", "lemma1b", "lemma1c")
    if m == 0.0:
        return [
            CheckRow(name, j, None, 1.0 if name == "lemma1a" else 0.0, 0.0, 0.0, 0.5,
                     passed=False, applicable=False, note="not applicable: M=0")
            for name in names
        ]
    mt = m * t
    jbem = j * b * E * m
    base = 0.5 * math.exp(j * b * m * (E - 1.0))
    bounds = (base, jbem * base, jbem * (jbem + 1.0) * base)
    funcs = (
        lambda n: math.exp(n),
        lambda n: n * math.exp(n),
        lambda n: n * n * math.exp(n),
    )
    rows = []
    for name, f, bound in zip(names, funcs, bounds):
        lhs = 0.0
        for n in range(trunc.n_max + 1):
            cn = kern.closed_mass(n)
            if cn > 0.0:
                lhs += math.exp(-mt + (n * math.log(mt) if n else 0.0) - math.lgamma(n + 1)) * cn * f(n)
        tail = 0.5 * poisson_tail(mt, trunc.n_max, f)
        rows.append(
            CheckRow(name, j, None, lhs, 0.0, tail, bound, passed=(lhs + tail <= bound))
        )
    return rows


def lemma2_check(j: int, R: float, params: ModelParams, trunc: Truncation) -> list[CheckRow]:
    """Large-excursion moment bounds: same functionals cut on sup_t |X(t)| >= R."""
    kern = kernel_for(params)
    b = params.beta
    m = kern.M
    ml = params.norms.Ml
    t = j * b
    base = math.exp(j * b * (ml * E - m)) * (1.0 + R) ** (-params.l)
    jbeml = j * b * E * ml
    bounds = (base, jbeml * base, jbeml * (jbeml + 1.0) * base)
    names = ("lemma2a", "lemma2b", "lemma2c")
    funcs = (
        lambda n: math.exp(n),
        lambda n: n * math.exp(n),
        lambda n: n * n * math.exp(n),
    )
    rows = []
    if m == 0.0:
        lhs_vals = [1.0 if R <= 0.0 else 0.0, 0.0, 0.0]
        for name, lhs, bound in zip(names, lhs_vals, bounds):
            rows.append(CheckRow(name, j, R, lhs, 0.0, 0.0, bound, passed=(lhs <= bound)))
        return rows
    mt = m * t
    sums = [0.0, 0.0, 0.0]
    for n in range(trunc.n_max + 1):
        pw = math.exp(-mt + (n * math.log(mt) if n else 0.0) - math.lgamma(n + 1))
        mass = sum(prod for _seq, prod, _ph, sup in kern.closed_stats(n) if sup >= R)
        if mass > 0.0:
            for i, f in enumerate(funcs):
                sums[i] += pw * mass * f(n)
    for i, (name, f, bound) in enumerate(zip(names, funcs, bounds)):
        tail = 0.5 * poisson_tail(mt, trunc.n_max, f)
        rows.append(
            CheckRow(name, j, R, sums[i], 0.0, tail, bound, passed=(sums[i] + tail <= bound))
        )
    return rows
