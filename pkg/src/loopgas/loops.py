"""Composite loops, their energies, Mayer function and stability functions.

A composite loop is a closed piecewise-constant trajectory X : [0, j*beta] ->
Z^d with X(0) = X(j*beta); j is the winding number.  Its j elementary
constituents are the time slices x_k(t) = X(t + k*beta), t in [0, beta].
Evaluation is right-continuous: the position at a jump time is the position
after the jump.

Hard-core convention: two constituents overlapping (same site over a time
interval of positive length) give energy +inf; instant coincidences at jump
times have measure zero and are ignored.  +inf is carried as the float
sentinel math.inf (never fed to an exponential: the Mayer function is set to
-1 directly).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

from loopgas.model import ModelParams, Potential, ValidationError, Vec

HARD_CORE = math.inf


def _add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def _sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


@dataclass(frozen=True)
class CompositeLoop:
    """Closed worldline of time-length windings*beta.

    ``jumps`` is a tuple of (time, vector) pairs with strictly increasing
    times in (0, windings*beta) and jump vectors summing to zero.
    """

    base: Vec
    windings: int
    jumps: tuple[tuple[float, Vec], ...]
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(int(c) for c in self.base))
        if self.windings < 1:
            raise ValidationError("windings must be >= 1")
        if self.beta <= 0:
            raise ValidationError("beta must be positive")
        jumps = tuple((float(t), tuple(int(c) for c in r)) for t, r in self.jumps)
        object.__setattr__(self, "jumps", jumps)
        length = self.windings * self.beta
        prev = 0.0
        total = tuple(0 for _ in self.base)
        for t, r in jumps:
            if not (0.0 < t < length):
                raise ValidationError("jump time outside (0, windings*beta)")
            if t <= prev:
                raise ValidationError("jump times must be strictly increasing")
            if all(c == 0 for c in r):
                raise ValidationError("zero jump vector")
            if len(r) != len(self.base):
                raise ValidationError("jump vector dimension mismatch")
            prev = t
            total = _add(total, r)
        if any(c != 0 for c in total):
            raise ValidationError("jump vectors must sum to zero (closed trajectory)")

    @property
    def n_jumps(self) -> int:
        return len(self.jumps)

    @property
    def length(self) -> float:
        return self.windings * self.beta

    @cached_property
    def visited(self) -> tuple[Vec, ...]:
        """Sites in order of first occupation: base then position after each jump."""
        sites = [self.base]
        pos = self.base
        for _, r in self.jumps:
            pos = _add(pos, r)
            sites.append(pos)
        return tuple(sites)

    @cached_property
    def sup_norm(self) -> float:
        """sup_t |X(t)| (Euclidean), attained at a visited site."""
        return max(math.sqrt(sum(c * c for c in s)) for s in self.visited)

    def position_at(self, t: float) -> Vec:
        if not (0.0 <= t <= self.length):
            raise ValidationError("time outside [0, windings*beta]")
        pos = self.base
        for tk, r in self.jumps:
            if tk <= t:
                pos = _add(pos, r)
            else:
                break
        return pos

    def shift(self, r: Vec) -> "CompositeLoop":
        return CompositeLoop(_add(self.base, tuple(r)), self.windings, self.jumps, self.beta)

    @cached_property
    def constituents(self):
        """Per winding k: list of (start_time, position) segments covering [0, beta)."""
        out = []
        for k in range(self.windings):
            lo, hi = k * self.beta, (k + 1) * self.beta
            segs = [(0.0, self.position_at(lo))]
            for t, r in self.jumps:
                if lo < t < hi:
                    segs.append((t - lo, _add(segs[-1][1], r)))
            out.append(segs)
        return out

    def to_json(self) -> str:
        rec = {
            "base": list(self.base),
            "windings": self.windings,
            "beta": self.beta,
            "jumps": [[t, list(r)] for t, r in self.jumps],
        }
        return json.dumps(rec)

    @classmethod
    def from_json(cls, text: str) -> "CompositeLoop":
        rec = json.loads(text)
        return cls(
            tuple(rec["base"]),
            rec["windings"],
            tuple((t, tuple(r)) for t, r in rec["jumps"]),
            rec["beta"],
        )


@dataclass(frozen=True)
class LoopConfiguration:
    """Finite ordered collection of composite loops (possibly empty)."""

    loops: tuple[CompositeLoop, ...]

    def __post_init__(self):
        object.__setattr__(self, "loops", tuple(self.loops))

    def __len__(self) -> int:
        return len(self.loops)

    def __iter__(self):
        return iter(self.loops)


def static_loop(base: Vec, windings: int, beta: float) -> CompositeLoop:
    return CompositeLoop(tuple(base), windings, (), beta)


def _iter_intervals(profiles, beta: float):
    """Step through a family of segment lists on [0, beta) simultaneously.

    Yields (dt, positions) for every maximal interval on which all profiles
    are constant; positions is a list aligned with the input profiles.
    """
    cuts = sorted({t for segs in profiles for t, _ in segs} | {0.0})
    cuts.append(beta)
    pointers = [0] * len(profiles)
    for a, b in zip(cuts, cuts[1:]):
        if b <= a:
            continue
        positions = []
        for i, segs in enumerate(profiles):
            p = pointers[i]
            while p + 1 < len(segs) and segs[p + 1][0] <= a:
                p += 1
            pointers[i] = p
            positions.append(segs[p][1])
        yield b - a, positions


def admissible(loop: CompositeLoop) -> bool:
    """True iff no two constituents share a site over an interval of positive length."""
    if loop.windings == 1:
        return True
    profiles = loop.constituents
    for dt, positions in _iter_intervals(profiles, loop.beta):
        if len(set(positions)) < len(positions):
            return False
    return True


def self_energy(loop: CompositeLoop, psi: Potential):
    """v(X): pairwise interaction of the constituents of one loop.

    Returns the complex time integral, or math.inf when the loop is
    inadmissible (hard core).
    """
    if loop.windings == 1:
        return 0.0 + 0.0j
    profiles = loop.constituents
    total = 0.0 + 0.0j
    j = loop.windings
    for dt, positions in _iter_intervals(profiles, loop.beta):
        for a in range(j):
            for b in range(a + 1, j):
                if positions[a] == positions[b]:
                    return HARD_CORE
                total += dt * psi.value(_sub(positions[a], positions[b]))
    return total


def pair_energy(x: CompositeLoop, y: CompositeLoop, psi: Potential):
    """u(X, Y): interaction between all constituent pairs of two loops."""
    if x.beta != y.beta:
        raise ValidationError("loops must share beta")
    px = x.constituents
    py = y.constituents
    profiles = px + py
    total = 0.0 + 0.0j
    jx = len(px)
    for dt, positions in _iter_intervals(profiles, x.beta):
        xs = positions[:jx]
        ys = positions[jx:]
        for pa in xs:
            for pb in ys:
                if pa == pb:
                    return HARD_CORE
                total += dt * psi.value(_sub(pa, pb))
    return total


def mayer(x: CompositeLoop, y: CompositeLoop, psi: Potential) -> complex:
    """Mayer function zeta = exp(-u) - 1, with zeta = -1 on hard-core overlap."""
    u = pair_energy(x, y, psi)
    return mayer_from_energy(u)


def mayer_from_energy(u) -> complex:
    if u == HARD_CORE:
        return -1.0 + 0.0j
    return complex(math.e ** (-u.real) * math.cos(-u.imag), math.e ** (-u.real) * math.sin(-u.imag)) - 1.0


@dataclass(frozen=True)
class Stability:
    a: float
    b: float


def stability_functions(loop: CompositeLoop, params: ModelParams) -> Stability:
    """a(X) = |X| + N(X); b(X) = Re v(X)/2 + beta*||psi||*|X|/2 (admissible loops only)."""
    v = self_energy(loop, params.psi)
    if v == HARD_CORE:
        raise ValidationError("stability functions undefined for inadmissible loops")
    a = loop.windings + loop.n_jumps
    b = 0.5 * v.real + 0.5 * params.beta * params.norms.psi_norm * loop.windings
    return Stability(a=float(a), b=b)
