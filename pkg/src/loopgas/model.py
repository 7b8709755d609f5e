"""Potentials, model parameters, derived norms and convergence-radius diagnostics.

Conventions fixed here once and used everywhere:

* lattice vectors are tuples of ints of length d; |r| is the Euclidean norm,
* the transverse potential pi and the longitudinal potential psi are finite
  maps r -> complex on Z^d \\ {0}, symmetric under r -> -r,
* psi always carries an implicit hard core psi(0) = +inf (never stored),
* the fugacity is z = exp(beta * mu).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

Vec = tuple[int, ...]

E = math.e


class ValidationError(ValueError):
    """Raised when model inputs violate a documented precondition."""


def _as_vec(v: Iterable[int]) -> Vec:
    vec = tuple(int(c) for c in v)
    return vec


def _neg(v: Vec) -> Vec:
    return tuple(-c for c in v)


def _norm(v: Vec) -> float:
    return math.sqrt(sum(c * c for c in v))


@dataclass(frozen=True)
class Potential:
    """Finite-support symmetric potential on Z^d \\ {0}.

    ``kind`` is "transverse" (hopping, pi) or "longitudinal" (density-density,
    psi).  Longitudinal potentials carry an implicit hard core at the origin.
    """

    support: Mapping[Vec, complex]
    kind: str

    def __post_init__(self):
        if self.kind not in ("transverse", "longitudinal"):
            raise ValidationError(f"unknown potential kind {self.kind!r}")
        cleaned: dict[Vec, complex] = {}
        for raw, val in self.support.items():
            vec = _as_vec(raw)
            if all(c == 0 for c in vec):
                raise ValidationError("potential value at the origin must not be stored")
            cleaned[vec] = complex(val)
        for vec, val in cleaned.items():
            other = cleaned.get(_neg(vec))
            if other is None or abs(other - val) > 1e-12 * max(1.0, abs(val)):
                raise ValidationError(f"potential not symmetric at {vec}")
        object.__setattr__(self, "support", cleaned)

    @classmethod
    def from_entries(cls, entries, kind: str, d: int) -> "Potential":
        """Build from config records {vector: [int;d], value: [re, im]}.

        The symmetric partner of each vector may be omitted; it is filled in
        automatically.  Contradictory duplicates are an error.
        """
        table: dict[Vec, complex] = {}
        for rec in entries:
            vec = _as_vec(rec["vector"])
            if len(vec) != d:
                raise ValidationError(f"vector {vec} has wrong dimension (expected {d})")
            re, im = rec["value"]
            val = complex(float(re), float(im))
            for key in (vec, _neg(vec)):
                if key in table and abs(table[key] - val) > 1e-12 * max(1.0, abs(val)):
                    raise ValidationError(f"contradictory duplicate potential entry at {key}")
            table[vec] = val
            table[_neg(vec)] = val
        return cls(table, kind)

    @classmethod
    def empty(cls, kind: str) -> "Potential":
        return cls({}, kind)

    def value(self, r: Vec) -> complex:
        return self.support.get(tuple(r), 0.0 + 0.0j)

    @property
    def vectors(self) -> tuple[Vec, ...]:
        return tuple(sorted(self.support))

    @property
    def is_empty(self) -> bool:
        return not self.support

    @property
    def max_step(self) -> float:
        """Largest Euclidean length of a support vector (0 for empty support)."""
        return max((_norm(v) for v in self.support), default=0.0)

    @property
    def max_coord(self) -> int:
        """Largest |coordinate| over support vectors (reach per jump, sup norm)."""
        return max((max(abs(c) for c in v) for v in self.support), default=0)

    def key(self):
        """Hashable identity used for caching derived tables."""
        return (self.kind,) + tuple((v, self.support[v]) for v in self.vectors)


@dataclass(frozen=True)
class NormSet:
    """Cached sums over the stored potential supports (|r| Euclidean).

    M      = (1/2) sum |pi(r)|
    M0     = (1/2) sum pi(r)            (complex in general)
    Ml     = (1/2) sum |pi(r)| (1+|r|)^l
    psi_norm   = sum |psi(r)|
    psi_l_norm = sum |psi(r)| (1+|r|)^l
    """

    M: float
    M0: complex
    Ml: float
    psi_norm: float
    psi_l_norm: float


def compute_norms(pi: Potential, psi: Potential, l: float) -> NormSet:
    if l <= 0:
        raise ValidationError("decay exponent l must be positive")
    M = 0.5 * sum(abs(v) for v in pi.support.values())
    M0 = 0.5 * sum(pi.support.values())
    Ml = 0.5 * sum(abs(val) * (1.0 + _norm(r)) ** l for r, val in pi.support.items())
    psi_norm = sum(abs(v) for v in psi.support.values())
    psi_l_norm = sum(abs(val) * (1.0 + _norm(r)) ** l for r, val in psi.support.items())
    return NormSet(M=M, M0=complex(M0), Ml=Ml, psi_norm=psi_norm, psi_l_norm=psi_l_norm)


@dataclass(frozen=True)
class ModelParams:
    """Full model specification.

    d lattice dimension (1..3), beta inverse temperature, z fugacity,
    pi/psi potentials, l decay exponent (> d).
    """

    d: int
    beta: float
    z: complex
    pi: Potential
    psi: Potential
    l: float
    norms: NormSet = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValidationError("dimension d must be 1, 2 or 3")
        if self.beta <= 0:
            raise ValidationError("beta must be positive")
        if self.l <= self.d:
            raise ValidationError("decay exponent l must exceed d")
        for vec in list(self.pi.support) + list(self.psi.support):
            if len(vec) != self.d:
                raise ValidationError(f"support vector {vec} does not match d={self.d}")
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "norms", compute_norms(self.pi, self.psi, self.l))

    @property
    def mu(self) -> float:
        """Chemical potential under the grand-canonical map z = exp(beta*mu)."""
        if self.z.imag != 0 or self.z.real <= 0:
            raise ValidationError("mu defined only for real z > 0")
        return math.log(self.z.real) / self.beta

    def with_z(self, z: complex) -> "ModelParams":
        return ModelParams(d=self.d, beta=self.beta, z=z, pi=self.pi, psi=self.psi, l=self.l)


@dataclass(frozen=True)
class ConvergenceDiagnostics:
    """The six low-fugacity radius scalars with their "< 1" flags.

    q    : |z| e^{beta(M e + Re M0 + ||psi||) + 1}
    q_l  : same with Ml in place of M; the sign of the trailing unit in the
           exponent is controlled by ``strict_ql`` (+1 when strict, the
           literal -1 otherwise; the two published displays disagree).
    p    : C(beta)  * sum_j j x^j   with x  = |z| e^{beta(M e + Re M0 + 2||psi||) + 1}
    p_l  : C(beta,l)* sum_j j x_l^j with x_l = |z| e^{beta(Ml e + Re M0 + 2||psi||) + 1}

    The geometric series sum_j j x^j is x/(1-x)^2 for x < 1 and +inf otherwise;
    being out of radius is a reported state, not an error.
    """

    q: float
    q_l: float
    p: float
    p_l: float
    C_beta: float
    C_beta_l: float

    @property
    def q_satisfied(self) -> bool:
        return self.q < 1.0

    @property
    def q_l_satisfied(self) -> bool:
        return self.q_l < 1.0

    @property
    def p_satisfied(self) -> bool:
        return self.p < 1.0

    @property
    def p_l_satisfied(self) -> bool:
        return self.p_l < 1.0

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "q_satisfied": self.q_satisfied,
            "q_l": self.q_l,
            "q_l_satisfied": self.q_l_satisfied,
            "p": self.p,
            "p_satisfied": self.p_satisfied,
            "p_l": self.p_l,
            "p_l_satisfied": self.p_l_satisfied,
            "C_beta": self.C_beta,
            "C_beta_l": self.C_beta_l,
        }


def _sum_j_xj(x: float) -> float:
    """sum_{j>=1} j x^j in closed form, +inf outside the radius."""
    if x >= 1.0:
        return math.inf
    return x / (1.0 - x) ** 2


def c_beta(params: ModelParams) -> float:
    """Stability constant C(beta) of the small-z interaction-strength bound."""
    n = params.norms
    bm = params.beta * E * n.M
    return 0.5 * (1.0 + 3.0 * bm + bm * bm + params.beta * n.psi_norm * (1.0 + bm))


def c_beta_l(params: ModelParams) -> float:
    """Decay constant C(beta, l) entering the spatial-decay radius p_l."""
    n = params.norms
    bml = params.beta * n.Ml * E
    return (1.0 + bml) * (2.0 + 2.0 * params.beta * n.psi_l_norm + bml)


def convergence_diagnostics(params: ModelParams, strict_ql: bool = True) -> ConvergenceDiagnostics:
    n = params.norms
    az = abs(params.z)
    b = params.beta
    re_m0 = n.M0.real
    q = az * math.exp(b * (n.M * E + re_m0 + n.psi_norm) + 1.0)
    ql_shift = 1.0 if strict_ql else -1.0
    q_l = az * math.exp(b * (n.Ml * E + re_m0 + n.psi_norm) + ql_shift)
    x = az * math.exp(b * (n.M * E + re_m0 + 2.0 * n.psi_norm) + 1.0)
    x_l = az * math.exp(b * (n.Ml * E + re_m0 + 2.0 * n.psi_norm) + 1.0)
    cb = c_beta(params)
    cbl = c_beta_l(params)
    p = cb * _sum_j_xj(x)
    p_l = cbl * _sum_j_xj(x_l)
    return ConvergenceDiagnostics(q=q, q_l=q_l, p=p, p_l=p_l, C_beta=cb, C_beta_l=cbl)


def decay_constant(l: float, p: float, terms: int = 10000) -> float:
    """C(l, p) = 2^l sum_{m>=1} m^{l+1} p^m, +inf when the series diverges."""
    if p >= 1.0:
        return math.inf
    total = 0.0
    for m in range(1, terms + 1):
        term = m ** (l + 1.0) * p**m
        total += term
        if m > 10 and term < 1e-18 * max(total, 1.0):
            break
    return 2.0**l * total
