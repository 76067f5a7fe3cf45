"""Rational transfer-function algebra for SISO LTI systems.

Polynomials are coefficient vectors, highest degree first. A
``RationalTF`` is a coprime ratio N/D in either the continuous (s) or
discrete (z) domain, with the denominator made monic at construction so
coefficient comparisons are well defined. ``StateSpace`` carries a
controllable-canonical realization plus a scalar feedthrough term so that
biproper systems (relative degree 0) realize cleanly.

Numerical conventions:

* roots come from companion-matrix eigenvalues (fine up to degree ~20,
  accuracy degrades for larger or badly clustered polynomials);
* numerator/denominator roots closer than ``CANCEL_TOL`` are treated as a
  common factor and divided out;
* stability is strict with margin ``STABILITY_MARGIN``: marginal systems
  are classified unstable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.linalg import expm

from tlmap.errors import (
    DomainMismatchError,
    NonCausalError,
    NotMinimumPhaseError,
    UnstableSystemError,
    UnstableTargetError,
    ValidationError,
)

CANCEL_TOL = 1e-8
STABILITY_MARGIN = 1e-9
_TRIM_REL = 1e-12


class Domain(Enum):
    CONTINUOUS = "ct"
    DISCRETE = "dt"


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial, coefficients highest degree first.

    The zero polynomial is stored as [0.0] and reports degree -inf.
    Leading coefficients below 1e-12 of the largest magnitude are trimmed,
    which absorbs float dust from products and realizations.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.float64)).ravel()
        if c.size == 0:
            c = np.zeros(1)
        if not np.all(np.isfinite(c)):
            raise ValidationError("polynomial coefficients must be finite")
        scale = np.max(np.abs(c))
        if scale == 0.0:
            c = np.zeros(1)
        else:
            keep = np.nonzero(np.abs(c) > _TRIM_REL * scale)[0]
            c = c[keep[0]:]
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int | float:
        if self.is_zero:
            return -math.inf
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0.0

    def __call__(self, x):
        return np.polyval(self.coeffs, x)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if self.is_zero or other.is_zero:
                return Polynomial(np.zeros(1))
            return Polynomial(np.polymul(self.coeffs, other.coeffs))
        return Polynomial(self.coeffs * float(other))

    __rmul__ = __mul__

    def __add__(self, other):
        return Polynomial(np.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return Polynomial(np.polysub(self.coeffs, other.coeffs))

    def __eq__(self, other):
        return isinstance(other, Polynomial) and np.array_equal(
            self.coeffs, other.coeffs
        )

    def roots(self) -> np.ndarray:
        """Roots via companion-matrix eigenvalues."""
        if self.is_zero or self.degree < 1:
            return np.empty(0, dtype=complex)
        c = self.coeffs / self.coeffs[0]
        n = len(c) - 1
        comp = np.zeros((n, n))
        comp[0, :] = -c[1:]
        if n > 1:
            comp[1:, :-1] = np.eye(n - 1)
        return np.linalg.eigvals(comp)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"


def poly_from_roots(roots, leading: float = 1.0) -> Polynomial:
    """Real polynomial with the given (conjugate-closed) root multiset."""
    roots = np.asarray(roots, dtype=complex)
    c = np.atleast_1d(np.poly(roots)) if roots.size else np.ones(1)
    if np.max(np.abs(c.imag), initial=0.0) > 1e-9 * max(1.0, np.max(np.abs(c))):
        raise ValidationError("root set is not closed under conjugation")
    return Polynomial(leading * c.real)


def _match_roots(rp: np.ndarray, rq: np.ndarray, tol: float):
    """Greedy nearest pairing of two root sets; returns index pairs under tol."""
    used = np.zeros(len(rq), dtype=bool)
    pairs = []
    for i, r in enumerate(rp):
        if not len(rq):
            break
        dists = np.abs(rq - r)
        dists[used] = np.inf
        j = int(np.argmin(dists))
        if dists[j] < tol:
            used[j] = True
            pairs.append((i, j))
    return pairs


def _deflate(coeffs: np.ndarray, root: complex) -> np.ndarray:
    """Divide out (x - root) for a real root, or the conjugate quadratic."""
    if abs(root.imag) < 1e-12 * max(1.0, abs(root.real)):
        factor = np.array([1.0, -root.real])
    else:
        factor = np.array([1.0, -2.0 * root.real, abs(root) ** 2])
    q, _ = np.polydiv(coeffs, factor)
    return np.atleast_1d(q)


def _cancel_common(num: Polynomial, den: Polynomial, tol: float = CANCEL_TOL):
    """Remove common factors between num and den within root distance tol.

    When every root of one side matches into the other, the reduced side
    comes from a single exact polynomial division (accurate to rounding);
    partial overlaps fall back to per-root deflation.
    """
    if num.degree < 1 or den.degree < 1:
        return num, den
    rn = num.roots()
    rd = den.roots()
    pairs = _match_roots(rn, rd, tol)
    if not pairs:
        return num, den

    if len(pairs) == den.degree:
        q, rem = np.polydiv(num.coeffs, den.coeffs)
        if np.max(np.abs(rem), initial=0.0) <= 1e-7 * np.max(np.abs(num.coeffs)):
            return Polynomial(q), Polynomial(np.ones(1))
    if len(pairs) == num.degree:
        q, rem = np.polydiv(den.coeffs, num.coeffs)
        if np.max(np.abs(rem), initial=0.0) <= 1e-7 * np.max(np.abs(den.coeffs)):
            return Polynomial(np.ones(1)), Polynomial(q)

    # Partial overlap: deflate matched roots one by one, keeping conjugate
    # pairs together so coefficients stay real.
    ncoef = num.coeffs.copy()
    dcoef = den.coeffs.copy()
    done = set()
    for i, j in pairs:
        if i in done:
            continue
        r = 0.5 * (rn[i] + rd[j])
        done.add(i)
        if abs(r.imag) >= 1e-12 * max(1.0, abs(r.real)):
            # require the conjugate to be matched as well, else skip
            mate = None
            for i2, j2 in pairs:
                if i2 not in done and abs(rn[i2] - np.conj(rn[i])) < tol:
                    mate = (i2, j2)
                    break
            if mate is None:
                continue
            done.add(mate[0])
        ncoef = _deflate(ncoef, r)
        dcoef = _deflate(dcoef, r)
    return Polynomial(ncoef), Polynomial(dcoef)


def _check_same_domain(a: "RationalTF", b: "RationalTF"):
    if a.domain is not b.domain:
        raise DomainMismatchError(f"domains differ: {a.domain.value} vs {b.domain.value}")
    if a.domain is Domain.DISCRETE and not math.isclose(
        a.sample_period, b.sample_period, rel_tol=1e-12
    ):
        raise DomainMismatchError(
            f"sample periods differ: {a.sample_period} vs {b.sample_period}"
        )


@dataclass(frozen=True)
class RationalTF:
    """Coprime rational transfer function N/D with a monic denominator."""

    num: Polynomial
    den: Polynomial
    domain: Domain
    sample_period: float | None = None

    def __post_init__(self):
        num, den = self.num, self.den
        if not isinstance(num, Polynomial):
            num = Polynomial(np.asarray(num, dtype=float))
        if not isinstance(den, Polynomial):
            den = Polynomial(np.asarray(den, dtype=float))
        if den.is_zero:
            raise ValidationError("denominator is the zero polynomial")
        if self.domain is Domain.DISCRETE:
            if self.sample_period is None or self.sample_period <= 0:
                raise ValidationError("discrete systems need sample_period > 0")
        elif self.sample_period is not None:
            raise ValidationError("continuous systems take no sample_period")
        if not num.is_zero:
            num, den = _cancel_common(num, den)
        lead = den.coeffs[0]
        object.__setattr__(self, "num", Polynomial(num.coeffs / lead))
        object.__setattr__(self, "den", Polynomial(den.coeffs / lead))

    @property
    def relative_degree(self) -> int:
        return relative_degree(self)

    @property
    def order(self) -> int:
        """Dynamic order: degree of the (coprime) denominator."""
        return int(self.den.degree)

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def poles(self) -> np.ndarray:
        return self.den.roots()

    def zeros(self) -> np.ndarray:
        return self.num.roots()

    def dc_gain(self) -> float:
        at = 0.0 if self.domain is Domain.CONTINUOUS else 1.0
        return float(self(at))

    def __repr__(self):
        h = "" if self.sample_period is None else f", h={self.sample_period}"
        return (
            f"RationalTF({list(self.num.coeffs)}, {list(self.den.coeffs)}, "
            f"{self.domain.value}{h})"
        )


@dataclass(frozen=True)
class StateSpace:
    """Realization (A, B, C) plus scalar feedthrough D, n >= 1."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float
    domain: Domain
    sample_period: float | None = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=np.float64))
        B = np.asarray(self.B, dtype=np.float64).ravel()
        C = np.asarray(self.C, dtype=np.float64).ravel()
        n = A.shape[0]
        if n < 1 or A.shape != (n, n) or B.shape != (n,) or C.shape != (n,):
            raise ValidationError("inconsistent state-space dimensions")
        if self.domain is Domain.DISCRETE and (
            self.sample_period is None or self.sample_period <= 0
        ):
            raise ValidationError("discrete systems need sample_period > 0")
        for arr in (A, B, C):
            arr.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", float(self.D))

    @property
    def n(self) -> int:
        return self.A.shape[0]


def relative_degree(g: RationalTF) -> int:
    """deg(den) - deg(num); negative for non-causal maps."""
    if g.num.is_zero:
        raise ValidationError("the zero system has no relative degree")
    return int(g.den.degree - g.num.degree)


def _roots_strictly_stable(roots: np.ndarray, domain: Domain) -> bool:
    if roots.size == 0:
        return True
    if domain is Domain.CONTINUOUS:
        return bool(np.all(roots.real < -STABILITY_MARGIN))
    return bool(np.all(np.abs(roots) < 1.0 - STABILITY_MARGIN))


def is_bibo_stable(g: RationalTF) -> bool:
    """All poles strictly inside the stability region (OLHP / unit disk)."""
    return _roots_strictly_stable(g.poles(), g.domain)


def is_minimum_phase(g: RationalTF) -> bool:
    """Stable and with zeros satisfying the same strict stability condition."""
    return is_bibo_stable(g) and _roots_strictly_stable(g.zeros(), g.domain)


def perfect_map_exists(g_s: RationalTF, g_t: RationalTF) -> bool:
    """Whether a causal, BIBO stable map taking the source output to the
    target output with zero error exists: true iff the source relative
    degree does not exceed the target's.

    Hypothesis violations raise instead of returning False.
    """
    _check_same_domain(g_s, g_t)
    if not is_bibo_stable(g_s):
        raise UnstableSystemError("source system is not BIBO stable")
    if not is_bibo_stable(g_t):
        raise UnstableSystemError("target system is not BIBO stable")
    if not is_minimum_phase(g_s):
        raise NotMinimumPhaseError("source system is not minimum-phase")
    return relative_degree(g_s) <= relative_degree(g_t)


def multiply(a: RationalTF, b: RationalTF) -> RationalTF:
    """Coprime product a*b.

    Common factors between one operand's numerator and the other's
    denominator are divided out before multiplying, so compositions that
    cancel analytically (inverse-times-forward) stay accurate.
    """
    _check_same_domain(a, b)
    n1, d2 = _cancel_common(a.num, b.den)
    n2, d1 = _cancel_common(b.num, a.den)
    return RationalTF(n1 * n2, d1 * d2, a.domain, a.sample_period)


def optimal_map(g_s: RationalTF, g_t: RationalTF) -> RationalTF:
    """The zero-error transfer map (D_S/N_S)*(N_T/D_T).

    Cascades the exact source inverse with the target dynamics. May be
    non-causal (negative relative degree) when the source relative degree
    exceeds the target's; that is reported, not rejected.
    """
    _check_same_domain(g_s, g_t)
    if not is_bibo_stable(g_t):
        raise UnstableTargetError("target system is not BIBO stable")
    if not is_minimum_phase(g_s):
        raise NotMinimumPhaseError(
            "source system is not minimum-phase; its inverse is unstable"
        )
    source_inverse = RationalTF(g_s.den, g_s.num, g_s.domain, g_s.sample_period)
    return multiply(source_inverse, g_t)


def realize(g: RationalTF) -> StateSpace:
    """Controllable canonical realization; biproper inputs split into a
    direct-feedthrough scalar plus a strictly proper part."""
    r = relative_degree(g)
    if r < 0:
        raise NonCausalError(f"relative degree {r} < 0 cannot be realized")
    den = g.den  # monic by construction
    n = int(den.degree)
    if n == 0:
        gain = float(g.num.coeffs[0])
        return StateSpace(
            np.zeros((1, 1)), np.zeros(1), np.zeros(1), gain, g.domain, g.sample_period
        )
    if r == 0:
        q, rem = np.polydiv(g.num.coeffs, den.coeffs)
        d_term = float(q[0])
        sp = Polynomial(rem)
    else:
        d_term = 0.0
        sp = g.num
    A = np.zeros((n, n))
    if n > 1:
        A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = -den.coeffs[:0:-1]  # [-a_0, ..., -a_{n-1}]
    B = np.zeros(n)
    B[-1] = 1.0
    C = np.zeros(n)
    if not sp.is_zero:
        C[: len(sp.coeffs)] = sp.coeffs[::-1]
    return StateSpace(A, B, C, d_term, g.domain, g.sample_period)


def transfer_function(ss: StateSpace) -> RationalTF:
    """Exact-arithmetic-style conversion via the Faddeev-LeVerrier
    recurrence (no eigendecomposition), then coprime reduction."""
    n = ss.n
    A, B, C = ss.A, ss.B, ss.C
    M = np.eye(n)
    den = np.empty(n + 1)
    den[0] = 1.0
    num_sp = np.empty(n)
    for k in range(1, n + 1):
        num_sp[k - 1] = C @ M @ B
        AM = A @ M
        ck = -np.trace(AM) / k
        den[k] = ck
        M = AM + ck * np.eye(n)
    num = np.polyadd(num_sp, ss.D * den)
    return RationalTF(Polynomial(num), Polynomial(den), ss.domain, ss.sample_period)


def zoh_matrices(A: np.ndarray, B: np.ndarray, h: float):
    """Zero-order-hold discretization of (A, B) via the block matrix
    exponential; exact at sample instants for piecewise-constant inputs."""
    n = A.shape[0]
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = A
    M[:n, n] = B
    E = expm(M * h)
    return E[:n, :n], E[:n, n]


def discretize_zoh(g: RationalTF, h: float) -> RationalTF:
    """ZOH-equivalent discrete transfer function at period h."""
    if g.domain is not Domain.CONTINUOUS:
        raise ValidationError("discretize_zoh expects a continuous-time system")
    if h <= 0:
        raise ValidationError("sample period must be positive")
    ss = realize(g)  # raises NonCausalError for relative degree < 0
    Ad, Bd = zoh_matrices(ss.A, ss.B, h)
    return transfer_function(
        StateSpace(Ad, Bd, ss.C, ss.D, Domain.DISCRETE, h)
    )


# ---------------------------------------------------------------------------
# System spec files: {"domain": "ct"|"dt", "num": [...], "den": [...],
# "sample_period": <dt only>}. Field names are a fixed interchange format.

def format_system_spec(g: RationalTF) -> str:
    doc = {
        "domain": g.domain.value,
        "num": [float(c) for c in g.num.coeffs],
        "den": [float(c) for c in g.den.coeffs],
    }
    if g.domain is Domain.DISCRETE:
        doc["sample_period"] = float(g.sample_period)
    return json.dumps(doc, indent=2) + "\n"


def parse_system_spec(text: str) -> RationalTF:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed system spec: {exc}") from exc
    for key in ("domain", "num", "den"):
        if key not in doc:
            raise ValidationError(f"system spec missing field '{key}'")
    try:
        domain = Domain(doc["domain"])
    except ValueError:
        raise ValidationError(f"unknown domain {doc['domain']!r} (want 'ct' or 'dt')")
    h = doc.get("sample_period")
    if domain is Domain.DISCRETE and h is None:
        raise ValidationError("discrete system spec missing 'sample_period'")
    return RationalTF(
        Polynomial(np.asarray(doc["num"], dtype=float)),
        Polynomial(np.asarray(doc["den"], dtype=float)),
        domain,
        float(h) if domain is Domain.DISCRETE else None,
    )


def read_system_spec(path) -> RationalTF:
    return parse_system_spec(Path(path).read_text())


def write_system_spec(g: RationalTF, path) -> None:
    Path(path).write_text(format_system_spec(g))
