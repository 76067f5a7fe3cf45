"""Relative-degree determination.

Three routes: exact from a rational transfer function, empirical from
recorded step responses (sample-delay counting in discrete time, jump
detection on successive derivatives in continuous time), and numerical
Lie-derivative probing for control-affine systems.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from tlmap.errors import InconclusiveError, NoResponseError, ValidationError
from tlmap.polytf import RationalTF, relative_degree
from tlmap.simkit import ControlAffineSystem, Signal, differentiate

#: Jump-detection window scale for the continuous-time step test: the k-th
#: derivative "jumps at t=0" when its magnitude right after the step is at
#: least ``threshold`` times its peak over the whole response. Derivatives
#: of order below the relative degree start at zero and grow like t, so
#: their ratio is O(h) and the test separates cleanly for small h.
DEFAULT_CT_THRESHOLD = 0.2


class Method(Enum):
    EXACT_RATIONAL = "exact-rational"
    STEP_RESPONSE_CT = "step-response-ct"
    STEP_RESPONSE_DT = "step-response-dt"
    LIE_NUMERIC = "lie-numeric"


@dataclass(frozen=True)
class RelDegEstimate:
    value: int
    method: Method
    confidence_ratio: float

    def __post_init__(self):
        if self.value < 0:
            raise ValidationError("relative degree estimate must be >= 0")
        if not self.confidence_ratio >= 1.0:
            raise ValidationError("confidence_ratio must be >= 1")


def reldeg_exact(g: RationalTF) -> RelDegEstimate:
    """Wrap the exact rational relative degree as an estimate."""
    r = relative_degree(g)
    if r < 0:
        raise ValidationError("non-causal system has no step-response relative degree")
    return RelDegEstimate(r, Method.EXACT_RATIONAL, math.inf)


def default_step_threshold(step_amplitude: float) -> float:
    """Noise-free discrete detection threshold: 1e-9 of the step size."""
    return 1e-9 * abs(step_amplitude)


def noise_adaptive_threshold(step: Signal, step_time_index: int) -> float:
    """Noisy-data threshold: five standard deviations of the pre-step output."""
    if step_time_index < 2:
        raise ValidationError("need at least two pre-step samples to estimate noise")
    return 5.0 * float(np.std(step.values[:step_time_index]))


def reldeg_from_step_dt(step: Signal, step_time_index: int, threshold: float) -> RelDegEstimate:
    """Count the sample delay between the input step and the first output
    sample exceeding ``threshold``."""
    if threshold <= 0:
        raise ValidationError("threshold must be positive")
    if not 0 <= step_time_index < len(step):
        raise ValidationError("step_time_index out of range")
    pre = step.values[:step_time_index]
    if pre.size and np.max(np.abs(pre)) >= threshold:
        raise ValidationError("output not at rest before the step")
    post = np.abs(step.values[step_time_index:])
    above = np.nonzero(post > threshold)[0]
    if above.size == 0:
        raise NoResponseError(
            "no sample exceeds the threshold (zero system or threshold too large)"
        )
    d = int(above[0])
    return RelDegEstimate(d, Method.STEP_RESPONSE_DT, float(post[d] / threshold))


def reldeg_from_step_ct(step: Signal, threshold: float, max_order: int) -> RelDegEstimate:
    """Find the lowest-order derivative of a sampled continuous step
    response that jumps at the step instant (t = 0, the first sample).

    For each k the statistic is max|y^(k)| over the first few samples
    divided by max|y^(k)| over the whole record; see
    ``DEFAULT_CT_THRESHOLD`` for why this separates.
    """
    if not 0 < threshold < 1:
        raise ValidationError("threshold must lie in (0, 1)")
    if max_order > 5:
        raise ValidationError("max_order > 5 is numerically meaningless here")
    if len(step) <= 2 * max_order + 4:
        raise ValidationError("step response too short")
    for k in range(max_order + 1):
        d = step if k == 0 else differentiate(step, k)
        window = d.values[: k + 3]
        peak = np.max(np.abs(d.values))
        if peak == 0.0:
            continue
        ratio = np.max(np.abs(window)) / peak
        if ratio > threshold:
            return RelDegEstimate(k, Method.STEP_RESPONSE_CT, float(ratio / threshold))
    raise InconclusiveError(f"no derivative up to order {max_order} jumps at the step")


def _gradient_dot(phi, direction, x: np.ndarray, step: float) -> float:
    """Central-difference directional derivative of phi along direction(x)."""
    dvec = np.asarray(direction(x), dtype=float)
    acc = 0.0
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = step
        acc += (phi(x + e) - phi(x - e)) / (2.0 * step) * dvec[i]
    return acc


def lie_derivative(h, f, order: int, fd_step: float):
    """Return a callable evaluating L_f^order h by nested central differences.

    The differencing step at nesting level L is fd_step**(1/L): a level-L
    gradient differentiates a field already carrying ~eps/step^(L-1) noise
    from the inner levels, so deeper levels need wider stencils to keep
    round-off below truncation (~step^2).
    """
    phi = h
    for level in range(1, order + 1):
        step = fd_step ** (1.0 / level)
        phi = _make_lie_once(phi, f, step)
    return phi


def _make_lie_once(phi, f, step):
    def lf(x):
        return _gradient_dot(phi, f, np.asarray(x, dtype=float), step)

    return lf


def lie_relative_degree(
    sys: ControlAffineSystem,
    x_probe,
    max_order: int = 4,
    fd_step: float = 1e-4,
    zero_tol: float = 1e-6,
) -> RelDegEstimate:
    """Smallest r with |L_g L_f^(r-1) h| > zero_tol at the probe point."""
    if max_order > 4:
        raise ValidationError("nested numerical Lie derivatives beyond order 4 are noise")
    x = np.asarray(x_probe, dtype=np.float64).ravel()
    if x.shape != (sys.n,):
        raise ValidationError(f"probe point must have length {sys.n}")
    for k in range(1, max_order + 1):
        phi = sys.h if k == 1 else lie_derivative(sys.h, sys.f, k - 1, fd_step)
        step = fd_step ** (1.0 / k)
        val = abs(_gradient_dot(phi, sys.g, x, step))
        if val > zero_tol:
            return RelDegEstimate(k, Method.LIE_NUMERIC, float(val / zero_tol))
    raise InconclusiveError(
        f"L_g L_f^(k-1) h below {zero_tol} for all k <= {max_order}; relative degree "
        "may be ill-defined at this point"
    )


def lie_relative_degree_probed(
    sys: ControlAffineSystem,
    probes=(),
    max_order: int = 4,
    fd_step: float = 1e-4,
    zero_tol: float = 1e-6,
) -> RelDegEstimate:
    """Estimate at the operating point, cross-checking optional extra
    probe points and warning (not resolving) on disagreement."""
    base = lie_relative_degree(sys, sys.x0, max_order, fd_step, zero_tol)
    for p in probes:
        other = lie_relative_degree(sys, p, max_order, fd_step, zero_tol)
        if other.value != base.value:
            warnings.warn(
                f"relative degree {other.value} at probe {np.asarray(p)} disagrees "
                f"with {base.value} at the operating point",
                stacklevel=2,
            )
    return base
