"""Signals and deterministic simulation.

Continuous-time LTI simulation is ZOH-discretize-then-recurse: exact at
the sample instants for piecewise-constant inputs and bit-reproducible,
which is what the sampled-reference experiments need. Control-affine
systems integrate with fixed-step RK4 (substeps per sample), inputs held
constant over each sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from tlmap import kernels
from tlmap.errors import SimulationDivergedError, ValidationError
from tlmap.polytf import Domain, RationalTF, StateSpace, realize, zoh_matrices

DIVERGENCE_NORM = 1e12


@dataclass(frozen=True)
class Signal:
    """Uniformly sampled scalar time series.

    ``forward_shift`` is bookkeeping set by :func:`shift_forward`: how many
    trailing samples are pad (held last value) rather than data, so
    downstream fitting can trim them.

    Sample periods are compared with relative tolerance 1e-12 so that CSV
    round trips stay compatible.
    """

    values: np.ndarray
    sample_period: float
    start_time: float = 0.0
    forward_shift: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel().copy()
        if v.size == 0:
            raise ValidationError("signal must be non-empty")
        if not self.sample_period > 0:
            raise ValidationError("sample_period must be positive")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sample_period", float(self.sample_period))
        object.__setattr__(self, "start_time", float(self.start_time))

    def __len__(self):
        return len(self.values)

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.sample_period * np.arange(len(self.values))

    @property
    def duration(self) -> float:
        return self.sample_period * (len(self.values) - 1)

    def _check_compatible(self, other: "Signal"):
        if len(self) != len(other):
            raise ValidationError("signal lengths differ")
        if not math.isclose(self.sample_period, other.sample_period, rel_tol=1e-12):
            raise ValidationError("sample periods differ")

    def __add__(self, other: "Signal") -> "Signal":
        self._check_compatible(other)
        return Signal(self.values + other.values, self.sample_period, self.start_time)

    def __sub__(self, other: "Signal") -> "Signal":
        self._check_compatible(other)
        return Signal(self.values - other.values, self.sample_period, self.start_time)

    def scaled(self, factor: float) -> "Signal":
        return Signal(self.values * factor, self.sample_period, self.start_time)

    def rms(self) -> float:
        return float(np.sqrt(np.mean(self.values**2)))

    def with_values(self, values: np.ndarray) -> "Signal":
        return replace(self, values=values)


def rms_difference(a: Signal, b: Signal, trim_start: int = 0, trim_end: int = 0) -> float:
    """RMS of a - b over the window [trim_start, len - trim_end)."""
    a._check_compatible(b)
    stop = len(a) - trim_end
    if stop - trim_start < 1:
        raise ValidationError("trim leaves no samples")
    d = a.values[trim_start:stop] - b.values[trim_start:stop]
    return float(np.sqrt(np.mean(d**2)))


# CSV interchange: header "t,value", 17 significant digits so float64
# round-trips exactly.

def write_signal_csv(sig: Signal, path) -> None:
    t = sig.times
    lines = ["t,value"]
    for tk, vk in zip(t, sig.values):
        lines.append(f"{tk:.17g},{vk:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_signal_csv(path) -> Signal:
    text = Path(path).read_text().strip().splitlines()
    if not text or text[0].strip() != "t,value":
        raise ValidationError(f"{path}: expected header 't,value'")
    rows = [line.split(",") for line in text[1:] if line.strip()]
    if not rows:
        raise ValidationError(f"{path}: no samples")
    try:
        t = np.array([float(r[0]) for r in rows])
        v = np.array([float(r[1]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"{path}: malformed row ({exc})") from exc
    if len(t) == 1:
        raise ValidationError(f"{path}: need at least two samples to infer the period")
    h = (t[-1] - t[0]) / (len(t) - 1)
    if h <= 0:
        raise ValidationError(f"{path}: time column is not increasing")
    jitter = np.max(np.abs(np.diff(t) - h))
    if jitter > 1e-9 * h:
        raise ValidationError(f"{path}: sample-time jitter {jitter:.3e} exceeds 1e-9*period")
    return Signal(v, h, start_time=float(t[0]))


@dataclass(frozen=True)
class ControlAffineSystem:
    """dx/dt = f(x) + g(x) u, y = h(x), with operating point x0."""

    f: object
    g: object
    h: object
    n: int
    x0: np.ndarray

    def __post_init__(self):
        x0 = np.asarray(self.x0, dtype=np.float64).ravel().copy()
        if x0.shape != (self.n,):
            raise ValidationError(f"x0 must have length n={self.n}")
        fx = np.asarray(self.f(x0), dtype=float).ravel()
        gx = np.asarray(self.g(x0), dtype=float).ravel()
        hx = float(self.h(x0))
        if fx.shape != (self.n,) or gx.shape != (self.n,):
            raise ValidationError("f and g must return vectors of length n")
        if not (np.all(np.isfinite(fx)) and np.all(np.isfinite(gx)) and math.isfinite(hx)):
            raise ValidationError("f, g, h must be finite at x0")
        x0.flags.writeable = False
        object.__setattr__(self, "x0", x0)


def simulate_lti(sys, input: Signal, x_init=None) -> Signal:
    """Simulate an LTI system on a sampled input.

    Discrete systems recurse exactly; continuous systems are ZOH
    discretized at the input period first, which is exact at sample
    instants for piecewise-constant inputs.
    """
    if isinstance(sys, RationalTF):
        sys = realize(sys)
    if not isinstance(sys, StateSpace):
        raise ValidationError("simulate_lti expects a RationalTF or StateSpace")
    h = input.sample_period
    if sys.domain is Domain.DISCRETE:
        if not math.isclose(sys.sample_period, h, rel_tol=1e-12):
            raise ValidationError(
                f"system period {sys.sample_period} != signal period {h}"
            )
        Ad, Bd = sys.A, sys.B
    else:
        Ad, Bd = zoh_matrices(sys.A, sys.B, h)
    if x_init is None:
        x0 = np.zeros(sys.n)
    else:
        x0 = np.asarray(x_init, dtype=np.float64).ravel()
        if x0.shape != (sys.n,):
            raise ValidationError(f"x_init must have length {sys.n}")
    y = kernels.ss_simulate(
        np.ascontiguousarray(Ad),
        np.ascontiguousarray(Bd),
        np.ascontiguousarray(sys.C),
        float(sys.D),
        np.ascontiguousarray(input.values),
        x0,
    )
    return Signal(y, h, input.start_time)


def rk4_step(field, x: np.ndarray, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of dx/dt = field(x)."""
    k1 = field(x)
    k2 = field(x + 0.5 * dt * k1)
    k3 = field(x + 0.5 * dt * k2)
    k4 = field(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate_affine(sys: ControlAffineSystem, input: Signal, step_divisor: int = 10) -> Signal:
    """Integrate a control-affine system with fixed-step RK4.

    The input is held constant over each sample (ZOH) and each sample is
    split into ``step_divisor`` RK4 substeps. Output samples are taken at
    the input instants, before the state advances.
    """
    if step_divisor < 1:
        raise ValidationError("step_divisor must be >= 1")
    n_samples = len(input)
    dt = input.sample_period / step_divisor
    x = np.array(sys.x0, dtype=np.float64)
    y = np.empty(n_samples)
    f, g, h = sys.f, sys.g, sys.h
    u = input.values
    for k in range(n_samples):
        y[k] = h(x)
        uk = u[k]

        def field(state, uk=uk):
            return np.asarray(f(state), dtype=float) + np.asarray(g(state), dtype=float) * uk

        for _ in range(step_divisor):
            x = rk4_step(field, x, dt)
        if not np.all(np.isfinite(x)) or np.linalg.norm(x) > DIVERGENCE_NORM:
            raise SimulationDivergedError(k)
    return Signal(y, input.sample_period, input.start_time)


def step_response(sys, amplitude: float, duration: float, sample_period: float | None = None,
                  step_divisor: int = 10) -> Signal:
    """Response from rest (x=0 for LTI, x0 for affine systems) to an input
    stepping 0 -> amplitude at t = 0."""
    if duration <= 0:
        raise ValidationError("duration must be positive")
    if isinstance(sys, (RationalTF, StateSpace)) and sys.domain is Domain.DISCRETE:
        if sample_period is not None and not math.isclose(
            sample_period, sys.sample_period, rel_tol=1e-12
        ):
            raise ValidationError("sample_period conflicts with the system period")
        sample_period = sys.sample_period
    if sample_period is None:
        raise ValidationError("sample_period required for continuous/affine systems")
    n = int(np.floor(duration / sample_period)) + 1
    u = Signal(np.full(n, float(amplitude)), sample_period)
    if isinstance(sys, ControlAffineSystem):
        return simulate_affine(sys, u, step_divisor)
    return simulate_lti(sys, u)


def differentiate(sig: Signal, order: int) -> Signal:
    """Numerical derivative: central differences applied ``order`` times.

    Boundary samples use second-order one-sided stencils, so the output
    keeps the input length; callers fitting on derivatives should trim
    ``order`` samples from each end to drop the edge artifacts.
    """
    if order < 1:
        raise ValidationError("order must be >= 1")
    if len(sig) <= 2 * order:
        raise ValidationError(f"signal too short to differentiate {order} times")
    h = sig.sample_period
    v = sig.values
    for _ in range(order):
        d = np.empty_like(v)
        d[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
        d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        d[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
        v = d
    return Signal(v, h, sig.start_time)


def lowpass(sig: Signal, cutoff_hz: float) -> Signal:
    """First-order forward-backward (zero-phase) low-pass filter.

    DC gain is exactly 1: each pass computes y += alpha*(u - y), so
    constant signals pass through unchanged bit for bit.
    """
    nyquist = 0.5 / sig.sample_period
    if not 0 < cutoff_hz < nyquist:
        raise ValidationError(f"cutoff must lie in (0, {nyquist}) Hz")
    alpha = 1.0 - math.exp(-2.0 * math.pi * cutoff_hz * sig.sample_period)

    def one_pass(v):
        out = np.empty_like(v)
        acc = v[0]
        for k in range(len(v)):
            acc += alpha * (v[k] - acc)
            out[k] = acc
        return out

    forward = one_pass(sig.values)
    backward = one_pass(forward[::-1])[::-1]
    return Signal(backward, sig.sample_period, sig.start_time)


def shift_forward(sig: Signal, samples: int) -> Signal:
    """Advance the signal: out(k) = in(k + samples).

    Trailing positions hold the last value; the pad length is recorded in
    ``forward_shift`` for alignment bookkeeping.
    """
    if samples < 0:
        raise ValidationError("shift must be non-negative")
    if samples >= len(sig):
        raise ValidationError("shift must be smaller than the signal length")
    if samples == 0:
        return sig
    v = np.concatenate([sig.values[samples:], np.full(samples, sig.values[-1])])
    return Signal(v, sig.sample_period, sig.start_time, forward_shift=samples)
