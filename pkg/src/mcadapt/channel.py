"""Free-diffusion channel model and the discrete-time ISI machinery.

Units throughout: lengths in um, time in s, diffusion in um^2/s,
concentrations in molecules/um^3.  A transmitted symbol releases N
molecules instantaneously from a point source; the receiver samples the
resulting concentration at t_S = d^2/(6 D), the peak of the impulse
response, unless overridden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, LengthMismatch, ValidationError


@dataclass(frozen=True)
class ChannelParams:
    """Physical link description with Table-style defaults.

    N1/N0 are the molecules released for bit-1/bit-0, beta the enzymatic
    degradation rate (0 disables), Ts_factor the signaling interval as a
    multiple of the peak time, I the channel memory length in symbols,
    and c_int_const a deterministic background concentration.
    """

    D: float = 100.0
    d: float = 50.0
    N1: float = 5e8
    N0: float = 1e7
    p1: float = 0.5
    beta: float = 0.0
    Ts_factor: float = 4.0
    I: int = 30
    c_int_const: float = 0.0
    t_sample: Optional[float] = None  # override; defaults to the peak time

    def __post_init__(self):
        if not self.D > 0.0:
            raise ValidationError("D > 0")
        if not self.d > 0.0:
            raise ValidationError("d > 0")
        if not (self.N1 > self.N0 >= 0.0):
            raise ValidationError("N1 > N0 >= 0")
        if not (0.0 < self.p1 < 1.0):
            raise ValidationError("p1 ∈ (0,1)")
        if self.beta < 0.0:
            raise ValidationError("beta >= 0")
        if not self.Ts_factor > 0.0:
            raise ValidationError("Ts_factor > 0")
        if self.I < 0:
            raise ValidationError("I >= 0")
        if self.c_int_const < 0.0:
            raise ValidationError("c_int_const >= 0")
        if self.t_sample is not None and not self.t_sample > 0.0:
            raise ValidationError("t_sample > 0")

    @property
    def p0(self) -> float:
        return 1.0 - self.p1

    def molecules(self, bit: int) -> float:
        return self.N1 if bit else self.N0

    def sampling_time(self) -> float:
        return self.t_sample if self.t_sample is not None else peak_time(self.d, self.D)

    def signaling_interval(self) -> float:
        return self.Ts_factor * peak_time(self.d, self.D)


def peak_time(d: float, D: float) -> float:
    """Time at which the impulse response peaks: d^2 / (6 D)."""
    if not (d > 0.0 and D > 0.0):
        raise DomainError("peak_time requires d > 0 and D > 0")
    return d * d / (6.0 * D)


def cir(t, d: float, D: float):
    """Concentration per released molecule: (4 pi D t)^(-3/2) exp(-d^2/(4 D t))."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0.0):
        raise DomainError("cir requires t > 0")
    out = (4.0 * math.pi * D * t_arr) ** -1.5 * np.exp(-d * d / (4.0 * D * t_arr))
    return float(out) if t_arr.ndim == 0 else out


def cir_enzyme(t, d: float, D: float, beta: float):
    """Impulse response with first-order enzymatic degradation, cir * exp(-beta t)."""
    if beta < 0.0:
        raise DomainError("beta >= 0")
    if beta == 0.0:
        return cir(t, d, D)
    t_arr = np.asarray(t, dtype=float)
    out = cir(t_arr, d, D) * np.exp(-beta * t_arr)
    return float(out) if t_arr.ndim == 0 else out


def received_concentration(bit: int, params: ChannelParams, t_s: float) -> float:
    """Sampled concentration for one isolated symbol: N_bit * h(t_s) + c_int."""
    if bit not in (0, 1):
        raise DomainError(f"bit must be 0 or 1, got {bit}")
    return params.molecules(bit) * cir_enzyme(t_s, params.d, params.D, params.beta) + params.c_int_const


def isi_tap_gains(params: ChannelParams, t_s: float) -> np.ndarray:
    """Impulse-response values one to I signaling intervals after t_s.

    Entry k-1 is the gain of the symbol transmitted k intervals ago.
    """
    if params.I == 0:
        return np.empty(0)
    T_s = params.signaling_interval()
    lags = t_s + np.arange(1, params.I + 1) * T_s
    return cir_enzyme(lags, params.d, params.D, params.beta)


def _bits_to_array(bits: Sequence[int]) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.int64)
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise DomainError("bit sequences may only contain 0 and 1")
    return arr


def isi_term(history: Sequence[int], params: ChannelParams, t_s: float) -> float:
    """Exact interference from the previous I symbols, most-recent-last.

    history[-k] is the bit transmitted k intervals before the current one.
    """
    hist = _bits_to_array(history)
    if hist.size != params.I:
        raise LengthMismatch(f"history length {hist.size} != channel memory I={params.I}")
    if params.I == 0:
        return 0.0
    gains = isi_tap_gains(params, t_s)
    counts = np.where(hist[::-1] == 1, params.N1, params.N0)
    return float(counts @ gains)


def isi_estimate(decoded: Sequence[int], params: ChannelParams, t_s: float) -> float:
    """Memory-based ISI estimate from the M most recent decoded bits.

    The first M taps use the stored bits (most-recent-last); the remaining
    I - M taps contribute their prior-weighted expectation
    (p0 N0 + p1 N1) * sum of tails.  M = 0 yields the history-independent
    estimate used for response-curve tuning.
    """
    dec = _bits_to_array(decoded)
    m = dec.size
    if m > params.I:
        raise LengthMismatch(f"memory length {m} exceeds channel memory I={params.I}")
    if params.I == 0:
        return 0.0
    gains = isi_tap_gains(params, t_s)
    known = float(np.where(dec[::-1] == 1, params.N1, params.N0) @ gains[:m]) if m else 0.0
    expected_count = params.p0 * params.N0 + params.p1 * params.N1
    return known + expected_count * float(gains[m:].sum())
