"""Extended-precision scalar arithmetic, tolerances, serialisation and RNG.

Everything in this package computes with mpmath binary floats at a precision
set per call by a :class:`PrecisionConfig`.  Nothing here mutates global
precision permanently: operations wrap themselves in ``mp.workdps`` so the
ambient mpmath state is always restored.

Scalars serialise as *exact* decimal strings.  An mpmath float is a dyadic
rational m * 2**e, so its decimal expansion terminates; writing it out in
full makes deserialisation exact at the original precision and at any higher
precision (needed when counterexample records are re-verified with extra
digits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from mpmath import mp, mpf, mpc

Scalar = Union[mpf, mpc]

# Exponent values may arrive as exact rationals ("1/3"), ints or floats.
ExponentLike = Union[int, float, str, Fraction, mpf]


class DomainError(ValueError):
    """Input outside an operation's mathematical domain."""


class SingularityError(ZeroDivisionError):
    """Operation undefined at a singular point (0**p with p <= 0, etc)."""


class NumericError(ArithmeticError):
    """An iterative numeric procedure failed to converge."""


@dataclass(frozen=True)
class PrecisionConfig:
    """Working precision and tolerance convention for a run.

    Approximate comparisons use tau = 10**-(digits - tol_exponent) relative
    to the operand scale.  The default 60 digits matches the precision used
    for the original counterexample computations.
    """

    digits: int = 60
    tol_exponent: int = 10

    def __post_init__(self):
        if self.digits < 20:
            raise ValueError(f"digits must be >= 20, got {self.digits}")
        if self.tol_exponent < 5 or self.tol_exponent > self.digits // 2:
            raise ValueError(
                f"tol_exponent must be in [5, digits/2], got {self.tol_exponent}"
            )

    def workdps(self):
        """Context manager setting mpmath working precision to `digits`."""
        return mp.workdps(self.digits)

    def tol(self, scale=1) -> mpf:
        """tau = 10**-(digits - tol_exponent) * max(1, scale)."""
        with mp.workdps(self.digits):
            base = mpf(10) ** (-(self.digits - self.tol_exponent))
            s = mpf(scale)
            return base * (s if s > 1 else mpf(1))

    def solver_eps(self) -> mpf:
        """Convergence floor for iterative kernels, well below tol()."""
        with mp.workdps(self.digits):
            return mpf(10) ** (-(self.digits - 3))

    def bumped(self, extra_digits: int) -> "PrecisionConfig":
        """Config with `extra_digits` more working digits, same tolerance gap."""
        return PrecisionConfig(self.digits + extra_digits, self.tol_exponent)


DEFAULT_CONFIG = PrecisionConfig()


# ---------------------------------------------------------------------------
# exponents
# ---------------------------------------------------------------------------

def exponent_fraction(p: ExponentLike) -> Fraction:
    """Exact rational value of an exponent argument.

    Strings may be plain decimals or ratios like "1/3".  Floats convert via
    their exact binary value, which keeps integrality checks exact for whole
    numbers.  mpf values convert through their dyadic representation.
    """
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    if isinstance(p, str):
        return Fraction(p.strip())
    if isinstance(p, float):
        return Fraction(p)
    if isinstance(p, mpf):
        sign, man, exp, _ = p._mpf_
        if man == 0 and exp != 0:
            raise ValueError("non-finite exponent")
        fr = Fraction(int(man)) * Fraction(2) ** exp
        return -fr if sign else fr
    raise TypeError(f"cannot interpret exponent of type {type(p)!r}")


def exponent_value(p: ExponentLike, config: PrecisionConfig) -> mpf:
    """Exponent as an mpf at working precision (exact rational division)."""
    fr = exponent_fraction(p)
    with config.workdps():
        return mpf(fr.numerator) / mpf(fr.denominator)


def is_nonneg_integer(p: ExponentLike) -> bool:
    fr = exponent_fraction(p)
    return fr.denominator == 1 and fr >= 0


# ---------------------------------------------------------------------------
# scalar operations
# ---------------------------------------------------------------------------

def real_power(x, p: ExponentLike, config: PrecisionConfig = DEFAULT_CONFIG,
               allow_zero_zero: bool = False) -> mpf:
    """x**p for real x >= 0, via exp(p*log x) at working precision.

    0**0 is rejected unless the caller opts in (the theorem checks never
    need it: every exponent in scope is positive).
    """
    pf = exponent_fraction(p)
    with config.workdps():
        xv = mpf(x)
        if xv < 0:
            raise DomainError(f"real_power: negative base {xv}")
        if xv == 0:
            if pf > 0:
                return mpf(0)
            if pf == 0 and allow_zero_zero:
                return mpf(1)
            raise SingularityError(f"real_power: 0**({pf}) undefined")
        pv = mpf(pf.numerator) / mpf(pf.denominator)
        if pv == 1:
            return xv
        return mp.exp(pv * mp.log(xv))


# ---------------------------------------------------------------------------
# exact decimal serialisation
# ---------------------------------------------------------------------------

def to_exact_decimal(x) -> str:
    """Exact, finite decimal string of an mpf (round-trips at >= its precision)."""
    if isinstance(x, mpc):
        raise TypeError("to_exact_decimal takes a real scalar; use scalar_to_json")
    xm = mpf(x) if not isinstance(x, mpf) else x
    sign, man, exp, _ = xm._mpf_
    if man == 0:
        if exp == 0:
            return "0"
        raise ValueError("cannot serialise non-finite value")
    prefix = "-" if sign else ""
    m = int(man)
    if exp >= 0:
        return prefix + str(m << exp)
    digits = str(m * 5 ** (-exp))
    k = -exp
    if len(digits) <= k:
        digits = "0" * (k - len(digits) + 1) + digits
    return prefix + digits[:-k] + "." + digits[-k:]


def from_decimal(s: str, config: PrecisionConfig) -> mpf:
    """Parse a decimal string at working precision (correctly rounded)."""
    with config.workdps():
        return mpf(s)


def scalar_to_json(x: Scalar, config: PrecisionConfig) -> dict:
    """{"digits": n, "re": "...", "im": "..."} with exact decimal strings."""
    if isinstance(x, mpc):
        re, im = x.real, x.imag
    else:
        re, im = mpf(x), mpf(0)
    return {"digits": config.digits,
            "re": to_exact_decimal(re),
            "im": to_exact_decimal(im)}


def scalar_from_json(obj: dict, config: PrecisionConfig | None = None) -> Scalar:
    cfg = config or PrecisionConfig(digits=max(20, int(obj["digits"])))
    with cfg.workdps():
        re = mpf(obj["re"])
        im = mpf(obj.get("im", "0"))
        if im == 0:
            return re
        return mpc(re, im)


# ---------------------------------------------------------------------------
# reproducible random streams
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_STREAM_SALT = 0xD2B74407B1CE6E93


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class RngStream:
    """SplitMix64 substream, reproducible across platforms.

    The generator is SplitMix64: state advances by the 64-bit golden-ratio
    constant 0x9E3779B97F4A7C15 and outputs mix64(state), where mix64 is the
    standard xor-shift/multiply finaliser.  Stream `i` of seed `s` starts at
    ``mix64(s) XOR mix64(SALT + i * GAMMA)``, so (seed, stream_index) fully
    determines the sequence.  Uniform deviates take the top 53 bits of one
    output word; complex normals come from Box-Muller on two uniforms.
    """

    def __init__(self, seed: int, stream_index: int = 0):
        if stream_index < 0:
            raise ValueError("stream_index must be nonnegative")
        self.seed = seed & _MASK64
        self.stream_index = stream_index
        self._state = _mix64(self.seed) ^ _mix64(
            (_STREAM_SALT + stream_index * _GAMMA) & _MASK64
        )

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix64(self._state)

    def _unit(self) -> Fraction:
        """Uniform dyadic rational in [0, 1) from the top 53 bits."""
        return Fraction(self.next_u64() >> 11, 1 << 53)

    def uniform(self, config: PrecisionConfig, a=0, b=1) -> mpf:
        """Uniform in [a, b)."""
        u = self._unit()
        with config.workdps():
            av, bv = mpf(a), mpf(b)
            if not av < bv:
                raise DomainError(f"uniform: need a < b, got [{av}, {bv})")
            return av + (bv - av) * (mpf(u.numerator) / mpf(u.denominator))

    def real_normal(self, config: PrecisionConfig) -> mpf:
        u1 = self._unit()
        while u1 == 0:
            u1 = self._unit()
        u2 = self._unit()
        with config.workdps():
            r = mp.sqrt(-2 * mp.log(mpf(u1.numerator) / mpf(u1.denominator)))
            return r * mp.cos(2 * mp.pi * (mpf(u2.numerator) / mpf(u2.denominator)))

    def complex_normal(self, config: PrecisionConfig) -> mpc:
        """Complex value with independent standard normal re/im parts."""
        u1 = self._unit()
        while u1 == 0:
            u1 = self._unit()
        u2 = self._unit()
        with config.workdps():
            r = mp.sqrt(-2 * mp.log(mpf(u1.numerator) / mpf(u1.denominator)))
            theta = 2 * mp.pi * (mpf(u2.numerator) / mpf(u2.denominator))
            return mpc(r * mp.cos(theta), r * mp.sin(theta))


def draw_uniform(stream: RngStream, a, b, config: PrecisionConfig = DEFAULT_CONFIG) -> mpf:
    return stream.uniform(config, a, b)


def draw_complex_normal(stream: RngStream, config: PrecisionConfig = DEFAULT_CONFIG) -> mpc:
    return stream.complex_normal(config)
