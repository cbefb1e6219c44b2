"""Shared result type, enumeration caps and rational parsing."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Union

RationalLike = Union[int, str, Fraction]

DEFAULT_CHAIN_CAP = 20
DEFAULT_PROFILE_CAP = 10_000
DEFAULT_CYCLE_CAP = 100_000


class CapExceeded(RuntimeError):
    """An exhaustive scan would exceed its configured size cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


@dataclass(frozen=True)
class Caps:
    chain: int = DEFAULT_CHAIN_CAP
    profiles: int = DEFAULT_PROFILE_CAP
    cycle: int = DEFAULT_CYCLE_CAP

    def as_dict(self) -> dict:
        return {"chain": self.chain, "profiles": self.profiles, "cycle": self.cycle}


DEFAULT_CAPS = Caps()


@dataclass(frozen=True)
class Check:
    """Outcome of a decidable predicate.

    ``witness`` carries the counterexample when the predicate fails (or the
    certificate object when it holds and one is meaningful).  ``certificate``
    says how the answer was obtained: ``"enumerated"`` for an exhaustive scan,
    ``"by-theorem"`` when a size cap made enumeration pointless and the
    finite-case result was returned instead.
    """

    holds: bool
    witness: Any = None
    certificate: str = "enumerated"

    def __bool__(self) -> bool:
        return self.holds


def parse_rational(value: RationalLike) -> Fraction:
    """Parse ``"p/q"``, an integer string, an int, or a Fraction.

    Floats are rejected: every downstream comparison is exact.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"not a rational p/q or integer: {value!r}")
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise ValueError(f"zero denominator in {value!r}") from None
        except ValueError:
            raise ValueError(f"not a rational p/q or integer: {value!r}") from None
    raise ValueError(f"not a rational: {value!r}")


def fmt_rational(value: Fraction) -> str:
    return str(value)


def iter_bits(mask: int):
    """Yield set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m
