"""Ordinals below omega squared, written omega*a + n."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass


class Cmp(enum.Enum):
    LT = -1
    EQ = 0
    GT = 1


@dataclass(frozen=True, order=True)
class Ordinal:
    omega_coeff: int = 0
    finite_part: int = 0

    def __post_init__(self):
        if self.omega_coeff < 0 or self.finite_part < 0:
            raise ValueError(f"ordinal fields must be nonnegative: {self.omega_coeff}, {self.finite_part}")

    @property
    def is_limit(self) -> bool:
        return self.finite_part == 0 and self.omega_coeff > 0

    def __str__(self):
        return f"w*{self.omega_coeff}+{self.finite_part}"

    @classmethod
    def parse(cls, text: str) -> "Ordinal":
        text = text.strip()
        if re.fullmatch(r"\d+", text):
            return cls(0, int(text))
        m = re.fullmatch(r"w\*(\d+)\+(\d+)", text)
        if not m:
            raise ValueError(f"not an ordinal string: {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))


OMEGA = Ordinal(1, 0)


def omega_plus(k: int) -> Ordinal:
    return Ordinal(1, k)


def ord_compare(x: Ordinal, y: Ordinal) -> Cmp:
    a = (x.omega_coeff, x.finite_part)
    b = (y.omega_coeff, y.finite_part)
    if a < b:
        return Cmp.LT
    if a > b:
        return Cmp.GT
    return Cmp.EQ


def ord_decompose(g: Ordinal) -> tuple[Ordinal, int]:
    """Split ``g`` into its limit part and finite remainder."""
    return Ordinal(g.omega_coeff, 0), g.finite_part
