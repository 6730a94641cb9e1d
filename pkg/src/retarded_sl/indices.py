"""Signed eigenvalue indices, including the distinct ``+0`` and ``-0``."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["SpectralIndex", "mu_seed"]


@dataclass(frozen=True, order=True)
class SpectralIndex:
    sign: int  # +1 or -1
    magnitude: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.magnitude < 0:
            raise ValueError("magnitude must be >= 0")

    @classmethod
    def of(cls, n: int | str | "SpectralIndex") -> "SpectralIndex":
        """``SpectralIndex.of(-5)``, ``SpectralIndex.of("-0")``."""
        if isinstance(n, SpectralIndex):
            return n
        if isinstance(n, str):
            text = n.strip()
            sign = -1 if text.startswith("-") else 1
            return cls(sign, abs(int(text)))
        return cls(-1 if n < 0 else 1, abs(int(n)))

    @property
    def value(self) -> int:
        return self.sign * self.magnitude

    @property
    def sign_char(self) -> str:
        return "+" if self.sign > 0 else "-"

    def __str__(self) -> str:
        return f"{self.sign_char}{self.magnitude}"

    def sort_key(self) -> tuple[int, int]:
        # -N < ... < -1 < -0 < +0 < +1 < ... < +N
        return (self.sign, self.sign * self.magnitude)


def mu_seed(n) -> float:
    """Zero of ``sin(mu pi)`` assigned to index ``n``: ``n - 1`` or ``n + 1``."""
    n = SpectralIndex.of(n)
    if n.magnitude <= 1:
        return 0.0
    return float(n.sign * (n.magnitude - 1))
