"""Model parameters of the pricing equation, kept as exact rationals.

The equation  C_t + (sigma^2/2) S^2 C_SS + r S C_S - r C = 0  is determined by
the pair (r, sigma^2).  Everything downstream needs the two derived constants

    rtilde = r - sigma^2/2      (drift of the log-price frame)
    stilde = r + sigma^2/2

which satisfy  rtilde^2/(2 sigma^2) + r = stilde^2/(2 sigma^2)  identically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction


_RATIONAL_RE = re.compile(r"[+-]?\d+(\s*/\s*\d+)?")


def parse_rational(text: str) -> Fraction:
    """Parse an exact rational from a "p/q" or "p" string.

    Decimal or float notation is rejected; exactness is the point.
    """
    body = text.strip()
    if not _RATIONAL_RE.fullmatch(body):
        raise ValueError(f"not a rational: {text!r}")
    try:
        return Fraction(re.sub(r"\s+", "", body))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def format_rational(q: Fraction) -> str:
    """Render a rational as "p/q" ("p" when the denominator is 1)."""
    return str(Fraction(q))


@dataclass(frozen=True)
class ModelContext:
    """Exact model parameters plus derived constants."""

    r: Fraction
    sigma2: Fraction
    rtilde: Fraction
    stilde: Fraction

    @property
    def r_f(self) -> float:
        return float(self.r)

    @property
    def sigma2_f(self) -> float:
        return float(self.sigma2)

    @property
    def sigma_f(self) -> float:
        return float(self.sigma2) ** 0.5

    @property
    def rtilde_f(self) -> float:
        return float(self.rtilde)

    @property
    def stilde_f(self) -> float:
        return float(self.stilde)

    def to_json(self) -> dict:
        return {
            "r": format_rational(self.r),
            "sigma2": format_rational(self.sigma2),
            "rtilde": format_rational(self.rtilde),
            "stilde": format_rational(self.stilde),
        }


def make_context(r, sigma2) -> ModelContext:
    """Build a ModelContext from rationals; sigma2 must be positive."""
    r = Fraction(r)
    sigma2 = Fraction(sigma2)
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    rtilde = r - sigma2 / 2
    stilde = r + sigma2 / 2
    return ModelContext(r=r, sigma2=sigma2, rtilde=rtilde, stilde=stilde)
