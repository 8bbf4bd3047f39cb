"""Weight-truncated formal series with a rational exponent offset.

A TruncSeries holds the coefficients of x^(offset + k) for integers k in the
computed window [kmin, kmax]; the offset is normalized into [0, 1).  Every
stored coefficient is exact; exponents outside the window were not computed
(below kmin they are zero by lower truncation whenever kmin is the intrinsic
bound).
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import parse_rational


def split_exponent(e: Fraction) -> tuple[Fraction, int]:
    """e = offset + k with offset in [0,1) and integer k."""
    e = Fraction(e)
    off = e % 1
    return off, int(e - off)


class TruncSeries:
    __slots__ = ("coset", "offset", "kmin", "kmax", "coeffs")

    def __init__(self, coset, offset: Fraction, kmin: int, kmax: int, coeffs=None):
        self.coset = coset
        self.offset = Fraction(offset) % 1
        self.kmin = kmin
        self.kmax = kmax
        self.coeffs = {}
        if coeffs:
            for k, v in coeffs.items():
                if not v.is_zero():
                    self.coeffs[k] = v

    @property
    def exp_min(self) -> int:
        return self.kmin

    @property
    def exp_max(self) -> int:
        return self.kmax

    def exponent(self, k: int) -> Fraction:
        return self.offset + k

    def coefficient(self, k: int):
        from .fock import FockVector

        if k in self.coeffs:
            return self.coeffs[k]
        return FockVector(self.coset, {})

    def coefficient_at(self, e: Fraction):
        off, k = split_exponent(e)
        if off != self.offset:
            from .fock import FockVector

            return FockVector(self.coset, {})
        return self.coefficient(k)

    def items(self):
        return sorted(self.coeffs.items())

    def nonzero_exponents(self):
        return [self.offset + k for k, _ in self.items()]

    def scale(self, c) -> "TruncSeries":
        return TruncSeries(
            self.coset, self.offset, self.kmin, self.kmax,
            {k: v * c for k, v in self.coeffs.items()},
        )

    def add_into(self, k: int, vector):
        """Accumulate vector at integer key k (window-checked)."""
        if k < self.kmin or k > self.kmax:
            raise ValueError(f"exponent index {k} outside window [{self.kmin},{self.kmax}]")
        cur = self.coeffs.get(k)
        new = vector if cur is None else cur + vector
        if new.is_zero():
            self.coeffs.pop(k, None)
        else:
            self.coeffs[k] = new

    def equal_on(self, other: "TruncSeries", kmin: int, kmax: int) -> tuple[bool, int | None]:
        """Compare coefficients on a shared window; returns (ok, first bad k)."""
        if self.offset != other.offset:
            return False, None
        for k in range(kmin, kmax + 1):
            if self.coefficient(k) != other.coefficient(k):
                return False, k
        return True, None

    def to_json(self) -> dict:
        return {
            "offset": str(self.offset),
            "window": [self.kmin, self.kmax],
            "coeffs": {str(k): v.to_json() for k, v in self.items()},
        }

    @classmethod
    def from_json(cls, lattice, data) -> "TruncSeries":
        from .fock import FockVector

        offset = parse_rational(data["offset"])
        kmin, kmax = data["window"]
        coeffs = {int(k): FockVector.from_json(lattice, v) for k, v in data["coeffs"].items()}
        coset = next(iter(coeffs.values())).coset if coeffs else lattice.zero_coset()
        return cls(coset, offset, int(kmin), int(kmax), coeffs)

    def __repr__(self):
        terms = ", ".join(f"x^{self.offset + k}:{v}" for k, v in self.items())
        return f"TruncSeries[{self.kmin},{self.kmax}]({terms})"
