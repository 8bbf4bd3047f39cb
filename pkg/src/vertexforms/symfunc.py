"""Partitions and the monomial <-> complete homogeneous transition matrices.

The coefficients k in m_Lambda = sum k_{Lambda'} h_{Lambda'} are obtained by
expanding both bases as explicit polynomials in n = |Lambda| variables over Q
and inverting the change-of-basis matrix; integrality is asserted afterwards,
not assumed.  Results are memoized per degree.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import frac_inverse

Partition = tuple[int, ...]


def partitions_of(n: int) -> list[Partition]:
    """All partitions of n, reverse-lexicographic: (n), ..., (1,...,1)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out: list[Partition] = []

    def rec(remaining: int, max_part: int, prefix: tuple[int, ...]):
        if remaining == 0:
            out.append(prefix)
            return
        for part in range(min(max_part, remaining), 0, -1):
            rec(remaining - part, part, prefix + (part,))

    rec(n, n, ())
    return out


def as_partition(parts) -> Partition:
    p = tuple(int(x) for x in parts)
    if any(x <= 0 for x in p) or any(p[i] < p[i + 1] for i in range(len(p) - 1)):
        raise ValueError(f"not a partition: {parts}")
    return p


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


def _h_single(m: int, nvars: int) -> dict:
    """h_m in nvars variables: sum of all distinct degree-m monomials."""
    out: dict = {}

    def rec(pos: int, remaining: int, expo: tuple[int, ...]):
        if pos == nvars - 1:
            out[expo + (remaining,)] = 1
            return
        for e in range(remaining + 1):
            rec(pos + 1, remaining - e, expo + (e,))

    rec(0, m, ())
    return out


def _monomial_coeffs(poly: dict, n: int) -> dict[Partition, int]:
    """Extract the coefficient of m_mu for each partition mu of n."""
    out: dict[Partition, int] = {}
    for expo, coeff in poly.items():
        mu = tuple(sorted((e for e in expo if e), reverse=True))
        if sum(mu) == n and mu not in out:
            out[mu] = coeff
    return out


_degree_cache: dict[int, tuple[list[Partition], dict, dict]] = {}


def _tables(n: int):
    """(partitions, h_in_m table, m_in_h table) for degree n, memoized."""
    if n in _degree_cache:
        return _degree_cache[n]
    parts = partitions_of(n)
    if n == 0:
        h2m = {(): {(): 1}}
        m2h = {(): {(): 1}}
        _degree_cache[0] = (parts, h2m, m2h)
        return _degree_cache[0]
    nvars = n
    h2m: dict[Partition, dict[Partition, int]] = {}
    for lam in parts:
        poly = {(0,) * nvars: 1}
        for part in lam:
            poly = _poly_mul(poly, _h_single(part, nvars))
        h2m[lam] = _monomial_coeffs(poly, n)
    # matrix A with A[i][j] = coeff of m_{parts[j]} in h_{parts[i]}
    matrix = [[Fraction(h2m[li].get(mj, 0)) for mj in parts] for li in parts]
    inv = frac_inverse(matrix)
    # m_{parts[i]} = sum_j inv-transpose ... : m = A^{-1} h row-wise
    m2h: dict[Partition, dict[Partition, int]] = {}
    for i, lam in enumerate(parts):
        row = {}
        for j, lamp in enumerate(parts):
            c = inv[i][j]
            if c:
                if c.denominator != 1:
                    raise ArithmeticError(
                        f"non-integer transition coefficient {c} at {lam}->{lamp}"
                    )
                row[lamp] = int(c)
        m2h[lam] = row
    _degree_cache[n] = (parts, h2m, m2h)
    return _degree_cache[n]


def h_in_m(lam) -> dict[Partition, int]:
    """Expansion of h_Lambda in the monomial basis (nonnegative integers)."""
    lam = as_partition(lam)
    _, h2m, _ = _tables(sum(lam))
    return dict(h2m[lam])


def m_in_h(lam) -> dict[Partition, int]:
    """Integer coefficients k with m_Lambda = sum_{Lambda'} k_{Lambda'} h_{Lambda'}."""
    lam = as_partition(lam)
    _, _, m2h = _tables(sum(lam))
    return dict(m2h[lam])
