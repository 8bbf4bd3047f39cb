"""Even nondegenerate lattices, their duals, cosets, and the 2-cocycle.

Vectors are tuples of Fractions holding coordinates in the chosen basis of L
(the rows/columns of the Gram matrix).  The dual lattice carries the
Smith-compatible basis delta_1..delta_r with divisors d_1..d_r such that
{d_i delta_i} is a Z-basis of L and {delta_i} is a Z-basis of the dual.

The cocycle on the dual is pinned by the base values

    eps(delta_i, delta_j) = e^(pi*i*<delta_i,delta_j>)        for i > j,
    eps(delta_i, delta_i) = e^(pi*i*d_i*<delta_i,delta_i>/2),
    eps(delta_i, delta_j) = 1                                 for i < j,

extended bimultiplicatively.  One checks directly (and the test suite
re-verifies per lattice) that this gives c = (-1)^<.,.> on L x L and
eps = +-1 whenever either argument is in L.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import FieldOrderError, InvalidLatticeError
from .linalg import frac_inverse, smith_normal_form
from .scalars import Cyclotomic, CyclotomicField, lcm, parse_rational, root_of_unity

Vec = tuple[Fraction, ...]


def vec(coords) -> Vec:
    return tuple(Fraction(c) for c in coords)


def vec_add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vec_neg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def vec_scale(a: Vec, c) -> Vec:
    c = Fraction(c)
    return tuple(c * x for x in a)


def vec_is_zero(a: Vec) -> bool:
    return not any(a)


def parse_vec(text: str) -> Vec:
    return vec(parse_rational(p) for p in text.split(","))


def format_vec(v: Vec) -> list[str]:
    return [str(c) for c in v]


class EvenLattice:
    """An even nondegenerate lattice given by its integer Gram matrix."""

    def __init__(self, gram, name: str = ""):
        rows = [list(r) for r in gram]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise InvalidLatticeError("Gram matrix must be square and nonempty")
        for i in range(n):
            for j in range(n):
                if int(rows[i][j]) != rows[i][j]:
                    raise InvalidLatticeError("Gram entries must be integers")
                rows[i][j] = int(rows[i][j])
        for i in range(n):
            for j in range(n):
                if rows[i][j] != rows[j][i]:
                    raise InvalidLatticeError("Gram matrix must be symmetric")
        for i in range(n):
            if rows[i][i] % 2 != 0:
                raise InvalidLatticeError(f"not even: diagonal entry {rows[i][i]} at {i}")
        self.name = name
        self.rank = n
        self.gram = tuple(tuple(r) for r in rows)
        d, _u, v = smith_normal_form(rows)
        self.divisors = tuple(d[i][i] for i in range(n))
        if any(x == 0 for x in self.divisors):
            raise InvalidLatticeError("degenerate: Gram matrix has zero determinant")
        det = 1
        for x in self.divisors:
            det *= x
        # delta_i = column i of V * diag(1/d_i): a Z-basis of the dual lattice
        self.delta_basis: tuple[Vec, ...] = tuple(
            tuple(Fraction(v[r][i], self.divisors[i]) for r in range(n)) for i in range(n)
        )
        self._delta_inv = frac_inverse([[self.delta_basis[j][r] for j in range(n)] for r in range(n)])
        self.dual_gram = tuple(
            tuple(self.pairing(self.delta_basis[i], self.delta_basis[j]) for j in range(n))
            for i in range(n)
        )
        self.det = det * (1 if self._det_sign() > 0 else -1)
        self._gram_inv = frac_inverse([list(r) for r in rows])
        # positive definiteness via the exact LDL pivots
        self._ldl = self._ldl_decompose()
        self.positive_definite = all(p > 0 for p in self._ldl[0])
        # cocycle base exponents: value eps(delta_i,delta_j) = e^(2*pi*i*exp)
        base = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if i > j:
                    base[i][j] = Fraction(self.dual_gram[i][j], 2)
                elif i == j:
                    base[i][i] = Fraction(self.divisors[i] * self.dual_gram[i][i], 4)
        self._eps_base = tuple(tuple(row) for row in base)
        dens = [q.denominator for row in self.dual_gram for q in row]
        dens += [(Fraction(self.divisors[i]) * self.dual_gram[i][i] / 2).denominator for i in range(n)]
        self.field_denominator = lcm(*dens)
        self.field = CyclotomicField(lcm(2, 4 * self.field_denominator))

    # -- basic bilinear form ------------------------------------------------

    def pairing(self, u: Vec, v: Vec) -> Fraction:
        """<u, v> = u^T * gram * v in L-basis coordinates."""
        if len(u) != self.rank or len(v) != self.rank:
            raise ValueError("vector dimension mismatch")
        total = Fraction(0)
        for i in range(self.rank):
            if u[i]:
                row = self.gram[i]
                total += u[i] * sum(row[j] * v[j] for j in range(self.rank) if v[j])
        return total

    def norm(self, v: Vec) -> Fraction:
        return self.pairing(v, v)

    def zero(self) -> Vec:
        return (Fraction(0),) * self.rank

    def basis_vector(self, i: int) -> Vec:
        return tuple(Fraction(1 if j == i else 0) for j in range(self.rank))

    def dual_basis_vector(self, i: int) -> Vec:
        """beta^(i), the basis of the dual lattice dual to the L-basis."""
        return tuple(self._gram_inv[r][i] for r in range(self.rank))

    def in_lattice(self, v: Vec) -> bool:
        return all(c.denominator == 1 for c in v)

    def in_dual(self, v: Vec) -> bool:
        return all(self.pairing(v, self.basis_vector(i)).denominator == 1 for i in range(self.rank))

    def delta_coords(self, v: Vec) -> Vec:
        """Coordinates of v in the delta-basis (integers iff v is in the dual)."""
        return tuple(
            sum(self._delta_inv[i][r] * v[r] for r in range(self.rank)) for i in range(self.rank)
        )

    def _det_sign(self) -> int:
        # sign of det(gram) by exact fraction elimination
        a = [[Fraction(x) for x in row] for row in self.gram]
        n = self.rank
        sign = 1
        for c in range(n):
            piv = next((i for i in range(c, n) if a[i][c]), None)
            if piv is None:
                return 0
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                sign = -sign
            if a[c][c] < 0:
                sign = -sign
            for i in range(c + 1, n):
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return sign

    def _ldl_decompose(self):
        """Exact Q(v) = sum_i d_i (v_i + sum_{j>i} l_ij v_j)^2 with Q = <v,v>."""
        n = self.rank
        a = [[Fraction(self.gram[i][j]) for j in range(n)] for i in range(n)]
        d = [Fraction(0)] * n
        l = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            d[i] = a[i][i]
            if d[i] == 0:
                # indefinite or degenerate direction; enumeration is gated off
                return (d, l)
            for j in range(i + 1, n):
                l[i][j] = a[i][j] / d[i]
            for r in range(i + 1, n):
                for c in range(i + 1, n):
                    a[r][c] -= a[r][i] * a[i][c] / d[i]
        return (d, l)

    # -- cosets ---------------------------------------------------------------

    def coset(self, v: Vec) -> "CosetLabel":
        if not self.in_dual(v):
            raise ValueError(f"vector {format_vec(v)} is not in the dual lattice")
        b = self.delta_coords(v)
        red = tuple(Fraction(int(b[i]) % self.divisors[i]) for i in range(self.rank))
        rep = self.zero()
        for i in range(self.rank):
            if red[i]:
                rep = vec_add(rep, vec_scale(self.delta_basis[i], red[i]))
        return CosetLabel(self, rep)

    def zero_coset(self) -> "CosetLabel":
        return CosetLabel(self, self.zero())

    def all_cosets(self) -> list["CosetLabel"]:
        out = []

        def rec(i, acc):
            if i == self.rank:
                out.append(self.coset(acc))
                return
            for c in range(self.divisors[i]):
                rec(i + 1, vec_add(acc, vec_scale(self.delta_basis[i], c)))

        rec(0, self.zero())
        return out

    # -- cocycle ---------------------------------------------------------------

    def epsilon_exp(self, beta: Vec, gamma: Vec) -> Fraction:
        """Exponent r in [0,1) with eps(beta,gamma) = e^(2*pi*i*r)."""
        b = self.delta_coords(beta)
        g = self.delta_coords(gamma)
        if any(c.denominator != 1 for c in b) or any(c.denominator != 1 for c in g):
            raise ValueError("cocycle arguments must lie in the dual lattice")
        total = Fraction(0)
        for i in range(self.rank):
            if b[i]:
                for j in range(self.rank):
                    if g[j] and self._eps_base[i][j]:
                        total += b[i] * g[j] * self._eps_base[i][j]
        return total % 1

    def epsilon(self, beta: Vec, gamma: Vec) -> Cyclotomic:
        """The cocycle value eps(beta, gamma) as a cyclotomic number."""
        return self.phase(self.epsilon_exp(beta, gamma))

    def comm_exp(self, beta: Vec, gamma: Vec) -> Fraction:
        return (self.epsilon_exp(beta, gamma) - self.epsilon_exp(gamma, beta)) % 1

    def comm_c(self, beta: Vec, gamma: Vec) -> Cyclotomic:
        """c(beta,gamma) = eps(beta,gamma) * eps(gamma,beta)^(-1)."""
        return self.phase(self.comm_exp(beta, gamma))

    def phase(self, r: Fraction) -> Cyclotomic:
        try:
            return root_of_unity(self.field, r)
        except FieldOrderError as exc:  # pragma: no cover - defensive
            raise FieldOrderError(f"{exc} (lattice {self.name or self.gram})") from exc

    # -- enumeration ------------------------------------------------------------

    def vectors_in_shifted_lattice(self, shift: Vec, max_norm: Fraction) -> list[Vec]:
        """All v = shift + x, x integral, with <v,v> <= max_norm (pos.def. only)."""
        if not self.positive_definite:
            raise InvalidLatticeError("weight-space enumeration needs a positive-definite lattice")
        if max_norm < 0:
            return []
        d, l = self._ldl
        n = self.rank
        sols: list[Vec] = []
        coords = [Fraction(0)] * n

        def rec(i: int, budget: Fraction):
            if i < 0:
                sols.append(tuple(shift[k] + coords[k] for k in range(n)))
                return
            center = shift[i] + sum(l[i][j] * (shift[j] + coords[j]) for j in range(i + 1, n))
            bound = budget / d[i]
            lo = _ceil_minus_sqrt(-center, bound)
            hi = _floor_plus_sqrt(-center, bound)
            for x in range(lo, hi + 1):
                coords[i] = Fraction(x)
                t = center + x
                rec(i - 1, budget - d[i] * t * t)
            coords[i] = Fraction(0)

        rec(n - 1, Fraction(max_norm))
        sols.sort()
        return sols

    # -- serialization ------------------------------------------------------------

    def to_json(self) -> dict:
        return {"gram": [list(r) for r in self.gram], "name": self.name}

    @classmethod
    def from_json(cls, data) -> "EvenLattice":
        return cls(data["gram"], name=data.get("name", ""))

    @classmethod
    def from_file(cls, path) -> "EvenLattice":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def __repr__(self):
        return f"EvenLattice({self.name or [list(r) for r in self.gram]})"


@dataclass(frozen=True)
class CosetLabel:
    """A coset of L inside the dual, held by its canonical representative."""

    lattice: EvenLattice
    rep: Vec

    def __eq__(self, other):
        return (
            isinstance(other, CosetLabel)
            and self.lattice is other.lattice
            and self.rep == other.rep
        )

    def __hash__(self):
        return hash(self.rep)

    def neg(self) -> "CosetLabel":
        return self.lattice.coset(vec_neg(self.rep))

    def add(self, other: "CosetLabel") -> "CosetLabel":
        return self.lattice.coset(vec_add(self.rep, other.rep))

    def is_zero(self) -> bool:
        return vec_is_zero(self.rep)

    def min_norm(self) -> Fraction:
        """Minimal <v,v> over the coset (positive-definite lattices)."""
        best = None
        # the minimum is attained within the box |t_i| <= 1 around the
        # representative reduced by the LDL bound; use enumeration with a
        # safe cutoff given by the representative's own norm
        cap = self.lattice.norm(self.rep)
        for v in self.lattice.vectors_in_shifted_lattice(self.rep, cap):
            n = self.lattice.norm(v)
            if best is None or n < best:
                best = n
        return best if best is not None else cap

    def to_json(self) -> list[str]:
        return format_vec(self.rep)


def _floor_plus_sqrt(c: Fraction, r: Fraction) -> int:
    """floor(c + sqrt(r)) exactly, for rational c and r >= 0."""
    if r < 0:
        raise ValueError("negative radicand")
    guess = math.floor(float(c) + math.sqrt(float(r)))

    def ok(k: int) -> bool:
        t = Fraction(k) - c
        return t <= 0 or t * t <= r

    while ok(guess + 1):
        guess += 1
    while not ok(guess):
        guess -= 1
    return guess


def _ceil_minus_sqrt(c: Fraction, r: Fraction) -> int:
    """ceil(c - sqrt(r)) exactly."""
    return -_floor_plus_sqrt(-c, r)
