"""Integer lattices of intertwining-operator spaces for sl2 at integral level.

Everything is finite-dimensional: the irreducible module with highest weight
lam has basis v_0..v_lam with v_k = f^(k) v_0, and the divided-power actions

    e^(m) v_k = C(lam - k + m, m) v_{k-m},
    f^(m) v_k = C(k + m, m)       v_{k+m},
    h-binomial: diag C((lam - 2k) + m - 1, m),

all with integer matrix entries.  The lattice of integral intertwining
operators of a given type is computed as the integer kernel of the
equivariance-plus-annihilation constraint system; a rational brute-force
solve of the same system acts as the dimension oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .linalg import (
    frac_nullspace,
    frac_rref,
    hermite_row_basis,
    hnf_contains,
    identity,
    integer_kernel,
    mat_mul,
    smith_normal_form,
    transpose,
)


def _binom(n: int, k: int) -> int:
    """C(n, k) for integer n (possibly negative), k >= 0."""
    if k < 0:
        return 0
    num = 1
    den = 1
    for t in range(k):
        num *= n - t
        den *= t + 1
    assert num % den == 0
    return num // den


@dataclass(frozen=True)
class IrrModZ:
    """The integral form of the irreducible sl2-module of highest weight lam."""

    lam: int

    @property
    def dim(self) -> int:
        return self.lam + 1


def act_divided(gen: str, m: int, target: IrrModZ):
    """Matrix of e^(m) or f^(m) on the basis v_0..v_lam (integer entries)."""
    if gen not in ("e", "f"):
        raise ValueError("generator must be 'e' or 'f'")
    if m < 0:
        raise ValueError("divided power order must be nonnegative")
    n = target.dim
    out = [[0] * n for _ in range(n)]
    for k in range(n):
        if gen == "e":
            if k - m >= 0:
                out[k - m][k] = _binom(target.lam - k + m, m)
        else:
            if k + m < n:
                out[k + m][k] = _binom(k + m, m)
    return out


def act_h(target: IrrModZ):
    """Matrix of h: diagonal lam - 2k."""
    n = target.dim
    return [[(target.lam - 2 * k) if r == k else 0 for k in range(n)] for r in range(n)]


def act_h_binom(m: int, target: IrrModZ):
    """Diagonal matrix with entries C((lam - 2k) + m - 1, m)."""
    if m < 0:
        raise ValueError("order must be nonnegative")
    n = target.dim
    return [[_binom(target.lam - 2 * k + m - 1, m) if r == k else 0 for k in range(n)]
            for r in range(n)]


@dataclass(frozen=True)
class TensorLattice:
    left: IrrModZ
    right: IrrModZ

    @property
    def dim(self) -> int:
        return self.left.dim * self.right.dim

    def index(self, i: int, j: int) -> int:
        return i * self.right.dim + j


def tensor_action(gen: str, m: int, tensor: TensorLattice):
    """Divided-power comultiplication: sum_{i+j=m} gen^(i) (x) gen^(j)."""
    n = tensor.dim
    out = [[0] * n for _ in range(n)]
    for i in range(m + 1):
        a = act_divided(gen, i, tensor.left)
        b = act_divided(gen, m - i, tensor.right)
        for r1 in range(tensor.left.dim):
            for c1 in range(tensor.left.dim):
                if a[r1][c1]:
                    for r2 in range(tensor.right.dim):
                        for c2 in range(tensor.right.dim):
                            if b[r2][c2]:
                                out[tensor.index(r1, r2)][tensor.index(c1, c2)] += \
                                    a[r1][c1] * b[r2][c2]
    return out


def build_wz(level: int, lam1: int, lam2: int):
    """Hermite basis of W_Z: the smallest divided-power-stable sublattice of
    L_{lam1} (x) L_{lam2} containing v_0 (x) e^(p) w, p = level - lam1 + 1."""
    if lam1 > level or lam2 > level:
        raise ValueError("weights must satisfy lam <= level")
    tensor = TensorLattice(IrrModZ(lam1), IrrModZ(lam2))
    p = level - lam1 + 1
    e_p = act_divided("e", p, tensor.right)
    gens = []
    for j in range(tensor.right.dim):
        col = [e_p[r][j] for r in range(tensor.right.dim)]
        if any(col):
            gen = [0] * tensor.dim
            for r, c in enumerate(col):
                gen[tensor.index(0, r)] = c
            gens.append(gen)
    basis = hermite_row_basis(gens)
    if not basis:
        return []
    actions = []
    for g in ("e", "f"):
        for m in range(1, lam1 + lam2 + 1):
            actions.append(tensor_action(g, m, tensor))
    while True:
        new_rows = list(basis)
        for mat in actions:
            for row in basis:
                img = [sum(mat[r][c] * row[c] for c in range(tensor.dim))
                       for r in range(tensor.dim)]
                if any(img):
                    new_rows.append(img)
        new_basis = hermite_row_basis(new_rows)
        if new_basis == basis:
            return basis
        basis = new_basis


def dual_module(lam3: int):
    """Divided-power action matrices on the Z-dual of L_{lam3}:
    gen^(m) acts as (-1)^m times the transpose of gen^(m)."""
    mod = IrrModZ(lam3)
    out = {}
    for g in ("e", "f"):
        out[g] = {}
        for m in range(0, lam3 + 2):
            mat = transpose(act_divided(g, m, mod))
            sign = -1 if m % 2 else 1
            out[g][m] = [[sign * x for x in row] for row in mat]
    return out


@dataclass
class HomLattice:
    rank: int
    basis: list  # list of matrices (dim3 x dimT), integer entries
    quotient_elementary_divisors: list


def _constraint_matrix(level, lam1, lam2, lam3, rational: bool):
    """Rows of the linear system on vec(M), M: tensor -> dual(L_lam3).

    Equivariance for e and f (dual action on the target), and M(W) = 0.
    Over Q the W used is the rational span (closed under e,f by plain
    Gaussian elimination); over Z it is the divided-power Hermite basis.
    """
    tensor = TensorLattice(IrrModZ(lam1), IrrModZ(lam2))
    dim_t = tensor.dim
    dim_3 = lam3 + 1
    dual = dual_module(lam3)
    rows = []

    def entry(r3, ct):
        return r3 * dim_t + ct

    for g in ("e", "f"):
        t_g = tensor_action(g, 1, tensor)
        d_g = dual[g][1]
        # M T_g - D_g M = 0: equation per (r3, ct)
        for r3 in range(dim_3):
            for ct in range(dim_t):
                row = [0] * (dim_3 * dim_t)
                for c in range(dim_t):
                    if t_g[c][ct]:
                        row[entry(r3, c)] += t_g[c][ct]
                for r in range(dim_3):
                    if d_g[r3][r]:
                        row[entry(r, ct)] -= d_g[r3][r]
                if any(row):
                    rows.append(row)
    if rational:
        w_basis = _rational_w_span(level, lam1, lam2)
    else:
        w_basis = build_wz(level, lam1, lam2)
    for w in w_basis:
        for r3 in range(dim_3):
            row = [0] * (dim_3 * dim_t)
            for c in range(dim_t):
                if w[c]:
                    row[entry(r3, c)] = w[c]
            rows.append(row)
    return rows, dim_t, dim_3


def _rational_w_span(level, lam1, lam2):
    """Q-span of W: plain e,f closure of v_0 (x) x_theta^p w (no divided powers)."""
    tensor = TensorLattice(IrrModZ(lam1), IrrModZ(lam2))
    p = level - lam1 + 1
    # x_theta^p = p! e^(p)
    e_p = act_divided("e", p, tensor.right)
    fact = math.factorial(p)
    gens = []
    for j in range(tensor.right.dim):
        col = [fact * e_p[r][j] for r in range(tensor.right.dim)]
        if any(col):
            gen = [Fraction(0)] * tensor.dim
            for r, c in enumerate(col):
                gen[tensor.index(0, r)] = Fraction(c)
            gens.append(gen)
    if not gens:
        return []
    e1 = tensor_action("e", 1, tensor)
    f1 = tensor_action("f", 1, tensor)
    span = gens
    while True:
        rref, piv = frac_rref(span)
        basis = [row for row in rref if any(row)]
        new = list(basis)
        for mat in (e1, f1):
            for row in basis:
                img = [sum(Fraction(mat[r][c]) * row[c] for c in range(tensor.dim))
                       for r in range(tensor.dim)]
                if any(img):
                    new.append(img)
        rref2, piv2 = frac_rref(new)
        basis2 = [row for row in rref2 if any(row)]
        if len(basis2) == len(basis):
            return basis2
        span = basis2


def hom_lattice(level: int, lam1: int, lam2: int, lam3: int) -> HomLattice:
    """Z-basis of equivariant maps (tensor/W_Z) -> dual(L_lam3)."""
    for lam in (lam1, lam2, lam3):
        if lam > level or lam < 0:
            raise ValueError("weights must satisfy 0 <= lam <= level")
    rows, dim_t, dim_3 = _constraint_matrix(level, lam1, lam2, lam3, rational=False)
    if rows:
        kernel = integer_kernel(rows)
    else:
        kernel = [list(r) for r in identity(dim_3 * dim_t)]
    basis = []
    for veck in kernel:
        mat = [[veck[r3 * dim_t + ct] for ct in range(dim_t)] for r3 in range(dim_3)]
        basis.append(mat)
    wz = build_wz(level, lam1, lam2)
    if wz:
        d, _u, _v = smith_normal_form(wz)
        divisors = [d[i][i] for i in range(min(len(wz), dim_t)) if d[i][i] != 0]
    else:
        divisors = []
    return HomLattice(rank=len(basis), basis=basis, quotient_elementary_divisors=divisors)


def fusion_oracle(level: int, lam1: int, lam2: int, lam3: int) -> int:
    """Dimension over Q of the same equivariant-map space (brute force)."""
    for lam in (lam1, lam2, lam3):
        if lam > level or lam < 0:
            raise ValueError("weights must satisfy 0 <= lam <= level")
    rows, dim_t, dim_3 = _constraint_matrix(level, lam1, lam2, lam3, rational=True)
    if not rows:
        return dim_3 * dim_t
    return len(frac_nullspace(rows))


def fusion_table(level: int) -> dict[tuple[int, int, int], int]:
    out = {}
    for l1 in range(level + 1):
        for l2 in range(level + 1):
            for l3 in range(level + 1):
                out[(l1, l2, l3)] = fusion_oracle(level, l1, l2, l3)
    return out
