"""Exact Fock spaces for the modules attached to an even lattice.

A vector is a finite cyclotomic-linear combination of monomials

    alpha^(i1)(-n1) ... alpha^(ik)(-nk) iota(e_gamma),

where alpha^(i) runs over the fixed basis of L and gamma lies in a fixed
coset of the dual lattice.  Heisenberg modes against arbitrary dual vectors
are resolved through rational coordinates in that basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

from .errors import CosetMismatchError, EnumerationUnsupportedError
from .lattice import CosetLabel, EvenLattice, Vec, format_vec, vec, vec_add, vec_neg, vec_sub
from .scalars import Cyclotomic, parse_rational
from .series import TruncSeries
from .symfunc import Partition, m_in_h, partitions_of


class FockMonomial:
    """A product of creation modes applied to a group-algebra element.

    Immutable; the hash is precomputed from integer data because Fraction
    hashing is expensive and monomials are used as dictionary keys throughout.
    """

    __slots__ = ("modes", "charge", "_hash", "_wt")

    def __init__(self, modes: tuple[tuple[int, int], ...], charge: Vec):
        self.modes = modes
        self.charge = charge
        self._hash = hash((modes, tuple((c.numerator, c.denominator) for c in charge)))
        self._wt = None

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (self._hash == other._hash and self.modes == other.modes
                and self.charge == other.charge)

    def __repr__(self):
        return f"FockMonomial({self.modes}, {self.charge})"

    def weight(self, lattice: EvenLattice) -> Fraction:
        if self._wt is None:
            self._wt = lattice.norm(self.charge) / 2 + sum(n for _, n in self.modes)
        return self._wt

    def heisenberg_degree(self) -> int:
        return sum(n for _, n in self.modes)

    def max_mode(self) -> int:
        return max((n for _, n in self.modes), default=0)


def _sorted_modes(modes) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(modes))


class FockVector:
    """Finite sum of Fock monomials with cyclotomic coefficients, coset-tagged."""

    __slots__ = ("coset", "terms")

    def __init__(self, coset: CosetLabel, terms: dict[FockMonomial, Cyclotomic]):
        self.coset = coset
        self.terms = {m: c for m, c in terms.items() if not c.is_zero()}

    @property
    def lattice(self) -> EvenLattice:
        return self.coset.lattice

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, FockVector):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.coset == other.coset and self.terms == other.terms

    def __add__(self, other: "FockVector") -> "FockVector":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if other.coset != self.coset:
            raise CosetMismatchError("cannot add vectors from different cosets")
        out = dict(self.terms)
        for m, c in other.terms.items():
            cur = out.get(m)
            new = c if cur is None else cur + c
            if new.is_zero():
                out.pop(m, None)
            else:
                out[m] = new
        return FockVector(self.coset, out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scale(-1)

    def scale(self, c) -> "FockVector":
        if isinstance(c, (int, Fraction)):
            if c == 0:
                return FockVector(self.coset, {})
            return FockVector(self.coset, {m: v * c for m, v in self.terms.items()})
        if c.is_zero():
            return FockVector(self.coset, {})
        return FockVector(self.coset, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1)

    def charges(self) -> set[Vec]:
        return {m.charge for m in self.terms}

    def max_mode(self) -> int:
        return max((m.max_mode() for m in self.terms), default=0)

    def weights(self) -> set[Fraction]:
        lat = self.lattice
        return {m.weight(lat) for m in self.terms}

    def weight_components(self) -> dict[Fraction, "FockVector"]:
        """Split into homogeneous pieces keyed by weight."""
        lat = self.lattice
        out: dict[Fraction, dict] = {}
        for m, c in self.terms.items():
            out.setdefault(m.weight(lat), {})[m] = c
        return {w: FockVector(self.coset, d) for w, d in sorted(out.items())}

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: (mc[0].charge, mc[0].modes))

    def to_json(self) -> dict:
        return {
            "coset": self.coset.to_json(),
            "terms": [
                {
                    "modes": [[i + 1, n] for i, n in m.modes],
                    "charge": format_vec(m.charge),
                    "coeff": c.to_json(),
                }
                for m, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, lattice: EvenLattice, data) -> "FockVector":
        coset = lattice.coset(vec(parse_rational(x) for x in data["coset"]))
        terms = {}
        for t in data["terms"]:
            modes = _sorted_modes((int(i) - 1, int(n)) for i, n in t["modes"])
            charge = vec(parse_rational(x) for x in t["charge"])
            mono = FockMonomial(modes, charge)
            terms[mono] = Cyclotomic.from_json(t["coeff"])
        return cls(coset, terms)

    def __repr__(self):
        if self.is_zero():
            return "FockVector(0)"
        bits = []
        for m, c in self.sorted_terms():
            ops = "".join(f"a{i + 1}(-{n})" for i, n in m.modes)
            bits.append(f"({c}){ops}e[{','.join(format_vec(m.charge))}]")
        return " + ".join(bits)


def zero_vector(coset: CosetLabel) -> FockVector:
    return FockVector(coset, {})


def iota(lattice: EvenLattice, gamma, coeff=1) -> FockVector:
    """The pure charge vector iota(e_gamma), optionally scaled."""
    gamma = vec(gamma)
    coset = lattice.coset(gamma)
    c = coeff if isinstance(coeff, Cyclotomic) else lattice.field.from_rational(coeff)
    return FockVector(coset, {FockMonomial((), gamma): c})


# -- Heisenberg modes ---------------------------------------------------------


def apply_mode(h: Vec, n: int, v: FockVector) -> FockVector:
    """Action of h(n): creation for n < 0, charge scalar at n = 0, derivation
    determined by [h(n), h'(-m)] = n <h,h'> delta_{n,m} for n > 0."""
    lat = v.lattice
    h = vec(h)
    out: dict[FockMonomial, Cyclotomic] = {}

    def accumulate(mono, coeff):
        if coeff.is_zero():
            return
        cur = out.get(mono)
        new = coeff if cur is None else cur + coeff
        if new.is_zero():
            out.pop(mono, None)
        else:
            out[mono] = new

    if n < 0:
        m = -n
        for mono, c in v.terms.items():
            for i in range(lat.rank):
                if h[i]:
                    new_modes = _sorted_modes(mono.modes + ((i, m),))
                    accumulate(FockMonomial(new_modes, mono.charge), c * h[i])
    elif n == 0:
        for mono, c in v.terms.items():
            s = lat.pairing(h, mono.charge)
            if s:
                accumulate(mono, c * s)
    else:
        for mono, c in v.terms.items():
            seen = set()
            for idx, (i, m) in enumerate(mono.modes):
                if m != n or (i, m) in seen:
                    continue
                seen.add((i, m))
                mult = mono.modes.count((i, m))
                coeff = c * (Fraction(mult) * n * lat.pairing(h, lat.basis_vector(i)))
                rest = list(mono.modes)
                rest.pop(idx)
                accumulate(FockMonomial(tuple(rest), mono.charge), coeff)
    return FockVector(v.coset, out)


def e_mult(lam: Vec, v: FockVector) -> FockVector:
    """Left multiplication by e_lam in the twisted group algebra."""
    lat = v.lattice
    lam = vec(lam)
    if not lat.in_dual(lam):
        raise ValueError("twisted group algebra elements are indexed by the dual lattice")
    new_coset = lat.coset(vec_add(lam, v.coset.rep))
    out: dict[FockMonomial, Cyclotomic] = {}
    for mono, c in v.terms.items():
        phase = lat.phase(lat.epsilon_exp(lam, mono.charge))
        out[FockMonomial(mono.modes, vec_add(lam, mono.charge))] = c * phase
    return FockVector(new_coset, out)


# -- E^+/E^- exponentials -----------------------------------------------------


def _s_monomial_table(lat: EvenLattice, gamma: Vec, n: int):
    """Expansion of the x^n coefficient of exp(sum_m gamma(-m) x^m / m).

    Returns a list of (mode tuple, Fraction) pairs; cached per lattice.
    """
    cache = lat.__dict__.setdefault("_fock_s_cache", {})
    key = (gamma, n)
    if key in cache:
        return cache[key]
    rank = lat.rank
    nonzero = [i for i in range(rank) if gamma[i]]
    acc: dict[tuple, Fraction] = {}
    for mu in partitions_of(n):
        mult: dict[int, int] = {}
        for part in mu:
            mult[part] = mult.get(part, 0) + 1
        z = Fraction(1)
        for part, m in mult.items():
            z *= Fraction(part) ** m
            for t in range(1, m + 1):
                z *= t
        base = 1 / z
        for choice in iproduct(nonzero, repeat=len(mu)):
            coeff = base
            for i in choice:
                coeff *= gamma[i]
            modes = _sorted_modes(zip(choice, mu))
            acc[modes] = acc.get(modes, Fraction(0)) + coeff
    table = [(m, c) for m, c in sorted(acc.items()) if c]
    cache[key] = table
    return table


def s_apply(gamma: Vec, n: int, v: FockVector) -> FockVector:
    """Apply s_{gamma,n}, the x^n coefficient of exp(sum gamma(-m) x^m/m)."""
    if n == 0:
        return v
    lat = v.lattice
    out: dict[FockMonomial, Cyclotomic] = {}
    for modes, q in _s_monomial_table(lat, vec(gamma), n):
        for mono, c in v.terms.items():
            key = FockMonomial(_sorted_modes(mono.modes + modes), mono.charge)
            cur = out.get(key)
            add = c * q
            out[key] = add if cur is None else cur + add
    return FockVector(v.coset, out)


def E_minus(gamma: Vec, v: FockVector, max_power: int) -> TruncSeries:
    """Coefficients of x^0..x^max_power of exp(sum_{m>0} gamma(-m) x^m/m) v."""
    if max_power < 0:
        raise ValueError("max_power must be >= 0")
    series = TruncSeries(v.coset, Fraction(0), 0, max_power)
    for k in range(0, max_power + 1):
        coeff = s_apply(gamma, k, v)
        if not coeff.is_zero():
            series.add_into(k, coeff)
    return series


def E_plus(gamma: Vec, v: FockVector) -> TruncSeries:
    """The finite series exp(-sum_{m>0} gamma(m) x^(-m)/m) v."""
    lat = v.lattice
    gamma = vec(gamma)
    budget = max((m.heisenberg_degree() for m in v.terms), default=0)
    series = TruncSeries(v.coset, Fraction(0), -budget, 0)
    for mono, c in v.terms.items():
        distinct: dict[tuple[int, int], int] = {}
        for im in mono.modes:
            distinct[im] = distinct.get(im, 0) + 1
        keys = sorted(distinct)
        choices = []
        for (i, m) in keys:
            g = lat.pairing(gamma, lat.basis_vector(i))
            mult = distinct[(i, m)]
            opts = []
            for s in range(mult + 1):
                opts.append((s, _binom_int(mult, s) * (-g) ** s))
            choices.append(opts)
        for combo in iproduct(*choices):
            coeff = Fraction(1)
            shift = 0
            kept = []
            for (i, m), (s, w) in zip(keys, combo):
                coeff *= w
                shift += s * m
                kept.extend([(i, m)] * (distinct[(i, m)] - s))
            if coeff:
                mono2 = FockMonomial(_sorted_modes(kept), mono.charge)
                series.add_into(-shift, FockVector(v.coset, {mono2: c * coeff}))
    return series


def _binom_int(n: int, k: int) -> Fraction:
    out = Fraction(1)
    for t in range(k):
        out *= Fraction(n - t, t + 1)
    return out


def binom_general(a: Fraction, k: int) -> Fraction:
    """Generalized binomial coefficient binom(a, k) for integer k >= 0."""
    out = Fraction(1)
    for t in range(k):
        out *= Fraction(a - t, t + 1)
    return out


# -- grading and Virasoro -----------------------------------------------------


def weight(v: FockVector):
    """Common weight of a homogeneous vector, or None if inhomogeneous."""
    ws = v.weights()
    if not ws:
        return Fraction(0)
    if len(ws) > 1:
        return None
    return next(iter(ws))


def virasoro(n: int, v: FockVector) -> FockVector:
    """L(-1), L(0), or L(1) in the free-field realization."""
    lat = v.lattice
    if n == 0:
        out = zero_vector(v.coset)
        for w, comp in v.weight_components().items():
            out = out + comp.scale(w)
        return out
    if n == -1:
        out: dict[FockMonomial, Cyclotomic] = {}

        def acc(mono, coeff):
            if coeff.is_zero():
                return
            cur = out.get(mono)
            new = coeff if cur is None else cur + coeff
            if new.is_zero():
                out.pop(mono, None)
            else:
                out[mono] = new

        for mono, c in v.terms.items():
            # charge part: gamma(-1)
            for i in range(lat.rank):
                if mono.charge[i]:
                    acc(FockMonomial(_sorted_modes(mono.modes + ((i, 1),)), mono.charge),
                        c * mono.charge[i])
            # [L(-1), h(-m)] = m h(-m-1), once per occurrence
            seen = set()
            for idx, (i, m) in enumerate(mono.modes):
                if (i, m) in seen:
                    continue
                seen.add((i, m))
                mult = mono.modes.count((i, m))
                rest = list(mono.modes)
                rest.pop(idx)
                acc(FockMonomial(_sorted_modes(rest + [(i, m + 1)]), mono.charge),
                    c * Fraction(mult * m))
        return FockVector(v.coset, out)
    if n == 1:
        out2: dict[FockMonomial, Cyclotomic] = {}

        def acc2(mono, coeff):
            if coeff.is_zero():
                return
            cur = out2.get(mono)
            new = coeff if cur is None else cur + coeff
            if new.is_zero():
                out2.pop(mono, None)
            else:
                out2[mono] = new

        for mono, c in v.terms.items():
            seen = set()
            for idx, (i, m) in enumerate(mono.modes):
                if (i, m) in seen:
                    continue
                seen.add((i, m))
                mult = mono.modes.count((i, m))
                rest = list(mono.modes)
                rest.pop(idx)
                if m == 1:
                    s = lat.pairing(lat.basis_vector(i), mono.charge)
                    acc2(FockMonomial(tuple(rest), mono.charge), c * (Fraction(mult) * s))
                else:
                    acc2(FockMonomial(_sorted_modes(rest + [(i, m - 1)]), mono.charge),
                         c * Fraction(mult * m))
        return FockVector(v.coset, out2)
    raise ValueError("only L(-1), L(0), L(1) are realized")


def l1_divided_power(k: int, v: FockVector) -> FockVector:
    """L(1)^k / k! applied to v."""
    out = v
    for t in range(1, k + 1):
        out = virasoro(1, out).scale(Fraction(1, t))
    return out


# -- h and m operators ---------------------------------------------------------


def h_op(gamma: Vec, lam: Partition, v: FockVector) -> FockVector:
    """h_Lambda(gamma): the product s_{gamma,l1} ... s_{gamma,lk}."""
    out = v
    for part in lam:
        out = s_apply(gamma, part, out)
    return out


def m_op(i: int, lam: Partition, v: FockVector) -> FockVector:
    """m_Lambda(alpha^(i)) = sum k_{Lambda'} h_{Lambda'}(-beta^(i))."""
    lat = v.lattice
    beta_i = vec_neg(lat.dual_basis_vector(i))
    out = zero_vector(v.coset)
    for lamp, k in sorted(m_in_h(lam).items()):
        out = out + h_op(beta_i, lamp, v).scale(k)
    return out


# -- integral and dual bases ----------------------------------------------------


@dataclass
class IntegralBasis:
    """Ordered homogeneous basis of an integral form up to a weight cutoff."""

    weight_cutoff: Fraction
    form_kind: str  # "standard" or "dual"
    vectors: list[FockVector] = field(default_factory=list)
    labels: list[tuple] = field(default_factory=list)  # (alpha, partition tuple)

    def __len__(self):
        return len(self.vectors)

    def by_weight(self):
        out: dict[Fraction, list[int]] = {}
        for idx, v in enumerate(self.vectors):
            out.setdefault(weight(v), []).append(idx)
        return out


def _partition_tuples(rank: int, budget: int):
    """All rank-tuples of partitions with total size <= budget, deterministic."""
    singles = {n: partitions_of(n) for n in range(budget + 1)}

    def rec(i, remaining):
        if i == rank:
            yield ()
            return
        for total in range(remaining + 1):
            for lam in singles[total]:
                for rest in rec(i + 1, remaining - total):
                    yield (lam,) + rest

    yield from rec(0, budget)


def integral_basis(coset: CosetLabel, cutoff: Fraction) -> IntegralBasis:
    """Basis of the standard integral form of V_{coset} up to the cutoff:
    h_{L1}(a^(1)) ... h_{Ll}(a^(l)) iota(e_alpha e_rep) over alpha in L."""
    lat = coset.lattice
    cutoff = Fraction(cutoff)
    if not lat.positive_definite:
        raise EnumerationUnsupportedError(
            "integral basis enumeration requires a positive-definite lattice")
    entries = []
    if cutoff >= 0:
        base = iota(lat, coset.rep)
        for gamma in lat.vectors_in_shifted_lattice(coset.rep, 2 * cutoff):
            alpha = vec_sub(gamma, coset.rep)  # in L
            charged = e_mult(alpha, base)
            budget = int(cutoff - lat.norm(gamma) / 2)
            for lams in _partition_tuples(lat.rank, budget):
                v = charged
                for i, lam in enumerate(lams):
                    if lam:
                        v = h_op(lat.basis_vector(i), lam, v)
                entries.append((weight(v), gamma, lams, alpha, v))
    entries.sort(key=lambda e: (e[0], e[1], e[2]))
    basis = IntegralBasis(cutoff, "standard")
    for w, gamma, lams, alpha, v in entries:
        basis.vectors.append(v)
        basis.labels.append((alpha, lams))
    return basis


def dual_basis(coset: CosetLabel, cutoff: Fraction) -> IntegralBasis:
    """Basis of the graded Z-dual form inside V_{coset}, ordered so that
    pair(dual_basis(beta)_i, integral_basis(-beta)_j) is exactly delta_ij.

    Vectors are (+-1) * m_{L1}(a^(1)) ... m_{Ll}(a^(l)) iota(e_alpha e_rep);
    the sign is (-1)^(<alpha,alpha>/2) eps(alpha,alpha) times a corrective
    eps-sign that accounts for the canonical representative of the opposite
    coset not being the literal negative of this coset's representative.
    """
    lat = coset.lattice
    cutoff = Fraction(cutoff)
    neg = coset.neg()
    partner = integral_basis(neg, cutoff)
    beta_rep = coset.rep
    lam0 = vec_add(beta_rep, neg.rep)  # in L
    basis = IntegralBasis(cutoff, "dual")
    for alpha2, lams in partner.labels:
        alpha = vec_neg(vec_add(alpha2, lam0))
        sign_exp = (
            lat.norm(alpha) / 4
            + lat.epsilon_exp(alpha, alpha)
            + lat.epsilon_exp(alpha2, neg.rep)
            + lat.epsilon_exp(vec_neg(alpha), vec_neg(beta_rep))
        )
        v = e_mult(alpha, iota(lat, beta_rep, lat.phase(sign_exp)))
        for i, lam in enumerate(lams):
            if lam:
                v = m_op(i, lam, v)
        basis.vectors.append(v)
        basis.labels.append((alpha, lams))
    return basis


# -- the invariant pairing -------------------------------------------------------


def _formform_exp(lat: EvenLattice, gamma: Vec, beta: Vec) -> Fraction:
    """Exponent of the renormalized charge pairing (iota(e_gamma), iota(e_-gamma))."""
    old = (
        lat.pairing(vec_add(gamma, vec_neg(vec_add(beta, beta))), gamma) / 4
        - lat.comm_exp(gamma, beta)
        - lat.epsilon_exp(gamma, gamma)
    )
    renorm = lat.norm(beta) / 4 + lat.comm_exp(beta, beta) + lat.epsilon_exp(beta, beta)
    return (old + renorm) % 1


def pair(u: FockVector, v: FockVector) -> Cyclotomic:
    """The renormalized invariant pairing between V_{beta+L} and V_{-beta+L}.

    beta is pinned to the canonical representative of u's coset; descendants
    are reduced by the adjoint rule <h(n)u', v> = -<u', h(-n)v>.
    """
    lat = u.lattice
    if v.coset != u.coset.neg():
        raise CosetMismatchError("pair needs vectors in opposite cosets")
    beta = u.coset.rep
    total = lat.field.zero()
    for mono, cu in u.terms.items():
        target = vec_neg(mono.charge)
        w_u = mono.weight(lat)
        sub = {m: c for m, c in v.terms.items()
               if m.charge == target and m.weight(lat) == w_u}
        if not sub:
            continue
        val = _pair_strip(lat, mono.modes, mono.charge, FockVector(v.coset, sub), beta)
        if not val.is_zero():
            total = total + cu * val
    return total


def _pair_strip(lat, modes, charge_u, v: FockVector, beta) -> Cyclotomic:
    if not modes:
        acc = lat.field.zero()
        base = lat.phase(_formform_exp(lat, charge_u, beta))
        for mono, cv in v.terms.items():
            if not mono.modes and mono.charge == vec_neg(charge_u):
                acc = acc + cv * base
        return acc
    (i, n) = modes[0]
    v2 = apply_mode(lat.basis_vector(i), n, v)
    if v2.is_zero():
        return lat.field.zero()
    return -_pair_strip(lat, modes[1:], charge_u, v2, beta)


def pair_charges(lat: EvenLattice, gamma: Vec, gamma2: Vec) -> Cyclotomic:
    """Closed-form pairing of two pure charge vectors (same normalization)."""
    if not vec_is_zero_sum(gamma, gamma2):
        return lat.field.zero()
    beta = lat.coset(gamma).rep
    return lat.phase(_formform_exp(lat, vec(gamma), beta))


def vec_is_zero_sum(a: Vec, b: Vec) -> bool:
    return all(x + y == 0 for x, y in zip(a, b))


# -- coordinates in a basis -------------------------------------------------------


def coordinates(v: FockVector, basis_vectors: list[FockVector]) -> list[Cyclotomic]:
    """Solve v = sum c_i b_i exactly over the cyclotomic field.

    Raises ValueError if v is not in the span.
    """
    lat = v.lattice
    field_ = lat.field
    monos = sorted({m for b in basis_vectors for m in b.terms} | set(v.terms),
                   key=lambda m: (m.charge, m.modes))
    if not basis_vectors:
        if v.is_zero():
            return []
        raise ValueError("vector not in span of empty basis")
    rows = len(monos)
    cols = len(basis_vectors)
    zero = field_.zero()
    a = [[basis_vectors[j].terms.get(monos[r], zero) for j in range(cols)] for r in range(rows)]
    rhs = [v.terms.get(monos[r], zero) for r in range(rows)]
    # Gaussian elimination over the field
    piv_rows = []
    r0 = 0
    for c in range(cols):
        sel = None
        for r in range(r0, rows):
            if not a[r][c].is_zero():
                sel = r
                break
        if sel is None:
            continue
        a[r0], a[sel] = a[sel], a[r0]
        rhs[r0], rhs[sel] = rhs[sel], rhs[r0]
        inv = a[r0][c].inverse()
        a[r0] = [x * inv for x in a[r0]]
        rhs[r0] = rhs[r0] * inv
        for r in range(rows):
            if r != r0 and not a[r][c].is_zero():
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[r0])]
                rhs[r] = rhs[r] - f * rhs[r0]
        piv_rows.append((r0, c))
        r0 += 1
        if r0 == rows:
            break
    coords = [field_.zero()] * cols
    for r, c in piv_rows:
        coords[c] = rhs[r]
    for r in range(rows):
        if r not in [pr for pr, _ in piv_rows] and not rhs[r].is_zero():
            raise ValueError("vector is not in the span of the basis")
    return coords
