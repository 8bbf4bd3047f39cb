"""Deterministic random instances for the axiom and pairing suites."""

from __future__ import annotations

import random
from fractions import Fraction

from .fock import FockVector, apply_mode, iota, weight
from .lattice import CosetLabel, EvenLattice, vec_add, vec_scale


def random_charge(lat: EvenLattice, coset: CosetLabel, max_norm: Fraction,
                  rng: random.Random):
    choices = lat.vectors_in_shifted_lattice(coset.rep, max_norm)
    if not choices:
        raise ValueError("no charges below the requested norm in this coset")
    return choices[rng.randrange(len(choices))]


def random_pure_charge_vector(lat: EvenLattice, coset: CosetLabel,
                              max_weight: Fraction, rng: random.Random) -> FockVector:
    gamma = random_charge(lat, coset, 2 * max_weight, rng)
    c = rng.choice([1, -1, 2, 3])
    return iota(lat, gamma, c)


def random_homogeneous_vector(lat: EvenLattice, coset: CosetLabel,
                              max_weight: Fraction, rng: random.Random,
                              terms: int = 2) -> FockVector:
    """A nonzero homogeneous vector of weight <= max_weight in the coset."""
    gamma = random_charge(lat, coset, 2 * max_weight, rng)
    base_w = lat.norm(gamma) / 2
    budget = int(max_weight - base_w)
    extra = rng.randint(0, budget)
    target_w = base_w + extra
    out = None
    for _ in range(terms):
        gamma2 = random_charge(lat, coset, 2 * target_w, rng)
        room = target_w - lat.norm(gamma2) / 2
        if room.denominator != 1:
            continue
        parts_budget = int(room)
        v = iota(lat, gamma2, rng.choice([1, -1, 2]))
        remaining = parts_budget
        while remaining > 0:
            n = rng.randint(1, remaining)
            i = rng.randrange(lat.rank)
            v = apply_mode(lat.basis_vector(i), -n, v)
            remaining -= n
        out = v if out is None else out + v
    if out is None or out.is_zero():
        return iota(lat, gamma)
    assert weight(out) is not None
    return out


def random_dual_vector(lat: EvenLattice, rng: random.Random, size: int = 2):
    v = lat.zero()
    for d in lat.delta_basis:
        v = vec_add(v, vec_scale(d, rng.randint(-size, size)))
    return v


def random_lattice_vector(lat: EvenLattice, rng: random.Random, size: int = 2):
    v = lat.zero()
    for i in range(lat.rank):
        v = vec_add(v, vec_scale(lat.basis_vector(i), rng.randint(-size, size)))
    return v


def random_vl_vector(lat: EvenLattice, max_weight: Fraction, rng: random.Random) -> FockVector:
    return random_homogeneous_vector(lat, lat.zero_coset(), max_weight, rng)
