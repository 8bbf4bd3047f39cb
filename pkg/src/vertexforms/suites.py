"""Randomized verification suites wrapping the individual axiom checks.

Each suite runs a requested number of deterministic pseudo-random instances
and reports per-check pass counts with the first few failure witnesses.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .fock import iota, pair
from .lattice import EvenLattice
from .sampling import (
    random_dual_vector,
    random_homogeneous_vector,
    random_pure_charge_vector,
    random_vl_vector,
)
from .vertexops import (
    IntertwinerSpec,
    check_commform,
    check_commutator,
    check_derivative,
    check_iterate,
    check_skew_and_contragredient,
    check_weak_commutativity,
    max_annihilation_order,
    pairing_from_intertwiner,
)

CHECK_NAMES = ("commutator", "weak-commutativity", "iterate", "commform",
               "derivative", "transforms", "pairing-agreement")


def _random_coset(lat, rng):
    cosets = lat.all_cosets()
    return cosets[rng.randrange(len(cosets))]


def run_axiom_suite(lat: EvenLattice, checks, instances: int, max_weight,
                    seed: int, window=(-4, 3)) -> dict:
    max_weight = Fraction(max_weight)
    rng = random.Random(seed)
    report = {"lattice": lat.name or "", "seed": seed, "instances": instances,
              "checks": {}, "pass": True}
    for name in checks:
        if name not in CHECK_NAMES:
            raise ValueError(f"unknown check {name!r}; choose from {CHECK_NAMES}")
        passed = 0
        failures = []
        for t in range(instances):
            ok, witness = _run_one(lat, name, max_weight, rng, window)
            if ok:
                passed += 1
            elif len(failures) < 3:
                failures.append({"instance": t, "witness": witness})
        report["checks"][name] = {"passed": passed, "total": instances,
                                  "failures": failures}
        if passed != instances:
            report["pass"] = False
    return report


def _run_one(lat, name, max_weight, rng, window):
    if name == "commutator":
        cs1 = _random_coset(lat, rng)
        cs2 = _random_coset(lat, rng)
        w1 = random_pure_charge_vector(lat, cs1, max_weight, rng)
        w2 = random_homogeneous_vector(lat, cs2, max_weight, rng)
        h = random_dual_vector(lat, rng, 1)
        m = rng.randint(-2, 2)
        return check_commutator(h, m, w1, w2, window)
    if name == "weak-commutativity":
        v = random_vl_vector(lat, min(max_weight, Fraction(2)), rng)
        cs1 = _random_coset(lat, rng)
        cs2 = _random_coset(lat, rng)
        w1 = random_homogeneous_vector(lat, cs1, min(max_weight, Fraction(2)), rng)
        w2 = random_homogeneous_vector(lat, cs2, min(max_weight, Fraction(2)), rng)
        k = max_annihilation_order(v, w1)
        small = (window[0] // 2, (window[0] // 2) + 2)
        return check_weak_commutativity(v, k, w1, w2, small)
    if name == "iterate":
        v = random_vl_vector(lat, min(max_weight, Fraction(2)), rng)
        cs1 = _random_coset(lat, rng)
        cs2 = _random_coset(lat, rng)
        w1 = random_homogeneous_vector(lat, cs1, max_weight, rng)
        w2 = random_homogeneous_vector(lat, cs2, max_weight, rng)
        n = rng.randint(-2, 1)
        return check_iterate(v, n, w1, w2, (window[0], window[1] - 1))
    if name == "commform":
        v = random_vl_vector(lat, min(max_weight, Fraction(2)), rng)
        cs1 = _random_coset(lat, rng)
        cs2 = _random_coset(lat, rng)
        w1 = random_homogeneous_vector(lat, cs1, max_weight, rng)
        w2 = random_homogeneous_vector(lat, cs2, max_weight, rng)
        return check_commform(rng.randint(-1, 2), rng.randint(-1, 1), v, w1, w2)
    if name == "derivative":
        cs1 = _random_coset(lat, rng)
        cs2 = _random_coset(lat, rng)
        w1 = random_homogeneous_vector(lat, cs1, max_weight, rng)
        w2 = random_homogeneous_vector(lat, cs2, max_weight, rng)
        return check_derivative(w1, w2, window)
    if name == "transforms":
        cs1 = _random_coset(lat, rng)
        cs2 = _random_coset(lat, rng)
        spec = IntertwinerSpec.normalized(cs1, cs2)
        w1 = random_homogeneous_vector(lat, cs1, min(max_weight, Fraction(2)), rng)
        w2 = random_homogeneous_vector(lat, cs2, min(max_weight, Fraction(2)), rng)
        w3d = random_homogeneous_vector(lat, spec.target.neg(),
                                        min(max_weight, Fraction(2)), rng)
        return check_skew_and_contragredient(spec, w1, w2, w3d, (window[0] // 2, window[1] // 2 + 1))
    if name == "pairing-agreement":
        cs = _random_coset(lat, rng)
        u = random_homogeneous_vector(lat, cs, max_weight, rng)
        v = random_homogeneous_vector(lat, cs.neg(), max_weight, rng)
        lhs = pairing_from_intertwiner(u, v)
        rhs = pair(u, v)
        if lhs == rhs:
            return True, None
        return False, {"lhs": lhs.to_json(), "rhs": rhs.to_json()}
    raise AssertionError(name)
