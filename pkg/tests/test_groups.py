"""Generic group engine: closure, normality, classes, quotients, Sylow machinery.

Each algorithm is checked against a brute-force oracle on small groups
before the fast path is trusted anywhere else.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from camina import (
    CapacityError,
    UnsupportedOperationError,
    build_bundle,
    center,
    centralizer,
    closure,
    conjugacy_classes,
    core_p,
    cyclic_group,
    derived_subgroup,
    dihedral_group,
    exponent,
    is_normal,
    is_solvable,
    is_subgroup,
    make_field,
    normal_subgroups,
    p_length,
    quotient,
    residual_p,
    sylow_p,
)
from camina.groups import (
    from_elements,
    p_element_mask,
    p_prime_core,
    trivial_subgroup,
    vpow,
)
from conftest import alternating_group_5, quaternion_group


# -- oracles ------------------------------------------------------------------------


def brute_closure(ops, gens):
    known = {ops.identity, *gens}
    frontier = set(known)
    while frontier:
        new = set()
        for a in frontier:
            for g in gens:
                c = ops.mul(a, g)
                if c not in known:
                    new.add(c)
        known |= new
        frontier = new
    return sorted(known)


def brute_classes(G):
    u = [int(c) for c in G.universe]
    inv = {c: G.ops.inv(c) for c in u}
    remaining = set(u)
    classes = []
    while remaining:
        g = min(remaining)
        orbit = {G.ops.mul(G.ops.mul(x, g), inv[x]) for x in u}
        classes.append(sorted(orbit))
        remaining -= orbit
    return classes


def brute_is_normal(S, G):
    scodes = set(int(c) for c in S.universe)
    for g in G.universe:
        g = int(g)
        gi = G.ops.inv(g)
        if {G.ops.mul(G.ops.mul(g, s), gi) for s in scodes} != scodes:
            return False
    return True


# -- closure ------------------------------------------------------------------------


def test_closure_empty_is_trivial(bundle21):
    h = closure(bundle21.ops, [])
    assert h.order == 1
    assert int(h.universe[0]) == bundle21.ops.identity


def test_closure_of_central_element_is_Z(bundle21):
    z = bundle21.ops.join(0, 0, 1, 1, 0)
    h = closure(bundle21.ops, [z])
    assert h.order == 2
    assert h.same_group(bundle21.Z)


def test_closure_two_generators_full_heisenberg(bundle21):
    gens = [bundle21.ops.join(1, 0, 0, 1, 0), bundle21.ops.join(0, 1, 0, 1, 0)]
    h = closure(bundle21.ops, gens)
    assert h.order == 8
    assert h.universe.tolist() == brute_closure(bundle21.ops, gens)


def test_closure_matches_brute_oracle(bundle22):
    gens = list(bundle22.B.generators)
    h = closure(bundle22.ops, gens)
    assert h.universe.tolist() == brute_closure(bundle22.ops, gens)


def test_closure_capacity_error(bundle22):
    with pytest.raises(CapacityError):
        closure(bundle22.ops, bundle22.G.generators, cap=100)


# -- subgroup predicates ---------------------------------------------------------------


def test_normality_examples(bundle22):
    assert is_normal(bundle22.Z, bundle22.H)
    assert is_normal(trivial_subgroup(bundle22.ops), bundle22.G)
    assert is_normal(bundle22.B, bundle22.K)
    assert not is_normal(bundle22.T, bundle22.K)
    assert is_subgroup(bundle22.B, bundle22.H)
    assert not is_subgroup(bundle22.K, bundle22.H)


def test_normality_matches_exhaustive_oracle(corpus):
    for name, G in corpus:
        if G.order > 200:
            continue
        data = conjugacy_classes(G)
        # cyclic subgroups give a mix of normal and non-normal cases
        for rep in data.reps[: min(len(data.reps), 8)]:
            S = closure(G.ops, [int(rep)], cap=G.order)
            assert is_normal(S, G) == brute_is_normal(S, G), name


def test_centralizer_examples(bundle21):
    H = bundle21.H
    e = bundle21.ops.identity
    assert centralizer(H, e).same_group(H)
    z = bundle21.ops.join(0, 0, 1, 1, 0)
    assert centralizer(H, z).same_group(H)  # central element
    a = bundle21.ops.join(1, 0, 0, 1, 0)
    assert centralizer(H, a).order == 4


def test_center_derived_examples(bundle22, bundle31):
    C12 = cyclic_group(12)
    assert center(C12).order == 12
    assert derived_subgroup(C12).order == 1
    assert center(bundle22.H).same_group(bundle22.Z)
    assert derived_subgroup(bundle22.H).same_group(bundle22.Z)
    assert center(bundle22.K).order == 1
    assert center(bundle31.H).same_group(bundle31.Z)


# -- conjugacy classes ------------------------------------------------------------------


def test_classes_abelian_are_singletons():
    C6 = cyclic_group(6)
    data = conjugacy_classes(C6)
    assert len(data.reps) == 6
    assert data.sizes.tolist() == [1] * 6


def test_classes_heisenberg_gf2(bundle21):
    data = conjugacy_classes(bundle21.H)
    assert sorted(data.sizes.tolist()) == [1, 1, 2, 2, 2]


def test_classes_match_brute_oracle(bundle21, bundle31):
    for G in (bundle21.H, bundle31.K, dihedral_group(6), quaternion_group()):
        data = conjugacy_classes(G)
        oracle = brute_classes(G)
        got = sorted(
            sorted(int(c) for c in G.universe[data.class_of == i])
            for i in range(len(data.reps)))
        assert got == sorted(oracle)
        # least-element representatives, ascending
        assert data.reps.tolist() == sorted(cl[0] for cl in oracle)


def test_class_size_times_centralizer_is_order(corpus):
    for name, G in corpus:
        data = conjugacy_classes(G)
        assert int(data.sizes.sum()) == G.order, name
        for i in range(len(data.reps)):
            cent = centralizer(G, int(data.reps[i]))
            assert int(data.sizes[i]) * cent.order == G.order, name
            assert int(data.centralizer_orders[i]) == cent.order, name


# -- quotients ----------------------------------------------------------------------


def test_quotient_by_whole_group(bundle21):
    Q = quotient(bundle21.H, bundle21.H)
    assert Q.order == 1


def test_quotient_by_residual_is_elementary_abelian(bundle22):
    R = residual_p(bundle22.K, 2)
    Q = quotient(bundle22.K, R)
    assert Q.order == 4
    assert (vpow(Q.ops, Q.universe, 2) == Q.ops.identity).all()


def test_quotient_projection_is_homomorphism(bundle22):
    for G, N in [(bundle22.H, bundle22.Z), (bundle22.K, bundle22.B),
                 (bundle22.G, bundle22.H)]:
        Q = quotient(G, N)
        u = G.universe
        rng = np.random.default_rng(5)
        xs = u[rng.integers(0, len(u), 40)]
        ys = u[rng.integers(0, len(u), 40)]
        lhs = Q.proj(G.ops.vmul(xs, ys))
        rhs = Q.ops.vmul(Q.proj(xs), Q.proj(ys))
        assert (lhs == rhs).all()
        for a in G.generators:
            for b in G.generators:
                assert Q.proj_scalar(G.ops.mul(a, b)) == Q.ops.mul(
                    Q.proj_scalar(a), Q.proj_scalar(b))


def test_quotient_requires_normal(bundle22):
    with pytest.raises(ValueError):
        quotient(bundle22.K, bundle22.T)


def test_quotient_capacity(bundle22):
    with pytest.raises(CapacityError):
        quotient(bundle22.G, bundle22.Z, cap=10)


# -- Sylow machinery -----------------------------------------------------------------


def test_sylow_of_p_group_is_whole(bundle21):
    assert sylow_p(bundle21.H, 2).same_group(bundle21.H)


def test_sylow_examples(bundle22):
    assert sylow_p(bundle22.K, 2).same_group(bundle22.H)
    assert sylow_p(bundle22.K, 3).order == 3


def test_sylow_order_is_p_part(corpus):
    for name, G in corpus:
        for p in (2, 3):
            P = sylow_p(G, p)
            target = 1
            m = G.order
            while m % p == 0:
                m //= p
                target *= p
            assert P.order == target, name
            # p-element mask really is the p-element mask
            mask = p_element_mask(G, p)
            assert bool(mask[G.index_of_scalar(G.ops.identity)])


def test_core_residual_examples(bundle22):
    H = bundle22.H
    assert core_p(H, 2).same_group(H)
    assert residual_p(H, 2).order == 1
    R = residual_p(bundle22.K, 2)
    assert R.same_group(bundle22.BF)
    assert bundle22.K.order // R.order == 4
    assert core_p(bundle22.G, 2).same_group(bundle22.H)
    assert core_p(bundle22.K, 2).same_group(bundle22.H)


def test_core_residual_invariants(corpus):
    for name, G in corpus:
        if G.order > 200:
            continue
        normals = normal_subgroups(G)
        for p in (2, 3):
            if G.order % p:
                continue
            core = core_p(G, p)
            assert is_normal(core, G), name
            assert core.order == _p_part(core.order, p), name
            res = residual_p(G, p)
            assert is_normal(res, G), name
            index = G.order // res.order
            assert index == _p_part(index, p), name
            # minimality: contained in every normal subgroup with p-group quotient
            for N in normals:
                if _p_part(G.order // N.order, p) == G.order // N.order:
                    assert is_subgroup(res, N), name
            # maximality of the core: contains every normal p-subgroup
            for N in normals:
                if N.order == _p_part(N.order, p):
                    assert is_subgroup(N, core), name


def _p_part(m, p):
    t = 1
    while m % p == 0:
        m //= p
        t *= p
    return t


def test_p_prime_core_matches_lattice_oracle(corpus):
    for name, G in corpus:
        if G.order > 200:
            continue
        normals = normal_subgroups(G)
        for p in (2, 3):
            got = p_prime_core(G, p)
            best = max((N for N in normals if math.gcd(N.order, p) == 1),
                       key=lambda N: N.order)
            assert got.order == best.order, name
            assert got.same_group(best), name


# -- p-length and solvability ----------------------------------------------------------


def test_p_length_examples(bundle22):
    assert p_length(bundle22.H, 2) == 1  # nontrivial p-group
    assert p_length(bundle22.K, 2) == 1  # p-closed with p'-top
    assert p_length(cyclic_group(12), 2) == 1
    assert p_length(cyclic_group(12), 5) == 0


def test_p_length_zero_iff_coprime(corpus):
    for name, G in corpus:
        if G.order > 200:
            continue
        for p in (2, 3, 5):
            assert (p_length(G, p) == 0) == (G.order % p != 0), name


def test_p_length_rejects_nonsolvable():
    A5 = alternating_group_5()
    assert not is_solvable(A5)
    with pytest.raises(UnsupportedOperationError):
        p_length(A5, 2)


def test_solvable_examples(bundle22):
    assert is_solvable(bundle22.G)
    assert is_solvable(dihedral_group(8))


def test_exponent():
    assert exponent(cyclic_group(12)) == 12
    assert exponent(dihedral_group(4)) == 4
    assert exponent(quaternion_group()) == 4


# -- misc ---------------------------------------------------------------------------


def test_normal_subgroups_of_d8():
    D8 = dihedral_group(4)
    orders = sorted(h.order for h in normal_subgroups(D8))
    assert orders == [1, 2, 4, 4, 4, 8]


def test_inverses_table(corpus):
    for name, G in corpus:
        inv = G.inverses()
        assert (G.ops.vmul(G.universe, inv) == G.ops.identity).all(), name


def test_unenumerated_handle_fails_loudly(bundle22):
    from camina.groups import GroupHandle

    h = GroupHandle(bundle22.ops, bundle22.K.generators, universe=None)
    with pytest.raises(UnsupportedOperationError):
        _ = h.order
    with pytest.raises(UnsupportedOperationError):
        conjugacy_classes(h)


def test_from_elements_sorts_and_dedupes(bundle21):
    h = from_elements(bundle21.ops, [bundle21.ops.identity, bundle21.ops.identity])
    assert h.order == 1
