"""Character tables: exactness, known degree patterns, induction/restriction,
Gagola detection, stabilizers."""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from camina import (
    ScaleError,
    center,
    conjugacy_classes,
    constituent_stabilizer,
    constituents,
    cyclic_group,
    dihedral_group,
    dixon_table,
    exponent,
    gagola_characters,
    gagola_consistency,
    group_from_mult,
    induce,
    inner_product,
    is_camina_pair,
    restrict,
)
from camina.chars import ClassFunction
from camina.cyclotomic import CycloRing, cyclotomic_polynomial
from camina.groups import from_elements
from conftest import quaternion_group


# -- degree oracle: the multiset of degrees is forced by sum d^2 = |G| when unique


def degree_multisets(order, k):
    """All ascending degree tuples (d_1 <= ... <= d_k) with sum d_i^2 = order."""
    out = []

    def rec(rest, slots, minimum, acc):
        if slots == 0:
            if rest == 0:
                out.append(tuple(acc))
            return
        d = minimum
        while d * d * slots <= rest:
            if order % d == 0:  # degrees divide the group order
                rec(rest - d * d, slots - 1, d, acc + [d])
            d += 1

    rec(order, k, 1, [])
    return out


@pytest.mark.parametrize("make,expected", [
    (lambda: cyclic_group(3), (1, 1, 1)),
    (lambda: dihedral_group(3), (1, 1, 2)),
    (lambda: dihedral_group(4), (1, 1, 1, 1, 2)),
    (lambda: quaternion_group(), (1, 1, 1, 1, 2)),
    (lambda: dihedral_group(6), (1, 1, 1, 1, 2, 2)),
])
def test_degrees_match_counting_oracle(make, expected):
    G = make()
    table = dixon_table(G)
    k = len(conjugacy_classes(G).reps)
    candidates = degree_multisets(G.order, k)
    assert candidates == [expected]  # the oracle pins the multiset uniquely
    assert tuple(sorted(int(d) for d in table.degrees)) == expected


def test_cyclic_values_are_roots_of_unity():
    C3 = cyclic_group(3)
    table = dixon_table(C3)
    ring = table.ring
    assert ring.m == 3
    rows = {tuple(map(tuple, row)) for row in table.values}
    one = tuple(ring.integer(1))
    omega = tuple(ring.root_power(1))
    omega2 = tuple(ring.root_power(2))
    assert rows == {
        (one, one, one),
        (one, omega, omega2),
        (one, omega2, omega),
    }


def test_table_ring_uses_group_exponent(bundle22):
    for G in (cyclic_group(6), dihedral_group(4), bundle22.K):
        assert dixon_table(G).ring.m == exponent(G)


def test_k22_table_frozen_values(bundle22):
    table = dixon_table(bundle22.K)
    assert table.k == 17
    assert sorted(int(d) for d in table.degrees) == [1] * 12 + [3] * 4 + [12]
    assert int((table.degrees ** 2).sum()) == 192


def test_g22_table(bundle22):
    table = dixon_table(bundle22.G)
    assert int((table.degrees ** 2).sum()) == 384


def test_orthogonality_is_validated_internally(corpus):
    # dixon_table raises InternalError unless exact row/column orthogonality
    # holds; here we re-verify row orthogonality independently for a sample
    for name, G in corpus:
        if G.order > 200 or len(conjugacy_classes(G).reps) > 30:
            continue
        table = dixon_table(G)
        ring = table.ring
        data = conjugacy_classes(G)
        for i in range(table.k):
            for j in range(table.k):
                acc = ring.zero
                for t in range(table.k):
                    acc = acc + int(data.sizes[t]) * ring.mul(
                        table.values[i, t], ring.conj(table.values[j, t]))
                assert ring.as_integer(acc) == (G.order if i == j else 0), name


def test_class_cap_and_order_cap():
    with pytest.raises(ScaleError):
        dixon_table(cyclic_group(61), class_cap=60)
    with pytest.raises(ScaleError):
        dixon_table(cyclic_group(10), order_cap=5)


def test_table_deterministic_under_relabeling():
    """An isomorphic relabeled copy yields the same table up to class order."""
    perm = [3, 0, 5, 1, 4, 2, 7, 6, 9, 8, 11, 10]
    C12 = cyclic_group(12)

    def relabeled(i, j):
        return perm.index(C12.ops.mul(perm[i], perm[j]))

    A = dixon_table(C12)
    B = dixon_table(group_from_mult(12, relabeled, label="C12'"))
    assert A.degrees.tolist() == B.degrees.tolist()
    # map B's classes through the isomorphism i -> perm[i] into A's classes
    adata, bdata = conjugacy_classes(C12), conjugacy_classes(B.group)
    col_map = [int(adata.class_of[perm[int(r)]]) for r in bdata.reps]
    mapped = np.empty_like(B.values)
    for t in range(B.k):
        mapped[:, col_map[t], :] = B.values[:, t, :]
    rows_a = {row.tobytes() for row in A.values}
    rows_b = {row.tobytes() for row in mapped}
    assert rows_a == rows_b


# -- restriction, induction, reciprocity --------------------------------------------


def test_restrict_trivial_character(bundle22):
    table = dixon_table(bundle22.K)
    trivial = [i for i in range(table.k)
               if table.degrees[i] == 1 and
               all(table.ring.as_integer(v) == 1 for v in table.values[i])][0]
    chi = table.character(trivial)
    res = restrict(chi, bundle22.B)
    assert all(table.ring.as_integer(v) == 1 for v in res.values)


def test_induced_linear_of_c4_in_d8_is_irreducible():
    D8 = dihedral_group(4)
    C4 = from_elements(D8.ops, [0, 1, 2, 3])
    tc4 = dixon_table(C4)
    td8 = dixon_table(D8)
    # a faithful linear character of C4 is not D8-invariant; its induction
    # is the unique degree-2 irreducible
    faithful = [i for i in range(4)
                if tc4.ring.as_integer(tc4.values[i, 1]) is None][0]
    lam = tc4.character(faithful)
    chi = induce(lam, D8)
    assert chi.degree == 2
    assert inner_product(chi, chi) == 1  # irreducible
    two_dim = [i for i in range(td8.k) if td8.degrees[i] == 2][0]
    assert np.array_equal(chi.values, td8.values[two_dim])


def test_frobenius_reciprocity_exhaustive(bundle22, pipeline_p2):
    cases = [
        (dihedral_group(4), None),
        (bundle22.K, pipeline_p2.M),
    ]
    D8, _ = cases[0]
    C4 = from_elements(D8.ops, [0, 1, 2, 3])
    cases[0] = (D8, C4)
    for G, M in cases:
        tg = dixon_table(G)
        tm = dixon_table(M)
        for i in range(tm.k):
            phi = tm.character(i)
            ind = induce(phi, G)
            for j in range(tg.k):
                chi = tg.character(j)
                lhs = inner_product(restrict(chi, M), phi)
                rhs = inner_product(ind, chi)
                assert lhs == rhs


def test_theta_m_constituents_induce_back(bundle22, pipeline_p2):
    tK = dixon_table(bundle22.K)
    theta = tK.character(gagola_characters(tK)[0].index)
    M = pipeline_p2.M
    tM = dixon_table(M)
    cons = constituents(restrict(theta, M), tM)
    assert len(cons) == 2 and all(m == 1 for _, m in cons)
    for i, _ in cons:
        back = induce(tM.character(i), bundle22.K)
        assert np.array_equal(back.values, theta.values)


# -- constituent stabilizers ----------------------------------------------------------


def test_stabilizer_of_invariant_character_is_g(bundle22, pipeline_p2):
    M = pipeline_p2.M
    tM = dixon_table(M)
    trivial = [i for i in range(tM.k)
               if tM.degrees[i] == 1 and
               all(tM.ring.as_integer(v) == 1 for v in tM.values[i])][0]
    stab = constituent_stabilizer(bundle22.G, M, tM.character(trivial))
    assert stab.same_group(bundle22.G)


def test_conjugate_constituents_share_stabilizer(bundle22, pipeline_p2):
    tK = dixon_table(bundle22.K)
    theta = tK.character(gagola_characters(tK)[0].index)
    M = pipeline_p2.M
    tM = dixon_table(M)
    cons = constituents(restrict(theta, M), tM)
    stabs = [constituent_stabilizer(bundle22.G, M, tM.character(i)) for i, _ in cons]
    assert all(s.same_group(stabs[0]) for s in stabs)


def test_pipeline_failing_candidate_is_stabilizer(pipeline_p2):
    res = pipeline_p2
    stab_rec = res.candidates[res.stabilizer_index]
    assert not stab_rec.is_k
    assert stab_rec.passes is False


# -- Gagola reports ----------------------------------------------------------------------


def test_d8_gagola(bundle21):
    D8 = dihedral_group(4)
    table = dixon_table(D8)
    reports = gagola_characters(table)
    assert len(reports) == 1
    rep = reports[0]
    assert rep.degree == 2
    assert rep.minimal_normal.same_group(center(D8))
    assert is_camina_pair(D8, rep.minimal_normal).is_camina
    checks = gagola_consistency(D8, rep, 2)
    assert all(checks.values())
    # same group as packed Heisenberg codes
    t21 = dixon_table(bundle21.H)
    reps21 = gagola_characters(t21)
    assert len(reps21) == 1 and reps21[0].degree == 2
    assert reps21[0].minimal_normal.same_group(bundle21.Z)


def test_trivial_character_never_gagola():
    for G in (cyclic_group(6), dihedral_group(3)):
        for rep in gagola_characters(dixon_table(G)):
            assert rep.degree > 1


def test_k22_gagola_unique_degree_12(bundle22):
    table = dixon_table(bundle22.K)
    reports = gagola_characters(table)
    assert len(reports) == 1
    rep = reports[0]
    assert rep.degree == 12
    assert rep.minimal_normal.same_group(bundle22.Z)
    assert rep.ramification == 4
    checks = gagola_consistency(bundle22.K, rep, 2)
    assert all(checks.values())
    assert is_camina_pair(bundle22.K, rep.minimal_normal).is_camina


def test_k31_gagola(bundle31):
    table = dixon_table(bundle31.K)
    reports = gagola_characters(table)
    assert len(reports) == 1
    rep = reports[0]
    assert rep.degree == 6  # (|N| - 1) e = 2 * 3, e^2 = |P : N| = 27 / 3
    assert rep.minimal_normal.same_group(bundle31.Z)
    assert all(gagola_consistency(bundle31.K, rep, 3).values())


def test_h22_has_no_gagola_character(bundle22):
    # the center of H(F) splits into singleton classes, so no two-class
    # character exists before the F* action fuses them
    assert gagola_characters(dixon_table(bundle22.H)) == []


def test_winner_gagola_consistency(pipeline_p2):
    res = pipeline_p2
    winner = res.candidates[res.winners[0]]
    table = dixon_table(winner.handle)
    reports = gagola_characters(table)
    assert len(reports) == 1
    rep = reports[0]
    assert rep.degree == 12
    assert rep.minimal_normal.same_group(res.bundle.Z)
    checks = gagola_consistency(winner.handle, rep, 2)
    assert all(checks.values())
    # |H| = |H|_p (|N| - 1) with the numbers from the run: 192 = 64 * 3
    assert winner.handle.order == 64 * (rep.minimal_normal.order - 1)
    assert rep.ramification == 4  # 12 = (4 - 1) * 4, 16 = |P : N| = 64 / 4


# -- cyclotomic layer ---------------------------------------------------------------------


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)


def test_cyclotomic_ring_arithmetic():
    ring = CycloRing(12)
    z = ring.root_power(1)
    acc = ring.integer(1)
    for _ in range(12):
        acc = ring.mul(acc, z)
    assert ring.as_integer(acc) == 1  # zeta^12 = 1
    half = ring.root_power(6)
    assert ring.as_integer(half) == -1
    conj = ring.conj(z)
    assert np.array_equal(ring.mul(z, conj), ring.integer(1))
