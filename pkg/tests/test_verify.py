"""Camina pairs, Frobenius kernels, p-closedness and the trichotomy.

The centralizer-criterion path must agree with the definitional route on
every normal-subgroup pair of every corpus group before it is trusted at
scale; that oracle-equivalence gate lives here and in the acceptance suite.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from camina import (
    center,
    classify_camina,
    cyclic_group,
    dihedral_group,
    is_camina_pair,
    is_camina_pair_fast,
    is_frobenius_kernel,
    is_p_closed,
)
from camina.groups import conjugation_orbit, from_elements, _isin_sorted
from conftest import quaternion_group


# -- examples --------------------------------------------------------------------


def test_camina_examples(bundle22):
    assert is_camina_pair(bundle22.H, bundle22.Z).is_camina
    assert is_camina_pair(bundle22.K, bundle22.Z).is_camina


def test_camina_cyclic_counterexample():
    C4 = cyclic_group(4)
    C2 = from_elements(C4.ops, [0, 2])
    verdict = is_camina_pair(C4, C2)
    assert not verdict.is_camina
    assert verdict.witness is not None
    g, m = verdict.witness
    # the witness is genuinely non-conjugate (abelian: classes are singletons)
    assert g != m
    fast = is_camina_pair_fast(C4, C2)
    assert not fast.is_camina and fast.method == "centralizer-criterion"


def test_camina_dihedral(bundle21):
    D8 = dihedral_group(4)
    Z = center(D8)
    assert is_camina_pair(D8, Z).is_camina
    # H(1,2) realizes the same group on packed codes
    assert is_camina_pair(bundle21.H, bundle21.Z).is_camina


def test_degenerate_n_rejected(bundle22):
    with pytest.raises(ValueError):
        is_camina_pair(bundle22.H, bundle22.H)
    triv = from_elements(bundle22.ops, [bundle22.ops.identity])
    with pytest.raises(ValueError):
        is_camina_pair(bundle22.H, triv)
    with pytest.raises(ValueError):
        is_camina_pair(bundle22.K, bundle22.T)  # not normal


def test_witness_recheck_fails_definitionally(corpus_pairs):
    for name, G, N in corpus_pairs:
        if G.order > 100:
            continue
        verdict = is_camina_pair(G, N)
        if verdict.is_camina:
            continue
        g, m = verdict.witness
        orbit = conjugation_orbit(G, g)
        assert N.contains_scalar(G.ops.mul(G.ops.inv(g), m))  # m in gN
        assert not _isin_sorted(np.asarray([m]), orbit)[0], name


# -- Frobenius kernels --------------------------------------------------------------


def test_frobenius_examples(bundle22):
    assert is_frobenius_kernel(bundle22.T, bundle22.Z)
    assert not is_frobenius_kernel(bundle22.K, bundle22.Z)
    assert is_frobenius_kernel(bundle22.BF, bundle22.B)


def test_frobenius_s3():
    S3 = dihedral_group(3)
    C3 = from_elements(S3.ops, [0, 1, 2])
    assert is_frobenius_kernel(S3, C3)


def test_frobenius_camina_shortcut_agrees(corpus_pairs):
    for name, G, N in corpus_pairs:
        verdict = is_camina_pair_fast(G, N)
        if not verdict.is_camina:
            continue
        full = is_frobenius_kernel(G, N)
        fast = is_frobenius_kernel(G, N, camina=verdict)
        assert full == fast, name


# -- p-closedness --------------------------------------------------------------------


def test_p_closed_examples(bundle22):
    assert is_p_closed(bundle22.H, 2)  # p-group
    assert is_p_closed(bundle22.K, 2)
    assert not is_p_closed(bundle22.K, 3)
    S3 = dihedral_group(3)
    assert is_p_closed(S3, 3) and not is_p_closed(S3, 2)


def test_p_closed_winner_not_closed(pipeline_p2):
    winner = pipeline_p2.candidates[pipeline_p2.winners[0]]
    assert not is_p_closed(winner.handle, 2)


# -- classification ---------------------------------------------------------------------


def test_classify_examples(bundle22):
    D8 = dihedral_group(4)
    Z = center(D8)
    assert classify_camina(D8, Z, is_camina_pair(D8, Z)) == "cat1"
    vk = is_camina_pair(bundle22.K, bundle22.Z)
    assert classify_camina(bundle22.K, bundle22.Z, vk) == "cat3"
    vt = is_camina_pair(bundle22.T, bundle22.Z)
    assert classify_camina(bundle22.T, bundle22.Z, vt) == "frobenius"
    with pytest.raises(ValueError):
        classify_camina(bundle22.K, bundle22.Z,
                        is_camina_pair_fast(cyclic_group(4),
                                            from_elements(cyclic_group(4).ops, [0, 2])))


def test_q8_is_camina_cat1():
    Q8 = quaternion_group()
    Z = center(Q8)
    v = is_camina_pair(Q8, Z)
    assert v.is_camina
    assert classify_camina(Q8, Z, v) == "cat1"


# -- the oracle-equivalence gate ----------------------------------------------------------


def test_fast_equals_definitional_on_corpus(corpus_pairs):
    pairs = 0
    for name, G, N in corpus_pairs:
        slow = is_camina_pair(G, N)
        fast = is_camina_pair_fast(G, N)
        assert slow.is_camina == fast.is_camina, (name, G.order, N.order)
        pairs += 1
    assert pairs >= 100  # the corpus is meant to be substantial


def test_trichotomy_on_corpus(corpus_pairs):
    found_camina = 0
    for name, G, N in corpus_pairs:
        verdict = is_camina_pair(G, N)
        if not verdict.is_camina:
            continue
        found_camina += 1
        frob = is_frobenius_kernel(G, N, camina=verdict)
        index = G.order // N.order
        assert frob == (math.gcd(index, N.order) == 1), name
        label = classify_camina(G, N, verdict)
        n_is_primepower = _is_prime_power(N.order)
        q_is_primepower = _is_prime_power(index)
        assert frob or n_is_primepower or q_is_primepower, name
        assert label in ("frobenius", "cat1", "cat2", "cat3")
    assert found_camina >= 10


def _is_prime_power(m):
    if m < 2:
        return False
    d = 2
    while d * d <= m:
        if m % d == 0:
            while m % d == 0:
                m //= d
            return m == 1
        d += 1
    return True
