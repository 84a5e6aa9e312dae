"""Shared fixtures: construction bundles, pipelines, and the small-group corpus.

The corpus drives the oracle-equivalence and trichotomy sweeps: every fully
enumerated group of order <= 400 that shows up in the project (construction
subgroups, pipeline candidates, ad-hoc cyclic/dihedral/quaternion examples).
"""
from __future__ import annotations

import pytest

from camina import (
    build_bundle,
    cyclic_group,
    dihedral_group,
    group_from_mult,
    make_field,
    theorem_pipeline,
)

CORPUS_ORDER_LIMIT = 400


@pytest.fixture(scope="session")
def bundle21():
    return build_bundle(make_field(2, 1))


@pytest.fixture(scope="session")
def bundle22():
    return build_bundle(make_field(2, 2))


@pytest.fixture(scope="session")
def bundle31():
    return build_bundle(make_field(3, 1))


@pytest.fixture(scope="session")
def pipeline_p2():
    return theorem_pipeline(2)


@pytest.fixture(scope="session")
def pipeline_p3():
    return theorem_pipeline(3)


def quaternion_group():
    """Q8 as 0..7 = 1, -1, i, -i, j, -j, k, -k."""
    # sign, axis: element 2a + s encodes axis a in (1, i, j, k) with sign s
    mult_ijk = {
        (0, 0): (0, 0), (0, 1): (1, 0), (0, 2): (2, 0), (0, 3): (3, 0),
        (1, 0): (1, 0), (1, 1): (0, 1), (1, 2): (3, 0), (1, 3): (2, 1),
        (2, 0): (2, 0), (2, 1): (3, 1), (2, 2): (0, 1), (2, 3): (1, 0),
        (3, 0): (3, 0), (3, 1): (2, 0), (3, 2): (1, 1), (3, 3): (0, 1),
    }

    def mult(x, y):
        ax, sx = x // 2, x % 2
        ay, sy = y // 2, y % 2
        az, extra = mult_ijk[(ax, ay)]
        return 2 * az + (sx ^ sy ^ extra)

    return group_from_mult(8, mult, label="Q8")


def alternating_group_5():
    """A5 on 5 points, via composition of even permutations."""
    import itertools

    perms = [p for p in itertools.permutations(range(5)) if _parity(p) == 0]
    index = {p: i for i, p in enumerate(perms)}

    def mult(i, j):
        a, b = perms[i], perms[j]
        return index[tuple(a[b[t]] for t in range(5))]

    return group_from_mult(60, mult, label="A5")


def _parity(p):
    seen = [False] * len(p)
    par = 0
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        par ^= (length - 1) & 1
    return par


@pytest.fixture(scope="session")
def corpus(bundle21, bundle22, bundle31, pipeline_p2):
    """(name, handle) pairs: every corpus group with 3 < order <= 400."""
    groups = []
    for tag, b in (("2,1", bundle21), ("2,2", bundle22), ("3,1", bundle31)):
        for name in ("H", "K", "G", "Z", "B", "T", "BF", "fixed_points"):
            h = getattr(b, name)
            groups.append((f"{name}({tag})", h))
    groups.append(("M(p2)", pipeline_p2.M))
    for i, rec in enumerate(pipeline_p2.candidates):
        groups.append((f"candidate{i}(p2)", rec.handle))
    for m in (2, 3, 4, 6, 8, 12):
        groups.append((f"C{m}", cyclic_group(m)))
    for m in (3, 4, 6, 8):
        groups.append((f"D{2 * m}", dihedral_group(m)))
    groups.append(("Q8", quaternion_group()))

    seen = set()
    out = []
    for name, h in groups:
        if not (3 < h.order <= CORPUS_ORDER_LIMIT):
            continue
        key = (id(h.ops), h.key())
        if key in seen:
            continue
        seen.add(key)
        out.append((name, h))
    return out


@pytest.fixture(scope="session")
def corpus_pairs(corpus):
    """Every (name, G, N) with N a proper nontrivial normal subgroup of a
    corpus group; the normal-subgroup lattices are enumerated once."""
    from camina import normal_subgroups

    pairs = []
    for name, G in corpus:
        for N in normal_subgroups(G):
            if 1 < N.order < G.order:
                pairs.append((name, G, N))
    return pairs
