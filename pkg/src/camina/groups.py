"""Generic finite-group engine over packed integer element codes.

Element arithmetic is supplied by an ``ElementOps`` object (scalar and
vectorized multiplication on integer codes).  Everything else -- closure,
normality, centralizers, conjugacy classes, quotients, Sylow subgroups,
cores, residuals, p-length -- is generic and works for any ops backend:
the packed semidirect-product elements, Cayley-table toy groups, and
quotient groups all go through the same code paths.

Determinism contract: the canonical order on elements is ascending packed
code; every "least representative" rule below refers to that order, so all
outputs are reproducible bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CapacityError,
    InternalError,
    SpecMismatchError,
    UnsupportedOperationError,
)

DEFAULT_ENUM_CAP = 2_000_000
DEFAULT_QUOTIENT_CAP = 200_000
DERIVED_SERIES_CAP = 64  # far beyond any real need; guards nontermination


def _isin_sorted(values: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Membership mask of ``values`` in the sorted unique array ``table``."""
    values = np.asarray(values, dtype=np.int64)
    if table.size == 0:
        return np.zeros(values.shape, dtype=bool)
    pos = np.searchsorted(table, values)
    out = np.zeros(values.shape, dtype=bool)
    inb = pos < table.size
    out[inb] = table[pos[inb]] == values[inb]
    return out


class ElementOps:
    """Scalar and vectorized group arithmetic on packed integer codes."""

    identity: int = 0

    def vmul(self, a, b) -> np.ndarray:
        raise NotImplementedError

    def mul(self, a: int, b: int) -> int:
        return int(self.vmul(np.asarray([a], dtype=np.int64), b)[0])

    def inv(self, a: int) -> int:
        # generic inverse by order: walk a, a^2, ... until the identity
        if a == self.identity:
            return a
        prev, cur = a, self.mul(a, a)
        while cur != self.identity:
            prev, cur = cur, self.mul(cur, a)
        return prev

    def order_of(self, a: int) -> int:
        k, cur = 1, a
        while cur != self.identity:
            cur = self.mul(cur, a)
            k += 1
        return k


def vpow(ops: ElementOps, codes, k: int) -> np.ndarray:
    """Elementwise k-th power (k >= 0) by binary squaring."""
    codes = np.asarray(codes, dtype=np.int64)
    result = np.full(codes.shape, ops.identity, dtype=np.int64)
    base = codes
    while k:
        if k & 1:
            result = ops.vmul(result, base)
        k >>= 1
        if k:
            base = ops.vmul(base, base)
    return result


class CayleyOps(ElementOps):
    """Ops backed by an explicit multiplication table (small ad-hoc groups)."""

    def __init__(self, table):
        self.table = np.ascontiguousarray(table, dtype=np.int64)
        m = self.table.shape[0]
        if self.table.shape != (m, m):
            raise ValueError("multiplication table must be square")
        idx = np.arange(m)
        ident = [e for e in range(m)
                 if (self.table[e] == idx).all() and (self.table[:, e] == idx).all()]
        if len(ident) != 1:
            raise ValueError("table has no (or no unique) identity")
        self.identity = ident[0]

    def vmul(self, a, b) -> np.ndarray:
        return self.table[np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)]

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])


def group_from_mult(size: int, mult, label: str | None = None) -> "GroupHandle":
    """Build a fully enumerated group from a multiplication function on 0..size-1."""
    table = [[mult(i, j) for j in range(size)] for i in range(size)]
    ops = CayleyOps(table)
    return GroupHandle(ops, tuple(range(size)), np.arange(size, dtype=np.int64), label=label)


def cyclic_group(m: int) -> "GroupHandle":
    return group_from_mult(m, lambda i, j: (i + j) % m, label=f"C{m}")


def dihedral_group(m: int) -> "GroupHandle":
    """Dihedral group of order 2m: 0..m-1 rotations, m..2m-1 reflections."""

    def mult(i, j):
        ri, fi = i % m, i >= m
        rj, fj = j % m, j >= m
        r = (ri - rj) % m if fi else (ri + rj) % m
        return r + m * (fi ^ fj)

    return group_from_mult(2 * m, mult, label=f"D{2 * m}")


# -- handles -------------------------------------------------------------------


class GroupHandle:
    """A realized finite group: generators plus (usually) a sorted element universe.

    Structural artifacts (inverses, class data, small generating sets) are
    cached lazily; after construction every query is read-only.
    """

    def __init__(self, ops: ElementOps, generators=(), universe: np.ndarray | None = None,
                 label: str | None = None):
        self.ops = ops
        self.generators = tuple(int(g) for g in generators)
        if universe is not None:
            universe = np.asarray(universe, dtype=np.int64)
            universe.setflags(write=False)
        self.universe = universe
        self.label = label
        self._inverses: np.ndarray | None = None
        self._classes: ClassData | None = None
        self._small_gens: tuple[int, ...] | None = None
        self._p_masks: dict[int, np.ndarray] = {}

    def __repr__(self) -> str:
        size = "?" if self.universe is None else len(self.universe)
        name = self.label or "group"
        return f"<{name}: order {size}>"

    @property
    def enumerated(self) -> bool:
        return self.universe is not None

    def require_enumeration(self) -> np.ndarray:
        if self.universe is None:
            raise UnsupportedOperationError(
                "operation requires an enumerated group (universe missing)")
        return self.universe

    @property
    def order(self) -> int:
        return len(self.require_enumeration())

    def contains(self, codes) -> np.ndarray:
        return _isin_sorted(np.asarray(codes, dtype=np.int64), self.require_enumeration())

    def contains_scalar(self, code: int) -> bool:
        return bool(self.contains(np.asarray([code]))[0])

    def index_of(self, codes) -> np.ndarray:
        """Positions of codes in the universe.  Codes must be members."""
        return np.searchsorted(self.require_enumeration(), np.asarray(codes, dtype=np.int64))

    def index_of_scalar(self, code: int) -> int:
        return int(np.searchsorted(self.require_enumeration(), code))

    def inverses(self) -> np.ndarray:
        """Inverse of every universe element, via the Lagrange power g^(|G|-1)."""
        if self._inverses is None:
            u = self.require_enumeration()
            inv = vpow(self.ops, u, self.order - 1)
            if not (self.ops.vmul(u, inv) == self.ops.identity).all():
                raise InternalError("inverse table failed the g*g^-1 = e check")
            inv.setflags(write=False)
            self._inverses = inv
        return self._inverses

    def small_generators(self) -> tuple[int, ...]:
        """A small generating set (the construction generators when present)."""
        if self.generators:
            return self.generators
        if self._small_gens is None:
            u = self.require_enumeration()
            gens: list[int] = []
            current = np.asarray([self.ops.identity], dtype=np.int64)
            while current.size < u.size:
                outside = u[~_isin_sorted(u, current)]
                gens.append(int(outside[0]))
                current = _closure_codes(self.ops, gens, cap=u.size)
            self._small_gens = tuple(gens)
        return self._small_gens

    def key(self) -> bytes:
        return self.require_enumeration().tobytes()

    def same_group(self, other: "GroupHandle") -> bool:
        return self.ops is other.ops and self.key() == other.key()


def _check_common_ops(*handles: GroupHandle) -> ElementOps:
    ops = handles[0].ops
    for h in handles[1:]:
        if h.ops is not ops:
            raise SpecMismatchError("handles live in different ambient arithmetics")
    return ops


def trivial_subgroup(ops: ElementOps) -> GroupHandle:
    return GroupHandle(ops, (), np.asarray([ops.identity], dtype=np.int64), label="1")


def from_elements(ops: ElementOps, codes, generators=(), label=None) -> GroupHandle:
    codes = np.unique(np.asarray(codes, dtype=np.int64))
    return GroupHandle(ops, generators, codes, label=label)


# -- closure -------------------------------------------------------------------


def _closure_codes(ops: ElementOps, generators, cap: int,
                   abort_new=None) -> np.ndarray | None:
    """Sorted codes of the subgroup generated by ``generators``.

    ``abort_new``, when given, is called on each batch of newly discovered
    elements; a truthy return abandons the closure and yields None.
    Raises CapacityError when the closure passes ``cap`` elements.
    """
    gens = [int(g) for g in generators]
    known = np.unique(np.asarray([ops.identity, *gens], dtype=np.int64))
    if abort_new is not None and abort_new(known):
        return None
    frontier = known
    while frontier.size:
        if gens:
            new = np.unique(np.concatenate([ops.vmul(frontier, g) for g in gens]))
        else:
            new = np.empty(0, dtype=np.int64)
        new = new[~_isin_sorted(new, known)]
        if new.size and abort_new is not None and abort_new(new):
            return None
        known = np.union1d(known, new)
        if known.size > cap:
            raise CapacityError(
                f"closure exceeded the configured cap {cap} (reached {known.size})")
        frontier = new
    return known


def closure(ops: ElementOps, generators, cap: int = DEFAULT_ENUM_CAP,
            label: str | None = None) -> GroupHandle:
    """Subgroup generated by the given element codes, fully enumerated."""
    codes = _closure_codes(ops, generators, cap)
    return GroupHandle(ops, tuple(int(g) for g in generators), codes, label=label)


def _normal_closure_codes(ops: ElementOps, seed_gens, ambient_gens, cap: int,
                          abort_new=None) -> np.ndarray | None:
    """Codes of the normal closure of ``seed_gens`` under the ambient generators."""
    gens = list(dict.fromkeys(int(g) for g in seed_gens))
    conj = [(int(g), ops.inv(int(g))) for g in ambient_gens]
    while True:
        codes = _closure_codes(ops, gens, cap, abort_new=abort_new)
        if codes is None:
            return None
        fresh: list[int] = []
        for g, gi in conj:
            out = np.unique(ops.vmul(ops.vmul(g, codes), gi))
            outside = out[~_isin_sorted(out, codes)]
            if outside.size:
                fresh.extend(int(v) for v in outside[:4])
        if not fresh:
            return codes
        if abort_new is not None and abort_new(np.asarray(fresh, dtype=np.int64)):
            return None
        gens.extend(fresh)


# -- subgroup predicates ---------------------------------------------------------


def is_subgroup(S: GroupHandle, G: GroupHandle) -> bool:
    _check_common_ops(S, G)
    return bool(G.contains(S.require_enumeration()).all())


def is_normal(S: GroupHandle, G: GroupHandle) -> bool:
    """Conjugation-closure check on G's generators (sufficient by finiteness)."""
    ops = _check_common_ops(S, G)
    sub = S.require_enumeration()
    if not is_subgroup(S, G):
        return False
    for g in G.small_generators():
        gi = ops.inv(g)
        out = ops.vmul(ops.vmul(g, sub), gi)
        if not _isin_sorted(out, sub).all():
            return False
    return True


def centralizer(G: GroupHandle, code: int) -> GroupHandle:
    u = G.require_enumeration()
    mask = G.ops.vmul(u, int(code)) == G.ops.vmul(int(code), u)
    return GroupHandle(G.ops, (), u[mask], label="centralizer")


def center(G: GroupHandle) -> GroupHandle:
    u = G.require_enumeration()
    mask = np.ones(u.size, dtype=bool)
    for g in G.small_generators():
        mask &= G.ops.vmul(u, g) == G.ops.vmul(g, u)
    return GroupHandle(G.ops, (), u[mask], label="center")


def derived_subgroup(G: GroupHandle, cap: int = DEFAULT_ENUM_CAP) -> GroupHandle:
    """Normal closure of the commutators of all generator pairs."""
    ops = G.ops
    gens = G.small_generators()
    seeds = set()
    for a in gens:
        ai = ops.inv(a)
        for b in gens:
            bi = ops.inv(b)
            seeds.add(ops.mul(ops.mul(a, b), ops.mul(ai, bi)))
    seeds.discard(ops.identity)
    if not seeds:
        return trivial_subgroup(ops)
    codes = _normal_closure_codes(ops, sorted(seeds), gens, cap)
    return GroupHandle(ops, (), codes, label="derived")


def intersection(A: GroupHandle, B: GroupHandle) -> GroupHandle:
    ops = _check_common_ops(A, B)
    codes = np.intersect1d(A.require_enumeration(), B.require_enumeration(),
                           assume_unique=True)
    return GroupHandle(ops, (), codes)


# -- conjugacy classes -----------------------------------------------------------


@dataclass
class ClassData:
    """Conjugacy classes: least-code representatives in ascending order."""

    reps: np.ndarray
    sizes: np.ndarray
    centralizer_orders: np.ndarray
    class_of: np.ndarray  # class index aligned with the universe
    identity_class: int

    def __len__(self) -> int:
        return len(self.reps)


def conjugacy_classes(G: GroupHandle) -> ClassData:
    if G._classes is not None:
        return G._classes
    u = G.require_enumeration()
    ops = G.ops
    pairs = [(g, ops.inv(g)) for g in G.small_generators()]
    class_of = np.full(u.size, -1, dtype=np.int32)
    reps: list[int] = []
    sizes: list[int] = []
    for i in range(u.size):
        if class_of[i] >= 0:
            continue
        ci = len(reps)
        class_of[i] = ci
        frontier = u[i:i + 1]
        total = 1
        while frontier.size:
            batches = [ops.vmul(ops.vmul(g, frontier), gi) for g, gi in pairs]
            new = np.unique(np.concatenate(batches)) if batches else np.empty(0, np.int64)
            idx = G.index_of(new)
            fresh = idx[class_of[idx] < 0]
            class_of[fresh] = ci
            total += fresh.size
            frontier = u[fresh]
        reps.append(int(u[i]))
        sizes.append(total)
    reps_arr = np.asarray(reps, dtype=np.int64)
    sizes_arr = np.asarray(sizes, dtype=np.int64)
    if int(sizes_arr.sum()) != u.size:
        raise InternalError("class sizes do not sum to the group order")
    cents = u.size // sizes_arr
    data = ClassData(reps_arr, sizes_arr, cents, class_of,
                     identity_class=int(class_of[G.index_of_scalar(ops.identity)]))
    G._classes = data
    return data


def class_members(G: GroupHandle, class_index: int) -> np.ndarray:
    data = conjugacy_classes(G)
    return G.require_enumeration()[data.class_of == class_index]


def conjugation_orbit(G: GroupHandle, code: int) -> np.ndarray:
    """Sorted conjugacy class of one element, grown by generator conjugation."""
    ops = G.ops
    pairs = [(g, ops.inv(g)) for g in G.small_generators()]
    known = np.asarray([int(code)], dtype=np.int64)
    frontier = known
    while frontier.size:
        batches = [ops.vmul(ops.vmul(g, frontier), gi) for g, gi in pairs]
        new = np.unique(np.concatenate(batches))
        new = new[~_isin_sorted(new, known)]
        known = np.union1d(known, new)
        frontier = new
    return known


def exponent(G: GroupHandle) -> int:
    data = conjugacy_classes(G)
    m = 1
    for rep in data.reps:
        m = math.lcm(m, G.ops.order_of(int(rep)))
    return m


# -- quotients -------------------------------------------------------------------


class QuotientOps(ElementOps):
    """Arithmetic on canonical (least-code) coset representatives."""

    def __init__(self, parent: GroupHandle, canon: np.ndarray):
        self.parent = parent
        self.canon = canon
        self.identity = int(canon[parent.index_of_scalar(parent.ops.identity)])

    def canonize(self, codes) -> np.ndarray:
        return self.canon[self.parent.index_of(codes)]

    def vmul(self, a, b) -> np.ndarray:
        return self.canonize(self.parent.ops.vmul(a, b))

    def mul(self, a: int, b: int) -> int:
        return int(self.canon[self.parent.index_of_scalar(self.parent.ops.mul(a, b))])


class QuotientHandle(GroupHandle):
    """G/N with canonical coset representatives and the projection map."""

    def __init__(self, ops: QuotientOps, generators, universe, parent: GroupHandle,
                 kernel: GroupHandle, label=None):
        super().__init__(ops, generators, universe, label=label)
        self.parent = parent
        self.kernel = kernel

    def proj(self, codes) -> np.ndarray:
        """Canonical projection: parent element codes -> coset representative codes."""
        return self.ops.canonize(codes)

    def proj_scalar(self, code: int) -> int:
        return int(self.ops.canon[self.parent.index_of_scalar(int(code))])


def quotient(G: GroupHandle, N: GroupHandle,
             cap: int = DEFAULT_QUOTIENT_CAP) -> QuotientHandle:
    """Quotient group G/N on canonical coset representatives.  N must be normal."""
    ops = _check_common_ops(G, N)
    if not is_normal(N, G):
        raise ValueError("quotient requires a normal subgroup")
    u = G.require_enumeration()
    ncodes = N.require_enumeration()
    index = G.order // N.order
    if index > cap:
        raise CapacityError(f"quotient index {index} exceeds the cap {cap}")

    canon = np.full(u.size, -1, dtype=np.int64)
    rep0 = int(ncodes.min())
    canon[G.index_of(ncodes)] = rep0
    step_gens = G.small_generators()
    frontier = np.asarray([rep0], dtype=np.int64)
    while frontier.size:
        new_reps: list[int] = []
        for g in step_gens:
            prods = ops.vmul(frontier, g)
            unseen = prods[canon[G.index_of(prods)] < 0]
            for t in unseen:
                t = int(t)
                if canon[G.index_of_scalar(t)] >= 0:
                    continue  # covered by a sibling coset in this batch
                coset = ops.vmul(t, ncodes)
                rep = int(coset.min())
                canon[G.index_of(coset)] = rep
                new_reps.append(rep)
        frontier = np.asarray(new_reps, dtype=np.int64)
    if (canon < 0).any():
        raise InternalError("coset scan failed to cover the group")
    canon.setflags(write=False)

    qops = QuotientOps(G, canon)
    reps = np.unique(canon)
    qgens = tuple(dict.fromkeys(
        int(canon[G.index_of_scalar(g)]) for g in step_gens))
    qgens = tuple(g for g in qgens if g != qops.identity) or (qops.identity,)
    label = f"{G.label or 'G'}/{N.label or 'N'}"
    return QuotientHandle(qops, qgens, reps, parent=G, kernel=N, label=label)


# -- Sylow machinery ---------------------------------------------------------------


def _p_part(m: int, p: int) -> int:
    t = 1
    while m % p == 0:
        m //= p
        t *= p
    return t


def p_element_mask(G: GroupHandle, p: int) -> np.ndarray:
    """Mask of elements whose order is a power of p (identity included)."""
    if p in G._p_masks:
        return G._p_masks[p]
    u = G.require_enumeration()
    steps = 0
    m = G.order
    while m % p == 0:
        m //= p
        steps += 1
    x = u
    for _ in range(steps):
        x = vpow(G.ops, x, p)
    mask = x == G.ops.identity
    mask.setflags(write=False)
    G._p_masks[p] = mask
    return mask


def sylow_p(G: GroupHandle, p: int, hint=()) -> GroupHandle:
    """A Sylow p-subgroup, by greedy growth with normalizing p-elements.

    ``hint`` may carry codes of a known p-subgroup to start from (the
    constructions module passes one); growth is deterministic either way.
    """
    u = G.require_enumeration()
    ops = G.ops
    target = _p_part(G.order, p)
    if target == 1:
        return trivial_subgroup(ops)
    pmask = p_element_mask(G, p)
    gens = [int(g) for g in hint]
    if not gens:
        candidates = u[pmask & (u != ops.identity)]
        gens = [int(candidates[0])]
    P = closure(ops, gens, cap=G.order, label=f"sylow_{p}")
    while P.order < target:
        inv_all = G.inverses()
        norm_mask = np.ones(u.size, dtype=bool)
        for s in P.small_generators():
            out = ops.vmul(ops.vmul(u, s), inv_all)
            norm_mask &= P.contains(out)
        cand = pmask & norm_mask & ~P.contains(u)
        if not cand.any():
            raise InternalError("Sylow growth stalled below the full p-part")
        g = int(u[cand][0])
        P = closure(ops, list(P.generators) + [g], cap=G.order, label=f"sylow_{p}")
    if P.order != target:
        raise InternalError("Sylow subgroup overshot the p-part")
    return P


def core_p(G: GroupHandle, p: int, sylow: GroupHandle | None = None) -> GroupHandle:
    """O_p(G): intersection of the conjugates of one Sylow p-subgroup."""
    ops = G.ops
    P = sylow if sylow is not None else sylow_p(G, p)
    codes = P.require_enumeration()
    gens = G.small_generators()
    changed = True
    while changed:
        changed = False
        for g in gens:
            gi = ops.inv(g)
            conj = np.sort(ops.vmul(ops.vmul(g, codes), gi))
            newc = np.intersect1d(codes, conj, assume_unique=True)
            if newc.size < codes.size:
                codes = newc
                changed = True
    return GroupHandle(ops, (), codes, label=f"O_{p}")


def residual_p(G: GroupHandle, p: int) -> GroupHandle:
    """O^p(G): the subgroup generated by all elements of order coprime to p."""
    u = G.require_enumeration()
    ops = G.ops
    x = u
    steps = 0
    m = G.order
    while m % p == 0:
        m //= p
        steps += 1
    for _ in range(steps):
        x = vpow(G.ops, x, p)
    pprime_parts = np.unique(x)  # p'-parts of every element
    gens: list[int] = []
    codes = np.asarray([ops.identity], dtype=np.int64)
    while True:
        outside = pprime_parts[~_isin_sorted(pprime_parts, codes)]
        if outside.size == 0:
            break
        gens.append(int(outside[0]))
        codes = _closure_codes(ops, gens, cap=G.order)
    return GroupHandle(ops, tuple(gens), codes, label=f"O^{p}")


def p_prime_core(G: GroupHandle, p: int) -> GroupHandle:
    """O_{p'}(G): the largest normal subgroup of order coprime to p.

    Greedy over conjugacy classes of p'-elements: a class joins the core
    exactly when the normal closure of (current core, class rep) stays a
    p'-group; the join of normal p'-subgroups is a normal p'-subgroup, so
    the greedy reaches the unique maximum.
    """
    ops = G.ops
    cap = G.order // _p_part(G.order, p)
    if cap == 1:
        return trivial_subgroup(ops)
    data = conjugacy_classes(G)
    pprime_rep = vpow(ops, data.reps, cap) == ops.identity  # order divides p'-part
    ambient = G.small_generators()

    psteps = 0
    m = G.order
    while m % p == 0:
        m //= p
        psteps += 1

    def has_p_element(batch: np.ndarray) -> bool:
        x = batch
        for _ in range(psteps):
            x = vpow(ops, x, p)
        return bool(((x == ops.identity) & (batch != ops.identity)).any())

    core_gens: list[int] = []
    codes = np.asarray([ops.identity], dtype=np.int64)
    changed = True
    while changed:
        changed = False
        for j in range(len(data.reps)):
            rep = int(data.reps[j])
            if not pprime_rep[j] or rep == ops.identity:
                continue
            if _isin_sorted(np.asarray([rep]), codes)[0]:
                continue
            try:
                trial = _normal_closure_codes(ops, core_gens + [rep], ambient,
                                              cap=cap, abort_new=has_p_element)
            except CapacityError:
                trial = None
            if trial is None:
                continue
            if trial.size % p == 0:
                raise InternalError("p-element slipped past the p'-core guard")
            codes = trial
            core_gens = core_gens + [rep]
            changed = True
    return GroupHandle(ops, tuple(core_gens), codes, label=f"O_{p}'")


# -- solvability and p-length -------------------------------------------------------


def is_solvable(G: GroupHandle) -> bool:
    cur = G
    for _ in range(DERIVED_SERIES_CAP):
        D = derived_subgroup(cur)
        if D.order == 1:
            return True
        if D.order == cur.order:
            return False
        cur = D
    raise InternalError("derived series did not stabilize within the step cap")


def p_length(G: GroupHandle, p: int, quotient_cap: int = DEFAULT_QUOTIENT_CAP) -> int:
    """Number of p-factors in the upper O_{p'}/O_p series of a solvable group."""
    G.require_enumeration()
    if not is_solvable(G):
        raise UnsupportedOperationError("p-length is defined here for solvable groups only")
    length = 0
    cur = G
    while cur.order > 1:
        top = p_prime_core(cur, p)
        if top.order == cur.order:
            break  # what remains is a p'-group
        if top.order > 1:
            cur = quotient(cur, top, cap=quotient_cap)
        P = core_p(cur, p)
        if P.order == 1:
            raise InternalError("upper p-series stalled on a solvable group")
        length += 1
        if P.order == cur.order:
            break
        cur = quotient(cur, P, cap=quotient_cap)
    return length


# -- normal subgroup lattice (small groups; used by the verification corpus) -------


def normal_subgroups(G: GroupHandle) -> list[GroupHandle]:
    """All normal subgroups, as joins of single-class normal closures."""
    ops = G.ops
    data = conjugacy_classes(G)
    ambient = G.small_generators()
    seeds: dict[bytes, np.ndarray] = {}
    triv = np.asarray([ops.identity], dtype=np.int64)
    seeds[triv.tobytes()] = triv
    for rep in data.reps:
        rep = int(rep)
        if rep == ops.identity:
            continue
        codes = _normal_closure_codes(ops, [rep], ambient, cap=G.order)
        seeds.setdefault(codes.tobytes(), codes)

    known = dict(seeds)
    worklist = list(seeds.values())
    while worklist:
        nxt: list[np.ndarray] = []
        for a in worklist:
            for b in list(known.values()):
                merged = np.union1d(a, b)
                if merged.size == max(a.size, b.size):
                    join = merged  # one factor contains the other
                else:
                    join = _closure_codes(ops, merged, cap=G.order)
                key = join.tobytes()
                if key not in known:
                    known[key] = join
                    nxt.append(join)
        worklist = nxt
    handles = [GroupHandle(ops, (), codes) for codes in known.values()]
    handles.sort(key=lambda h: (h.order, h.key()))
    return handles
