"""Exact character tables by the modular (Dixon) method, and the
Gagola-character machinery built on top of them.

Pipeline: class-multiplication matrices -> simultaneous eigenvectors over
GF(ell) for the least prime ell = 1 (mod exponent) above 2*sqrt(|G|) ->
degrees via the orthogonality relation and a square root mod ell ->
exact cyclotomic values via discrete-Fourier multiplicity counts over the
power map on classes.  Zero-testing happens only after the cyclotomic
lift, and every returned table has passed exact row and column
orthogonality, so a value of zero in a table is a proven zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cyclotomic import CycloRing
from .errors import InternalError, ScaleError, SpecMismatchError
from .groups import (
    GroupHandle,
    _isin_sorted,
    _normal_closure_codes,
    class_members,
    conjugacy_classes,
    is_normal,
    is_subgroup,
    quotient,
    sylow_p,
)

CLASS_CAP = 60
ORDER_CAP = 10_000


# -- GF(ell) linear algebra ------------------------------------------------------


def _least_dixon_prime(order: int, m: int) -> int:
    from .fields import is_prime

    bound = 2 * int(np.sqrt(order)) + 1
    ell = m + 1
    while True:
        if ell > bound and is_prime(ell):
            return ell
        ell += m
    # unreachable


class _Fp:
    """Tiny dense linear algebra over GF(ell)."""

    def __init__(self, ell: int):
        self.ell = ell
        inv = np.zeros(ell, dtype=np.int64)
        inv[1:] = np.vectorize(lambda x: pow(int(x), ell - 2, ell))(np.arange(1, ell))
        self.inv = inv

    def matmul(self, A, B):
        return (A @ B) % self.ell

    def rref(self, A):
        """Reduced row echelon form; returns (rref, pivot column list)."""
        A = A % self.ell
        rows, cols = A.shape
        pivots = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            piv = None
            for i in range(r, rows):
                if A[i, c]:
                    piv = i
                    break
            if piv is None:
                continue
            if piv != r:
                A[[r, piv]] = A[[piv, r]]
            A[r] = (A[r] * self.inv[A[r, c]]) % self.ell
            mask = A[:, c].copy()
            mask[r] = 0
            A = (A - np.outer(mask, A[r])) % self.ell
            pivots.append(c)
            r += 1
        return A[:r], pivots

    def nullspace(self, A):
        """Rows spanning the right nullspace of A, in rref."""
        R, pivots = self.rref(A.copy())
        cols = A.shape[1]
        free = [c for c in range(cols) if c not in pivots]
        basis = np.zeros((len(free), cols), dtype=np.int64)
        for k, fc in enumerate(free):
            basis[k, fc] = 1
            for r, pc in enumerate(pivots):
                basis[k, pc] = (-R[r, fc]) % self.ell
        B, _ = self.rref(basis)
        return B

    def charpoly(self, A):
        """det(xI - A) mod ell via Hessenberg reduction (constant term first)."""
        ell = self.ell
        H = A % ell
        n = H.shape[0]
        H = H.copy()
        for c in range(n - 2):
            piv = None
            for r in range(c + 1, n):
                if H[r, c]:
                    piv = r
                    break
            if piv is None:
                continue
            if piv != c + 1:
                H[[c + 1, piv]] = H[[piv, c + 1]]
                H[:, [c + 1, piv]] = H[:, [piv, c + 1]]
            inv_p = self.inv[H[c + 1, c]]
            for r in range(c + 2, n):
                if H[r, c]:
                    f = (H[r, c] * inv_p) % ell
                    H[r] = (H[r] - f * H[c + 1]) % ell
                    H[:, c + 1] = (H[:, c + 1] + f * H[:, r]) % ell
        # recurrence on leading principal minors of xI - H
        polys = [np.asarray([1], dtype=np.int64)]
        for k in range(1, n + 1):
            prev = polys[k - 1]
            term = np.zeros(k + 1, dtype=np.int64)
            term[1:] = prev
            term[:-1] = (term[:-1] - H[k - 1, k - 1] * prev) % ell
            beta = 1
            for i in range(k - 1, 0, -1):
                beta = (beta * H[i, i - 1]) % ell
                coeff = (H[i - 1, k - 1] * beta) % ell
                if coeff:
                    term[:i] = (term[:i] - coeff * polys[i - 1]) % ell
            polys.append(term % ell)
        return polys[n]

    def poly_roots(self, coeffs):
        """All roots in GF(ell) (each listed once), ascending."""
        xs = np.arange(self.ell, dtype=np.int64)
        vals = np.zeros(self.ell, dtype=np.int64)
        for c in coeffs[::-1]:
            vals = (vals * xs + int(c)) % self.ell
        return xs[vals == 0]

    def sqrt(self, a: int) -> int | None:
        squares = (np.arange(self.ell, dtype=np.int64) ** 2) % self.ell
        hits = np.nonzero(squares == a % self.ell)[0]
        return int(hits[0]) if hits.size else None


# -- character tables --------------------------------------------------------------


@dataclass
class CharacterTable:
    group: GroupHandle
    ring: CycloRing
    values: np.ndarray   # (#chars, #classes, phi(m)) exact cyclotomic coordinates
    degrees: np.ndarray  # (#chars,)
    power_map: np.ndarray  # (#classes, m): class index of rep_i^j
    inverse_class: np.ndarray  # (#classes,)

    @property
    def class_data(self):
        return conjugacy_classes(self.group)

    @property
    def k(self) -> int:
        return self.values.shape[0]

    def character(self, index: int) -> "ClassFunction":
        return ClassFunction(self.group, self.ring, self.values[index].copy())


@dataclass
class ClassFunction:
    """Exact cyclotomic class function on a fully enumerated group."""

    group: GroupHandle
    ring: CycloRing
    values: np.ndarray  # (#classes, phi)

    @property
    def degree(self) -> int:
        data = conjugacy_classes(self.group)
        v = self.ring.as_integer(self.values[data.identity_class])
        if v is None:
            raise InternalError("degree is not a rational integer")
        return v

    def value_at(self, code: int) -> np.ndarray:
        data = conjugacy_classes(self.group)
        ci = int(data.class_of[self.group.index_of_scalar(int(code))])
        return self.values[ci]


def _power_map(G: GroupHandle, m: int) -> np.ndarray:
    data = conjugacy_classes(G)
    k = len(data.reps)
    pm = np.zeros((k, m), dtype=np.int64)
    for i in range(k):
        rep = int(data.reps[i])
        cur = G.ops.identity
        for j in range(m):
            pm[i, j] = data.class_of[G.index_of_scalar(cur)]
            cur = G.ops.mul(cur, rep)
    return pm


def dixon_table(G: GroupHandle, class_cap: int = CLASS_CAP,
                order_cap: int = ORDER_CAP) -> CharacterTable:
    """Exact character table of a fully enumerated group."""
    order = G.order
    if order > order_cap:
        raise ScaleError(f"character tables capped at order {order_cap}; got {order}")
    data = conjugacy_classes(G)
    k = len(data.reps)
    if k > class_cap:
        raise ScaleError(f"character tables capped at {class_cap} classes; got {k}")

    rep_orders = [G.ops.order_of(int(r)) for r in data.reps]
    m = 1
    for o in rep_orders:
        m = int(np.lcm(m, o))
    ring = CycloRing(m)
    pm = _power_map(G, m)
    inverse_class = pm[:, (m - 1) % m] if m > 1 else np.arange(k)

    ell = _least_dixon_prime(order, m)
    fp = _Fp(ell)

    # class multiplication coefficients: a[i][j, t] = #{u in C_i : u^{-1} r_t in C_j}
    u = G.universe
    inv_all = G.inverses()
    class_of_u = data.class_of
    mats = np.zeros((k, k, k), dtype=np.int64)
    for t in range(k):
        w = int(data.reps[t])
        prods = G.ops.vmul(inv_all, w)
        cj = data.class_of[G.index_of(prods)]
        flat = class_of_u.astype(np.int64) * k + cj
        counts = np.bincount(flat, minlength=k * k).reshape(k, k)
        mats[:, :, t] = counts
    # (M_i)_{j,t} = a_ijt acts on omega vectors: M_i omega = omega_i * omega

    # omega rows are right eigenvectors of M_i; in row convention they are
    # eigen-rows of N_i = M_i^T under right multiplication
    spaces = [np.eye(k, dtype=np.int64)]
    for i in range(k):
        if all(S.shape[0] == 1 for S in spaces):
            break
        if i == data.identity_class:
            continue
        Ni = mats[i].T % ell
        refined = []
        for S in spaces:
            if S.shape[0] == 1:
                refined.append(S)
                continue
            R, pivots = fp.rref(S.copy())
            X = fp.matmul(R, Ni)
            A = X[:, pivots]  # action in the subspace basis (invariant: Ms commute)
            roots = fp.poly_roots(fp.charpoly(A))
            for lam in roots:
                ns = fp.nullspace(
                    (A.T - int(lam) * np.eye(A.shape[0], dtype=np.int64)) % ell)
                if ns.shape[0] == 0:
                    continue
                refined.append(fp.matmul(ns, R))
        spaces = refined
    if len(spaces) != k or any(S.shape[0] != 1 for S in spaces):
        raise InternalError("eigenspace refinement did not fully split")

    sizes = data.sizes % ell
    inv_sizes = fp.inv[sizes]
    omegas = []
    for S in spaces:
        v = S[0] % ell
        if v[data.identity_class] == 0:
            raise InternalError("eigenvector vanishes on the identity class")
        v = (v * fp.inv[v[data.identity_class]]) % ell
        omegas.append(v)

    # z: a fixed primitive m-th root of unity in GF(ell)
    z = _primitive_root_of_unity(fp, m)
    zpow = np.ones(m, dtype=np.int64)
    for j in range(1, m):
        zpow[j] = (zpow[j - 1] * z) % ell
    inv_m = fp.inv[m % ell]

    rows = []
    degrees = []
    for v in omegas:
        s = int(((v * (v[inverse_class])) % ell * inv_sizes).sum() % ell)
        d2 = (order % ell) * fp.inv[s] % ell
        d = fp.sqrt(d2)
        if d is None:
            raise InternalError("degree square has no square root mod ell")
        if d > ell // 2:
            d = ell - d
        if d * d % ell != d2 or d <= 0:
            raise InternalError("degree reconstruction failed")
        X = (v * d) % ell * inv_sizes % ell  # chi(r_t) mod ell
        # Fourier multiplicity counts: mu_{t,r} = m^{-1} sum_j X(pm[t,j]) z^{-rj}
        Xp = X[pm]  # (k, m)
        Zmat = zpow[(-np.outer(np.arange(m), np.arange(m))) % m]  # (r, j)
        mu = (Xp @ Zmat.T) % ell
        mu = (mu * inv_m) % ell
        if (mu > d).any():
            raise InternalError("a lifted multiplicity exceeds the degree")
        vals = np.zeros((k, ring.phi), dtype=np.int64)
        for t in range(k):
            row = ring.zero
            for r in range(m):
                c = int(mu[t, r])
                if c:
                    row = row + c * ring.powers[r]
            vals[t] = row
        rows.append(vals)
        degrees.append(d)

    order_key = sorted(range(k), key=lambda i: (degrees[i], rows[i].tobytes()))
    values = np.stack([rows[i] for i in order_key])
    degs = np.asarray([degrees[i] for i in order_key], dtype=np.int64)

    table = CharacterTable(G, ring, values, degs, pm, np.asarray(inverse_class))
    _validate_table(table)
    return table


def _primitive_root_of_unity(fp: _Fp, m: int) -> int:
    ell = fp.ell
    if m == 1:
        return 1
    from .fields import _prime_divisors

    for w in range(2, ell):
        if all(pow(w, (ell - 1) // r, ell) != 1 for r in _prime_divisors(ell - 1)):
            return pow(w, (ell - 1) // m, ell)
    raise InternalError("no primitive root mod ell")


def _validate_table(table: CharacterTable) -> None:
    G = table.group
    ring = table.ring
    data = conjugacy_classes(G)
    k = table.k
    order = G.order
    if int((table.degrees ** 2).sum()) != order:
        raise InternalError("sum of squared degrees misses the group order")
    conj_rows = [ring.conj_batch(table.values[i]) for i in range(k)]
    for i in range(k):
        for j in range(i, k):
            acc = ring.zero
            for t in range(k):
                acc = acc + int(data.sizes[t]) * ring.mul(table.values[i, t],
                                                          conj_rows[j][t])
            expect = order if i == j else 0
            if ring.as_integer(acc) != expect:
                raise InternalError("row orthogonality failed exactly")
    for s in range(k):
        for t in range(s, k):
            acc = ring.zero
            for i in range(k):
                acc = acc + ring.mul(table.values[i, s], conj_rows[i][t])
            expect = int(data.centralizer_orders[s]) if s == t else 0
            if ring.as_integer(acc) != expect:
                raise InternalError("column orthogonality failed exactly")


# -- class function algebra ---------------------------------------------------------


def restrict(chi: ClassFunction, M: GroupHandle) -> ClassFunction:
    """Restriction of a class function to an enumerated subgroup."""
    G = chi.group
    if not is_subgroup(M, G):
        raise SpecMismatchError("restriction target is not a subgroup")
    gdata = conjugacy_classes(G)
    mdata = conjugacy_classes(M)
    vals = np.zeros((len(mdata.reps), chi.ring.phi), dtype=np.int64)
    for i in range(len(mdata.reps)):
        gi = int(gdata.class_of[G.index_of_scalar(int(mdata.reps[i]))])
        vals[i] = chi.values[gi]
    return ClassFunction(M, chi.ring, vals)


def induce(phi: ClassFunction, G: GroupHandle) -> ClassFunction:
    """Induction phi^G, evaluated exactly from the definition."""
    M = phi.group
    if not is_subgroup(M, G):
        raise SpecMismatchError("induction source is not a subgroup")
    gdata = conjugacy_classes(G)
    mdata = conjugacy_classes(M)
    ring = phi.ring
    u = G.universe
    inv_all = G.inverses()
    vals = np.zeros((len(gdata.reps), ring.phi), dtype=np.int64)
    for i in range(len(gdata.reps)):
        g = int(gdata.reps[i])
        conj = G.ops.vmul(G.ops.vmul(u, g), inv_all)  # x g x^{-1} for every x
        inside = M.contains(conj)
        if not inside.any():
            continue
        mi = mdata.class_of[M.index_of(conj[inside])]
        counts = np.bincount(mi, minlength=len(mdata.reps))
        total = ring.zero
        for ci, cnt in enumerate(counts):
            if cnt:
                total = total + int(cnt) * phi.values[ci]
        if (total % M.order != 0).any():
            raise InternalError("induction sum not divisible by |M|")
        vals[i] = total // M.order
    return ClassFunction(G, ring, vals)


def inner_product(chi: ClassFunction, psi: ClassFunction) -> int:
    """Exact <chi, psi>; raises when the result is not a rational integer."""
    if chi.group is not psi.group:
        raise SpecMismatchError("inner product needs class functions on one group")
    ring = chi.ring
    data = conjugacy_classes(chi.group)
    acc = ring.zero
    conj_vals = ring.conj_batch(psi.values)
    for t in range(len(data.reps)):
        acc = acc + int(data.sizes[t]) * ring.mul(chi.values[t], conj_vals[t])
    val = ring.as_integer(acc)
    if val is None or val % chi.group.order:
        raise InternalError("inner product is not a rational integer")
    return val // chi.group.order


def constituents(chi: ClassFunction, table: CharacterTable) -> list[tuple[int, int]]:
    """(irreducible index, multiplicity) pairs of a character of table.group."""
    if table.group is not chi.group:
        raise SpecMismatchError("constituents need the table of the same group")
    out = []
    for i in range(table.k):
        mult = inner_product(chi, table.character(i))
        if mult:
            out.append((i, mult))
    return out


def constituent_stabilizer(G: GroupHandle, M: GroupHandle,
                           mu: ClassFunction) -> GroupHandle:
    """{g in G : mu(g m g^{-1}) = mu(m) for all m}, for M normal in G."""
    if mu.group is not M:
        raise SpecMismatchError("mu must be a class function on M")
    if not is_normal(M, G):
        raise ValueError("constituent stabilizers need M normal in G")
    Q = quotient(G, M)
    mdata = conjugacy_classes(M)
    ops = G.ops
    keep = []
    for r in Q.universe:
        r = int(r)
        ri = ops.inv(r)
        ok = True
        for t in range(len(mdata.reps)):
            mrep = int(mdata.reps[t])
            image = ops.mul(ops.mul(r, mrep), ri)
            if (mu.value_at(image) != mu.values[t]).any():
                ok = False
                break
        if ok:
            keep.append(r)
    parts = [ops.vmul(r, M.universe) for r in keep]
    codes = np.sort(np.concatenate(parts))
    stab = GroupHandle(ops, tuple(M.small_generators()) + tuple(k for k in keep
                       if k != Q.ops.identity), codes, label="stabilizer")
    if not is_normal(stab, G):
        raise InternalError("constituent stabilizer is not normal in G")
    return stab


# -- Gagola characters ---------------------------------------------------------------


@dataclass
class GagolaReport:
    """An irreducible character vanishing on all but two classes."""

    index: int
    degree: int
    identity_class: int
    support_class: int  # the one other class with a nonzero value
    minimal_normal: GroupHandle  # recovered N = {1} u support class
    prime: int
    ramification: int | None  # e with degree = (|N| - 1) e, when integral


def gagola_characters(table: CharacterTable) -> list[GagolaReport]:
    """All Gagola characters of the table, with their recovered N validated."""
    G = table.group
    data = conjugacy_classes(G)
    ops = G.ops
    reports = []
    for i in range(table.k):
        nonzero = [t for t in range(table.k) if table.values[i, t].any()]
        if len(nonzero) != 2:
            continue
        if data.identity_class not in nonzero:
            raise InternalError("a two-class character misses the identity class")
        support = [t for t in nonzero if t != data.identity_class][0]
        ncodes = np.sort(np.concatenate([
            np.asarray([ops.identity], dtype=np.int64), class_members(G, support)]))
        N = GroupHandle(ops, (), ncodes, label="N")
        _validate_minimal_normal(G, N)
        p = _single_prime(N.order)
        degree = int(table.degrees[i])
        e = degree // (N.order - 1) if degree % (N.order - 1) == 0 else None
        reports.append(GagolaReport(i, degree, data.identity_class, support, N, p, e))
    return reports


def _single_prime(m: int) -> int:
    from .verify import _is_prime_power

    p = _is_prime_power(m)
    if p is None:
        raise InternalError("recovered N is not of prime power order")
    return p


def _validate_minimal_normal(G: GroupHandle, N: GroupHandle) -> None:
    ops = G.ops
    codes = N.universe
    prods = ops.vmul(codes[:, None], codes[None, :]).ravel()
    if not _isin_sorted(prods, codes).all():
        raise InternalError("recovered N is not closed under multiplication")
    if not is_normal(N, G):
        raise InternalError("recovered N is not normal")
    # elementary abelian: commuting and exponent p
    if not (ops.vmul(codes[:, None], codes[None, :])
            == ops.vmul(codes[None, :], codes[:, None])).all():
        raise InternalError("recovered N is not abelian")
    p = _single_prime(N.order)
    from .groups import vpow

    if not (vpow(ops, codes, p) == ops.identity).all():
        raise InternalError("recovered N is not elementary abelian")
    # minimality: the normal closure of every nonidentity element is N
    ambient = G.small_generators()
    for c in codes:
        c = int(c)
        if c == ops.identity:
            continue
        cl = _normal_closure_codes(ops, [c], ambient, cap=G.order)
        if cl.size != N.order:
            raise InternalError("recovered N is not a minimal normal subgroup")


def gagola_consistency(H: GroupHandle, report: GagolaReport, p: int) -> dict[str, bool]:
    """The structural facts a Gagola character forces; each reported pass/fail.

    (i)  H acts transitively on the nonidentity elements of N;
    (ii) |H| = |H|_p (|N| - 1);
    (iii) degree = (|N| - 1) e with e^2 = |P : N| for P a Sylow p-subgroup;
    (iv) the character vanishes outside N (two-class support by construction).
    """
    N = report.minimal_normal
    ncodes = N.universe
    nontrivial = ncodes[ncodes != H.ops.identity]
    from .groups import conjugation_orbit

    orbit = conjugation_orbit(H, int(nontrivial[0]))
    transitively = orbit.size == nontrivial.size and _isin_sorted(nontrivial, orbit).all()

    hp = 1
    order = H.order
    while order % p == 0:
        order //= p
        hp *= p
    size_identity = H.order == hp * (N.order - 1)

    P = sylow_p(H, p)
    ram = False
    if report.ramification is not None:
        e = report.ramification
        ram = (report.degree == (N.order - 1) * e) and (e * e * N.order == P.order)

    support = class_members(H, report.support_class)
    vanishing = _isin_sorted(support, ncodes).all()

    return {
        "transitive_on_N": bool(transitively),
        "order_identity": bool(size_identity),
        "ramification": bool(ram),
        "vanishes_off_N": bool(vanishing),
    }
