"""Decision procedures for the defining properties of the construction.

A pair (G, N) with N normal is a Camina pair when every g outside N is
conjugate to the whole coset gN.  Two routes are provided:

* ``is_camina_pair`` -- definitional: one conjugation orbit per class of G
  outside N, checked to cover the representative's coset (the property is
  class-invariant, so class representatives suffice);
* ``is_camina_pair_fast`` -- centralizer criterion: |C_G(g)| = |C_{G/N}(gN)|
  for one lift per nonidentity class of G/N.  The criterion is gated by an
  oracle-equivalence suite against the definitional route on every small
  corpus group before being trusted; verdicts always record their method.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalError
from .groups import (
    GroupHandle,
    _check_common_ops,
    _isin_sorted,
    class_members,
    conjugacy_classes,
    conjugation_orbit,
    core_p,
    is_normal,
    quotient,
    sylow_p,
)


@dataclass
class CaminaVerdict:
    is_camina: bool
    method: str  # "definitional" or "centralizer-criterion"
    witness: tuple[int, int] | None = None  # (g, m): m in gN, not conjugate to g

    def __bool__(self) -> bool:
        return self.is_camina


def _validate_pair(G: GroupHandle, N: GroupHandle) -> None:
    _check_common_ops(G, N)
    G.require_enumeration()
    if N.require_enumeration() is None:
        raise ValueError("N must be enumerated")
    if N.order <= 1 or N.order >= G.order:
        raise ValueError("the Camina property needs 1 < N < G; degenerate N rejected")
    if not is_normal(N, G):
        raise ValueError("N is not normal in G")


def is_camina_pair(G: GroupHandle, N: GroupHandle) -> CaminaVerdict:
    """Definitional Camina test over class representatives outside N."""
    _validate_pair(G, N)
    ops = G.ops
    data = conjugacy_classes(G)
    ncodes = N.universe
    failing: list[int] = []
    for i in range(len(data.reps)):
        rep = int(data.reps[i])
        if N.contains_scalar(rep):
            continue
        coset = ops.vmul(rep, ncodes)
        members = class_members(G, i)
        if not _isin_sorted(coset, members).all():
            failing.append(i)
    if not failing:
        return CaminaVerdict(True, "definitional")
    parts = [class_members(G, i) for i in failing]
    g = int(min(int(p.min()) for p in parts))
    gi = int(data.class_of[G.index_of_scalar(g)])
    members = class_members(G, gi)
    coset = np.sort(ops.vmul(g, ncodes))
    missing = coset[~_isin_sorted(coset, members)]
    verdict = CaminaVerdict(False, "definitional", (g, int(missing[0])))
    if _recheck_witness(G, N, verdict.witness):
        raise InternalError("witness re-check claims the pair is fine")
    return verdict


def _recheck_witness(G: GroupHandle, N: GroupHandle, witness: tuple[int, int]) -> bool:
    """True when the witness pair is actually conjugate (i.e. not a witness)."""
    g, m = witness
    orbit = conjugation_orbit(G, g)
    return bool(_isin_sorted(np.asarray([m]), orbit)[0])


def is_camina_pair_fast(G: GroupHandle, N: GroupHandle) -> CaminaVerdict:
    """Centralizer-order criterion: |C_G(g)| = |C_{G/N}(gN)| for all g outside N.

    Must agree with the definitional route (oracle-equivalence suite); kept
    as the scale path for groups around 10^6 elements.
    """
    _validate_pair(G, N)
    Q = quotient(G, N)
    qdata = conjugacy_classes(Q)
    for i in range(len(qdata.reps)):
        if i == qdata.identity_class:
            continue
        lift = int(qdata.reps[i])  # coset representatives are group elements
        cent_q = Q.order // int(qdata.sizes[i])
        orbit = conjugation_orbit(G, lift)
        cent_g = G.order // orbit.size
        if cent_g != cent_q:
            coset = np.sort(G.ops.vmul(lift, N.universe))
            missing = coset[~_isin_sorted(coset, orbit)]
            if missing.size == 0:
                raise InternalError("centralizer mismatch without a coset witness")
            return CaminaVerdict(False, "centralizer-criterion", (lift, int(missing[0])))
    return CaminaVerdict(True, "centralizer-criterion")


def camina_auto(G: GroupHandle, N: GroupHandle, fast_threshold: int = 50_000) -> CaminaVerdict:
    """Definitional for small groups, centralizer criterion above the threshold."""
    if G.order > fast_threshold:
        return is_camina_pair_fast(G, N)
    return is_camina_pair(G, N)


def is_frobenius_kernel(G: GroupHandle, N: GroupHandle,
                        camina: CaminaVerdict | None = None) -> bool:
    """Is G a Frobenius group with kernel N?

    General route: gcd(|G:N|, |N|) = 1 plus C_G(n) <= N for every n != 1
    in N.  For a pair already verified Camina the coprimality test alone
    decides, which is the scale path.
    """
    _validate_pair(G, N)
    index = G.order // N.order
    if math.gcd(index, N.order) != 1:
        return False
    if camina is not None and camina.is_camina:
        return True
    ops = G.ops
    u = G.universe
    outside = ~_isin_sorted(u, N.universe)
    for n in N.universe:
        n = int(n)
        if n == ops.identity:
            continue
        commuting = ops.vmul(u, n) == ops.vmul(n, u)
        if (commuting & outside).any():
            return False
    return True


def is_p_closed(G: GroupHandle, p: int, sylow_hint=()) -> bool:
    """True when the Sylow p-subgroup is normal; cross-checked against O_p."""
    P = sylow_p(G, p, hint=sylow_hint)
    normal = is_normal(P, G)
    core = core_p(G, p, sylow=P)
    if normal != (core.order == P.order):
        raise InternalError("Sylow normality and |O_p| = |P| disagree")
    return normal


def _is_prime_power(m: int) -> int | None:
    """The prime p with m = p^k (k >= 1), or None."""
    if m < 2:
        return None
    d = 2
    while d * d <= m:
        if m % d == 0:
            while m % d == 0:
                m //= d
            return d if m == 1 else None
        d += 1
    return m


def classify_camina(G: GroupHandle, N: GroupHandle, verdict: CaminaVerdict) -> str:
    """Frobenius / cat1 / cat2 / cat3 trichotomy labels for a Camina pair."""
    if not verdict.is_camina:
        raise ValueError("classification requires a verified Camina pair")
    if is_frobenius_kernel(G, N, camina=verdict):
        return "frobenius"
    n_order = N.order
    index = G.order // N.order
    cat1 = _is_prime_power(G.order) is not None
    p2 = _is_prime_power(index)
    cat2 = p2 is not None and _is_prime_power(n_order) is None and n_order % p2 == 0
    p3 = _is_prime_power(n_order)
    cat3 = p3 is not None and _is_prime_power(index) is None and index % p3 == 0
    labels = [name for name, hit in
              [("cat1", cat1), ("cat2", cat2), ("cat3", cat3)] if hit]
    if len(labels) != 1:
        raise InternalError(f"trichotomy labels not unique: {labels}")
    return labels[0]
