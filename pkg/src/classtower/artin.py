"""Layers between G and G', Artin transfers, and the multi-layered Artin pattern."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .pcgroup import PcGroup, Subgroup, abelian_invariants, derived_subgroup

__all__ = [
    "AbelianQuotient",
    "Layer",
    "Transfer",
    "ArtinPattern",
    "KernelCode",
    "commutator_quotient",
    "layer_count",
    "layer_subgroups",
    "transfer",
    "transfer_kernel",
    "kernel_code",
    "artin_pattern",
    "cycle_type",
    "format_invariants",
]

# 0 = total kernel, i >= 1 = the i-th layer-1 subgroup, otherwise "<r,...>"
# listing the smallest representatives of the G'-cosets in the kernel
KernelCode = Union[int, str]
TRIVIAL_KERNEL = "<0>"


@dataclass(eq=False)
class AbelianQuotient:
    """G/N for a normal subgroup N with abelian quotient, as coset labels."""

    group: PcGroup
    normal: Subgroup
    label: np.ndarray  # coset number of every element of G
    reps: np.ndarray  # smallest element of each coset, ascending
    table: np.ndarray  # coset multiplication table

    @property
    def order(self) -> int:
        return int(self.reps.size)

    def preimage(self, cosets) -> np.ndarray:
        return np.flatnonzero(np.isin(self.label, np.asarray(list(cosets))))


def commutator_quotient(G: PcGroup) -> AbelianQuotient:
    hit = G._cache.get("abelianization")
    if hit is not None:
        return hit
    Gp = derived_subgroup(G.whole())
    every = np.arange(G.order)
    least = every.copy()
    for h in Gp.elements[1:]:
        least = np.minimum(least, G.mul(every, int(h)))
    reps, label = np.unique(least, return_inverse=True)
    table = label[G.mul(reps[:, None], reps[None, :])]
    quotient = AbelianQuotient(G, Gp, label, reps, table)
    G._cache["abelianization"] = quotient
    return quotient


def layer_count(G: PcGroup) -> int:
    """v with p^v = |G/G'|."""
    A = commutator_quotient(G)
    v, n = 0, A.order
    while n > 1:
        n //= G.p
        v += 1
    return v


def _subgroups_of_quotient(A: AbelianQuotient) -> list[frozenset[int]]:
    """All subgroups of the (small) abelian quotient, as sets of coset numbers."""
    def close(start: set[int], extra: int) -> frozenset[int]:
        members = set(start)
        frontier = [extra] if extra not in members else []
        while frontier:
            x = frontier.pop()
            if x in members:
                continue
            members.add(x)
            frontier.extend(int(A.table[x, y]) for y in list(members))
        return frozenset(members)

    identity = int(A.label[0])
    found = {frozenset({identity})}
    todo = list(found)
    while todo:
        S = todo.pop()
        for a in range(A.order):
            if a not in S:
                T = close(S, a)
                if T not in found:
                    found.add(T)
                    todo.append(T)
    return list(found)


@dataclass(eq=False)
class Layer:
    index: int
    subgroups: tuple[Subgroup, ...]

    def __len__(self) -> int:
        return len(self.subgroups)

    def __iter__(self):
        return iter(self.subgroups)

    def __getitem__(self, i: int) -> Subgroup:
        return self.subgroups[i]


def layer_subgroups(G: PcGroup, n: int) -> Layer:
    """Lyr_n(G): subgroups H with G' <= H <= G and (G:H) = p^n.

    Members are ordered by the ascending list of smallest coset
    representatives (normal-form ranks) of their images in G/G'.
    """
    v = layer_count(G)
    if not 0 <= n <= v:
        raise ValueError(f"layer index {n} outside 0..{v}")
    key = ("layer", n)
    hit = G._cache.get(key)
    if hit is not None:
        return hit
    A = commutator_quotient(G)
    target = A.order // G.p**n
    chosen = [S for S in _subgroups_of_quotient(A) if len(S) == target]
    chosen.sort(key=lambda S: sorted(int(A.reps[c]) for c in S))
    members = []
    for S in chosen:
        extra = [int(A.reps[c]) for c in sorted(S) if A.reps[c] != 0]
        members.append(Subgroup(G, A.preimage(S), tuple(A.normal.generators) + tuple(extra)))
    layer = Layer(n, tuple(members))
    G._cache[key] = layer
    return layer


class Transfer:
    """The Artin transfer T_{G,H}: G -> H/H'.

    For a right transversal r_1..r_t of H in G,
    T(g) = prod_i r_i g r_{g(i)}^-1  mod H', where H r_{g(i)} = H r_i g.
    Values are returned as the smallest element of the H'-coset in H.
    """

    def __init__(self, G: PcGroup, H: Subgroup, transversal: Sequence[int] | None = None):
        Gp = derived_subgroup(G.whole())
        if H.group is not G or not Gp <= H:
            raise ValueError("transfer target must lie between G' and G")
        self.group = G
        self.subgroup = H
        self.target_derived = Hp = derived_subgroup(H)
        coset_of = np.full(G.order, -1, dtype=np.int64)
        reps: list[int] = []
        if transversal is None:
            while (coset_of < 0).any():
                r = int(np.flatnonzero(coset_of < 0)[0])
                coset_of[G.mul(H.elements, r)] = len(reps)
                reps.append(r)
        else:
            for r in transversal:
                members = G.mul(H.elements, int(r))
                if (coset_of[members] >= 0).any():
                    raise ValueError("transversal has two members in one coset")
                coset_of[members] = len(reps)
                reps.append(int(r))
            if (coset_of < 0).any():
                raise ValueError("transversal misses a coset")
        self.transversal = np.asarray(reps, dtype=np.int64)
        self.coset_of = coset_of
        least = H.elements.copy()
        for h in Hp.elements[1:]:
            least = np.minimum(least, G.mul(H.elements, int(h)))
        self.reduce = np.full(G.order, -1, dtype=np.int64)
        self.reduce[H.elements] = least

    def raw(self, g):
        """The transfer product as an element of H (before reduction mod H')."""
        G = self.group
        g = np.asarray(g, dtype=np.int64)
        acc = np.zeros_like(g)
        for r in self.transversal:
            y = G.mul(int(r), g)
            back = self.transversal[self.coset_of[y]]
            acc = G.mul(acc, G.mul(y, G.inv[back]))
        return acc

    def __call__(self, g):
        out = self.reduce[self.raw(g)]
        return out if np.ndim(out) else int(out)

    def induced(self) -> dict[int, int]:
        """The induced map G/G' -> H/H' on smallest coset representatives."""
        A = commutator_quotient(self.group)
        return {int(r): int(v) for r, v in zip(A.reps, np.atleast_1d(self(A.reps)))}


def transfer(G: PcGroup, H: Subgroup, transversal: Sequence[int] | None = None) -> Transfer:
    return Transfer(G, H, transversal)


def transfer_kernel(G: PcGroup, H: Subgroup) -> Subgroup:
    """ker T_{G,H}, returned as its preimage in G (a subgroup containing G')."""
    A = commutator_quotient(G)
    T = Transfer(G, H)
    images = np.atleast_1d(T(A.reps))
    ker = [c for c in range(A.order) if images[c] == 0]
    extra = [int(A.reps[c]) for c in ker if A.reps[c] != 0]
    return Subgroup(G, A.preimage(ker), tuple(A.normal.generators) + tuple(extra))


def kernel_code(G: PcGroup, K: Subgroup) -> KernelCode:
    if K.order == G.order:
        return 0
    A = commutator_quotient(G)
    if K.order == A.normal.order:
        return TRIVIAL_KERNEL
    if K.order * G.p == G.order:
        for i, L in enumerate(layer_subgroups(G, 1), start=1):
            if L == K:
                return i
    reps = sorted({int(A.reps[A.label[x]]) for x in K.elements})
    return "<" + ",".join(str(r) for r in reps) + ">"


def format_invariants(inv: Sequence[int]) -> str:
    return "(" + ",".join(str(e) for e in inv) + ")"


@dataclass(frozen=True)
class ArtinPattern:
    """Multi-layered transfer target type and transfer kernel type.

    ``ttt[n]`` lists the logarithmic abelian invariants of H/H' for H in
    layer n, ``tkt[n]`` the kernel codes of the transfers to those H.
    """

    ttt: tuple[tuple[tuple[int, ...], ...], ...]
    tkt: tuple[tuple[KernelCode, ...], ...]

    def __post_init__(self):
        if len(self.ttt) != len(self.tkt):
            raise ValueError("TTT and TKT must have the same number of layers")
        for n, (t, k) in enumerate(zip(self.ttt, self.tkt)):
            if len(t) != len(k):
                raise ValueError(f"layer {n}: {len(t)} targets but {len(k)} kernels")

    @property
    def layers(self) -> int:
        return len(self.ttt)

    def targets(self, n: int) -> Counter:
        """Unordered TTT of layer n, each component sorted descending."""
        return Counter(tuple(sorted(t, reverse=True)) for t in self.ttt[n])

    def to_text(self) -> str:
        lines = []
        for n, (t, k) in enumerate(zip(self.ttt, self.tkt)):
            tau = "[" + ",".join(format_invariants(x) for x in t) + "]"
            kappa = "(" + " ".join(str(c) for c in k) + ")"
            lines.append(f"tau{n} = {tau}; kappa{n} = {kappa}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> ArtinPattern:
        ttt, tkt = [], []
        for n, line in enumerate(ln for ln in text.splitlines() if ln.strip()):
            m = re.fullmatch(r"tau(\d+) = \[(.*)\]; kappa(\d+) = \((.*)\)", line.strip())
            if not m or int(m.group(1)) != n or int(m.group(3)) != n:
                raise ValueError(f"malformed pattern line: {line!r}")
            ttt.append(tuple(tuple(int(e) for e in grp.split(",") if e)
                             for grp in re.findall(r"\(([\d,]*)\)", m.group(2))))
            tkt.append(tuple(c if c.startswith("<") else int(c) for c in m.group(4).split()))
        return cls(tuple(ttt), tuple(tkt))


def cycle_type(codes: Sequence[KernelCode]) -> Counter | None:
    """Cycle lengths of i -> codes[i-1] if the codes form a permutation, else None."""
    k = len(codes)
    if sorted(c for c in codes if isinstance(c, int)) != list(range(1, k + 1)):
        return None
    seen = [False] * (k + 1)
    lengths: Counter = Counter()
    for start in range(1, k + 1):
        if seen[start]:
            continue
        length, x = 0, start
        while not seen[x]:
            seen[x] = True
            x = codes[x - 1]
            length += 1
        lengths[length] += 1
    return lengths


def artin_pattern(G: PcGroup) -> ArtinPattern:
    hit = G._cache.get("pattern")
    if hit is not None:
        return hit
    ttt, tkt = [], []
    for n in range(layer_count(G) + 1):
        layer = layer_subgroups(G, n)
        ttt.append(tuple(abelian_invariants(H) for H in layer))
        tkt.append(tuple(kernel_code(G, transfer_kernel(G, H)) for H in layer))
    pattern = ArtinPattern(tuple(ttt), tuple(tkt))
    G._cache["pattern"] = pattern
    return pattern
