"""Finite p-groups given by polycyclic presentations.

A presentation has generators g_1..g_k with relative orders r_i (powers of p),
power relations g_i^{r_i} = w_i (a word in g_{i+1}..g_k) and conjugate
relations g_j^{g_i} = g_i^{-1} g_j g_i = c_ij (a word in g_j..g_k) for i < j.
Every element has a unique normal form g_1^{e_1}...g_k^{e_k}, 0 <= e_i < r_i,
stored as an exponent vector.

Internally generators are 0-based; the text format uses 1-based indices.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SizeGuardError",
    "PcPresentation",
    "PcGroup",
    "Subgroup",
    "CentralSeries",
    "size_guard",
    "collect",
    "consistency_check",
    "enumerate_elements",
    "closure",
    "normal_closure",
    "derived_subgroup",
    "abelian_invariants",
    "elementary_divisors",
    "lower_central_series",
]

Vector = tuple[int, ...]

DEFAULT_MAX_ORDER = 2**20
# exhaustive regular-action check in consistency_check, and Subgroup element sets
EXHAUSTIVE_LIMIT = 2**12


class SizeGuardError(ValueError):
    pass


def size_guard() -> int:
    """Largest group order the engine will enumerate (env CLASSTOWER_MAX_ORDER)."""
    value = os.environ.get("CLASSTOWER_MAX_ORDER")
    return int(value) if value else DEFAULT_MAX_ORDER


def _check_size(order: int) -> None:
    limit = size_guard()
    if order > limit:
        raise SizeGuardError(f"group order {order} exceeds the size guard {limit}")


def _is_power_of(r: int, p: int) -> bool:
    while r % p == 0:
        r //= p
    return r == 1


@dataclass(frozen=True)
class PcPresentation:
    p: int
    relative_orders: tuple[int, ...]
    powers: tuple[Vector, ...]
    conjugates: dict[tuple[int, int], Vector] = field(default_factory=dict)

    def __post_init__(self):
        g = len(self.relative_orders)
        if len(self.powers) != g:
            raise ValueError("one power relation per generator is required")
        for i, r in enumerate(self.relative_orders):
            if r < 2 or not _is_power_of(r, self.p):
                raise ValueError(f"relative order {r} of g{i + 1} is not a power of {self.p}")
        for i, w in enumerate(self.powers):
            self._check_word(w, first=i + 1, what=f"power relation of g{i + 1}")
        for (i, j), w in self.conjugates.items():
            if not 0 <= i < j < g:
                raise ValueError(f"conjugate relation ({i + 1},{j + 1}) out of range")
            self._check_word(w, first=j, what=f"conjugate relation g{j + 1}^g{i + 1}")

    def _check_word(self, w: Vector, first: int, what: str) -> None:
        if len(w) != len(self.relative_orders):
            raise ValueError(f"{what}: exponent vector has wrong length")
        for t, (e, r) in enumerate(zip(w, self.relative_orders)):
            if not 0 <= e < r:
                raise ValueError(f"{what}: exponent {e} of g{t + 1} out of range")
            if t < first and e:
                raise ValueError(f"{what}: involves g{t + 1}")

    @property
    def ngens(self) -> int:
        return len(self.relative_orders)

    @property
    def order(self) -> int:
        return math.prod(self.relative_orders)

    def conjugate(self, i: int, j: int) -> Vector:
        if (i, j) in self.conjugates:
            return self.conjugates[(i, j)]
        return tuple(1 if t == j else 0 for t in range(self.ngens))

    def identity(self) -> Vector:
        return (0,) * self.ngens

    def generator(self, i: int, e: int = 1) -> Vector:
        v = [0] * self.ngens
        v[i] = e
        return tuple(v)

    @cached_property
    def _collector(self) -> _Collector:
        return _Collector(self)

    def multiply(self, x: Sequence[int], y: Sequence[int]) -> Vector:
        z = list(x)
        self._collector.mul_vec(z, y, 0)
        return tuple(z)

    def inverse(self, x: Sequence[int]) -> Vector:
        return self._collector.inverse(tuple(x))

    def power(self, x: Sequence[int], k: int) -> Vector:
        if k < 0:
            x, k = self.inverse(x), -k
        result = list(self.identity())
        for _ in range(k):
            self._collector.mul_vec(result, x, 0)
        return tuple(result)

    # -- plain-text format -------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.p} {self.ngens}"]
        lines += [str(r) for r in self.relative_orders]
        for i, w in enumerate(self.powers):
            lines.append(f"P {i + 1} :" + _format_word(w))
        for (i, j) in sorted(self.conjugates):
            w = self.conjugates[(i, j)]
            if w != self.generator(j):
                lines.append(f"C {i + 1} {j + 1} :" + _format_word(w))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> PcPresentation:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty presentation")
        p, g = (int(t) for t in lines[0].split())
        orders = tuple(int(ln) for ln in lines[1 : 1 + g])
        if len(orders) != g:
            raise ValueError("missing relative orders")
        powers: list[Vector] = [(0,) * g for _ in range(g)]
        conjugates: dict[tuple[int, int], Vector] = {}
        for ln in lines[1 + g :]:
            head, _, body = ln.partition(":")
            parts = head.split()
            word = _parse_word(body, g)
            if parts[0] == "P" and len(parts) == 2:
                powers[int(parts[1]) - 1] = word
            elif parts[0] == "C" and len(parts) == 3:
                conjugates[(int(parts[1]) - 1, int(parts[2]) - 1)] = word
            else:
                raise ValueError(f"malformed relation line: {ln!r}")
        return cls(p, orders, tuple(powers), conjugates)


def _format_word(w: Vector) -> str:
    return "".join(f" g{t + 1}^{e}" for t, e in enumerate(w) if e)


def _parse_word(body: str, g: int) -> Vector:
    v = [0] * g
    for token in body.split():
        name, _, exp = token.partition("^")
        if not name.startswith("g"):
            raise ValueError(f"bad generator token {token!r}")
        v[int(name[1:]) - 1] += int(exp) if exp else 1
    return tuple(v)


class _Collector:
    """Collection from the left on mutable exponent lists."""

    def __init__(self, pres: PcPresentation):
        self.pres = pres
        self.r = pres.relative_orders
        self.g = pres.ngens
        self._conj_cache: dict[tuple[int, int, int], Vector] = {}
        self._inv_gen: dict[int, Vector] = {}

    def mul_vec(self, x: list[int], v: Sequence[int], start: int) -> None:
        for t in range(start, self.g):
            if v[t]:
                self.mul_gen(x, t, v[t])

    def mul_gen(self, x: list[int], j: int, k: int) -> None:
        """x <- x * g_j^k for k >= 0."""
        if k == 0:
            return
        tail = x[j + 1 :]
        if any(tail):
            for t in range(j + 1, self.g):
                x[t] = 0
            self.mul_gen(x, j, k)
            # tail * g_j^k = g_j^k * tail^(g_j^k)
            for l, e in enumerate(tail, start=j + 1):
                if e:
                    self.mul_vec(x, self.conj_power(j, k, l, e), l)
            return
        q, x[j] = divmod(x[j] + k, self.r[j])
        for _ in range(q):
            self.mul_vec(x, self.pres.powers[j], j + 1)

    def conj_power(self, j: int, k: int, l: int, e: int) -> Vector:
        """Normal form of (g_l^(g_j^k))^e."""
        key = (j, k, l, e)
        hit = self._conj_cache.get(key)
        if hit is not None:
            return hit
        if e > 1:
            base = self.conj_power(j, k, l, 1)
            z = list(self.conj_power(j, k, l, e - 1))
            self.mul_vec(z, base, l)
        elif k > 1:
            # conjugate g_l^(g_j^(k-1)) once more by g_j
            prev = self.conj_power(j, k - 1, l, 1)
            z = [0] * self.g
            for t in range(l, self.g):
                if prev[t]:
                    self.mul_vec(z, self.conj_power(j, 1, t, prev[t]), t)
        else:
            z = list(self.pres.conjugate(j, l))
        result = tuple(z)
        self._conj_cache[key] = result
        return result

    def inverse_gen(self, j: int) -> Vector:
        # g_j^-1 = g_j^(r_j - 1) * w_j^-1, with w_j in higher generators
        hit = self._inv_gen.get(j)
        if hit is None:
            z = [0] * self.g
            z[j] = self.r[j] - 1
            self.mul_vec(z, self.inverse(self.pres.powers[j]), j + 1)
            hit = self._inv_gen[j] = tuple(z)
        return hit

    def inverse(self, x: Vector) -> Vector:
        z = [0] * self.g
        for t in range(self.g - 1, -1, -1):
            if x[t]:
                step = self.inverse_gen(t)
                for _ in range(x[t]):
                    self.mul_vec(z, step, 0)
        return tuple(z)


def collect(pres: PcPresentation, word: Iterable[tuple[int, int]]) -> Vector:
    """Normal form of a word given as (generator, exponent) pairs; exponents may be negative."""
    col = pres._collector
    z = [0] * pres.ngens
    for gen, e in word:
        if not 0 <= gen < pres.ngens:
            raise IndexError(f"generator index {gen} out of range")
        if e >= 0:
            col.mul_gen(z, gen, e)
        else:
            step = col.inverse_gen(gen)
            for _ in range(-e):
                col.mul_vec(z, step, 0)
    return tuple(z)


def enumerate_elements(pres: PcPresentation) -> list[Vector]:
    """All normal forms in lexicographic order."""
    _check_size(pres.order)
    return list(itertools.product(*(range(r) for r in pres.relative_orders)))


def consistency_check(pres: PcPresentation) -> bool:
    """Check that the presentation defines a group of order prod(r_i).

    Runs the associativity test on all triples drawn from {g_i, g_i^(r_i - 1)}
    and checks that right multiplication by each generator permutes the
    prod(r_i) normal forms, reaching all of them from the identity.  Up to
    EXHAUSTIVE_LIMIT elements it also verifies (xy)g = x(yg) for all x, y and
    generators g.
    """
    g = pres.ngens
    if g == 0:
        return True
    special = [pres.generator(i) for i in range(g)]
    special += [pres.generator(i, pres.relative_orders[i] - 1) for i in range(g)
                if pres.relative_orders[i] > 2]
    mul = pres.multiply
    for a, b, c in itertools.product(special, repeat=3):
        if mul(mul(a, b), c) != mul(a, mul(b, c)):
            return False
    order = pres.order
    if order > size_guard():
        return True
    G = PcGroup(pres, check=False)
    for perm in G.generator_perms:
        if np.unique(perm).size != order:
            return False
    if closure(G, G.generators).order != order:
        return False
    if order <= EXHAUSTIVE_LIMIT:
        everything = np.arange(order)
        table = G.mul(everything[:, None], everything[None, :]).astype(np.int32)
        for perm in G.generator_perms:
            # (x y) g == x (y g)
            if not np.array_equal(perm[table], table[:, perm]):
                return False
    return True


class PcGroup:
    """Enumerated group of a presentation with vectorized arithmetic.

    Elements are integers 0..|G|-1, the rank of the exponent vector in
    lexicographic order (so 0 is the identity).  Right multiplication by
    g_j^(2^t) is stored as a permutation array, which makes products of whole
    element arrays a handful of numpy gathers.
    """

    def __init__(self, pres: PcPresentation, *, check: bool = True):
        _check_size(pres.order)
        if check and not consistency_check(pres):
            raise ValueError("inconsistent presentation")
        self.presentation = pres
        self.p = pres.p
        self.order = pres.order
        self.ngens = pres.ngens
        orders = pres.relative_orders
        self.strides = tuple(math.prod(orders[i + 1 :]) for i in range(self.ngens))
        idx = np.arange(self.order)
        self.digits = np.stack([(idx // s) % r for s, r in zip(self.strides, orders)], axis=1) \
            if self.ngens else np.zeros((1, 0), dtype=np.int64)
        self.generator_perms = [self._right_perm(j) for j in range(self.ngens)]
        self._pow2 = []
        for j, perm in enumerate(self.generator_perms):
            chain = [perm]
            for _ in range(1, (orders[j] - 1).bit_length()):
                chain.append(chain[-1][chain[-1]])
            self._pow2.append(chain)
        self._cache: dict = {}

    def _right_perm(self, j: int) -> np.ndarray:
        col = self.presentation._collector
        out = np.empty(self.order, dtype=np.int64)
        for x in range(self.order):
            z = [int(e) for e in self.digits[x]]
            col.mul_gen(z, j, 1)
            out[x] = self.index(z)
        return out

    def index(self, v: Sequence[int]) -> int:
        return sum(int(e) * s for e, s in zip(v, self.strides))

    def vector(self, x: int) -> Vector:
        return tuple(int(e) for e in self.digits[x])

    @property
    def identity(self) -> int:
        return 0

    @property
    def generators(self) -> list[int]:
        return [self.strides[j] for j in range(self.ngens)]

    def mul(self, x, y):
        """Elementwise product of element indices (numpy broadcasting applies)."""
        x, y = np.broadcast_arrays(np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64))
        out = x.copy()
        ydig = self.digits[y]
        for j, chain in enumerate(self._pow2):
            e = ydig[..., j]
            for t, perm in enumerate(chain):
                bit = ((e >> t) & 1).astype(bool)
                if bit.any():
                    out = np.where(bit, perm[out], out)
        return out if out.ndim else int(out)

    @cached_property
    def inv(self) -> np.ndarray:
        out = np.zeros(self.order, dtype=np.int64)
        y = np.arange(self.order)
        ydig = self.digits[y]
        for j in range(self.ngens - 1, -1, -1):
            e = ydig[:, j]
            for t, perm in enumerate(self._pow2[j]):
                back = np.argsort(perm)
                bit = ((e >> t) & 1).astype(bool)
                out = np.where(bit, back[out], out)
        return out

    def power(self, x, k: int):
        x = np.asarray(x, dtype=np.int64)
        if k < 0:
            x, k = self.inv[x], -k
        result = np.zeros_like(x)
        base = x
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result if result.ndim else int(result)

    def commutator(self, x, y):
        """[x, y] = x^-1 y^-1 x y."""
        return self.mul(self.mul(self.inv[x], self.inv[y]), self.mul(x, y))

    def conjugate(self, x, y):
        """x^y = y^-1 x y."""
        return self.mul(self.mul(self.inv[y], x), y)

    def whole(self) -> Subgroup:
        return Subgroup(self, np.arange(self.order), tuple(self.generators))

    def trivial(self) -> Subgroup:
        return Subgroup(self, np.zeros(1, dtype=np.int64), ())


@dataclass(eq=False)
class Subgroup:
    group: PcGroup
    elements: np.ndarray  # sorted element indices
    generators: tuple[int, ...]

    @property
    def order(self) -> int:
        return int(self.elements.size)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.group.order, dtype=bool)
        m[self.elements] = True
        return m

    def __contains__(self, x) -> bool:
        return bool(self.mask[x])

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and other.group is self.group \
            and np.array_equal(self.elements, other.elements)

    def __hash__(self) -> int:
        return hash(self.elements.tobytes())

    def __le__(self, other: Subgroup) -> bool:
        return bool(other.mask[self.elements].all())

    def index_in(self, other: Subgroup) -> int:
        return other.order // self.order

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, generators={list(self.generators)})"


def closure(G: PcGroup, gens: Iterable[int], start: np.ndarray | None = None) -> Subgroup:
    """Subgroup generated by ``gens`` (and the elements ``start``, a subgroup)."""
    gens = np.unique(np.asarray(list(gens), dtype=np.int64))
    mask = np.zeros(G.order, dtype=bool)
    if start is None:
        start = np.zeros(1, dtype=np.int64)
    mask[start] = True
    frontier = np.flatnonzero(mask)
    while frontier.size and gens.size:
        new = G.mul(frontier[:, None], gens[None, :]).ravel()
        new = np.unique(new[~mask[new]])
        mask[new] = True
        frontier = new
    return Subgroup(G, np.flatnonzero(mask), tuple(int(x) for x in gens))


def normal_closure(G: PcGroup, gens: Iterable[int], within: Sequence[int]) -> Subgroup:
    """Smallest subgroup containing ``gens`` and normalized by the elements ``within``."""
    gens = list(gens)
    N = closure(G, gens)
    conj_by = np.asarray(list(within), dtype=np.int64)
    while True:
        if conj_by.size == 0:
            return N
        images = G.conjugate(N.elements[:, None], conj_by[None, :]).ravel()
        missing = np.unique(images[~N.mask[images]])
        if missing.size == 0:
            return N
        gens.append(int(missing[0]))
        N = closure(G, [int(missing[0])], start=N.elements)
        N = Subgroup(G, N.elements, tuple(gens))


def derived_subgroup(H: Subgroup) -> Subgroup:
    G = H.group
    key = ("derived", H.elements.tobytes())
    hit = G._cache.get(key)
    if hit is not None:
        return hit
    gens = np.asarray(H.generators, dtype=np.int64)
    if gens.size:
        comms = G.commutator(gens[:, None], gens[None, :]).ravel()
        comms = [int(c) for c in np.unique(comms) if c != 0]
    else:
        comms = []
    result = normal_closure(G, comms, H.generators)
    G._cache[key] = result
    return result


def commutator_subgroup(A: Subgroup, B: Subgroup) -> Subgroup:
    """[A, B] for subgroups normalized by each other, as the normal closure in <A, B>."""
    G = A.group
    ga = np.asarray(A.generators, dtype=np.int64)
    gb = np.asarray(B.generators, dtype=np.int64)
    comms = []
    if ga.size and gb.size:
        comms = [int(c) for c in np.unique(G.commutator(ga[:, None], gb[None, :]).ravel()) if c != 0]
    return normal_closure(G, comms, list(A.generators) + list(B.generators))


@dataclass(frozen=True)
class CentralSeries:
    terms: tuple[Subgroup, ...]
    nilpotency_class: int
    coclass: int


def _logp(n: int, p: int) -> int:
    k = 0
    while n > 1:
        if n % p:
            raise ValueError(f"{n} is not a power of {p}")
        n //= p
        k += 1
    return k


def lower_central_series(G: PcGroup) -> CentralSeries:
    whole = G.whole()
    terms = [whole]
    while terms[-1].order > 1:
        nxt = commutator_subgroup(terms[-1], whole)
        if nxt.order == terms[-1].order:
            raise ValueError("group is not nilpotent")
        terms.append(nxt)
    cls = len(terms) - 1
    return CentralSeries(tuple(terms), cls, _logp(G.order, G.p) - cls)


def elementary_divisors(rows: Sequence[Sequence[int]], ncols: int) -> list[int]:
    """Nonzero diagonal of the Smith normal form of an integer matrix."""
    A = [list(r) for r in rows if any(r)]
    divisors = []
    col0 = 0
    while A and col0 < ncols:
        # pick the entry of least absolute value as pivot
        entries = [(abs(v), i, j) for i, r in enumerate(A) for j, v in enumerate(r) if v]
        if not entries:
            break
        _, pi, pj = min(entries)
        A[0], A[pi] = A[pi], A[0]
        for r in A:
            r[0], r[pj] = r[pj], r[0]
        while True:
            piv = A[0][0]
            done = True
            for i in range(1, len(A)):
                q = A[i][0] // piv
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[0])]
                if A[i][0]:
                    done = False
            for j in range(1, len(A[0])):
                q = A[0][j] // piv
                if q:
                    for r in A:
                        r[j] -= q * r[0]
                if A[0][j]:
                    done = False
            if done:
                # the pivot must divide the rest of the matrix
                bad = next(((i, j) for i in range(1, len(A)) for j in range(1, len(A[0]))
                            if A[i][j] % piv), None)
                if bad is None:
                    break
                A[0] = [a + b for a, b in zip(A[0], A[bad[0]])]
                continue
            entries = [(abs(A[i][0]), i, 0) for i in range(len(A)) if A[i][0]]
            entries += [(abs(A[0][j]), 0, j) for j in range(len(A[0])) if A[0][j]]
            _, pi, pj = min(entries)
            A[0], A[pi] = A[pi], A[0]
            for r in A:
                r[0], r[pj] = r[pj], r[0]
        divisors.append(abs(A[0][0]))
        A = [r[1:] for r in A[1:] if any(r[1:])]
        col0 += 1
    return sorted(divisors)


def _invariants_by_counting(H: Subgroup, Hp: Subgroup) -> tuple[int, ...]:
    G = H.group
    p = G.p
    quotient = H.order // Hp.order
    omega = [0]
    x = H.elements
    while p ** omega[-1] < quotient:
        x = G.power(x, p)
        killed = int(Hp.mask[x].sum()) // Hp.order
        omega.append(_logp(killed, p))
    ranks = [omega[k] - omega[k - 1] for k in range(1, len(omega))] + [0]
    exps = []
    for k in range(len(ranks) - 1, 0, -1):
        exps += [k] * (ranks[k - 1] - ranks[k])
    return tuple(exps)


def _invariants_by_smith(H: Subgroup, Hp: Subgroup) -> tuple[int, ...]:
    G = H.group
    if H.order == Hp.order:
        return ()
    label = np.full(G.order, -1, dtype=np.int64)
    cur = H.elements.copy()
    for h in Hp.elements:
        cur = np.minimum(cur, G.mul(H.elements, int(h)))
    label[H.elements] = cur
    gens = [int(x) for x in H.generators]
    k = len(gens)
    vec = {int(label[0]): [0] * k}
    queue = [int(label[0])]
    relations = []
    while queue:
        c = queue.pop()
        for i, s in enumerate(gens):
            nxt = int(label[G.mul(c, s)])
            step = list(vec[c])
            step[i] += 1
            if nxt in vec:
                rel = [a - b for a, b in zip(step, vec[nxt])]
                if any(rel):
                    relations.append(rel)
            else:
                vec[nxt] = step
                queue.append(nxt)
    divisors = elementary_divisors(relations, k)
    return tuple(sorted((_logp(d, G.p) for d in divisors if d > 1), reverse=True))


def abelian_invariants(H: Subgroup, method: str = "count") -> tuple[int, ...]:
    """Logarithmic abelian type invariants of H/H', weakly descending.

    ``method="count"`` reads the type off the number of elements whose p^k-th
    powers lie in H'; ``method="smith"`` builds the relation matrix of H/H'
    on the generators of H and takes elementary divisors.
    """
    Hp = derived_subgroup(H)
    if method == "count":
        return _invariants_by_counting(H, Hp)
    if method == "smith":
        return _invariants_by_smith(H, Hp)
    raise ValueError(f"unknown method {method!r}")
