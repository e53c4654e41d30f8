"""Class groups of imaginary quadratic orders via reduced binary quadratic forms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

__all__ = [
    "BinaryForm",
    "ClassGroupStructure",
    "reduce",
    "principal_form",
    "reduced_forms",
    "compose",
    "form_power",
    "class_number",
    "class_group",
    "field_discriminant",
    "two_class_number",
]


class BinaryForm(NamedTuple):
    """The form a*x^2 + b*x*y + c*y^2."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self
        if not (abs(b) <= a <= c):
            return False
        return b >= 0 if (abs(b) == a or a == c) else True

    def inverse(self) -> BinaryForm:
        return reduce(BinaryForm(self.a, -self.b, self.c))


@dataclass(frozen=True)
class ClassGroupStructure:
    discriminant: int
    order: int
    invariants: tuple[int, ...]


def _check_discriminant(D: int) -> None:
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant (must be < 0 and 0 or 1 mod 4)")


def reduce(f: BinaryForm) -> BinaryForm:
    a, b, c = f
    if b * b - 4 * a * c >= 0 or a <= 0:
        raise ValueError(f"{tuple(f)} is not positive definite")
    while True:
        # normalize b into (-a, a]
        if not (-a < b <= a):
            r = (a - b) // (2 * a)
            b, c = b + 2 * r * a, a * r * r + b * r + c
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return BinaryForm(a, b, c)


def principal_form(D: int) -> BinaryForm:
    _check_discriminant(D)
    k = D % 2
    return BinaryForm(1, k, (k - D) // 4)


def reduced_forms(D: int) -> list[BinaryForm]:
    """All primitive reduced forms of discriminant D, sorted by (a, b).

    Runs over b and the divisors a of (b^2 - D)/4 with b <= a <= sqrt((b^2 - D)/4).
    """
    _check_discriminant(D)
    forms = []
    b = D % 2
    bmax = math.isqrt(-D // 3)
    while b <= bmax:
        ac = (b * b - D) // 4
        a = max(b, 1)
        while a * a <= ac:
            if ac % a == 0:
                c = ac // a
                if math.gcd(math.gcd(a, b), c) == 1:
                    forms.append(BinaryForm(a, b, c))
                    if 0 < b < a < c:
                        forms.append(BinaryForm(a, -b, c))
            a += 1
        b += 2
    forms.sort()
    return forms


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def compose(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    """Dirichlet composition of two forms of the same discriminant, reduced.

    With e = gcd(a1, a2, (b1+b2)/2) the united forms share the middle
    coefficient B solving B = b1 (2a1/e), B = b2 (2a2/e) and
    B^2 = D (4a1a2/e^2); the composite is (a1a2/e^2, B, (B^2-D)/(4a1a2/e^2)).
    """
    D = f.discriminant
    if g.discriminant != D:
        raise ValueError("forms have different discriminants")
    a1, b1, _ = f
    a2, b2, _ = g
    s = (b1 + b2) // 2
    g1, x1, y1 = _xgcd(a1, a2)
    e, x2, y2 = _xgcd(g1, s)
    u, v, w = x2 * x1, x2 * y1, y2
    a3 = a1 * a2 // (e * e)
    B = (u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + D) // 2) // e
    B %= 2 * a3
    return reduce(BinaryForm(a3, B, (B * B - D) // (4 * a3)))


def form_power(f: BinaryForm, k: int) -> BinaryForm:
    result = principal_form(f.discriminant)
    base = f
    if k < 0:
        base, k = f.inverse(), -k
    while k:
        if k & 1:
            result = compose(result, base)
        base = compose(base, base)
        k >>= 1
    return result


@lru_cache(maxsize=1 << 16)
def class_number(D: int) -> int:
    return len(reduced_forms(D))


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def class_group(D: int) -> ClassGroupStructure:
    """Order and invariant factors of the form class group of discriminant D.

    The Cayley table of the reduced forms is built by composition; for each
    prime p dividing h the p-primary type follows from the counts of elements
    killed by p, p^2, ... .
    """
    forms = reduced_forms(D)
    h = len(forms)
    index = {f: i for i, f in enumerate(forms)}
    table = [[index[compose(f, g)] for g in forms] for f in forms]
    identity = index[principal_form(D)]

    def power(i: int, k: int) -> int:
        r = identity
        for _ in range(k):
            r = table[r][i]
        return r

    columns: list[list[int]] = []  # per prime, the p-power cyclic orders, descending
    for p in _prime_factors(h):
        # omega[k] = log_p #{x : x^(p^k) = 1}
        omega = [0]
        pk = 1
        while True:
            pk *= p
            killed = sum(1 for i in range(h) if power(i, pk) == identity)
            omega.append(round(math.log(killed, p)))
            if killed == p ** _valuation(h, p):
                break
        # number of cyclic factors of exponent >= k is omega[k] - omega[k-1]
        ranks = [omega[k] - omega[k - 1] for k in range(1, len(omega))]
        exps = []
        for k in range(len(ranks), 0, -1):
            exps.extend([k] * (ranks[k - 1] - (ranks[k] if k < len(ranks) else 0)))
        columns.append([p**x for x in exps])
    width = max((len(c) for c in columns), default=0)
    invariants = []
    for i in range(width):
        d = 1
        for c in columns:
            if i < len(c):
                d *= c[i]
        invariants.append(d)
    return ClassGroupStructure(D, h, tuple(invariants))


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def field_discriminant(r: int) -> int:
    """Discriminant of Q(sqrt(r)) for a squarefree negative radicand r."""
    if r >= 0:
        raise ValueError("radicand must be negative")
    if r % 4 == 1:
        return r
    if r % 4 in (2, 3):
        return 4 * r
    raise ValueError(f"{r} is not squarefree")


def two_class_number(r: int) -> int:
    """2-part of the class number of the imaginary quadratic field Q(sqrt(r))."""
    h = class_number(field_discriminant(r))
    return h & -h
