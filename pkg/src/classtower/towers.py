"""The groups G(m,n), their tree positions, and predicted Artin patterns.

G(m,n) = <rho, sigma, tau | rho^4 = sigma^(2^(n+1)) = tau^(2^(m+1)) = 1,
          rho^2 = sigma^(2^n), [rho,sigma] = sigma^2, [rho,tau] = tau^2,
          [sigma,tau] = 1>
with [x,y] = x^-1 y^-1 x y, so rho inverts sigma and tau.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

from .arith import RadicandProfile
from .artin import TRIVIAL_KERNEL, ArtinPattern, cycle_type
from .pcgroup import PcGroup, PcPresentation, consistency_check, size_guard, SizeGuardError
from .quadclass import two_class_number

__all__ = [
    "TowerParams",
    "TreePosition",
    "Family",
    "ThreeStageParams",
    "build_G",
    "group_G",
    "params_from_radicand",
    "tree_position",
    "predicted_pattern2",
    "pattern_diffs",
    "three_stage_identifiers",
    "predicted_pattern3",
]


@dataclass(frozen=True, order=True)
class TowerParams:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"parameters must be positive, got (m, n) = ({self.m}, {self.n})")


def build_G(m: int, n: int) -> PcPresentation:
    """pc presentation of G(m,n) on (rho, sigma, tau), relative orders (2, 2^(n+1), 2^(m+1))."""
    TowerParams(m, n)
    rs, rt = 2 ** (n + 1), 2 ** (m + 1)
    order = 2 * rs * rt
    if order > size_guard():
        raise SizeGuardError(f"|G({m},{n})| = 2^{m + n + 3} exceeds the size guard {size_guard()}")
    return PcPresentation(
        p=2,
        relative_orders=(2, rs, rt),
        powers=((0, 2**n, 0), (0, 0, 0), (0, 0, 0)),
        conjugates={(0, 1): (0, rs - 1, 0), (0, 2): (0, 0, rt - 1)},
    )


def group_G(m: int, n: int) -> PcGroup:
    pres = build_G(m, n)
    if not consistency_check(pres):
        raise RuntimeError(f"presentation of G({m},{n}) failed the consistency check")
    return PcGroup(pres, check=False)


def params_from_radicand(profile: RadicandProfile) -> TowerParams:
    """(m, n) from h_2(Q(sqrt(-p1))) = 2^(m+1) and h_2(Q(sqrt(-p2 q))) = 2^n."""
    h1 = two_class_number(-profile.p1)
    h2 = two_class_number(-profile.p2 * profile.q)
    m = h1.bit_length() - 2
    n = h2.bit_length() - 1
    if m < 1 or n < 1:
        raise RuntimeError(f"d = {profile.d}: 2-class numbers {h1}, {h2} give (m, n) = ({m}, {n})")
    return TowerParams(m, n)


def _repeat(block: str, times: int) -> str:
    return f"({block})^{times}" if times else ""


# SmallGroups identifiers of the tree vertices up to order 512
_SMALLGROUP_IDS = {
    ("M", 0): ["<32,35>", "<64,181>", "<128,984>", "<256,6719>", "<512,60891>"],
    ("V", 0): ["<64,175>", "<128,979>", "<256,6714>", "<512,60886>"],
    ("M", 1): ["<128,445>", "<256,5509>", "<512,58926>"],
    ("V", 1): ["<256,5504>", "<512,58921>"],
    ("M", 2): ["<512,30600>"],
}


@dataclass(frozen=True)
class TreePosition:
    family: str  # "mainline-35", "mainline-34" or "sequence-V"
    j: int
    k: int
    label: str

    @property
    def symbol(self) -> str:
        if self.family == "mainline-35":
            return f"M_{{0,{self.k}}}"
        if self.family == "mainline-34":
            return f"M_{{{self.j + 1},{self.k}}}"
        return f"V_{{{self.j},{self.k}}}"

    @property
    def smallgroup_id(self) -> str | None:
        if self.family == "sequence-V":
            ids = _SMALLGROUP_IDS.get(("V", self.j), [])
        else:
            ids = _SMALLGROUP_IDS.get(("M", 0 if self.family == "mainline-35" else self.j + 1), [])
        return ids[self.k] if self.k < len(ids) else None


def tree_position(params: TowerParams) -> TreePosition:
    m, n = params.m, params.n
    if n == 1:
        k = m - 1
        return TreePosition("mainline-35", 0, k, "<32,35>" + _repeat("-#1;1", k))
    if m >= n:
        j, k = n - 2, m - n
        label = "<32,34>" + _repeat("-#2;1", j) + "-#2;2" + _repeat("-#1;1", k)
        return TreePosition("mainline-34", j, k, label)
    j, k = m - 1, n - m - 1
    label = "<32,34>" + _repeat("-#2;1", j) + _repeat("-#1;1", k) + "-#1;2"
    return TreePosition("sequence-V", j, k, label)


def _desc(*inv: int) -> tuple[int, ...]:
    return tuple(sorted(inv, reverse=True))


ELEMENTARY = (1, 1, 1)


def predicted_pattern2(params: TowerParams) -> ArtinPattern:
    """Artin pattern of G(m,n) by the closed formulas, split on n = 1 vs n >= 2.

    The layer-1 kernel string follows the extension ordering of the field
    side; only its cycle type is meaningful for a group-theoretic comparison.
    """
    m, n = params.m, params.n
    if n == 1:
        tau1 = [_desc(m + 1, 2), (2, 1), (2, 1), ELEMENTARY, ELEMENTARY, (2, 1), (2, 1)]
        tau2 = [_desc(m + 1, 1), _desc(m, 2), _desc(m + 1, 1)] + [(2, 1)] * 4
        kappa1 = (1, 2, 3, 5, 4, 6, 7)
    else:
        tau1 = [_desc(m + 1, n + 1)] + [ELEMENTARY] * 6
        tau2 = [_desc(m + 1, n), _desc(m, n + 1), _desc(max(m + 1, n + 1), min(m, n))] + [ELEMENTARY] * 4
        kappa1 = (1, 3, 2, 5, 4, 7, 6)
    return ArtinPattern(
        ttt=((ELEMENTARY,), tuple(tau1), tuple(tau2), (_desc(m, n),)),
        tkt=((TRIVIAL_KERNEL,), kappa1, (0,) * 7, (0,)),
    )


def polarized_components(params: TowerParams) -> dict[int, list[tuple[int, ...]]]:
    """Parameter-dependent TTT components per layer."""
    m, n = params.m, params.n
    if n == 1:
        return {1: [_desc(m + 1, 2)], 2: [_desc(m + 1, 1), _desc(m, 2), _desc(m + 1, 1)]}
    return {1: [_desc(m + 1, n + 1)],
            2: [_desc(m + 1, n), _desc(m, n + 1), _desc(max(m + 1, n + 1), min(m, n))]}


def pattern_diffs(computed: ArtinPattern, params: TowerParams) -> list[str]:
    """Differences between a computed pattern and the prediction for (m, n).

    TTT layers are compared as multisets, kernel layers 0, 2, 3 exactly and
    layer 1 by its cycle type.
    """
    predicted = predicted_pattern2(params)
    diffs = []
    if computed.layers != predicted.layers:
        return [f"layer count {computed.layers} != {predicted.layers}"]
    for n in range(predicted.layers):
        got, want = computed.targets(n), predicted.targets(n)
        if got != want:
            diffs.append(f"tau{n}: {dict(got)} != {dict(want)}")
    for n, comps in polarized_components(params).items():
        missing = Counter(comps) - computed.targets(n)
        if missing:
            diffs.append(f"tau{n}: polarized components {sorted(missing)} missing")
    for n in (0, 2, 3):
        if computed.tkt[n] != predicted.tkt[n]:
            diffs.append(f"kappa{n}: {computed.tkt[n]} != {predicted.tkt[n]}")
    got_cycles = cycle_type(computed.tkt[1])
    want_cycles = cycle_type(predicted.tkt[1])
    if got_cycles != want_cycles:
        diffs.append(f"kappa1 cycle type {dict(got_cycles or {})} != {dict(want_cycles)}")
    return diffs


class Family(str, enum.Enum):
    """Transfer kernel type families of the 3-stage towers, by tree root."""

    Q = "E6-E14"  # descendants of <729,49>
    U = "E8-E9"  # descendants of <729,54>

    @classmethod
    def parse(cls, text: str) -> Family:
        key = text.strip().upper().replace(".", "")
        if key in ("E6-E14", "E6", "E14", "Q", "49", "<729,49>"):
            return cls.Q
        if key in ("E8-E9", "E8", "E9", "U", "54", "<729,54>"):
            return cls.U
        raise ValueError(f"unknown family {text!r}; expected E6-E14 or E8-E9")

    @property
    def root(self) -> str:
        return "<729,49>" if self is Family.Q else "<729,54>"

    @property
    def variants(self) -> tuple[int, ...]:
        return (4, 5, 6) if self is Family.Q else (2, 4, 6)


# variant digit -> layer-1 TKT: 4 (resp. 2) gives the first string, the other two digits the second
_KAPPA3 = {
    (Family.Q, 4): (1, 1, 2, 2),
    (Family.Q, 5): (3, 1, 2, 2),
    (Family.Q, 6): (3, 1, 2, 2),
    (Family.U, 2): (2, 2, 3, 4),
    (Family.U, 4): (2, 3, 3, 4),
    (Family.U, 6): (2, 3, 3, 4),
}


@dataclass(frozen=True)
class ThreeStageParams:
    u: int
    family: Family
    variant: int

    def __post_init__(self):
        if self.u < 2:
            raise ValueError(f"u must be at least 2, got {self.u}")
        if self.variant not in self.family.variants:
            raise ValueError(f"variant {self.variant} not in {self.family.variants} for {self.family.value}")


def three_stage_identifiers(params: ThreeStageParams) -> tuple[str, str]:
    """Labels of the 3-tower group G and of its metabelianization G/G''."""
    j = k = params.u - 2
    root, v = params.family.root, params.variant
    group = root + _repeat("-#2;1-#1;1", j) + f"-#2;{v}"
    meta = root + _repeat("-#1;1-#1;1", k) + f"-#1;{v}"
    return group, meta


def predicted_pattern3(params: ThreeStageParams) -> ArtinPattern:
    u = params.u
    polar = (u + 1, u)
    if params.family is Family.Q:
        tau1 = (polar, ELEMENTARY, (2, 1), (2, 1))
    else:
        tau1 = ((2, 1), polar, (2, 1), (2, 1))
    return ArtinPattern(
        ttt=(((1, 1),), tau1, ((u, u, 1),)),
        tkt=((TRIVIAL_KERNEL,), _KAPPA3[(params.family, params.variant)], (0,)),
    )
