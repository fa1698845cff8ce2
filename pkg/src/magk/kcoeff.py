"""Coefficient groups of magnetic equivariant K-theory.

The coefficients at a point split over the corep basis: each R, C or H
generator contributes a copy of KO, K or KSp in the same degree. Degrees
follow the superscript convention, so ``bott_coefficients("R", -1)`` is
KO^{-1}(pt) = Z/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .corep import CorepBasis, MagneticContext, TypeLabel, corep_basis, magnetic_context
from .errors import NotASubgroup
from .groups import FiniteMagneticGroup

__all__ = [
    "AbelianGroupExpr",
    "Z2Action",
    "Z2ModuleExpr",
    "KO_TABLE",
    "bott_coefficients",
    "magnetic_coefficients",
    "trivial_space_ktheory",
    "orbit_ktheory",
    "orbit_rank_check",
    "conj_module_structure",
    "periodicity_check",
]


@dataclass(frozen=True)
class AbelianGroupExpr:
    """Z^free_rank plus cyclic torsion summands (orders ascending)."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0 or any(t < 2 for t in self.torsion):
            raise ValueError("free rank must be >= 0 and torsion orders >= 2")
        object.__setattr__(self, "torsion", tuple(sorted(int(t) for t in self.torsion)))

    @classmethod
    def parse(cls, text: str) -> "AbelianGroupExpr":
        """Parse strings like ``"0"``, ``"Z"``, ``"Z^2 + Z/2 + Z/4"``."""
        free, tors = 0, []
        for term in text.replace(" ", "").split("+"):
            if term in ("", "0"):
                continue
            if term.startswith("Z/"):
                tors.append(int(term[2:]))
            elif term == "Z":
                free += 1
            elif term.startswith("Z^"):
                free += int(term[2:])
            else:
                raise ValueError(f"cannot parse abelian group term {term!r}")
        return cls(free, tuple(tors))

    def __add__(self, other: "AbelianGroupExpr") -> "AbelianGroupExpr":
        return AbelianGroupExpr(self.free_rank + other.free_rank, self.torsion + other.torsion)

    def __mul__(self, k: int) -> "AbelianGroupExpr":
        """Direct sum of ``k`` copies (tensor with Z^k)."""
        return AbelianGroupExpr(self.free_rank * k, self.torsion * k)

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


ZERO = AbelianGroupExpr()
Z = AbelianGroupExpr(1)
Z2 = AbelianGroupExpr(0, (2,))

# KO^{-q}(pt) for q = 0..7; regenerated from Clifford modules in the tests
KO_TABLE = (Z, Z2, Z2, ZERO, Z, ZERO, ZERO, ZERO)


def bott_coefficients(field: TypeLabel | str, q: int) -> AbelianGroupExpr:
    """KO^q, K^q or KSp^q of a point; KSp^q = KO^(q-4)."""
    field = TypeLabel(field)
    if field is TypeLabel.C:
        return Z if q % 2 == 0 else ZERO
    shift = 0 if field is TypeLabel.R else 4
    return KO_TABLE[(shift - q) % 8]


def _basis(obj) -> CorepBasis:
    if isinstance(obj, CorepBasis):
        return obj
    if isinstance(obj, MagneticContext):
        return corep_basis(obj)
    if isinstance(obj, FiniteMagneticGroup):
        return corep_basis(magnetic_context(obj))
    raise TypeError(f"expected a corep basis or context, got {type(obj).__name__}")


def magnetic_coefficients(basis, q: int) -> AbelianGroupExpr:
    """Coefficient group in degree ``q``: one Bott summand per generator."""
    basis = _basis(basis)
    out = ZERO
    for label in basis.labels:
        out = out + bott_coefficients(label, q)
    return out


def trivial_space_ktheory(basis, ko: AbelianGroupExpr, k: AbelianGroupExpr,
                          ksp: AbelianGroupExpr) -> AbelianGroupExpr:
    """K-theory of a trivial G-space from its KO, K and KSp groups."""
    basis = _basis(basis)
    return (basis.count("R") * ko) + (basis.count("C") * k) + (basis.count("H") * ksp)


def _check_subgroup(G: FiniteMagneticGroup, H) -> np.ndarray:
    H = np.unique(np.asarray(H, dtype=np.int64))
    if not G.is_subgroup(H):
        raise NotASubgroup("H is not a subgroup of G", elements=H.tolist())
    return H


def orbit_ktheory(G: FiniteMagneticGroup, H: Iterable[int], q: int) -> AbelianGroupExpr:
    """K-theory in degree ``q`` of the orbit G/H.

    For H meeting the antiunitary coset this is the magnetic coefficient
    group of H; for H inside G0 it is complex K_H of a point.
    """
    H = _check_subgroup(G, H)
    if G.phi[H].any():
        return magnetic_coefficients(G.magnetic_subgroup(H), q)
    sub, _ = G.subgroup(H)
    return AbelianGroupExpr(len(sub.classes)) if q % 2 == 0 else ZERO


def orbit_rank_check(G: FiniteMagneticGroup, H: Iterable[int]) -> tuple[int, int]:
    """Ranks of K_G(G/H) and of the invariants of K_{G0}(G/H), degree 0.

    For H inside G0, G/H splits under G0 into the orbits of H and of
    a0 H a0^-1 and the involution swaps the two summands, so the invariants
    have the rank of R(H). Otherwise both sides reduce to the magnetic
    group H at a point.
    """
    from .corep import verify_rational_iso

    H = _check_subgroup(G, H)
    if G.phi[H].any():
        report = verify_rational_iso(magnetic_context(G.magnetic_subgroup(H)))
        return report.rank_magnetic, report.rank_invariants
    sub, _ = G.subgroup(H)
    a0 = int(G.antiunitary[0])
    conj = np.unique(G.conjugate_by(a0)[H])
    other, _ = G.subgroup(conj)
    # swap involution on R(H) + R(a0 H a0^-1): orbits pair the two copies
    summands = len(sub.classes) + len(other.classes)
    return len(sub.classes), summands // 2


class Z2Action(str, Enum):
    trivial = "trivial"
    sign = "sign"
    swap = "swap-pair"


@dataclass(frozen=True)
class Z2ModuleExpr:
    """Direct sum of abelian groups with an involution acting on each."""

    summands: tuple[tuple[AbelianGroupExpr, Z2Action], ...] = ()

    def __post_init__(self):
        for group, action in self.summands:
            if action is Z2Action.swap and (group.free_rank % 2 or len(group.torsion) % 2):
                raise ValueError("swap-pair summands need an even number of factors")

    @property
    def underlying(self) -> AbelianGroupExpr:
        out = ZERO
        for group, _ in self.summands:
            out = out + group
        return out

    def invariant_rank(self) -> int:
        rank = 0
        for group, action in self.summands:
            if action is Z2Action.trivial:
                rank += group.free_rank
            elif action is Z2Action.swap:
                rank += group.free_rank // 2
        return rank

    def to_json(self) -> list:
        return [{"group": g.to_json(), "action": a.value} for g, a in self.summands]


def conj_module_structure(q: int) -> Z2ModuleExpr:
    """Complex conjugation on K^q(pt): trivial for q = 0 mod 4, sign for 2 mod 4."""
    if q % 2:
        return Z2ModuleExpr()
    return Z2ModuleExpr(((Z, Z2Action.trivial if q % 4 == 0 else Z2Action.sign),))


def periodicity_check(basis, q: int) -> bool:
    basis = _basis(basis)
    return magnetic_coefficients(basis, q) == magnetic_coefficients(basis, q + 8)
