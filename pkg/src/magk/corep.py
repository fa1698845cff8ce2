"""Corepresentation rings of magnetic groups, tracked through characters.

For a magnetic group G with unitary subgroup G0 and a fixed antiunitary
element a0, conjugation ``W -> a0^* conj(W)`` is an involution on the
irreducible characters of G0. Each involution orbit carries exactly one
irreducible corepresentation of G, of real (R), complex (C) or quaternionic
(H) type, whose restriction to G0 is chi, chi + chi_hat or 2 chi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .chars import CharacterTable, ClassFunction, character_table, inner_product, irrep_matrices
from .cyclotomic import Cyclo
from .errors import NotIrreducible, NumericalDegeneracy, TheoremViolated
from .groups import CentralExtensionZ2, FiniteGroup, FiniteMagneticGroup
from .snf import cokernel, integer_rank

__all__ = [
    "TypeLabel",
    "MagneticContext",
    "CorepGenerator",
    "CorepBasis",
    "RestrictionMatrix",
    "IsoReport",
    "magnetic_context",
    "twisted_context",
    "conjugate_character",
    "involution_permutation",
    "dimmock_indicator",
    "classify_irreps",
    "corep_basis",
    "twisted_corep_basis",
    "restriction_matrix",
    "verify_rational_iso",
    "intertwiner_type",
    "classification_report",
]


class TypeLabel(str, Enum):
    R = "R"
    C = "C"
    H = "H"

    @classmethod
    def from_indicator(cls, value: int) -> "TypeLabel":
        return {1: cls.R, 0: cls.C, -1: cls.H}[value]


_TYPE_ORDER = {TypeLabel.R: 0, TypeLabel.C: 1, TypeLabel.H: 2}


@dataclass(frozen=True, eq=False)
class MagneticContext:
    """A magnetic group together with a0, G0 and the character table of G0.

    ``active`` lists the G0-irreducibles in play: all of them, or for a
    twisted context only those on which the central element z acts by -1.
    """

    G: FiniteMagneticGroup
    a0: int
    g0: FiniteGroup
    embedding: np.ndarray
    table: CharacterTable
    z: int | None = None
    active: tuple[int, ...] = field(default=())

    @property
    def conj_map(self) -> np.ndarray:
        """G0 index ``g -> a0 g a0^-1`` as a G0 index."""
        lookup = np.full(self.G.n, -1)
        lookup[self.embedding] = np.arange(len(self.embedding))
        return lookup[self.G.conjugate_by(self.a0)[self.embedding]]

    def g0_index(self, g: int) -> int:
        pos = np.searchsorted(self.embedding, g)
        if pos >= len(self.embedding) or self.embedding[pos] != g:
            raise ValueError(f"element {g} is not unitary")
        return int(pos)

    def with_a0(self, a0: int) -> "MagneticContext":
        if self.G.phi[a0] != 1:
            raise ValueError(f"element {a0} is not antiunitary")
        return MagneticContext(self.G, int(a0), self.g0, self.embedding, self.table,
                               self.z, self.active)


def magnetic_context(G: FiniteMagneticGroup, a0: int | None = None, *, tol: float = 1e-9,
                     seed: int = 0) -> MagneticContext:
    """Context with the canonical a0 (smallest antiunitary index) by default."""
    g0, emb = G.kernel
    table = character_table(g0, tol=tol, seed=seed)
    a0 = int(G.antiunitary[0]) if a0 is None else int(a0)
    if G.phi[a0] != 1:
        raise ValueError(f"element {a0} is not antiunitary")
    return MagneticContext(G, a0, g0, emb, table, None, tuple(range(len(table))))


def twisted_context(ext: CentralExtensionZ2, a0: int | None = None, *, tol: float = 1e-9,
                    seed: int = 0) -> MagneticContext:
    """Context on the extension restricted to characters with chi(z) = -chi(e)."""
    ctx = magnetic_context(ext.total, a0, tol=tol, seed=seed)
    zi = ctx.g0_index(ext.z)
    active = tuple(i for i, chi in enumerate(ctx.table.rows) if chi(zi) == -chi.degree)
    return MagneticContext(ctx.G, ctx.a0, ctx.g0, ctx.embedding, ctx.table, ext.z, active)


def conjugate_character(ctx: MagneticContext, chi: ClassFunction) -> ClassFunction:
    """``chi_hat(g) = conj(chi(a0 g a0^-1))``."""
    conj = ctx.conj_map
    vals = tuple(chi(int(conj[r])).conjugate() for r in ctx.g0.classes.reps)
    return ClassFunction(chi.group, vals)


def involution_permutation(ctx: MagneticContext) -> tuple[int, ...]:
    """Index of chi_hat for every row of the G0 character table."""
    return tuple(ctx.table.index(conjugate_character(ctx, chi)) for chi in ctx.table.rows)


def dimmock_indicator(ctx: MagneticContext, chi: ClassFunction) -> int:
    """``(1/|G0|) sum over antiunitary a of chi(a^2)``, one of +1, 0, -1.

    Raises
    ------
    NotIrreducible
        If ``<chi, chi> != 1``.
    """
    if inner_product(chi, chi) != 1:
        raise NotIrreducible("indicator is only defined for irreducible characters")
    G = ctx.G
    total = Cyclo.rational(0)
    for a in G.antiunitary:
        total = total + chi(ctx.g0_index(int(G.mul[a, a])))
    value = total / ctx.g0.n
    if value not in (1, 0, -1):
        raise TheoremViolated("indicator outside {+1, 0, -1}", value=repr(value))
    ind = int(value.to_fraction())
    self_conj = conjugate_character(ctx, chi) == chi
    if (ind == 0) == self_conj:
        raise TheoremViolated("indicator disagrees with the conjugation involution",
                              indicator=ind, self_conjugate=self_conj)
    return ind


def classify_irreps(ctx: MagneticContext) -> list[tuple[int, TypeLabel, int]]:
    """``(index, type, partner)`` for every active G0-irreducible.

    The partner of an R or H irreducible is itself.
    """
    perm = involution_permutation(ctx)
    out = []
    for i in ctx.active:
        label = TypeLabel.from_indicator(dimmock_indicator(ctx, ctx.table.rows[i]))
        out.append((i, label, perm[i]))
    return out


@dataclass(frozen=True, eq=False)
class CorepGenerator:
    label: TypeLabel
    restricted: ClassFunction
    constituents: tuple[tuple[int, int], ...]  # (irreducible index, multiplicity)

    @property
    def dim(self) -> int:
        return int(self.restricted.degree.to_fraction())


@dataclass(frozen=True, eq=False)
class CorepBasis:
    """Free generators of the corepresentation ring, ordered R, C, H."""

    context: MagneticContext
    generators: tuple[CorepGenerator, ...]

    def __len__(self) -> int:
        return len(self.generators)

    def count(self, label: TypeLabel | str) -> int:
        label = TypeLabel(label)
        return sum(1 for g in self.generators if g.label is label)

    @property
    def labels(self) -> tuple[TypeLabel, ...]:
        return tuple(g.label for g in self.generators)


def corep_basis(ctx: MagneticContext) -> CorepBasis:
    """One generator per involution orbit on the active irreducibles."""
    rows = ctx.table.rows
    gens = []
    for i, label, partner in classify_irreps(ctx):
        if label is TypeLabel.R:
            gens.append(CorepGenerator(label, rows[i], ((i, 1),)))
        elif label is TypeLabel.H:
            gens.append(CorepGenerator(label, 2 * rows[i], ((i, 2),)))
        elif i < partner:
            gens.append(CorepGenerator(label, rows[i] + rows[partner], ((i, 1), (partner, 1))))
    gens.sort(key=lambda g: (_TYPE_ORDER[g.label], tuple(c for c, _ in g.constituents)))
    return CorepBasis(ctx, tuple(gens))


def twisted_corep_basis(ext: CentralExtensionZ2, **kwargs) -> CorepBasis:
    """Corep basis of the extension filtered to the twisted sector."""
    return corep_basis(twisted_context(ext, **kwargs))


@dataclass(frozen=True, eq=False)
class RestrictionMatrix:
    """Restriction from the corep ring to R(G0) at a point.

    ``columns`` lists irreducible indices in orbit-sorted order;
    ``involution[j]`` is the column holding the conjugate of column ``j``.
    """

    matrix: np.ndarray
    columns: tuple[int, ...]
    involution: tuple[int, ...]
    labels: tuple[TypeLabel, ...]

    def tolist(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.matrix]


def restriction_matrix(ctx_or_basis) -> RestrictionMatrix:
    basis = ctx_or_basis if isinstance(ctx_or_basis, CorepBasis) else corep_basis(ctx_or_basis)
    perm = involution_permutation(basis.context)
    columns = [c for g in basis.generators for c, _ in g.constituents]
    pos = {c: j for j, c in enumerate(columns)}
    mat = np.zeros((len(basis), len(columns)), dtype=np.int64)
    for r, g in enumerate(basis.generators):
        for c, mult in g.constituents:
            mat[r, pos[c]] = mult
    return RestrictionMatrix(mat, tuple(columns), tuple(pos[perm[c]] for c in columns),
                             basis.labels)


@dataclass(frozen=True)
class IsoReport:
    image_invariant: bool
    rank_magnetic: int
    rank_invariants: int
    cokernel_torsion: tuple[int, ...]
    cokernel_free: int

    @property
    def ok(self) -> bool:
        return self.image_invariant and self.rank_magnetic == self.rank_invariants \
            and self.cokernel_free == 0

    def to_json(self) -> dict:
        return {
            "image_invariant": self.image_invariant,
            "rank_R(G)": self.rank_magnetic,
            "rank_invariants": self.rank_invariants,
            "cokernel_torsion": list(self.cokernel_torsion),
            "cokernel_free": self.cokernel_free,
        }


def _orbits(perm) -> list[tuple[int, ...]]:
    seen, orbits = set(), []
    for start in range(len(perm)):
        if start in seen:
            continue
        orbit, x = [], start
        while x not in seen:
            seen.add(x)
            orbit.append(x)
            x = perm[x]
        orbits.append(tuple(orbit))
    return orbits


def verify_rational_iso(ctx_or_basis, *, strict: bool = True) -> IsoReport:
    """Check that restriction lands in the invariants and is rationally onto.

    The invariant sublattice rank is the number of involution orbits on the
    columns, found by a direct orbit scan independent of the basis.

    Raises
    ------
    TheoremViolated
        When ``strict`` and any check fails.
    """
    rm = restriction_matrix(ctx_or_basis)
    mat = rm.matrix
    inv = list(rm.involution)
    image_invariant = bool((mat == mat[:, inv]).all())
    orbits = _orbits(inv)
    rank_mag = integer_rank(mat)
    # coordinates of each row in the orbit-sum basis of the invariant lattice
    coords = np.array([[row[o[0]] for o in orbits] for row in mat], dtype=object)
    if coords.size:
        free, torsion = cokernel(coords.T)
    else:
        free, torsion = len(orbits), []
    report = IsoReport(image_invariant, rank_mag, len(orbits), tuple(torsion), free)
    if strict and not report.ok:
        raise TheoremViolated("restriction is not a rational isomorphism onto the invariants",
                              **report.to_json())
    return report


def intertwiner_type(ctx: MagneticContext, index: int, seed: int = 0) -> TypeLabel:
    """Type of a self-conjugate irreducible from an explicit intertwiner.

    Builds unitary matrices rho for the irreducible, searches the matrix
    units E for a nonzero averaged intertwiner T with rho' = T^-1 rho T,
    where rho'(h) = conj(rho(a0 h a0^-1)), and reads off the sign in
    rho(a0^-2) = +-T conj(T).
    """
    chi = ctx.table.rows[index]
    if conjugate_character(ctx, chi) != chi:
        raise ValueError("irreducible is not self-conjugate")
    rho = irrep_matrices(ctx.table, index, seed=seed)
    d = rho.shape[1]
    rho_c = rho[ctx.conj_map].conj()
    rho_c_inv = np.linalg.inv(rho_c)
    T = None
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            cand = np.einsum("gab,bc,gcd->ad", rho, unit, rho_c_inv)
            if np.linalg.norm(cand) > 1e-8:
                T = cand
                break
        if T is not None:
            break
    if T is None or np.abs(np.einsum("gab,bc->gac", rho, T)
                           - np.einsum("ab,gbc->gac", T, rho_c)).max() > 1e-8:
        raise NumericalDegeneracy("no intertwiner found", index=index)
    G = ctx.G
    a0_sq_inv = int(G.inv[G.mul[ctx.a0, ctx.a0]])
    target = rho[ctx.g0_index(a0_sq_inv)]
    tt = T @ T.conj()
    lam = np.vdot(tt, target) / np.vdot(tt, tt)
    if abs(lam.imag) > 1e-8 or abs(lam) < 1e-8 or np.abs(target - lam * tt).max() > 1e-8:
        raise NumericalDegeneracy("rho(a0^-2) is not a real multiple of T conj(T)", index=index)
    return TypeLabel.R if lam.real > 0 else TypeLabel.H


def classification_report(ctx: MagneticContext, name: str | None = None) -> dict:
    """JSON-ready summary used by the ``classify`` and ``restrict`` commands."""
    from .reporting import complex_pair

    basis = corep_basis(ctx)
    rm = restriction_matrix(basis)
    iso = verify_rational_iso(basis)
    irreps = []
    for i, label, partner in classify_irreps(ctx):
        chi = ctx.table.rows[i]
        irreps.append({
            "index": i,
            "dim": ctx.table.dims[i],
            "values": [complex_pair(v) for v in chi.values],
            "type": label.value,
            "partner": partner,
        })
    return {
        "group": {"name": name, "order": ctx.G.n, "unitary_order": ctx.g0.n,
                  "twisted": ctx.z is not None},
        "a0": ctx.a0,
        "classes": [list(m) for m in ctx.g0.classes.members],
        "irreps": irreps,
        "basis": [{"type": g.label.value, "dim": g.dim,
                   "constituents": [[c, m] for c, m in g.constituents]}
                  for g in basis.generators],
        "restriction_matrix": {"rows": rm.tolist(), "columns": list(rm.columns),
                               "involution": list(rm.involution)},
        "ranks": {"R(G)": iso.rank_magnetic, "R(G0)^Z2": iso.rank_invariants},
        "cokernel": {"free": iso.cokernel_free, "torsion": list(iso.cokernel_torsion)},
        "image_invariant": iso.image_invariant,
    }
