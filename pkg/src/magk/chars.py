"""Complex character theory of finite groups.

Character tables come from simultaneous diagonalization of the class
multiplication matrices (Burnside-Dixon), done in floating point and then
snapped to exact cyclotomic integers using all Galois conjugates of each
value (sigma_k(chi(g)) = chi(g^k)).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cyclotomic import Cyclo, snap, units
from .errors import GroupMismatch, NotASubgroup, NumericalDegeneracy
from .groups import ConjClasses, FiniteGroup

__all__ = [
    "ClassFunction",
    "CharacterTable",
    "character_table",
    "inner_product",
    "restrict_character",
    "regular_character",
    "decompose",
    "frobenius_schur",
    "irrep_matrices",
]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ClassFunction:
    """A function constant on conjugacy classes, one exact value per class."""

    group: FiniteGroup
    values: tuple[Cyclo, ...]

    @property
    def classes(self) -> ConjClasses:
        return self.group.classes

    def __call__(self, g: int) -> Cyclo:
        return self.values[self.classes.class_of[g]]

    @property
    def degree(self) -> Cyclo:
        return self(self.group.id)

    def _check(self, other: "ClassFunction"):
        if other.group is not self.group and other.group != self.group:
            raise GroupMismatch("class functions live on different groups")

    def __add__(self, other: "ClassFunction") -> "ClassFunction":
        self._check(other)
        return ClassFunction(self.group, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "ClassFunction") -> "ClassFunction":
        self._check(other)
        return ClassFunction(self.group, tuple(a - b for a, b in zip(self.values, other.values)))

    def __rmul__(self, k) -> "ClassFunction":
        return ClassFunction(self.group, tuple(k * v for v in self.values))

    def __eq__(self, other):
        if not isinstance(other, ClassFunction):
            return NotImplemented
        return (other.group is self.group or other.group == self.group) and \
            all(a == b for a, b in zip(self.values, other.values))

    def __hash__(self):
        return hash(tuple(hash(v) for v in self.values))

    def conjugate(self) -> "ClassFunction":
        return ClassFunction(self.group, tuple(v.conjugate() for v in self.values))

    def to_complex(self) -> np.ndarray:
        return np.array([complex(v) for v in self.values])

    def sort_key(self):
        return tuple(x for v in self.values for x in (-v.sort_key()[0], -v.sort_key()[1]))

    def __repr__(self):
        vals = ", ".join(_fmt(v) for v in self.values)
        return f"ClassFunction({vals})"


def _fmt(v: Cyclo) -> str:
    z = complex(v)
    re, im = round(z.real, 10) + 0.0, round(z.imag, 10) + 0.0
    if im == 0:
        return f"{re:g}"
    return f"{re:g}{im:+g}i"


@dataclass(frozen=True, eq=False)
class CharacterTable:
    """Irreducible characters of a finite group.

    Rows are ordered by degree, then by their values in canonical class
    order (descending, so the trivial character is row 0).
    """

    group: FiniteGroup
    rows: tuple[ClassFunction, ...]

    @property
    def classes(self) -> ConjClasses:
        return self.group.classes

    @property
    def class_sizes(self) -> tuple[int, ...]:
        return self.classes.sizes

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(int(r.degree.to_fraction()) for r in self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, i: int) -> ClassFunction:
        return self.rows[i]

    def index(self, chi: ClassFunction) -> int:
        for i, row in enumerate(self.rows):
            if row == chi:
                return i
        raise ValueError("not an irreducible character of this table")

    def to_complex(self) -> np.ndarray:
        return np.array([r.to_complex() for r in self.rows])


def _class_matrices(group: FiniteGroup) -> np.ndarray:
    """``A[r, s, t]`` = #{x in C_r : x^-1 g_t in C_s}."""
    cls = group.classes
    k = len(cls)
    class_of = np.asarray(cls.class_of)
    reps = np.asarray(cls.reps)
    out = np.zeros((k, k, k))
    for r, members in enumerate(cls.members):
        xs = np.asarray(members)
        y = group.mul[group.inv[xs][:, None], reps[None, :]]
        s = class_of[y]
        t = np.broadcast_to(np.arange(k), s.shape)
        np.add.at(out[r], (s.ravel(), t.ravel()), 1.0)
    return out


def _central_characters(group: FiniteGroup, seed: int, attempts: int = 8) -> np.ndarray:
    """Rows are the vectors omega_i(C_t), normalized to omega_i(C_e) = 1."""
    cls = group.classes
    k = len(cls)
    e_cls = cls.class_of[group.id]
    mats = _class_matrices(group)
    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.abs(mats).max()))
    for _ in range(attempts):
        lam = rng.integers(-1000, 1001, size=k).astype(float)
        m = np.tensordot(lam, mats, axes=1)
        vals, vecs = np.linalg.eig(m)
        gaps = np.abs(vals[:, None] - vals[None, :])
        np.fill_diagonal(gaps, np.inf)
        if k > 1 and gaps.min() < 1e-6 * scale * np.abs(lam).sum() / k:
            continue
        omega = (vecs / vecs[e_cls]).T
        resid = max(
            np.abs(mats[r] @ w - w[r] * w).max() for w in omega for r in range(k)
        )
        if resid < 1e-6 * scale:
            return omega
    raise NumericalDegeneracy("class matrices could not be simultaneously diagonalized",
                              classes=k, seed=seed)


def character_table(group: FiniteGroup, tol: float = DEFAULT_TOL, seed: int = 0) -> CharacterTable:
    """Exact irreducible character table of ``group``.

    Raises
    ------
    NumericalDegeneracy
        If the eigenvectors cannot be separated or a value fails to snap to
        a cyclotomic integer within ``tol``.
    """
    cls = group.classes
    k = len(cls)
    sizes = np.asarray(cls.sizes, dtype=float)
    omega = _central_characters(group, seed)
    degrees = np.sqrt(group.n / (np.abs(omega) ** 2 / sizes).sum(axis=1))
    numeric = degrees[:, None] * omega / sizes[None, :]

    e = group.exponent
    class_of = np.asarray(cls.class_of)
    reps = np.asarray(cls.reps)
    galois = {u: class_of[group.power_map(u)[reps]] for u in units(e)}
    rows = []
    for i in range(k):
        vals = []
        for t in range(k):
            v = snap({u: numeric[i, galois[u][t]] for u in galois}, e, tol)
            if v is None:
                raise NumericalDegeneracy("character value did not snap to a cyclotomic integer",
                                          row=i, cls=t, value=str(numeric[i, t]))
            vals.append(v)
        rows.append(ClassFunction(group, tuple(vals)))
    rows.sort(key=lambda r: (complex(r.values[cls.class_of[group.id]]).real, r.sort_key()))

    # cheap numerical orthonormality check; the exact one lives in the tests
    x = np.array([r.to_complex() for r in rows])
    gram = (x * sizes) @ x.conj().T / group.n
    if np.abs(gram - np.eye(k)).max() > 1e-6:
        raise NumericalDegeneracy("snapped table is not orthonormal", classes=k)
    return CharacterTable(group, tuple(rows))


def inner_product(f: ClassFunction, h: ClassFunction) -> Cyclo:
    """``(1/|G|) sum_g f(g) conj(h(g))`` computed exactly."""
    f._check(h)
    total = Cyclo.rational(0)
    for size, a, b in zip(f.classes.sizes, f.values, h.values):
        total = total + size * (a * b.conjugate())
    return total / f.group.n


def decompose(table: CharacterTable, f: ClassFunction) -> list[Cyclo]:
    """Multiplicity of every irreducible of ``table`` in ``f``."""
    return [inner_product(f, chi) for chi in table.rows]


def regular_character(group: FiniteGroup) -> ClassFunction:
    vals = [Cyclo.rational(group.n if rep == group.id else 0) for rep in group.classes.reps]
    return ClassFunction(group, tuple(vals))


def restrict_character(big: FiniteGroup, sub: FiniteGroup, embedding: Sequence[int],
                       chi: ClassFunction) -> ClassFunction:
    """Pull ``chi`` back along an injective homomorphism ``sub -> big``."""
    emb = np.asarray(embedding, dtype=np.int64)
    if chi.group is not big and chi.group != big:
        raise GroupMismatch("character does not live on the big group")
    if emb.shape != (sub.n,) or len(np.unique(emb)) != sub.n or emb.min() < 0 or emb.max() >= big.n:
        raise NotASubgroup("embedding is not injective", embedding=emb.tolist())
    hom = big.mul[emb[:, None], emb[None, :]] == emb[sub.mul]
    if not hom.all():
        a, b = map(int, np.argwhere(~hom)[0])
        raise NotASubgroup("embedding is not a homomorphism", witness=[a, b])
    vals = tuple(chi(int(emb[r])) for r in sub.classes.reps)
    return ClassFunction(sub, vals)


def frobenius_schur(chi: ClassFunction) -> int:
    """``(1/|G|) sum_g chi(g^2)``: +1 real, 0 complex, -1 quaternionic."""
    g = chi.group
    sq = g.power_map(2)
    total = Cyclo.rational(0)
    for x in range(g.n):
        total = total + chi(int(sq[x]))
    value = (total / g.n).to_fraction()
    return int(value)


def _regular_rep(group: FiniteGroup) -> np.ndarray:
    n = group.n
    reg = np.zeros((n, n, n))
    for g in range(n):
        reg[g, group.mul[g], np.arange(n)] = 1.0
    return reg


def irrep_matrices(table: CharacterTable, index: int, seed: int = 0) -> np.ndarray:
    """Unitary matrices ``rho(g)`` (shape ``(n, d, d)``) affording row ``index``.

    An irreducible subspace is cut out of the isotypic component of the
    regular representation by a random equivariant positive operator, whose
    eigenspaces there are irreducible.
    """
    group = table.group
    chi = table.rows[index]
    d = table.dims[index]
    reg = _regular_rep(group)
    chi_vals = np.array([complex(chi(g)) for g in range(group.n)])
    proj = d / group.n * np.tensordot(chi_vals.conj(), reg, axes=1)
    rng = np.random.default_rng(seed)
    b = rng.normal(size=(group.n, group.n)) + 1j * rng.normal(size=(group.n, group.n))
    x = b @ b.conj().T + np.eye(group.n)
    y = sum(r @ x @ r.T for r in reg)
    z = proj @ y @ proj.conj().T
    z = (z + z.conj().T) / 2
    vals, vecs = np.linalg.eigh(z)
    top = vals[-1]
    basis = vecs[:, np.abs(vals - top) <= 1e-8 * max(1.0, abs(top))]
    if basis.shape[1] != d:
        raise NumericalDegeneracy("could not isolate an irreducible subspace",
                                  index=index, found=int(basis.shape[1]), expected=d)
    rho = np.einsum("ai,gab,bj->gij", basis.conj(), reg, basis)
    traces = np.einsum("gii->g", rho)
    if np.abs(traces - chi_vals).max() > 1e-8:
        raise NumericalDegeneracy("matrix realization does not afford the character", index=index)
    return rho
