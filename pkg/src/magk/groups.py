"""Finite groups and finite magnetic groups stored as multiplication tables.

Elements are the integers ``0..n-1`` in construction order; ``mul[g, h]`` is
the index of ``g*h``. A magnetic group additionally carries the grading
``phi: G -> Z2`` whose kernel ``G0`` acts complex linearly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd

import numpy as np

from .errors import BadAction, NotACocycle, NotAGroup, NotASubgroup, NotGraded, SchemaError

__all__ = [
    "FiniteGroup",
    "FiniteMagneticGroup",
    "ConjClasses",
    "CentralExtensionZ2",
    "build_from_table",
    "build_semidirect",
    "semidirect_table",
    "central_extension_z2",
    "conjugacy_classes",
    "builtin_c4t_sz",
    "c4t_sz_cocycle",
    "subgroups",
]


@dataclass(frozen=True)
class ConjClasses:
    """Partition of a group into conjugacy classes.

    Classes are ordered by their smallest member; ``reps[c]`` is that member.
    """

    class_of: tuple[int, ...]
    reps: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.members)

    def __len__(self) -> int:
        return len(self.reps)


class FiniteGroup:
    """A finite group given by its multiplication table.

    Parameters
    ----------
    mul : array_like
        ``n x n`` table of element indices.
    validate : bool
        Run the full axiom scan (closure, identity, inverses, associativity).
    """

    def __init__(self, mul, *, validate: bool = True, name: str | None = None):
        mul = np.asarray(mul)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
            raise SchemaError("multiplication table must be a non-empty square array",
                              pointer="/mul", shape=list(mul.shape))
        if not np.issubdtype(mul.dtype, np.integer):
            raise SchemaError("multiplication table entries must be integers", pointer="/mul")
        self.mul = mul.astype(np.int64)
        self.mul.setflags(write=False)
        self.n = int(mul.shape[0])
        self.name = name
        if validate:
            self._validate()
        else:
            self.id = int(np.flatnonzero((self.mul == np.arange(self.n)).all(axis=1))[0])
            self.inv = np.argmax(self.mul == self.id, axis=1)

    def _validate(self) -> None:
        n, mul = self.n, self.mul
        bad = np.argwhere((mul < 0) | (mul >= n))
        if len(bad):
            g, h = map(int, bad[0])
            raise NotAGroup("table is not closed", axiom="closure", witness=[g, h])
        rng = np.arange(n)
        left = (mul == rng[None, :]).all(axis=1)
        right = (mul == rng[:, None]).all(axis=0)
        ids = np.flatnonzero(left & right)
        if len(ids) == 0:
            raise NotAGroup("no two-sided identity", axiom="identity")
        self.id = e = int(ids[0])
        inv = np.full(n, -1)
        for g in range(n):
            hs = np.flatnonzero((mul[g] == e) & (mul[:, g] == e))
            if len(hs) == 0:
                raise NotAGroup(f"element {g} has no two-sided inverse", axiom="inverse", witness=[g])
            inv[g] = hs[0]
        self.inv = inv
        # associativity, chunked so large oracle groups stay within memory
        step = max(1, 2_000_000 // (n * n))
        for start in range(0, n, step):
            a = rng[start:start + step]
            lhs = mul[mul[a][:, :, None], rng[None, None, :]]
            rhs = mul[a[:, None, None], mul[None, :, :]]
            diff = np.argwhere(lhs != rhs)
            if len(diff):
                i, b, c = map(int, diff[0])
                raise NotAGroup("multiplication is not associative", axiom="associativity",
                                witness=[int(a[i]), b, c])

    # -- basic structure ------------------------------------------------
    def __len__(self) -> int:
        return self.n

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and np.array_equal(self.mul, other.mul)

    def __hash__(self):
        return hash(self.mul.tobytes())

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<{type(self).__name__}{label} of order {self.n}>"

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = int(self.inv[g]), -k
        out = self.id
        for _ in range(k):
            out = int(self.mul[out, g])
        return out

    @cached_property
    def orders(self) -> np.ndarray:
        orders = np.zeros(self.n, dtype=np.int64)
        cur = np.arange(self.n)
        k = 1
        while not orders.all():
            orders[(cur == self.id) & (orders == 0)] = k
            cur = self.mul[cur, np.arange(self.n)]
            k += 1
        return orders

    @cached_property
    def exponent(self) -> int:
        e = 1
        for o in self.orders:
            e = e * int(o) // gcd(e, int(o))
        return e

    def power_map(self, k: int) -> np.ndarray:
        """Vector ``g -> g^k`` (k >= 0)."""
        out = np.full(self.n, self.id)
        base = np.arange(self.n)
        while k:
            if k & 1:
                out = self.mul[out, base]
            base = self.mul[base, base]
            k >>= 1
        return out

    def conjugate_by(self, x: int) -> np.ndarray:
        """Vector ``g -> x g x^-1``."""
        return self.mul[self.mul[x], self.inv[x]]

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def centralizer(self, g: int) -> np.ndarray:
        return np.flatnonzero(self.mul[:, g] == self.mul[g, :])

    @cached_property
    def classes(self) -> ConjClasses:
        return conjugacy_classes(self)

    def is_subgroup(self, elements) -> bool:
        el = np.unique(np.asarray(elements, dtype=np.int64))
        if len(el) == 0 or el.min() < 0 or el.max() >= self.n:
            return False
        return bool(np.isin(self.mul[np.ix_(el, el)], el).all())

    def subgroup(self, elements) -> tuple["FiniteGroup", np.ndarray]:
        """Return the subgroup on ``elements`` and its embedding.

        The embedding lists parent indices in ascending order; subgroup
        element ``i`` is parent element ``embedding[i]``.
        """
        el = np.unique(np.asarray(elements, dtype=np.int64))
        if not self.is_subgroup(el):
            raise NotASubgroup("elements are not closed under multiplication",
                               elements=[int(x) for x in el])
        lookup = np.full(self.n, -1)
        lookup[el] = np.arange(len(el))
        sub = FiniteGroup(lookup[self.mul[np.ix_(el, el)]], validate=False)
        return sub, el

    def relabel(self, perm) -> "FiniteGroup":
        """Group isomorphic via ``new index = perm[old index]``."""
        perm = np.asarray(perm)
        invp = np.argsort(perm)
        new = perm[self.mul[np.ix_(invp, invp)]]
        return FiniteGroup(new, validate=False)

    def generated(self, gens) -> np.ndarray:
        """Elements of the subgroup generated by ``gens``."""
        seen = {self.id}
        frontier = [self.id]
        gens = [int(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.mul[x, g])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return np.array(sorted(seen))


class FiniteMagneticGroup(FiniteGroup):
    """A finite group with a surjective grading ``phi: G -> Z2``.

    Elements with ``phi = 1`` act antiunitarily. Use
    :func:`build_from_table` to construct with full validation.
    """

    def __init__(self, mul, phi, *, validate: bool = True, name: str | None = None):
        super().__init__(mul, validate=validate, name=name)
        phi = np.asarray(phi)
        if phi.shape != (self.n,):
            raise SchemaError("phi must have one entry per element", pointer="/phi",
                              length=int(phi.size), expected=self.n)
        if not np.isin(phi, (0, 1)).all():
            bad = int(np.flatnonzero(~np.isin(phi, (0, 1)))[0])
            raise SchemaError("phi entries must be 0 or 1", pointer=f"/phi/{bad}")
        self.phi = phi.astype(np.int64)
        self.phi.setflags(write=False)
        if validate:
            hom = phi[self.mul] == (phi[:, None] ^ phi[None, :])
            if not hom.all():
                g, h = map(int, np.argwhere(~hom)[0])
                raise NotGraded("phi is not a homomorphism", witness=[g, h])
            if not phi.any():
                raise NotGraded("phi is not surjective")

    def __eq__(self, other):
        return (isinstance(other, FiniteMagneticGroup) and np.array_equal(self.mul, other.mul)
                and np.array_equal(self.phi, other.phi))

    __hash__ = FiniteGroup.__hash__

    @cached_property
    def unitary(self) -> np.ndarray:
        return np.flatnonzero(self.phi == 0)

    @cached_property
    def antiunitary(self) -> np.ndarray:
        return np.flatnonzero(self.phi == 1)

    @cached_property
    def kernel(self) -> tuple[FiniteGroup, np.ndarray]:
        """``(G0, embedding)`` for the unitary subgroup."""
        return self.subgroup(self.unitary)

    def magnetic_subgroup(self, elements) -> "FiniteMagneticGroup":
        sub, emb = self.subgroup(elements)
        if not self.phi[emb].any():
            raise NotGraded("subgroup lies inside the unitary subgroup", elements=emb.tolist())
        return FiniteMagneticGroup(sub.mul, self.phi[emb], validate=False)

    def relabel(self, perm) -> "FiniteMagneticGroup":
        perm = np.asarray(perm)
        plain = super().relabel(perm)
        return FiniteMagneticGroup(plain.mul, self.phi[np.argsort(perm)], validate=False)


def conjugacy_classes(group: FiniteGroup) -> ConjClasses:
    """Partition ``group`` into conjugacy classes, ordered by smallest member."""
    n = group.n
    class_of = [-1] * n
    reps, members = [], []
    conj = group.mul[group.mul, group.inv[:, None]]  # conj[x, g] = x g x^-1
    for g in range(n):
        if class_of[g] >= 0:
            continue
        orbit = sorted(set(conj[:, g].tolist()))
        for x in orbit:
            class_of[x] = len(reps)
        reps.append(g)
        members.append(tuple(orbit))
    return ConjClasses(tuple(class_of), tuple(reps), tuple(members))


def build_from_table(mul, phi, *, name: str | None = None) -> FiniteMagneticGroup:
    """Validate a multiplication table and grading as a magnetic group."""
    mul = np.asarray(mul)
    if mul.ndim == 2 and mul.shape[0] % 2:
        raise NotGraded("a magnetic group has even order", n=int(mul.shape[0]))
    return FiniteMagneticGroup(mul, phi, name=name)


def semidirect_table(m: int, k: int, action: int) -> np.ndarray:
    """Table of ``Z_m x| Z_k`` with ``h a h^-1 = a^action``.

    Element ``i + m*j`` is ``a^i h^j``.
    """
    if m < 1 or k < 1:
        raise BadAction("cyclic factors must have positive order", m=m, k=k)
    if gcd(action % m or m, m) != 1 and m > 1:
        raise BadAction("action is not a unit mod m", m=m, action=action)
    if pow(action, k, m) != 1 % m:
        raise BadAction("action^k is not 1 mod m", m=m, k=k, action=action)
    powers = [pow(action, j, m) for j in range(k)]
    i = np.arange(m * k) % m
    j = np.arange(m * k) // m
    ii = (i[:, None] + np.array(powers)[j][:, None] * i[None, :]) % m
    jj = (j[:, None] + j[None, :]) % k
    return ii + m * jj


def build_semidirect(m: int, k: int, action: int, phi_spec="on_h", *,
                     name: str | None = None) -> FiniteMagneticGroup:
    """Magnetic group ``Z_m x| Z_k`` with ``h a h^-1 = a^action``.

    ``phi_spec`` is ``"on_h"`` (phi = j mod 2), ``"on_n"`` (phi = i mod 2),
    ``"on_both"`` (phi = i + j mod 2) or an explicit 0/1 list.
    """
    mul = semidirect_table(m, k, action)
    idx = np.arange(m * k)
    i, j = idx % m, idx // m
    if isinstance(phi_spec, str):
        rules = {"on_h": j % 2, "on_n": i % 2, "on_both": (i + j) % 2}
        if phi_spec not in rules:
            raise SchemaError(f"unknown phi rule {phi_spec!r}", pointer="/phi")
        phi = rules[phi_spec]
    else:
        phi = np.asarray(phi_spec)
    return build_from_table(mul, phi, name=name)


@dataclass(frozen=True, eq=False)
class CentralExtensionZ2:
    """A central extension ``1 -> {1, z} -> total -> base -> 1``.

    Element ``g + n*s`` of ``total`` is the lift of base element ``g`` times
    ``z^s``; ``z`` acts on twisted representations by the scalar -1.
    """

    total: FiniteMagneticGroup
    proj: np.ndarray
    z: int
    base: FiniteMagneticGroup
    cocycle: np.ndarray


def central_extension_z2(base: FiniteMagneticGroup, cocycle) -> CentralExtensionZ2:
    """Build the central Z2-extension defined by a normalized +-1 cocycle.

    Antiunitary elements invert A, but inversion is trivial on A = Z2, so
    the twisted cocycle identity is the ordinary one.
    """
    c = np.asarray(cocycle)
    n = base.n
    if c.shape != (n, n):
        raise SchemaError("cocycle must be an n x n table", pointer="/cocycle",
                          shape=list(c.shape))
    if not np.isin(c, (1, -1)).all():
        i, j = map(int, np.argwhere(~np.isin(c, (1, -1)))[0])
        raise SchemaError("cocycle entries must be +1 or -1", pointer=f"/cocycle/{i}/{j}")
    e = base.id
    if (c[e] != 1).any() or (c[:, e] != 1).any():
        g = int(np.flatnonzero((c[e] != 1) | (c[:, e] != 1))[0])
        raise NotACocycle("cocycle is not normalized", witness=[e, g])
    mul = base.mul
    s = (c == -1).astype(np.int64)
    # s(g,h) + s(gh,k) == s(h,k) + s(g,hk) mod 2 for all g, h, k
    lhs = s[:, :, None] ^ s[mul][:, :, :]
    rhs = s[None, :, :] ^ s[np.arange(n)[:, None, None], mul[None, :, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        raise NotACocycle("2-cocycle identity fails", witness=[int(x) for x in bad[0]])
    idx = np.arange(2 * n)
    g, sg = idx % n, idx // n
    prod = mul[g[:, None], g[None, :]]
    sign = (sg[:, None] + sg[None, :] + s[g[:, None], g[None, :]]) % 2
    total = FiniteMagneticGroup(prod + n * sign, base.phi[g], validate=True)
    return CentralExtensionZ2(total=total, proj=g.copy(), z=e + n, base=base, cocycle=c.copy())


def c4t_sz_cocycle() -> np.ndarray:
    """Cocycle on Z4 x Z2 = <a> x <b> realizing (C4T)^4 = -1 and b a b = a^5.

    Element ``i + 4j`` is ``a^i b^j``; the section lifts it to ``A^i b^j``
    with A^8 = 1, so a product picks up z exactly when the exponent of A
    lands in 4..7 mod 8.
    """
    c = np.ones((8, 8), dtype=np.int64)
    for g in range(8):
        i, j = g % 4, g // 4
        for h in range(8):
            i2 = h % 4
            if (i + pow(5, j) * i2) % 8 >= 4:
                c[g, h] = -1
    return c


def builtin_c4t_sz() -> tuple[FiniteMagneticGroup, CentralExtensionZ2]:
    """The C4T x Sz magnetic group and its spin-orbit central extension."""
    G = build_semidirect(4, 2, 1, "on_n", name="c4t-sz")
    ext = central_extension_z2(G, c4t_sz_cocycle())
    t = ext.total
    a, b = 1, 4
    assert t.power(a, 8) == t.id and t.power(a, 4) == ext.z
    assert t.power(b, 2) == t.id
    assert t.mul[t.mul[b, a], b] == t.power(a, 5)
    return G, ext


def subgroups(group: FiniteGroup) -> list[np.ndarray]:
    """All subgroups, as sorted element arrays, ordered by (size, elements)."""
    cyclic = {tuple(group.generated([g]).tolist()) for g in range(group.n)}
    found = set(cyclic)
    frontier = set(found)
    while frontier:
        new = set()
        for h in frontier:
            for c in cyclic:
                joined = tuple(group.generated(list(h) + list(c)).tolist())
                if joined not in found:
                    new.add(joined)
        found |= new
        frontier = new
    return [np.array(s) for s in sorted(found, key=lambda s: (len(s), s))]
