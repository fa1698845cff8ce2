"""Finite groups acting on the 2-torus by affine maps, and rational K ranks.

Points of T^2 = R^2/Z^2 are pairs of Fractions in [0, 1). The rank of
K_G(T^2) tensor Q is computed as a sum over conjugacy classes [g] of the
centralizer-invariant cohomology of the fixed set X^g (even and odd
degrees separately). Fixed sets are points, circles or the whole torus and
their cohomology is handled combinatorially.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .corep import involution_permutation, twisted_context
from .errors import NotAnAction, NotNormalizing, SchemaError, TheoremViolated
from .groups import CentralExtensionZ2, FiniteGroup, builtin_c4t_sz
from .snf import cokernel, integer_rank, smith_normal_form

__all__ = [
    "AffineMap",
    "AffineTorusAction",
    "FixedSetDescriptor",
    "RankResult",
    "SpinSplitReport",
    "validate_action",
    "fixed_set",
    "delocalized_rank",
    "involution_rank",
    "spin_sectors",
    "magnetic_invariant_rank_spinsplit",
    "mayer_vietoris_c2",
    "C4T_MAP",
    "builtin_c4t_action",
]

Point = tuple[Fraction, Fraction]


def _mod1(x) -> Point:
    return (Fraction(x[0]) % 1, Fraction(x[1]) % 1)


def _matvec(A, x):
    return (A[0][0] * x[0] + A[0][1] * x[1], A[1][0] * x[0] + A[1][1] * x[1])


@dataclass(frozen=True)
class AffineMap:
    """``x -> A x + v`` on T^2, with ``v`` reduced mod Z^2."""

    A: tuple[tuple[int, int], tuple[int, int]]
    v: Point = (Fraction(0), Fraction(0))

    def __post_init__(self):
        A = tuple(tuple(int(c) for c in row) for row in self.A)
        if len(A) != 2 or any(len(r) != 2 for r in A):
            raise SchemaError("A must be a 2x2 integer matrix", pointer="/A")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "v", _mod1(self.v))

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(((1, 0), (0, 1)))

    @classmethod
    def from_json(cls, obj: Mapping, pointer: str = "") -> "AffineMap":
        if not isinstance(obj, Mapping) or "A" not in obj:
            raise SchemaError("affine map needs an 'A' entry", pointer=pointer or "/")
        A = obj["A"]
        if (not isinstance(A, list) or len(A) != 2
                or any(not isinstance(r, list) or len(r) != 2 for r in A)
                or any(not isinstance(c, int) or isinstance(c, bool) for r in A for c in r)):
            raise SchemaError("A must be a 2x2 integer matrix", pointer=f"{pointer}/A")
        raw_v = obj.get("v", ["0", "0"])
        if not isinstance(raw_v, list) or len(raw_v) != 2:
            raise SchemaError("v must be a pair of rationals", pointer=f"{pointer}/v")
        try:
            v = tuple(Fraction(str(c)) for c in raw_v)
        except (ValueError, ZeroDivisionError):
            raise SchemaError("v entries must be rationals like '1/2'", pointer=f"{pointer}/v") from None
        return cls(tuple(map(tuple, A)), v)

    def to_json(self) -> dict:
        return {"A": [list(r) for r in self.A], "v": [str(c) for c in self.v]}

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.A
        return a * d - b * c

    @property
    def trace(self) -> int:
        return self.A[0][0] + self.A[1][1]

    def __call__(self, x) -> Point:
        y = _matvec(self.A, x)
        return _mod1((y[0] + self.v[0], y[1] + self.v[1]))

    def compose(self, other: "AffineMap") -> "AffineMap":
        """``self o other``."""
        A = tuple(tuple(sum(self.A[i][k] * other.A[k][j] for k in range(2)) for j in range(2))
                  for i in range(2))
        w = _matvec(self.A, other.v)
        return AffineMap(A, (w[0] + self.v[0], w[1] + self.v[1]))

    def inverse(self) -> "AffineMap":
        d = self.det
        if d not in (1, -1):
            raise NotAnAction("linear part is not invertible over Z", det=d)
        (a, b), (c, e) = self.A
        inv = ((e * d, -b * d), (-c * d, a * d))
        w = _matvec(inv, self.v)
        return AffineMap(inv, (-w[0], -w[1]))


C4T_MAP = AffineMap(((0, 1), (-1, 0)))


@dataclass(frozen=True, eq=False)
class AffineTorusAction:
    """One affine map per group element."""

    group: FiniteGroup
    maps: tuple[AffineMap, ...]

    @classmethod
    def from_generators(cls, group: FiniteGroup, assigned: Mapping[int, AffineMap]) -> "AffineTorusAction":
        """Extend an assignment on some elements multiplicatively to the whole group."""
        known = {group.id: AffineMap.identity()}
        for g, m in assigned.items():
            g = int(g)
            if not 0 <= g < group.n:
                raise SchemaError("element index out of range", pointer=f"/{g}")
            if m.det not in (1, -1):
                raise NotAnAction("linear part must have determinant +-1", element=g, det=m.det)
            if g in known and known[g] != m:
                raise NotAnAction("identity must act trivially", witness=[g, g])
            known[g] = m
        changed = True
        while changed:
            changed = False
            for g, mg in list(known.items()):
                for h, mh in list(known.items()):
                    gh = int(group.mul[g, h])
                    m = mg.compose(mh)
                    if gh not in known:
                        known[gh] = m
                        changed = True
                    elif known[gh] != m:
                        raise NotAnAction("assignment is not a homomorphism", witness=[g, h])
        missing = [g for g in range(group.n) if g not in known]
        if missing:
            raise SchemaError("assigned elements do not generate the group",
                              pointer="/", missing=missing)
        action = cls(group, tuple(known[g] for g in range(group.n)))
        validate_action(group, action)
        return action

    @classmethod
    def from_json(cls, group: FiniteGroup, spec: Mapping) -> "AffineTorusAction":
        """Spec ``{element_index: {"A": [[..]], "v": ["p/q", "p/q"]}}``."""
        if not isinstance(spec, Mapping):
            raise SchemaError("action spec must be an object", pointer="/")
        assigned = {}
        for key, obj in spec.items():
            try:
                g = int(key)
            except ValueError:
                raise SchemaError("keys must be element indices", pointer=f"/{key}") from None
            assigned[g] = AffineMap.from_json(obj, pointer=f"/{key}")
        return cls.from_generators(group, assigned)

    def to_json(self) -> dict:
        return {str(g): m.to_json() for g, m in enumerate(self.maps)}

    def restrict(self, elements: Sequence[int]) -> "AffineTorusAction":
        sub, emb = self.group.subgroup(elements)
        return AffineTorusAction(sub, tuple(self.maps[int(g)] for g in emb))

    def relabel(self, perm) -> "AffineTorusAction":
        """Same action after ``group.relabel(perm)`` (new index perm[g] for old g)."""
        perm = np.asarray(perm)
        maps = [None] * self.group.n
        for old, new in enumerate(perm):
            maps[int(new)] = self.maps[old]
        return AffineTorusAction(self.group.relabel(perm), tuple(maps))


def validate_action(group: FiniteGroup, action: AffineTorusAction) -> None:
    """Raise NotAnAction unless ``action`` is a homomorphism into Aff(T^2)."""
    maps = action.maps
    if len(maps) != group.n:
        raise NotAnAction("one map per group element is required", expected=group.n, got=len(maps))
    for g, m in enumerate(maps):
        if m.det not in (1, -1):
            raise NotAnAction("linear part must have determinant +-1", element=g, det=m.det)
    if maps[group.id] != AffineMap.identity():
        raise NotAnAction("identity must act trivially", witness=[group.id, group.id])
    for g in range(group.n):
        for h in range(group.n):
            if maps[int(group.mul[g, h])] != maps[g].compose(maps[h]):
                raise NotAnAction("assignment is not a homomorphism", witness=[g, h])


@dataclass(frozen=True)
class FixedSetDescriptor:
    """Fixed set of one affine map.

    ``circles`` components are recorded by one base point each plus the
    common primitive direction; ``label`` is the integer row vector whose
    pairing with a point (mod 1) tells components apart.
    """

    kind: str  # "whole-torus" | "points" | "circles"
    points: tuple[Point, ...] = ()
    direction: tuple[int, int] | None = None
    label: tuple[int, int] | None = None

    @property
    def count(self) -> int:
        return len(self.points)

    def component_of(self, x: Point) -> int:
        if self.kind == "points":
            return self.points.index(_mod1(x))
        if self.kind == "circles":
            key = (self.label[0] * x[0] + self.label[1] * x[1]) % 1
            for i, p in enumerate(self.points):
                if (self.label[0] * p[0] + self.label[1] * p[1]) % 1 == key:
                    return i
            raise ValueError("point does not lie on the fixed set")
        return 0

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "points":
            out["points"] = [[str(c) for c in p] for p in self.points]
        elif self.kind == "circles":
            out["count"] = len(self.points)
            out["direction"] = list(self.direction)
        return out


def fixed_set(action: AffineTorusAction, g: int) -> FixedSetDescriptor:
    """Solve ``(A - I) x = -v mod Z^2`` exactly via the Smith form of ``A - I``."""
    m = action.maps[g]
    B = np.array([[m.A[0][0] - 1, m.A[0][1]], [m.A[1][0], m.A[1][1] - 1]], dtype=object)
    D, U, V = smith_normal_form(B)
    w = _matvec(U.tolist(), (-m.v[0], -m.v[1]))  # D y = w mod Z^2, x = V y
    d1, d2 = int(D[0, 0]), int(D[1, 1])
    Vl = V.tolist()
    if d1 == 0:
        if m.v == (0, 0):
            return FixedSetDescriptor("whole-torus")
        return FixedSetDescriptor("points")
    if d2 == 0:
        if w[1] % 1 != 0:
            return FixedSetDescriptor("points")
        pts = tuple(_mod1(_matvec(Vl, ((w[0] + n) / d1, 0))) for n in range(d1))
        direction = (int(V[0, 1]), int(V[1, 1]))
        # first row of V^-1 separates the components
        det = int(V[0, 0] * V[1, 1] - V[0, 1] * V[1, 0])
        label = (int(V[1, 1]) * det, -int(V[0, 1]) * det)
        return FixedSetDescriptor("circles", pts, direction, label)
    pts = sorted({_mod1(_matvec(Vl, ((w[0] + n1) / d1, (w[1] + n2) / d2)))
                  for n1 in range(d1) for n2 in range(d2)})
    return FixedSetDescriptor("points", tuple(pts))


def _circle_sign(m: AffineMap, direction) -> int:
    w = _matvec(m.A, direction)
    if w == tuple(direction):
        return 1
    if w == (-direction[0], -direction[1]):
        return -1
    raise ValueError("map does not preserve the circle direction")


def _traces(fs: FixedSetDescriptor, m: AffineMap) -> tuple[int, int]:
    """Traces of ``m`` on even and odd cohomology of its invariant set ``fs``."""
    if fs.kind == "whole-torus":
        return 1 + m.det, m.trace
    if fs.kind == "points":
        return sum(m(p) == p for p in fs.points), 0
    even = odd = 0
    for i, p in enumerate(fs.points):
        if fs.component_of(m(p)) == i:
            even += 1
            odd += _circle_sign(m, fs.direction)
    return even, odd


@dataclass(frozen=True)
class RankResult:
    """Rational ranks with a per-sector breakdown ``(class rep, even, odd)``."""

    rank_even: int
    rank_odd: int
    sectors: tuple[tuple[int, int, int], ...] = ()
    involutive: bool | None = None

    def to_json(self) -> dict:
        out = {
            "rank_even": self.rank_even,
            "rank_odd": self.rank_odd,
            "sectors": [{"rep": r, "even": e, "odd": o} for r, e, o in self.sectors],
        }
        if self.involutive is not None:
            out["involutive"] = self.involutive
        return out


def delocalized_rank(group: FiniteGroup, action: AffineTorusAction) -> RankResult:
    """Rank of K_G(T^2) tensor Q as a sum of fixed-set sectors."""
    sectors = []
    for g in group.classes.reps:
        fs = fixed_set(action, g)
        cent = group.centralizer(g)
        even = odd = 0
        for h in cent:
            e, o = _traces(fs, action.maps[int(h)])
            even += e
            odd += o
        ev, od = Fraction(even, len(cent)), Fraction(odd, len(cent))
        if ev.denominator != 1 or od.denominator != 1 or ev < 0 or od < 0:
            raise ArithmeticError(f"non-integral sector rank at class of {g}")
        sectors.append((int(g), int(ev), int(od)))
    return RankResult(sum(s[1] for s in sectors), sum(s[2] for s in sectors), tuple(sectors))


# -- exploratory involution on sectors -------------------------------------

def _basis(fs: FixedSetDescriptor) -> tuple[int, int]:
    if fs.kind == "whole-torus":
        return 2, 2
    if fs.kind == "points":
        return len(fs.points), 0
    return len(fs.points), len(fs.points)


def _push(src: FixedSetDescriptor, dst: FixedSetDescriptor, m: AffineMap,
          twist: bool) -> tuple[np.ndarray, np.ndarray]:
    """Matrices of ``m_* : H(src) -> H(dst)`` on even and odd parts.

    With ``twist`` the degree-2 class picks up a sign, as complex
    conjugation does on K^-2.
    """
    ne, no = _basis(src)
    me, mo = _basis(dst)
    E, O = np.zeros((me, ne)), np.zeros((mo, no))
    if src.kind == "whole-torus":
        inv = m.inverse().A
        E[0, 0] = 1
        E[1, 1] = m.det * (-1 if twist else 1)
        O[:] = np.array(inv).T
    elif src.kind == "points":
        for i, p in enumerate(src.points):
            E[dst.component_of(m(p)), i] = 1
    else:
        for i, p in enumerate(src.points):
            j = dst.component_of(m(p))
            E[j, i] = 1
            O[j, i] = _circle_sign(m, src.direction) if src.direction == dst.direction else \
                np.sign(np.dot(_matvec(m.A, src.direction), dst.direction))
    return E, O


def _conj_perm(group, action, a0_map, rule, conj):
    inv_a0 = a0_map.inverse()
    if conj is None:
        conj = []
        for g in range(group.n):
            target = inv_a0.compose(action.maps[g]).compose(a0_map)
            hits = [h for h in range(group.n) if action.maps[h] == target]
            if len(hits) != 1:
                raise NotNormalizing("a0 map does not induce a unique conjugation; pass conj",
                                     element=g, matches=hits)
            conj.append(hits[0])
    conj = [int(c) for c in conj]
    for g in range(group.n):
        if action.maps[conj[g]] != inv_a0.compose(action.maps[g]).compose(a0_map):
            raise NotNormalizing("conj does not match the a0 map", element=g)
    if sorted(conj) != list(range(group.n)):
        raise NotNormalizing("conj is not a permutation")
    if rule == "inverse":
        return [conj[int(group.inv[g])] for g in range(group.n)]
    if rule == "direct":
        return conj
    raise ValueError("sector_rule must be 'inverse' or 'direct'")


def involution_rank(group: FiniteGroup, action: AffineTorusAction, a0_map: AffineMap,
                    sector_rule: str = "inverse", conj: Sequence[int] | None = None) -> RankResult:
    """Invariant rank under G0 and one antiunitary involution (exploratory).

    Sector g goes to sector a0^-1 g^-1 a0 (``"inverse"``) or a0^-1 g a0
    (``"direct"``) by pushing forward along the inverse of ``a0_map``; even
    classes of degree 2k get the sign (-1)^k, odd classes are left alone.
    ``involutive`` records whether its square fixes the G0-invariants.
    """
    target = _conj_perm(group, action, a0_map, sector_rule, conj)
    fsets = [fixed_set(action, g) for g in range(group.n)]
    dims = [_basis(fs) for fs in fsets]
    offsets = [np.cumsum([0] + [d[p] for d in dims]) for p in (0, 1)]
    sizes = [int(o[-1]) for o in offsets]

    def block_matrix(route, m, twist):
        mats = [np.zeros((s, s)) for s in sizes]
        for g in range(group.n):
            t = route[g]
            E, O = _push(fsets[g], fsets[t], m, twist)
            for p, blk in ((0, E), (1, O)):
                o = offsets[p]
                mats[p][o[t]:o[t + 1], o[g]:o[g + 1]] = blk
        return mats

    avg = [np.zeros((s, s)) for s in sizes]
    for h in range(group.n):
        route = [int(group.mul[group.mul[h, g], group.inv[h]]) for g in range(group.n)]
        for p, mat in enumerate(block_matrix(route, action.maps[h], False)):
            avg[p] += mat / group.n
    tau = block_matrix(target, a0_map.inverse(), True)

    ranks, involutive = [], True
    for p in (0, 1):
        s = sizes[p]
        if s == 0:
            ranks.append(0)
            continue
        stacked = np.vstack([avg[p] - np.eye(s), tau[p] - np.eye(s)])
        ranks.append(s - int(np.linalg.matrix_rank(stacked, tol=1e-9)))
        # tau^2 is the action of a0^2, so it need only be trivial on G0-invariants
        involutive &= bool(np.allclose(tau[p] @ tau[p] @ avg[p], avg[p]))
    return RankResult(ranks[0], ranks[1], (), involutive)


# -- the C4T x Sz application ----------------------------------------------

def builtin_c4t_action(ext: CentralExtensionZ2) -> AffineTorusAction:
    """C4T lift acts by (x, y) -> (y, -x); Sz and z act trivially."""
    a, b = 1, ext.base.n // 2  # lifts of a and b in the extension
    return AffineTorusAction.from_generators(
        ext.total, {a: C4T_MAP, b: AffineMap.identity(), ext.z: AffineMap.identity()})


@dataclass(frozen=True)
class SpinSplitReport:
    """Intermediate data of the spin-splitting chain."""

    sector_sizes: tuple[int, int]       # twisted irreducibles with Sz = +1 / -1
    involution_swaps: bool
    quotient_order: int
    sector: RankResult
    two_sector_total: tuple[int, int]
    invariant: RankResult

    def to_json(self) -> dict:
        return {
            "sector_sizes": list(self.sector_sizes),
            "involution_swaps_sectors": self.involution_swaps,
            "untwisted_group_order": self.quotient_order,
            "sector": self.sector.to_json(),
            "two_sector_total": {"rank_even": self.two_sector_total[0],
                                 "rank_odd": self.two_sector_total[1]},
            "invariant": self.invariant.to_json(),
        }


def _quotient_by_kernel(group: FiniteGroup, action: AffineTorusAction, elements):
    """The image of ``elements`` in Aff(T^2) as a group with its tautological action."""
    images = sorted({action.maps[int(g)] for g in elements},
                    key=lambda m: (m != AffineMap.identity(), m.A, m.v))
    index = {m: i for i, m in enumerate(images)}
    mul = np.array([[index[x.compose(y)] for y in images] for x in images])
    q = FiniteGroup(mul, name="image")
    return q, AffineTorusAction(q, tuple(images))


def spin_sectors(ext: CentralExtensionZ2 | None = None,
                 action: AffineTorusAction | None = None) -> SpinSplitReport:
    """Spin splitting, untwisting and the magnetic involution, step by step.

    Sz commutes with the unitary part and acts trivially on T^2, so twisted
    K over the unitary subgroup splits by the Sz eigenvalue. In each sector
    the kernel <Sz, z> of the torus action is divided out and the remaining
    twist is removed by a fixed phase, leaving K of the image group. The
    antiunitary conjugation flips the Sz character and swaps the sectors.
    """
    if ext is None:
        _, ext = builtin_c4t_sz()
    if action is None:
        action = builtin_c4t_action(ext)
    ctx = twisted_context(ext)
    b = ext.base.n // 2
    bi, ei = ctx.g0_index(b), ctx.g0.id
    sector_of = {}
    for i in ctx.active:
        chi = ctx.table.rows[i]
        ratio = complex(chi(bi)) / complex(chi(ei))
        if abs(abs(ratio) - 1) > 1e-12 or abs(ratio.imag) > 1e-12:
            raise TheoremViolated("Sz does not act by a scalar +-1", irreducible=i)
        sector_of[i] = 1 if ratio.real > 0 else -1
    perm = involution_permutation(ctx)
    swaps = all(sector_of[perm[i]] == -sector_of[i] for i in ctx.active)
    sizes = (sum(s == 1 for s in sector_of.values()), sum(s == -1 for s in sector_of.values()))

    unitary = ctx.embedding
    kernel = {int(g) for g in unitary if action.maps[int(g)] == AffineMap.identity()}
    if kernel != {ext.total.id, b, ext.z, int(ext.total.mul[b, ext.z])}:
        raise TheoremViolated("torus action kernel is not <Sz, z>", kernel=sorted(kernel))
    q, q_action = _quotient_by_kernel(ext.total, action, unitary)
    if sizes[0] != len(q.classes) or sizes[1] != len(q.classes):
        raise TheoremViolated("sector does not untwist to the image group",
                              sectors=list(sizes), image_classes=len(q.classes))
    sector = delocalized_rank(q, q_action)
    total = (2 * sector.rank_even, 2 * sector.rank_odd)
    if not swaps:
        raise TheoremViolated("involution does not swap spin sectors")
    # swap involution on V + V has invariants of rank dim V
    invariant = RankResult(total[0] // 2, total[1] // 2, sector.sectors)
    return SpinSplitReport(sizes, swaps, q.n, sector, total, invariant)


def magnetic_invariant_rank_spinsplit(ext: CentralExtensionZ2 | None = None,
                                      action: AffineTorusAction | None = None) -> RankResult:
    return spin_sectors(ext, action).invariant


def mayer_vietoris_c2() -> dict:
    """Hand Mayer-Vietoris computation of K_{Z2}(T^2) for the rotation by pi.

    U = four invariant disks at the fixed points, V = complement (free),
    U cap V = four annuli. See docs/mayer_vietoris.md for the maps.
    """
    # K^0(U) + K^0(V) = R(Z2)^4 + Z -> K^0(U cap V) = Z^4: (a_p, b_p, c) -> a_p + b_p - c
    alpha0 = np.zeros((4, 9), dtype=object)
    for p in range(4):
        alpha0[p, 2 * p] = alpha0[p, 2 * p + 1] = 1
        alpha0[p, 8] = -1
    # K^1(V) = Z^3 (wedge of three circles) -> K^1(U cap V) = Z^4 boundary loops
    alpha1 = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]], dtype=object)
    r0, r1 = integer_rank(alpha0), integer_rank(alpha1)
    coker0_free, coker0_tors = cokernel(alpha0)
    coker1_free, coker1_tors = cokernel(alpha1)
    ker0, ker1 = alpha0.shape[1] - r0, alpha1.shape[1] - r1
    return {
        "alpha0": alpha0.astype(int).tolist(),
        "alpha1": alpha1.astype(int).tolist(),
        "ker_alpha0": ker0,
        "coker_alpha0": {"free_rank": coker0_free, "torsion": coker0_tors},
        "ker_alpha1": ker1,
        "coker_alpha1": {"free_rank": coker1_free, "torsion": coker1_tors},
        "rank_even": ker0 + coker1_free,
        "rank_odd": coker0_free + ker1,
    }
