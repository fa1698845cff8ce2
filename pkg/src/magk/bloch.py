"""Tight-binding models on T^2, their symmetries and spin-resolved Chern numbers.

Conventions
-----------
H(k) = sum_d t_d exp(i k.d). An antiunitary operator (U, kmap) is a
symmetry when U conj(H(k)) U^dagger = H(kmap k); a unitary one when
U H(k) U^dagger = H(kmap k).

Chern numbers use the link-variable method of Fukui, Hatsugai and Suzuki
on the grid k = 2 pi (i, j) / N. Plaquettes are traversed counter-clockwise
(k, k + x, k + x + y, k + y) and the flux through each is the principal
branch of Im log in (-pi, pi].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (GappedAssumptionFailed, NonConvergent, NotSpinConserving,
                     SchemaError, SymmetryViolated, TheoremViolated)

__all__ = [
    "TightBindingModel",
    "SymmetryOp",
    "ChernResult",
    "hamiltonian_at",
    "check_symmetry",
    "spin_blocks",
    "chern_number",
    "chern_and_gap",
    "invariants",
    "builtin_c4t_model",
    "transform_model",
    "symmetrize",
    "random_hermitian_model",
    "symmetric_perturbation",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

DEFAULT_MESH = 48
DEFAULT_TOL = 1e-8
GAP_RELATIVE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class TightBindingModel:
    n: int
    hoppings: Mapping[tuple[int, int], np.ndarray]
    fermi: float = 0.0

    def __post_init__(self):
        hops = {}
        for d, t in self.hoppings.items():
            d = (int(d[0]), int(d[1]))
            t = np.asarray(t, dtype=complex)
            if t.shape != (self.n, self.n):
                raise SchemaError("hopping matrix has the wrong shape",
                                  pointer=f"/hoppings/{list(d)}", shape=list(t.shape))
            hops[d] = hops.get(d, 0) + t
        for d, t in hops.items():
            partner = hops.get((-d[0], -d[1]))
            ref = np.zeros_like(t) if partner is None else partner.conj().T
            if np.abs(t - ref).max(initial=0.0) > 1e-12:
                raise SchemaError("hopping at -d must be the conjugate transpose of hopping at d",
                                  pointer=f"/hoppings/{list(d)}")
        object.__setattr__(self, "hoppings", dict(sorted(hops.items())))

    @classmethod
    def from_json(cls, obj: Mapping) -> "TightBindingModel":
        if not isinstance(obj, Mapping):
            raise SchemaError("model must be an object", pointer="/")
        for key in ("bands", "hoppings"):
            if key not in obj:
                raise SchemaError(f"missing field {key!r}", pointer=f"/{key}")
        n = obj["bands"]
        if not isinstance(n, int) or n < 0:
            raise SchemaError("bands must be a non-negative integer", pointer="/bands")
        hops = {}
        for i, entry in enumerate(obj["hoppings"]):
            try:
                d = tuple(int(x) for x in entry["d"])
                t = np.array([[complex(re, im) for re, im in row] for row in entry["t"]])
            except (KeyError, TypeError, ValueError):
                raise SchemaError("hopping needs 'd' and 't' as [[re, im], ...] rows",
                                  pointer=f"/hoppings/{i}") from None
            if len(d) != 2:
                raise SchemaError("d must have two components", pointer=f"/hoppings/{i}/d")
            if t.shape != (n, n):
                raise SchemaError("t must be bands x bands", pointer=f"/hoppings/{i}/t")
            hops[d] = hops.get(d, 0) + t
        fermi = obj.get("fermi", 0.0)
        if not isinstance(fermi, (int, float)) or isinstance(fermi, bool):
            raise SchemaError("fermi must be a number", pointer="/fermi")
        return cls(n, hops, float(fermi))

    def to_json(self) -> dict:
        return {
            "bands": self.n,
            "fermi": self.fermi,
            "hoppings": [
                {"d": list(d), "t": [[[float(z.real) + 0.0, float(z.imag) + 0.0] for z in row]
                                     for row in t]}
                for d, t in self.hoppings.items()
            ],
        }

    def __add__(self, other: "TightBindingModel") -> "TightBindingModel":
        hops = dict(self.hoppings)
        for d, t in other.hoppings.items():
            hops[d] = hops.get(d, 0) + t
        return TightBindingModel(self.n, hops, self.fermi)

    def scaled(self, s: float) -> "TightBindingModel":
        return TightBindingModel(self.n, {d: s * t for d, t in self.hoppings.items()}, self.fermi)

    def conjugated(self, W: np.ndarray) -> "TightBindingModel":
        """Basis change ``t_d -> W t_d W^dagger`` by a k-independent unitary."""
        return TightBindingModel(self.n, {d: W @ t @ W.conj().T for d, t in self.hoppings.items()},
                                 self.fermi)


@dataclass(frozen=True, eq=False)
class SymmetryOp:
    U: np.ndarray
    antiunitary: bool = False
    kmap: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=np.int64))
    name: str = ""

    def __post_init__(self):
        U = np.asarray(self.U, dtype=complex)
        kmap = np.asarray(self.kmap, dtype=np.int64)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise SchemaError("U must be square", pointer="/U")
        if np.abs(U @ U.conj().T - np.eye(len(U))).max(initial=0.0) > 1e-10:
            raise SchemaError("U must be unitary", pointer="/U")
        if kmap.shape != (2, 2) or round(abs(np.linalg.det(kmap))) != 1:
            raise SchemaError("kmap must be invertible over Z", pointer="/kmap")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "kmap", kmap)

    @classmethod
    def from_json(cls, obj: Mapping, name: str = "") -> "SymmetryOp":
        pointer = f"/symmetries/{name}"
        try:
            U = np.array([[complex(re, im) for re, im in row] for row in obj["U"]])
        except (KeyError, TypeError, ValueError):
            raise SchemaError("U must be rows of [re, im] pairs", pointer=f"{pointer}/U") from None
        kmap = obj.get("kmap", [[1, 0], [0, 1]])
        return cls(U, bool(obj.get("antiunitary", False)), np.array(kmap), name)

    def to_json(self) -> dict:
        return {
            "U": [[[float(z.real) + 0.0, float(z.imag) + 0.0] for z in row] for row in self.U],
            "antiunitary": self.antiunitary,
            "kmap": self.kmap.tolist(),
        }

    def square(self) -> np.ndarray:
        """Internal part of the operator applied twice."""
        return self.U @ (self.U.conj() if self.antiunitary else self.U)

    def fourth_power(self) -> np.ndarray:
        s = self.square()
        return s @ s


@dataclass(frozen=True)
class ChernResult:
    total: int
    spin_up: int
    spin_down: int
    z2_parity: int
    gap_min: float
    mesh: int

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "spin_up": self.spin_up,
            "spin_down": self.spin_down,
            "z2_parity": self.z2_parity,
            "gap_min": float(f"{self.gap_min:.9e}") if np.isfinite(self.gap_min) else None,
            "mesh": self.mesh,
        }


def _hamiltonians(model: TightBindingModel, ks: np.ndarray) -> np.ndarray:
    """H(k) for an array of momenta of shape ``(..., 2)``."""
    ks = np.asarray(ks, dtype=float)
    out = np.zeros(ks.shape[:-1] + (model.n, model.n), dtype=complex)
    for d, t in model.hoppings.items():
        phase = np.exp(1j * (ks[..., 0] * d[0] + ks[..., 1] * d[1]))
        out += phase[..., None, None] * t
    return out


def hamiltonian_at(model: TightBindingModel, k: Sequence[float]) -> np.ndarray:
    return _hamiltonians(model, np.asarray(k, dtype=float))


def _grid(N: int, offset: float = 0.0) -> np.ndarray:
    ticks = 2 * np.pi * (np.arange(N) + offset) / N
    kx, ky = np.meshgrid(ticks, ticks, indexing="ij")
    return np.stack([kx, ky], axis=-1)


def _validation_mesh() -> np.ndarray:
    # off-lattice points so high-symmetry coincidences cannot hide a violation
    return _grid(12, 0.1234).reshape(-1, 2)


def check_symmetry(model: TightBindingModel, op: SymmetryOp, tol: float | None = None) -> float:
    """Largest operator-norm residual of the symmetry contract on a validation mesh.

    ``tol`` is accepted for call-site symmetry; the caller compares.
    """
    ks = _validation_mesh()
    H = _hamiltonians(model, ks)
    H_img = _hamiltonians(model, ks @ op.kmap.T)
    src = H.conj() if op.antiunitary else H
    lhs = op.U @ src @ op.U.conj().T
    return float(np.linalg.norm(lhs - H_img, ord=2, axis=(-2, -1)).max(initial=0.0))


def transform_model(model: TightBindingModel, op: SymmetryOp) -> TightBindingModel:
    """The model H'(k) = U H(R^-1 k) U^dagger (conjugated first if antiunitary).

    ``op`` is a symmetry of ``model`` exactly when the result equals it.
    """
    R = op.kmap
    RinvT = np.rint(np.linalg.inv(R).T).astype(np.int64)
    hops = {}
    for d, t in model.hoppings.items():
        nd = RinvT @ np.array(d)
        if op.antiunitary:
            nd, t = -nd, t.conj()
        key = (int(nd[0]), int(nd[1]))
        hops[key] = hops.get(key, 0) + op.U @ t @ op.U.conj().T
    return TightBindingModel(model.n, hops, model.fermi)


def symmetrize(model: TightBindingModel, ops: Sequence[SymmetryOp], order: Sequence[int]) -> TightBindingModel:
    """Average ``model`` over the products g1^j1 g2^j2 ... with 0 <= j_i < order_i."""
    images = [model]
    for op, k in zip(ops, order):
        new = []
        for m in images:
            cur = m
            for _ in range(k):
                new.append(cur)
                cur = transform_model(cur, op)
        images = new
    total = images[0]
    for m in images[1:]:
        total = total + m
    return total.scaled(1.0 / len(images))


def spin_blocks(model: TightBindingModel, Sz: SymmetryOp,
                tol: float = DEFAULT_TOL) -> tuple[TightBindingModel, TightBindingModel]:
    """Split ``model`` into Sz = +1 and Sz = -1 blocks."""
    S = Sz.U
    if np.abs(S @ S - np.eye(model.n)).max(initial=0.0) > 1e-10 or \
            np.abs(S - S.conj().T).max(initial=0.0) > 1e-10:
        raise NotSpinConserving("Sz must be a Hermitian involution")
    H = _hamiltonians(model, _validation_mesh())
    resid = float(np.linalg.norm(H @ S - S @ H, ord=2, axis=(-2, -1)).max(initial=0.0))
    if resid > tol:
        raise NotSpinConserving("Hamiltonian does not commute with Sz", residual=resid)
    vals, vecs = np.linalg.eigh(S)
    up, down = vecs[:, vals > 0], vecs[:, vals < 0]

    def block(Q):
        return TightBindingModel(Q.shape[1], {d: Q.conj().T @ t @ Q for d, t in model.hoppings.items()},
                                 model.fermi)

    return block(up), block(down)


def _fhs(model: TightBindingModel, N: int, fermi: float,
         gap_tol: float | None) -> tuple[int, float]:
    if model.n == 0:
        return 0, float("inf")
    ks = _grid(N)
    vals, vecs = np.linalg.eigh(_hamiltonians(model, ks))
    width = float(vals.max() - vals.min())
    tol = GAP_RELATIVE_TOL * max(width, 1e-300) if gap_tol is None else gap_tol
    occ = (vals < fermi).sum(axis=-1)
    nocc = int(occ.flat[0])
    if (occ != nocc).any():
        i, j = np.argwhere(occ != nocc)[0]
        raise GappedAssumptionFailed("band crosses the Fermi level", k=ks[i, j].tolist(),
                                     mesh=N)
    if nocc == 0:
        return 0, float(np.abs(vals - fermi).min())
    below = fermi - vals[..., nocc - 1]
    # direct gap across the Fermi level; distance to it when every band is filled
    gap = vals[..., nocc] - vals[..., nocc - 1] if nocc < model.n else below
    i, j = np.unravel_index(np.argmin(gap), gap.shape)
    gap_min = float(gap[i, j])
    if gap_min <= tol:
        raise GappedAssumptionFailed("spectral gap at the Fermi level is too small",
                                     k=ks[i, j].tolist(), gap=gap_min, mesh=N)
    frame = vecs[..., :nocc]

    def link(axis):
        nxt = np.roll(frame, -1, axis=axis)
        det = np.linalg.det(np.einsum("ijan,ijam->ijnm", frame.conj(), nxt))
        return det / np.abs(det)

    ux, uy = link(0), link(1)
    plaquette = ux * np.roll(uy, -1, axis=0) / (np.roll(ux, -1, axis=1) * uy)
    flux = np.angle(plaquette).sum() / (2 * np.pi)
    return int(round(flux)), gap_min


def chern_number(model: TightBindingModel, mesh: int = DEFAULT_MESH, fermi: float | None = None,
                 gap_tol: float | None = None, check_convergence: bool = True) -> int:
    """Chern number of the bands below ``fermi`` (default: the model's)."""
    return _chern(model, mesh, fermi, gap_tol, check_convergence)[0]


def chern_and_gap(model: TightBindingModel, mesh: int = DEFAULT_MESH, fermi: float | None = None,
                  gap_tol: float | None = None) -> tuple[int, float]:
    """Chern number (checked against mesh 2N) and the smallest gap seen."""
    return _chern(model, mesh, fermi, gap_tol, True)


def _chern(model, mesh, fermi, gap_tol, check_convergence):
    fermi = model.fermi if fermi is None else fermi
    c, gap = _fhs(model, mesh, fermi, gap_tol)
    if check_convergence:
        c2, gap2 = _fhs(model, 2 * mesh, fermi, gap_tol)
        if c2 != c:
            raise NonConvergent("Chern number changes under mesh refinement",
                                mesh=mesh, value=c, refined=c2)
        gap = min(gap, gap2)
    return c, gap


def invariants(model: TightBindingModel, c4t: SymmetryOp, sz: SymmetryOp,
               mesh: int = DEFAULT_MESH, fermi: float | None = None,
               tol: float = DEFAULT_TOL) -> ChernResult:
    """Total and spin-resolved Chern numbers and the spin-Chern parity."""
    for op, name in ((c4t, "C4T"), (sz, "Sz")):
        resid = check_symmetry(model, op)
        if resid > tol:
            raise SymmetryViolated(f"model is not {name}-symmetric", residual=resid, tol=tol)
    up, down = spin_blocks(model, sz, tol)
    total, gap = _chern(model, mesh, fermi, None, True)
    c_up, gap_up = _chern(up, mesh, fermi, None, True)
    c_down, gap_down = _chern(down, mesh, fermi, None, True)
    if total != 0:
        raise TheoremViolated("a C4T-symmetric gapped model must have total Chern number 0",
                              total=total)
    if c_up + c_down != total:
        raise TheoremViolated("spin-resolved Chern numbers do not add up",
                              spin_up=c_up, spin_down=c_down, total=total)
    return ChernResult(total, c_up, c_down, c_up % 2, min(gap, gap_up, gap_down), mesh)


def _embed(block: dict, n: int, rows: slice) -> dict:
    out = {}
    for d, t in block.items():
        big = np.zeros((n, n), dtype=complex)
        big[rows, rows] = t
        out[d] = big
    return out


def chern_block(mass: float) -> dict:
    """Hoppings of h(k) = sin kx sx + sin ky sy + (m + cos kx + cos ky) sz."""
    return {
        (0, 0): mass * SIGMA_Z,
        (1, 0): (SIGMA_X / 2j + SIGMA_Z / 2),
        (-1, 0): (-SIGMA_X / 2j + SIGMA_Z / 2),
        (0, 1): (SIGMA_Y / 2j + SIGMA_Z / 2),
        (0, -1): (-SIGMA_Y / 2j + SIGMA_Z / 2),
    }


def builtin_ops() -> tuple[SymmetryOp, SymmetryOp]:
    """C4T with U = [[0, 1], [-i sz, 0]] and kmap (kx, ky) -> (ky, -kx); Sz = diag(1, 1, -1, -1)."""
    U = np.zeros((4, 4), dtype=complex)
    U[:2, 2:] = np.eye(2)
    U[2:, :2] = -1j * SIGMA_Z
    c4t = SymmetryOp(U, True, np.array([[0, 1], [-1, 0]]), "C4T")
    sz = SymmetryOp(np.diag([1, 1, -1, -1]).astype(complex), False, np.eye(2, dtype=np.int64), "Sz")
    return c4t, sz


def builtin_c4t_model(mass: float) -> tuple[TightBindingModel, SymmetryOp, SymmetryOp]:
    """Spin-up Chern block plus its image under C4T as the spin-down block."""
    c4t, sz = builtin_ops()
    up = TightBindingModel(4, _embed(chern_block(mass), 4, slice(0, 2)))
    return up + transform_model(up, c4t), c4t, sz


def random_hermitian_model(n: int, rng: np.random.Generator, reach: int = 1) -> TightBindingModel:
    """Random hoppings with |dx|, |dy| <= reach, Hermitian by construction."""
    hops = {}
    for dx in range(-reach, reach + 1):
        for dy in range(-reach, reach + 1):
            if (dx, dy) in hops:
                continue
            t = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            if (dx, dy) == (0, 0):
                t = (t + t.conj().T) / 2
            hops[(dx, dy)] = t
            hops[(-dx, -dy)] = t.conj().T
    return TightBindingModel(n, hops)


def _sup_norm(model: TightBindingModel, N: int = 24) -> float:
    H = _hamiltonians(model, _grid(N).reshape(-1, 2))
    return float(np.linalg.norm(H, ord=2, axis=(-2, -1)).max())


def symmetric_perturbation(model: TightBindingModel, ops: Sequence[SymmetryOp],
                           order: Sequence[int], rng: np.random.Generator,
                           scale: float = 0.1) -> TightBindingModel:
    """``model`` plus a random symmetric term whose sup-norm is ``scale`` times the model's."""
    delta = symmetrize(random_hermitian_model(model.n, rng), ops, order)
    norm = _sup_norm(delta)
    if norm == 0:
        return model
    return model + delta.scaled(scale * _sup_norm(model) / norm)
