"""Real K-theory of a point from Clifford modules.

Ungraded real modules of the Clifford algebra C_j (j generators squaring to
-1) are the real representations of the finite group
Gamma_j = {+-e_S} on which the central -1 acts as -1. Their Grothendieck
group M_j and the restriction M_j -> M_{j-1} give

    KO^{-k}(pt) = M_{k-1} / i* M_k          (k >= 1)

and KO^0(pt) = Z from graded modules of C_0. Real irreducibles are read
off the complex character table with the Frobenius-Schur indicator.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .chars import character_table, frobenius_schur
from .groups import FiniteGroup
from .kcoeff import AbelianGroupExpr
from .snf import cokernel

__all__ = ["clifford_group", "real_module_characters", "restriction_map", "ko_from_clifford"]


def _sign(s: int, t: int, j: int) -> int:
    # parity of e_S e_T -> e_{S xor T}: swaps to sort, plus one per repeated generator
    swaps = 0
    for b in range(j):
        if t >> b & 1:
            swaps += bin(s >> (b + 1)).count("1")
    return (swaps + bin(s & t).count("1")) % 2


@lru_cache(maxsize=None)
def clifford_group(j: int) -> FiniteGroup:
    """Gamma_j of order 2^(j+1); element ``S + 2^j * s`` is (-1)^s e_S."""
    m = 1 << j
    idx = np.arange(2 * m)
    S, s = idx % m, idx // m
    sign = np.array([[_sign(a, b, j) for b in range(m)] for a in range(m)])
    mul = (S[:, None] ^ S[None, :]) + m * ((s[:, None] + s[None, :] + sign[S][:, S]) % 2)
    return FiniteGroup(mul, validate=j <= 6, name=f"Gamma_{j}")


@lru_cache(maxsize=None)
def real_module_characters(j: int) -> np.ndarray:
    """Complexified characters (rows, per element) of the real irreducible C_j-modules."""
    G = clifford_group(j)
    table = character_table(G)
    minus = 1 << j
    rows, seen = [], set()
    values = np.array([[complex(chi(g)) for g in range(G.n)] for chi in table.rows])
    for i, chi in enumerate(table.rows):
        if i in seen or abs(values[i, minus] + values[i, G.id]) > 1e-9:
            continue
        ind = frobenius_schur(chi)
        if ind == 1:
            rows.append(values[i].real)
        elif ind == -1:
            rows.append(2 * values[i].real)
        else:
            partner = next(p for p in range(len(values))
                           if np.allclose(values[p], values[i].conj()))
            seen.add(partner)
            rows.append((values[i] + values[partner]).real)
    return np.array(rows)


def restriction_map(j: int) -> np.ndarray:
    """Integer matrix of i*: M_j -> M_{j-1}; column c is the image of module c."""
    big = real_module_characters(j)
    small = real_module_characters(j - 1)
    m_small = 1 << (j - 1)
    idx = np.arange(2 * m_small)
    emb = idx % m_small + (1 << j) * (idx // m_small)
    restricted = big[:, emb]
    # real irreducible characters are orthogonal; <psi, psi> = 1, 2 or 4
    norms = (small * small).sum(axis=1)
    coeffs = restricted @ small.T / norms[None, :]
    ints = np.rint(coeffs)
    if np.abs(coeffs - ints).max() > 1e-6 or np.abs(ints @ small - restricted).max() > 1e-6:
        raise ArithmeticError("restriction does not decompose into real irreducibles")
    return ints.astype(np.int64).T


def ko_from_clifford(k: int) -> AbelianGroupExpr:
    """KO^{-k}(pt) for k = 0..7, computed from Clifford module counts."""
    if not 0 <= k <= 7:
        raise ValueError("k must lie in 0..7")
    if k == 0:
        # graded C_0-modules are pairs (V0, V1); the graded C_1-module restricts to (1, 1)
        free, tors = cokernel(np.array([[1], [1]], dtype=object))
    else:
        free, tors = cokernel(restriction_map(k).astype(object))
    return AbelianGroupExpr(free, tuple(tors))
