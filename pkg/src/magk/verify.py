"""The ``verify-all`` sweep: every machine check over the shipped catalog.

Each section returns a JSON-ready dict with an ``ok`` flag. Nothing here
records timings, so repeated runs produce identical reports.
"""

from __future__ import annotations

import numpy as np

from .bloch import builtin_c4t_model, invariants, symmetric_perturbation
from .catalog import catalog_names, load_group
from .clifford import ko_from_clifford
from .corep import (classify_irreps, corep_basis, intertwiner_type, magnetic_context,
                    twisted_context, twisted_corep_basis, verify_rational_iso)
from .groups import FiniteMagneticGroup, build_semidirect, subgroups
from .kcoeff import (KO_TABLE, bott_coefficients, conj_module_structure, magnetic_coefficients,
                     orbit_rank_check, periodicity_check)
from .torus import (AffineMap, AffineTorusAction, delocalized_rank, magnetic_invariant_rank_spinsplit,
                    mayer_vietoris_c2, spin_sectors)

__all__ = ["catalog_entries", "verify_all"]

PERTURBATIONS = 50
PERTURBATION_SCALE = 0.1


def catalog_entries():
    """Magnetic catalog groups, with their twisted extension where one ships."""
    out = []
    for name in catalog_names("groups"):
        entry = load_group(name)
        if not isinstance(entry.group, FiniteMagneticGroup):
            continue
        if "twist" in entry.spec:
            entry = load_group(name, "builtin")
        out.append(entry)
    return out


def _theorem(entries) -> dict:
    cases = []
    for e in entries:
        contexts = [("plain", magnetic_context(e.group))]
        if e.extension is not None:
            contexts.append(("twisted", twisted_context(e.extension)))
        for kind, ctx in contexts:
            rep = verify_rational_iso(ctx, strict=False)
            cases.append({"group": e.name, "kind": kind, "order": ctx.G.n,
                          "types": [l.value for l in corep_basis(ctx).labels],
                          **rep.to_json(), "ok": rep.ok})
    return {"ok": all(c["ok"] for c in cases), "groups": len(entries), "cases": cases}


def _trichotomy(entries) -> dict:
    cases = []
    for e in entries:
        groups = [(e.name, e.group)]
        if e.extension is not None:
            groups.append((f"{e.name}/extension", e.extension.total))
        for name, G in groups:
            ctx = magnetic_context(G)
            if ctx.g0.n > 16:
                continue
            for i, label, partner in classify_irreps(ctx):
                if i != partner:
                    continue
                found = intertwiner_type(ctx, i)
                cases.append({"group": name, "irrep": i, "indicator": label.value,
                              "intertwiner": found.value, "ok": found is label})
    return {"ok": all(c["ok"] for c in cases), "checked": len(cases),
            "mismatches": [c for c in cases if not c["ok"]]}


def _coefficients(entries) -> dict:
    clifford = [str(ko_from_clifford(k)) for k in range(8)]
    table_ok = clifford == [str(g) for g in KO_TABLE]
    kr = load_group("kr")
    kr_col = [str(magnetic_coefficients(kr.group, -q)) for q in range(8)]
    kr_ok = kr_col == [str(bott_coefficients("R", -q)) for q in range(8)]
    kh = twisted_corep_basis(load_group("kh", "builtin").extension)
    kr_basis = corep_basis(magnetic_context(kr.group))
    shift_ok = all(magnetic_coefficients(kh, q) == magnetic_coefficients(kr_basis, q - 4)
                   for q in range(-16, 17))
    periodic = []
    for e in entries:
        bases = [corep_basis(magnetic_context(e.group))]
        if e.extension is not None:
            bases.append(twisted_corep_basis(e.extension))
        periodic.append(all(periodicity_check(b, q) for b in bases for q in range(-8, 1)))
    conj = [(str(conj_module_structure(q).underlying), conj_module_structure(q).invariant_rank())
            for q in range(0, -4, -1)]
    rational = [magnetic_coefficients(kr.group, q).free_rank for q in range(0, -4, -1)]
    conj_ok = [r for _, r in conj] == rational and conj[0][0] == "Z" and conj[2][0] == "Z"
    return {
        "ok": table_ok and kr_ok and shift_ok and all(periodic) and conj_ok,
        "clifford_ko": clifford,
        "kr_column": kr_col,
        "kh_shift_by_4": shift_ok,
        "periodicity": all(periodic),
        "conj_module_invariant_ranks": [r for _, r in conj],
        "kr_rational_ranks": rational,
    }


def _orbits(entries) -> dict:
    cases, ok = 0, True
    failures = []
    for e in entries:
        for H in subgroups(e.group):
            mag, inv = orbit_rank_check(e.group, H)
            cases += 1
            if mag != inv:
                ok = False
                failures.append({"group": e.name, "subgroup": H.tolist(), "ranks": [mag, inv]})
    return {"ok": ok, "checked": cases, "failures": failures}


def _torus() -> dict:
    z2 = build_semidirect(2, 1, 1, "on_n")
    c2 = AffineTorusAction.from_generators(z2, {1: AffineMap(((-1, 0), (0, -1)))})
    deloc = delocalized_rank(z2, c2)
    mv = mayer_vietoris_c2()
    split = spin_sectors()
    inv = magnetic_invariant_rank_spinsplit()
    ok = ((deloc.rank_even, deloc.rank_odd) == (6, 0)
          and (mv["rank_even"], mv["rank_odd"]) == (6, 0)
          and (inv.rank_even, inv.rank_odd) == (6, 0)
          and split.two_sector_total == (12, 0))
    return {"ok": ok, "delocalized_c2": deloc.to_json(),
            "mayer_vietoris": {"rank_even": mv["rank_even"], "rank_odd": mv["rank_odd"]},
            "spin_split": split.to_json()}


def _bloch(seed: int = 0) -> dict:
    runs = {}
    ok = True
    for label, mass, expect in (("topological", 1.0, 1), ("trivial", 3.0, 0)):
        model, c4t, sz = builtin_c4t_model(mass)
        results = [invariants(model, c4t, sz, mesh=N) for N in (24, 48, 96)]
        keys = {(r.total, r.spin_up, r.spin_down, r.z2_parity) for r in results}
        ok &= len(keys) == 1 and results[0].total == 0 and abs(results[0].spin_up) == expect \
            and results[0].z2_parity == expect
        runs[label] = {"mass": mass, "results": [r.to_json() for r in results]}
    model, c4t, sz = builtin_c4t_model(1.0)
    rng = np.random.default_rng(seed)
    parities = []
    for _ in range(PERTURBATIONS):
        pert = symmetric_perturbation(model, (c4t, sz), (4, 2), rng, PERTURBATION_SCALE)
        parities.append(invariants(pert, c4t, sz, mesh=24).z2_parity)
    ok &= set(parities) == {1}
    runs["perturbations"] = {"count": PERTURBATIONS, "scale": PERTURBATION_SCALE, "seed": seed,
                             "parities": sorted(set(parities))}
    return {"ok": bool(ok), **runs}


def verify_all() -> dict:
    entries = catalog_entries()
    sections = {
        "theorem": _theorem(entries),
        "trichotomy": _trichotomy(entries),
        "coefficients": _coefficients(entries),
        "orbits": _orbits(entries),
        "torus": _torus(),
        "bloch": _bloch(),
    }
    return {"ok": all(s["ok"] for s in sections.values()),
            "catalog": [e.name for e in entries], "catalog_size": len(entries), **sections}
