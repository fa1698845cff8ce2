"""Acceptance criteria, one test each, with a PASS/FAIL line printed per criterion."""

import subprocess
import sys
import time

import numpy as np
import pytest

from magk.bloch import builtin_c4t_model, invariants, symmetric_perturbation
from magk.catalog import load_group
from magk.corep import (TypeLabel, corep_basis, magnetic_context, restriction_matrix,
                        twisted_context, twisted_corep_basis, verify_rational_iso)
from magk.groups import FiniteGroup, builtin_c4t_sz, semidirect_table
from magk.kcoeff import conj_module_structure, magnetic_coefficients, periodicity_check
from magk.torus import (AffineMap, AffineTorusAction, delocalized_rank,
                        magnetic_invariant_rank_spinsplit, mayer_vietoris_c2, spin_sectors)
from magk.verify import _trichotomy, catalog_entries


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {title} {detail}".rstrip())
        assert ok, f"criterion {number} failed: {detail}"
    return emit


def test_criterion_1_theorem_machine_check(report):
    start = time.perf_counter()
    entries = catalog_entries()
    names = {e.name for e in entries}
    orders_ok = all(e.group.n <= 16 for e in entries)
    cases = 0
    ok = True
    for e in entries:
        contexts = [magnetic_context(e.group)]
        if e.extension is not None:
            contexts.append(twisted_context(e.extension))
        for ctx in contexts:
            rep = verify_rational_iso(ctx, strict=False)
            ok &= rep.image_invariant and rep.rank_magnetic == rep.rank_invariants
            cases += 1
    elapsed = time.perf_counter() - start
    required = {"z4xz2-h", "c4t-sz-ext"} <= names
    ok = ok and len(entries) >= 10 and orders_ok and required and elapsed < 10
    report(1, "theorem machine-check", ok,
           f"({len(entries)} groups, {cases} contexts, {elapsed:.2f}s < 10s)")


def test_criterion_2_type_trichotomy(report):
    result = _trichotomy(catalog_entries())
    report(2, "indicator vs intertwiner search", result["ok"] and result["checked"] > 0,
           f"({result['checked']} self-conjugate irreducibles, "
           f"{len(result['mismatches'])} mismatches)")


def test_criterion_3_coefficients(report):
    kr = load_group("kr").group
    column = [str(magnetic_coefficients(kr, q)) for q in range(0, -8, -1)]
    ko_ok = column == ["Z", "Z/2", "Z/2", "0", "Z", "0", "0", "0"]
    kh = twisted_corep_basis(load_group("kh", "builtin").extension)
    shift_ok = all(magnetic_coefficients(kh, q - 4) == magnetic_coefficients(kr, q - 8)
                   and magnetic_coefficients(kh, q) == magnetic_coefficients(kr, q - 4)
                   for q in range(-24, 25))
    periodic = True
    for e in catalog_entries():
        bases = [corep_basis(magnetic_context(e.group))]
        if e.extension is not None:
            bases.append(twisted_corep_basis(e.extension))
        periodic &= all(periodicity_check(b, q) for b in bases for q in range(-16, 9))
    report(3, "coefficient identifications", ko_ok and shift_ok and periodic,
           f"(KO column {column}, quaternionic shift {shift_ok}, periodicity {periodic})")


def test_criterion_4_conjugation_modules(report):
    kr = load_group("kr").group
    expected = {0: ("Z", "trivial"), 2: ("Z", "sign"), 1: ("0", None), 3: ("0", None)}
    ok = True
    for q in range(-8, 1):
        m = conj_module_structure(q)
        group, action = expected[q % 4]
        ok &= str(m.underlying) == group
        if action is not None:
            ok &= m.summands[0][1].value == action
    ranks = [conj_module_structure(q).invariant_rank() for q in (0, -1, -2)]
    rational = [magnetic_coefficients(kr, q).free_rank for q in (0, -1, -2)]
    ok &= ranks == [1, 0, 0] and ranks == rational
    report(4, "Z2-module coefficients", ok, f"(invariant ranks {ranks}, rational ranks {rational})")


def test_criterion_5_application_pipeline(report):
    start = time.perf_counter()
    _, ext = builtin_c4t_sz()
    basis = twisted_corep_basis(ext)
    basis_ok = basis.labels == (TypeLabel.C, TypeLabel.C)
    rank = int(np.linalg.matrix_rank(restriction_matrix(basis).matrix.astype(float)))
    split = spin_sectors(ext)
    inv = magnetic_invariant_rank_spinsplit(ext)
    z2 = FiniteGroup(semidirect_table(2, 1, 1))
    c2 = AffineTorusAction.from_generators(z2, {1: AffineMap(((-1, 0), (0, -1)))})
    deloc = delocalized_rank(z2, c2)
    sector_sum = [e for _, e, _ in deloc.sectors]
    mv = mayer_vietoris_c2()
    elapsed = time.perf_counter() - start
    ok = (basis_ok and rank == 2 and split.two_sector_total == (12, 0)
          and (inv.rank_even, inv.rank_odd) == (6, 0) and sector_sum == [2, 4]
          and deloc.rank_even == mv["rank_even"] == 6 and elapsed < 5)
    report(5, "C4T x Sz pipeline", ok,
           f"(2 C generators {basis_ok}, rank {rank}, total {split.two_sector_total}, "
           f"invariant ({inv.rank_even}, {inv.rank_odd}), sectors {sector_sum}, "
           f"Mayer-Vietoris {mv['rank_even']}, {elapsed:.2f}s < 5s)")


def test_criterion_6_bloch_invariants(report):
    start = time.perf_counter()
    ok = True
    summary = {}
    for label, mass in (("topological", 1.0), ("trivial", 3.0)):
        model, c4t, sz = builtin_c4t_model(mass)
        runs = {(r.total, r.spin_up, r.spin_down, r.z2_parity)
                for r in (invariants(model, c4t, sz, mesh=N) for N in (24, 48, 96))}
        summary[label] = sorted(runs)
        ok &= len(runs) == 1
        total, up, down, parity = next(iter(runs))
        if label == "topological":
            ok &= total == 0 and abs(up) == 1 and parity == 1
        else:
            ok &= (total, up, down, parity) == (0, 0, 0, 0)
    model, c4t, sz = builtin_c4t_model(1.0)
    rng = np.random.default_rng(0)
    parities = [invariants(symmetric_perturbation(model, (c4t, sz), (4, 2), rng, 0.1),
                           c4t, sz, mesh=24).z2_parity for _ in range(50)]
    ok &= set(parities) == {1}
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    report(6, "Bloch invariants", ok,
           f"({summary}, 50 perturbations parities {sorted(set(parities))}, {elapsed:.1f}s < 60s)")


def test_criterion_7_determinism(report):
    cmd = [sys.executable, "-m", "magk", "verify-all"]
    first = subprocess.run(cmd, capture_output=True)
    second = subprocess.run(cmd, capture_output=True)
    ok = first.returncode == 0 and first.stdout == second.stdout and len(first.stdout) > 0
    report(7, "verify-all determinism", ok,
           f"(exit {first.returncode}, {len(first.stdout)} bytes, identical {first.stdout == second.stdout})")
