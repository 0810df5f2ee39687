"""Acceptance suite: one test per release criterion, each printing a
[PASS]/[FAIL] line with the measured numbers.

Every tolerance is pinned here, not calibrated elsewhere.  The closed-form
QFI criterion is asserted exactly as specified; the fixed interferometer
convention reproduces the thermal/coherent forms only asymptotically
(sub-percent from nbar >= 2) and the number-state form only at odd n, so the
corresponding sub-checks fail with their measured deviations on record.
"""

import itertools
import math
import time

import numpy as np
import pytest

from thermokerr import cli, engine, fock, metrology, sensor, thermo


def _report(name: str, ok: bool, detail: str) -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


# ---------------------------------------------------------------------------
# engine

def test_engine_closed_form_vs_monte_carlo():
    """Closed form vs Monte Carlo within 3 standard errors at 10 points
    spanning s^2 in {0.05, 0.1, 0.2}, chi*nbar*s^2 in [0.1, 2]; < 10 s."""
    t0 = time.time()
    s2_cycle = [0.05, 0.1, 0.2]
    nbar_cycle = [0.5, 1.0, 2.0]
    xs = np.linspace(0.1, 2.0, 10)
    failures = []
    for i, x in enumerate(xs):
        s2 = s2_cycle[i % 3]
        nbar = nbar_cycle[i % 3]
        p = engine.EngineParams.from_transmissivity(nbar, s2, x / (s2 * nbar))
        o = engine.mc_engine_output(p, 100_000, seed=1000 + i)
        a1, a4 = engine.analytic_engine_output(p)
        d1 = abs(o.mean_intensity_1f - a1) / o.stderr_1f
        d4 = abs(o.mean_intensity_4f - a4) / o.stderr_4f
        if d1 >= 3 or d4 >= 3:
            failures.append(f"s2={s2} nbar={nbar} x={x:.2f}: {d1:.2f}/{d4:.2f} sigma")
    elapsed = time.time() - t0
    ok = not failures and elapsed < 10
    assert _report("Engine-closed-form-vs-MC", ok,
                   f"10 points, worst cases {failures or 'all < 3 sigma'}, {elapsed:.1f}s")


def test_fig3_peak_analytic():
    """Analytic amplification maximum c^2(1+9/(16 sqrt3)) at s^2 chi nbar =
    1/sqrt3, to 0.5%."""
    p = engine.EngineParams.from_transmissivity(1.0, 0.1, 1.0)
    chi_star, want = engine.peak_amplification(p)
    grid = np.linspace(0.05 * chi_star, 5 * chi_star, 4001)
    rows = engine.amplification_curve(p, grid)
    best = max(rows, key=lambda r: r[1])
    ok = (abs(best[1] - want) / want < 0.005
          and abs(best[0] * p.s**2 * p.nbar - 1 / math.sqrt(3)) < 0.005)
    assert _report("Fig3-peak-analytic", ok,
                   f"peak {best[1]:.6f} vs {want:.6f} at x={best[0]*p.s**2*p.nbar:.4f}")


def test_fig3_peak_mc():
    """Monte-Carlo ratio at the predicted optimum within 3 sigma of the peak."""
    p0 = engine.EngineParams.from_transmissivity(1.0, 0.1, 1.0)
    chi_star, want = engine.peak_amplification(p0)
    p = engine.EngineParams.from_transmissivity(1.0, 0.1, chi_star)
    o = engine.mc_engine_output(p, 100_000, seed=2024)
    dev = abs(o.mean_intensity_1f / p.nbar - want) / (o.stderr_1f / p.nbar)
    ok = dev < 3
    assert _report("Fig3-peak-MC", ok, f"deviation {dev:.2f} sigma")


# ---------------------------------------------------------------------------
# metrology

_QFI_POINTS = (1, 2, 4, 6)


def _qfi_table(kind):
    out = {}
    for nbar in _QFI_POINTS:
        spec = metrology.MziSpec(kind, float(nbar), math.pi / 2, tail_eps=1e-12)
        out[nbar] = metrology.mzi_qfi(spec).fisher_information
    return out


@pytest.fixture(scope="module")
def qfi_tables():
    t0 = time.time()
    tables = {kind: _qfi_table(kind) for kind in ("thermal", "number", "coherent")}
    tables["elapsed"] = time.time() - t0
    return tables


def _closed_form_check(kind, tables):
    rows = []
    ok = True
    for nbar in _QFI_POINTS:
        got = tables[kind][nbar]
        want = metrology.qfi_closed_form(kind, float(nbar))
        dev = abs(got - want) / want
        rows.append(f"nbar={nbar}: {got:.4f} vs {want:.4f} ({100*dev:.2f}%)")
        ok &= dev < 0.01
    return ok, "; ".join(rows)


def test_qfi_closed_form_thermal(qfi_tables):
    """Numerical QFI matches nbar^2+nbar within 1% at nbar in {1,2,4,6}."""
    ok, detail = _closed_form_check("thermal", qfi_tables)
    assert _report("QFI-closed-form-thermal", ok, detail)


def test_qfi_closed_form_number(qfi_tables):
    """Numerical QFI matches n^2 within 1% at n in {1,2,4,6}."""
    ok, detail = _closed_form_check("number", qfi_tables)
    assert _report("QFI-closed-form-number", ok, detail)


def test_qfi_closed_form_coherent(qfi_tables):
    """Numerical QFI matches nbar^2/2+2nbar within 1% at nbar in {1,2,4,6}."""
    ok, detail = _closed_form_check("coherent", qfi_tables)
    assert _report("QFI-closed-form-coherent", ok, detail)


def test_qfi_ordering_at_nbar6(qfi_tables):
    """thermal > number > coherent at nbar = 6."""
    ft, fn, fc = (qfi_tables[k][6] for k in ("thermal", "number", "coherent"))
    ok = ft > fn > fc
    assert _report("QFI-ordering", ok, f"F_t={ft:.3f}, F_n={fn:.3f}, F_c={fc:.3f}")


def test_qfi_runtime(qfi_tables):
    """All closed-form comparisons computed in < 60 s at tail 1e-12."""
    ok = qfi_tables["elapsed"] < 60
    assert _report("QFI-runtime", ok, f"{qfi_tables['elapsed']:.1f}s")


def test_sub_heisenberg_thermal(qfi_tables):
    """dphi_min(thermal, chi=pi/2) < 1/nbar at nbar = 6."""
    dphi = qfi_tables["thermal"][6] ** -0.5
    ok = dphi < 1.0 / 6.0
    assert _report("Sub-Heisenberg", ok, f"dphi={dphi:.5f} vs HL {1/6:.5f}")


# ---------------------------------------------------------------------------
# sensor

def test_eta_saturation_and_inverse_law():
    """CK eta_max monotone over nbar_a in {1,2,4,8}, within 15% of 1/4 at 8;
    k=2 exchange eta_max*nbar_a spread < 25% over {2,4,8}; < 2 min."""
    t0 = time.time()
    grid = np.linspace(0.0, 2 * math.pi, 65)
    ck = sensor.BlackBoxProcess("cross_kerr", 1, 1.0)
    etas = [sensor.max_efficiency(ck, nb, grid)[0] for nb in (1, 2, 4, 8)]
    mono = all(b > a for a, b in zip(etas, etas[1:]))
    near = abs(etas[-1] - 0.25) / 0.25 < 0.15
    k2 = sensor.BlackBoxProcess("photon_exchange", 2, 1.0)
    prods = [sensor.max_efficiency(k2, nb, grid)[0] * nb for nb in (2, 4, 8)]
    spread = (max(prods) - min(prods)) / np.mean(prods)
    # k=3 oscillates fastest; resolve its narrow peaks before reporting
    fine = np.linspace(0.0, 2 * math.pi, 257)
    k3 = sensor.BlackBoxProcess("photon_exchange", 3, 1.0)
    prods3 = [sensor.max_efficiency(k3, nb, fine)[0] * nb for nb in (2, 4, 8)]
    spread3 = (max(prods3) - min(prods3)) / np.mean(prods3)
    elapsed = time.time() - t0
    ok = mono and near and spread < 0.25 and elapsed < 120
    assert _report(
        "Eta-saturation", ok,
        f"CK eta_max={[round(e, 4) for e in etas]} (monotone={mono}, "
        f"at nbar=8 {100*abs(etas[-1]-0.25)/0.25:.1f}% from 1/4); "
        f"k2 eta*nbar spread {100*spread:.1f}%; "
        f"k3 spread {100*spread3:.1f}% (reported, not asserted); {elapsed:.0f}s")


def test_half_photon_work_comparator():
    """WC vs <n_a>_out/2 on a 32-point grid for CK and k=2 at nbar_a=1: the
    maximum relative deviation is computed and reported (not asserted)."""
    grid = np.linspace(0.0, math.pi, 32)
    details = []
    for label in ("ck", "k2"):
        proc = sensor.process_from_label(label)
        tr = sensor.wc_trace(proc, 1.0, grid)
        half = tr.mean_na_out / 2.0
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.abs(tr.wc - half) / np.where(half > 0, half, np.nan)
        worst = np.nanmax(rel)
        i_star = int(tr.wc.argmax())
        at_peak = rel[i_star]
        flag = " (>1% of nbar_a)" if np.nanmax(np.abs(tr.wc - half)) > 0.01 else ""
        details.append(f"{label}: max rel dev {worst:.3f}, at WC peak {at_peak:.3f}{flag}")
    ok = all(np.isfinite(tr.wc)) and len(details) == 2
    assert _report("Half-photon-comparator", ok, "; ".join(details))


def test_roundtrip_identification():
    """identify_process recovers kind (9/9) and coupling within 5% on
    noiseless traces from {CK, k=2, k=3} x nbar_a in {0.5, 1, 2}."""
    t0 = time.time()
    hits = 0
    details = []
    for label, nbar in itertools.product(("ck", "k2", "k3"), (0.5, 1.0, 2.0)):
        truth = sensor.process_from_label(label, 1.25)
        trace = sensor.wc_trace(truth, nbar, np.linspace(0.0, 2.4, 16))
        res = sensor.identify_process(trace, ["ck", "k2", "k3"])
        good = (not res.ambiguous and res.kind == label
                and abs(res.coupling - 1.25) / 1.25 < 0.05)
        hits += good
        if not good:
            details.append(f"{label}@{nbar}: got {res.kind} c={res.coupling}")
    ok = hits == 9
    assert _report("Roundtrip-identification", ok,
                   f"{hits}/9 correct{'; ' + '; '.join(details) if details else ''}, "
                   f"{time.time()-t0:.0f}s")


# ---------------------------------------------------------------------------
# thermodynamic invariants and brute-force oracles

def test_thermodynamic_invariant_suite():
    """Ergotropy >= 0; ergotropy(thermal) < 1e-8; linear-circuit nullity on
    equal-temperature thermal inputs < 1e-8; unitarity and total-photon
    conservation to 1e-8 on 100 random circuits (d <= 8, 2 modes)."""
    rng = np.random.default_rng(31337)
    problems = []

    d = fock.choose_cutoff(1.0, 1e-12)
    n = np.arange(d)
    p = (0.5) ** n / 2.0
    w_thermal = thermo.ergotropy(np.diag(p / p.sum())).ergotropy
    if not 0 <= w_thermal < 1e-8:
        problems.append(f"thermal ergotropy {w_thermal:.2e}")

    dl = fock.choose_cutoff(0.6, 1e-12)
    joint = fock.tensor([fock.make_thermal(0.6, dl), fock.make_thermal(0.6, dl)])
    for case in range(3):
        elements = []
        for _ in range(4):
            if rng.random() < 0.5:
                th = rng.uniform(0, 2 * np.pi)
                elements.append(fock.BeamSplitter(s=math.cos(th), c=math.sin(th),
                                                  modes=(0, 1)))
            else:
                elements.append(fock.PhaseShift(rng.uniform(0, 2 * np.pi),
                                                mode=int(rng.integers(0, 2))))
        out = fock.apply_circuit(joint, fock.Circuit(tuple(elements)))
        for m in (0, 1):
            w = thermo.ergotropy(fock.reduced_density(out, m)).ergotropy
            if not 0 <= w < 1e-8:
                problems.append(f"linear nullity case {case} mode {m}: {w:.2e}")

    from tests_support import random_elements  # local helper below via conftest
    worst_unitarity = 0.0
    worst_conservation = 0.0
    for case in range(100):
        dims = (int(rng.integers(2, 9)), int(rng.integers(2, 9)))
        v = rng.normal(size=dims[0] * dims[1]) + 1j * rng.normal(size=dims[0] * dims[1])
        st = fock.MultiModeState(dims, [(1.0, v / np.linalg.norm(v))])
        elements = random_elements(dims, rng, 3)
        before = fock.total_mean_photon(st)
        out = fock.apply_circuit(st, fock.Circuit(tuple(elements)))
        worst_conservation = max(worst_conservation,
                                 abs(fock.total_mean_photon(out) - before))
        worst_unitarity = max(worst_unitarity,
                              abs(np.linalg.norm(out.branches[0][1]) - 1.0))
        w = thermo.ergotropy(fock.reduced_density(out, 0)).ergotropy
        if w < 0:
            problems.append(f"negative ergotropy case {case}")
    if worst_unitarity > 1e-8:
        problems.append(f"unitarity {worst_unitarity:.2e}")
    if worst_conservation > 1e-8:
        problems.append(f"photon conservation {worst_conservation:.2e}")
    ok = not problems
    assert _report("Thermo-invariants", ok,
                   f"thermal W={w_thermal:.1e}, unitarity {worst_unitarity:.1e}, "
                   f"conservation {worst_conservation:.1e}"
                   + (f"; problems: {problems}" if problems else ""))


def test_bruteforce_oracles():
    """Ergotropy equals permutation minimization on 200 random diagonal states
    (d <= 6, to 1e-12); spectral-sum QFI equals 4 Var(n) on 50 random pure states
    (to 1e-8)."""
    rng = np.random.default_rng(271828)
    worst_erg = 0.0
    for _ in range(200):
        d = int(rng.integers(2, 7))
        p = rng.random(d)
        p /= p.sum()
        got = thermo.ergotropy(np.diag(p)).ergotropy
        narr = np.arange(d)
        want = float(narr @ p) - min(float(narr @ np.array(perm))
                                     for perm in itertools.permutations(p))
        worst_erg = max(worst_erg, abs(got - want))
    worst_qfi = 0.0
    for _ in range(50):
        dims = (int(rng.integers(2, 7)), int(rng.integers(2, 7)))
        v = rng.normal(size=dims[0] * dims[1]) + 1j * rng.normal(size=dims[0] * dims[1])
        st = fock.MultiModeState(dims, [(1.0, v / np.linalg.norm(v))])
        got = metrology.qfi(st, 0).fisher_information
        want = metrology.qfi_pure_variance(st, 0)
        worst_qfi = max(worst_qfi, abs(got - want))
    ok = worst_erg < 1e-12 and worst_qfi < 1e-8
    assert _report("Bruteforce-oracles", ok,
                   f"ergotropy max dev {worst_erg:.2e}, QFI max dev {worst_qfi:.2e}")


# ---------------------------------------------------------------------------
# reproducibility

def test_reproducibility_byte_identical(tmp_path):
    """Stochastic subcommands rerun with the same seed emit byte-identical CSV."""
    pairs = []
    for sub, extra in (("fig3", ["--samples", "20000", "--points", "7"]),
                       ("cascade", ["--samples", "5000", "--blocks", "2"])):
        a, b = tmp_path / f"{sub}_a.csv", tmp_path / f"{sub}_b.csv"
        argv = [sub, "--seed", "99", *extra]
        assert cli.main(argv + ["--out", str(a)]) == 0
        assert cli.main(argv + ["--out", str(b)]) == 0
        pairs.append((sub, a.read_bytes() == b.read_bytes()))
    ok = all(same for _, same in pairs)
    assert _report("Reproducibility", ok,
                   ", ".join(f"{sub}: {'identical' if same else 'DIFFERS'}"
                             for sub, same in pairs))
