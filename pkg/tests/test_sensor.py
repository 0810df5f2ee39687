"""Black-box sensor: scaffold physics, trace invariants, identification."""

import numpy as np
import pytest

from thermokerr import fock, sensor, thermo


def ck(coupling=1.0, order=1):
    return sensor.BlackBoxProcess("cross_kerr", order, coupling)


def kpe(k, coupling=1.0):
    return sensor.BlackBoxProcess("photon_exchange", k, coupling)


# ---------------------------------------------------------------------------
# scaffold evolution

def test_t_zero_keeps_thermal_passive():
    out = sensor.evolve_blackbox(ck(), 0.0, 1.0)
    rep = thermo.ergotropy(fock.reduced_density(out, 0))
    assert rep.ergotropy < 1e-8


def test_unitarity_at_large_angle():
    out = sensor.evolve_blackbox(ck(), np.pi, 1.0)
    for w, a in out.branches:
        assert abs(np.linalg.norm(a) - 1.0) < 1e-10


def test_k1_exchange_at_pi_half_swaps_modes():
    # a lone k=1 exchanger is a beam-splitter-like linear element
    proc = kpe(1)
    d = fock.choose_cutoff(1.0, 1e-8)
    st = fock.tensor([fock.make_thermal(1.0, d), fock.make_number(0, d)])
    out = fock.apply(st, fock.KPhotonExchange(g_t=np.pi / 2, k=1, modes=(0, 1)))
    assert fock.mean_photon(out, 0) == pytest.approx(0.0, abs=1e-10)
    assert fock.mean_photon(out, 1) == pytest.approx(
        fock.mean_photon(st, 0), abs=1e-10)
    # and the full scaffold around it extracts no work from thermal light
    trace = sensor.wc_trace(proc, 1.0, np.linspace(0, np.pi, 9))
    assert trace.wc.max() < 1e-8


def test_compact_evaluator_matches_general_path():
    for proc, nbar, t in [(ck(0.9), 1.0, 1.3), (kpe(2, 0.9), 2.0, 0.7),
                          (kpe(3, 0.9), 0.5, 2.1), (ck(0.9, order=2), 1.0, 0.4)]:
        d = fock.choose_cutoff(nbar, 1e-8)
        fast = sensor._SectorEvaluator(proc, nbar, d).out_pmf(t)
        general = sensor._out_pmf(sensor.evolve_blackbox(proc, t, nbar, cutoff=d))
        assert np.abs(fast - general).max() < 1e-12


def test_reduced_state_is_number_diagonal():
    out = sensor.evolve_blackbox(ck(), 0.9, 1.0)
    rho = fock.reduced_density(out, 0)
    off = rho - np.diag(np.diag(rho))
    assert np.abs(off).max() < 1e-12


def test_wc_equals_thermo_ergotropy_route():
    proc = ck()
    d = fock.choose_cutoff(1.0, 1e-8)
    trace = sensor.wc_trace(proc, 1.0, [0.7], cutoff=d)
    out = sensor.evolve_blackbox(proc, 0.7, 1.0, cutoff=d)
    rep = thermo.ergotropy(fock.reduced_density(out, 0))
    assert trace.wc[0] == pytest.approx(rep.ergotropy, abs=1e-12)


# ---------------------------------------------------------------------------
# traces

def test_trace_invariants():
    grid = np.linspace(0.0, np.pi, 17)
    for proc in (ck(), kpe(2), kpe(3)):
        tr = sensor.wc_trace(proc, 1.0, grid)
        assert tr.eta[0] == pytest.approx(0.0, abs=1e-10)
        assert np.all(tr.eta >= 0)
        assert np.all(tr.eta <= 1)
        assert np.allclose(tr.eta, tr.wc / tr.nbar_a)


def test_three_photon_oscillates_fastest():
    """First efficiency peak arrives earlier as the exchange order grows."""
    grid = np.linspace(0.0, np.pi, 257)

    def first_peak(proc):
        e = sensor.wc_trace(proc, 1.0, grid).eta
        i = 1
        while i + 1 < e.size and not (e[i] > e[i - 1] and e[i] >= e[i + 1]):
            i += 1
        return grid[i]

    assert first_peak(kpe(3)) < first_peak(kpe(2))


def test_eq13_comparator_recorded():
    grid = np.linspace(0.0, np.pi, 9)
    tr = sensor.wc_trace(ck(), 1.0, grid)
    assert tr.mean_na_out.shape == tr.wc.shape
    assert np.all(np.isfinite(tr.mean_na_out))


def test_max_efficiency_refines_grid():
    eta_max, t_star = sensor.max_efficiency(ck(), 1.0, np.linspace(0, 2 * np.pi, 33))
    assert eta_max == pytest.approx(2.0 / 9.0, rel=1e-3)   # exact 0.2222.. at nbar=1
    assert t_star == pytest.approx(np.pi, rel=1e-3)


def test_max_efficiency_cutoff_doubling():
    d = fock.choose_cutoff(1.0, 1e-8)
    grid = np.linspace(0, 2 * np.pi, 33)
    e1, _ = sensor.max_efficiency(ck(), 1.0, grid, cutoff=d)
    e2, _ = sensor.max_efficiency(ck(), 1.0, grid, cutoff=2 * d)
    assert abs(e1 - e2) / e2 < 0.005


def test_nbar_zero_guard():
    with pytest.raises(ValueError):
        sensor.wc_trace(ck(), 0.0, [0.0, 0.1])
    with pytest.raises(ValueError):
        sensor.max_efficiency(ck(), 0.0, [0.0, 0.1])


def test_trace_json():
    tr = sensor.wc_trace(ck(), 1.0, np.linspace(0, 1, 9))
    payload = tr.to_json()
    assert '"cross_kerr"' in payload


# ---------------------------------------------------------------------------
# identification

def test_identify_roundtrip_single_case():
    truth = kpe(2, 1.1)
    trace = sensor.wc_trace(truth, 1.0, np.linspace(0, 2.4, 16))
    res = sensor.identify_process(trace, ["ck", "k2", "k3"])
    assert not res.ambiguous
    assert res.kind == "k2"
    assert res.coupling == pytest.approx(1.1, rel=0.05)
    assert set(res.residuals) == {"ck", "k2", "k3"}


def test_identify_zero_trace_is_ambiguous():
    flat = sensor.EfficiencyTrace(
        process=None, nbar_a=1.0, times=np.linspace(0, 2, 12),
        eta=np.zeros(12), wc=np.zeros(12), mean_na_out=np.zeros(12))
    res = sensor.identify_process(flat, ["ck", "k2", "k3"])
    assert res.ambiguous
    assert res.kind is None


def test_identify_needs_enough_points():
    short = sensor.EfficiencyTrace(
        process=None, nbar_a=1.0, times=np.linspace(0, 2, 5),
        eta=np.zeros(5), wc=np.zeros(5), mean_na_out=np.zeros(5))
    with pytest.raises(ValueError):
        sensor.identify_process(short, ["ck"])


def test_process_labels():
    assert sensor.process_from_label("ck").kind == "cross_kerr"
    assert sensor.process_from_label("ck2").degree == 2
    assert sensor.process_from_label("k3").degree == 3
    assert sensor.process_from_label("k3").label == "k3"
    assert ck(order=1).label == "ck"
    with pytest.raises(ValueError):
        sensor.process_from_label("qq1")
    with pytest.raises(ValueError):
        sensor.BlackBoxProcess("cross_kerr", 0)
