import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cfmatch.errors import ChoiceInapplicable, NoZeroInWindow, PoleOfGamma
from cfmatch.load_model import LineParams, LoadTopology, Regime, derive_params
from cfmatch.scattering import (
    DB_CLAMP, Grid, SingularitySet, Window, ZeroChoice, analytic_singularities, gamma, gamma_parts,
    muller, numeric_zero_oracle, plane_map, select_excitable_zero,
)

LINE = LineParams(50.0)
inductances = st.floats(1e-10, 1e-5)
capacitances = st.floats(1e-13, 1e-8)


def all_loads(l, c):
    return [LoadTopology.inductor(l), LoadTopology.capacitor(c),
            LoadTopology.series(l, c), LoadTopology.parallel(l, c)]


def test_capacitor_zero_gives_no_reflection():
    assert abs(gamma(LoadTopology.capacitor(100e-12), LINE, -2e8j)) < 1e-15


def test_inductor_is_short_at_dc():
    assert gamma(LoadTopology.inductor(3e-9), LINE, 0.0) == -1.0


def test_series_resonance_is_short():
    load = LoadTopology.series(120e-9, 200e-12)
    w = derive_params(load, LINE).omega_res
    assert gamma(load, LINE, w) == pytest.approx(-1.0, abs=1e-12)


def test_parallel_antiresonance_is_open():
    load = LoadTopology.parallel(10e-9, 50e-12)
    w = derive_params(load, LINE).omega_res
    assert gamma(load, LINE, w) == pytest.approx(1.0, abs=1e-12)


def test_gamma_raises_at_pole():
    with pytest.raises(PoleOfGamma):
        gamma(LoadTopology.inductor(250e-9), LINE, 2e8j)


def test_region1_zeros():
    sset = analytic_singularities(LoadTopology.series(120e-9, 200e-12), LINE)
    assert sset.regime is Regime.REGION1
    internal, external = sset.zeros
    assert abs(internal / -1.67e8j - 1) < 0.01
    assert abs(external / -2.5e8j - 1) < 0.01


def test_experimental_parallel_zero():
    z = analytic_singularities(LoadTopology.parallel(333e-9, 2e-9), LINE).zeros[0]
    assert z.real / (2 * math.pi) == pytest.approx(6.1e6, rel=0.02)
    assert z.imag == pytest.approx(-5e6, rel=0.02)


def test_region2_zero_pair_and_poles():
    sset = analytic_singularities(LoadTopology.parallel(10e-9, 50e-12), LINE)
    assert sset.zeros[0] == pytest.approx(1.4e9 - 2e8j, rel=0.01)
    assert sset.zeros[1] == sset.zeros[0].real * -1 + 1j * sset.zeros[0].imag
    assert sset.poles == tuple(z.conjugate() for z in sset.zeros)


def test_critical_double_zero():
    sset = analytic_singularities(LoadTopology.series(125e-9, 200e-12), LINE)
    assert sset.regime is Regime.CRITICAL
    assert sset.zeros[0] == sset.zeros[1]
    assert sset.zeros[0] == pytest.approx(-2e8j, rel=1e-12)


@pytest.mark.parametrize("offset", [1e-7, -1e-7])
def test_critical_degeneration(offset):
    # series: tau*omega_res = R0*sqrt(C/L); pick L for the requested product
    c = 200e-12
    product = 2.0 + offset
    load = LoadTopology.series(c * (50.0 / product) ** 2, c)
    wres = derive_params(load, LINE).omega_res
    for z in analytic_singularities(load, LINE).zeros:
        assert abs(z + 1j * wres) / wres < 1e-3


@given(inductances, capacitances)
def test_zeros_and_conjugate_poles(l, c):
    for load in all_loads(l, c):
        sset = analytic_singularities(load, LINE)
        for z in sset.zeros:
            assert z.imag < 0
            num, den, _ = gamma_parts(load, LINE, z)
            assert abs(num / den) < 1e-12
            num, den, _ = gamma_parts(load, LINE, z.conjugate())
            assert abs(den / num) < 1e-6


@given(inductances, capacitances, st.floats(-1e11, 1e11))
def test_unimodular_on_real_axis(l, c, w):
    for load in all_loads(l, c):
        num, den, _ = gamma_parts(load, LINE, w)
        if den == 0:
            continue
        assert abs(abs(num / den) - 1.0) <= 1e-12


@given(st.floats(1e-11, 1e-7), st.floats(1e3, 1e10), st.floats(-1e10, 0.0))
def test_capacitor_inductor_antisymmetry(tau, wr, wi):
    w = complex(wr, wi)
    ind = LoadTopology.inductor(tau * 50.0)
    cap = LoadTopology.capacitor(tau / 50.0)
    assert gamma(cap, LINE, w) == pytest.approx(-gamma(ind, LINE, w), rel=1e-9, abs=1e-12)


@given(inductances, capacitances, st.floats(1e3, 1e10), st.floats(-1e10, 0.0))
def test_series_parallel_antisymmetry(l, c, wr, wi):
    w = complex(wr, wi)
    series = LoadTopology.series(l, c)
    parallel = LoadTopology.parallel(50.0 ** 2 * c, l / 50.0 ** 2)
    ns, ds, _ = gamma_parts(series, LINE, w)
    npar, dpar, _ = gamma_parts(parallel, LINE, w)
    assert npar * ds == pytest.approx(-ns * dpar, rel=1e-9)


def test_select_region2_takes_positive_carrier():
    sset = SingularitySet((-1.4e9 - 2e8j, 1.4e9 - 2e8j), (), Regime.REGION2)
    for choice in ZeroChoice:
        assert select_excitable_zero(sset, choice) == 1.4e9 - 2e8j


def test_select_region1():
    sset = analytic_singularities(LoadTopology.series(333e-9, 2e-9), LINE)
    internal = select_excitable_zero(sset, "internal")
    assert internal == pytest.approx(-1.08e7j, rel=0.01)
    assert select_excitable_zero(sset, ZeroChoice.AUTO) == internal
    assert abs(select_excitable_zero(sset, ZeroChoice.EXTERNAL)) > abs(internal)


def test_select_single_zero_sets():
    sset = analytic_singularities(LoadTopology.inductor(250e-9), LINE)
    assert select_excitable_zero(sset) == complex(0, -1 / 5e-9)
    with pytest.raises(ChoiceInapplicable):
        select_excitable_zero(sset, ZeroChoice.INTERNAL)
    crit = analytic_singularities(LoadTopology.series(125e-9, 200e-12), LINE)
    with pytest.raises(ChoiceInapplicable):
        select_excitable_zero(crit, ZeroChoice.EXTERNAL)


def test_muller_finds_cubic_root():
    root, val = muller(lambda x: x ** 3 - 1, 0.5 + 0.5j, 0.6 + 0.8j, 0.4 + 0.9j)
    assert val < 1e-14
    assert abs(root ** 3 - 1) < 1e-14


def test_oracle_capacitor():
    load = LoadTopology.capacitor(100e-12)
    zeros = numeric_zero_oracle(load, LINE, Window((-1e9, 1e9), (-5e8, 0.0)))
    assert len(zeros) == 1
    assert abs(zeros[0] - (-2e8j)) / 2e8 < 1e-6


def test_oracle_region2():
    load = LoadTopology.parallel(10e-9, 50e-12)
    exact = analytic_singularities(load, LINE).zeros[0]
    zeros = numeric_zero_oracle(load, LINE, Window((1.2e9, 1.6e9), (-4e8, -1e8)))
    assert len(zeros) == 1
    assert abs(zeros[0] - exact) / abs(exact) < 1e-6


@pytest.mark.parametrize("load", all_loads(120e-9, 200e-12), ids=lambda x: x.kind.value)
def test_oracle_upper_half_plane_is_empty(load):
    with pytest.raises(NoZeroInWindow):
        numeric_zero_oracle(load, LINE, Window((-1e9, 1e9), (1e6, 1e9)), n_r=41, n_i=41)


def test_plane_map_single_element_extrema():
    pm = plane_map(LoadTopology.inductor(250e-9), LINE, Grid(Window((-1e9, 1e9), (-1e9, 1e9))))
    k_max, _ = np.unravel_index(np.argmax(pm.samples), pm.samples.shape)
    k_min, _ = np.unravel_index(np.argmin(pm.samples), pm.samples.shape)
    assert pm.omega_i[k_max] > 0
    assert pm.omega_i[k_min] < 0
    assert pm.samples.max() <= DB_CLAMP and pm.samples.min() >= -DB_CLAMP


@given(inductances, capacitances)
def test_plane_map_real_axis_is_zero_db(l, c):
    grid = Grid(Window((-1e10, 1e10), (-1e9, 1e9)), 21, 21)
    for load in all_loads(l, c):
        pm = plane_map(load, LINE, grid)
        row = pm.samples[10]
        assert pm.omega_i[10] == 0.0
        assert np.all(np.abs(row) < 1e-9)


def test_plane_map_region_shapes():
    window = Window((-3e9, 3e9), (-3e9, 3e9))
    grid = Grid(window, 301, 301)
    r1 = plane_map(LoadTopology.series(120e-9, 200e-12), LINE, grid)
    minima = r1.omega_i[np.argmin(r1.samples, axis=0)]
    centre = r1.samples[:, 150]
    assert r1.omega_r[150] == 0.0
    assert centre.min() < -40 and centre.max() > 40
    assert np.all(minima < 0)
    r2 = plane_map(LoadTopology.parallel(10e-9, 50e-12), LINE, grid)
    k, m = np.unravel_index(np.argmin(r2.samples), r2.samples.shape)
    assert abs(r2.omega_r[m]) > 1e9 and r2.omega_i[k] < 0
