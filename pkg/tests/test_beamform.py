import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from isac_edge.beamform import (BeamStatus, build_ccp_sdp, grid_oracle, solve_beamforming,
                                zf_oracle)
from isac_edge.errors import OracleNotApplicable
from isac_edge.model import comm_sinr, sensing_sinr
from conftest import cn, make_cfg, random_instance


def test_sdp_structure():
    cfg = make_cfg(n=1, eta=(1.0,))
    p = build_ccp_sdp([1.0], [1.0], 1.0, cfg)
    assert [b.size for b in p.blocks] == [1, 1]
    assert p.scalars == ["xi"]
    assert len(p.constraints) == 3
    p4 = build_ccp_sdp(np.ones(4), np.arange(4), 1.0, make_cfg(n=4))
    assert [b.size for b in p4.blocks] == [4, 4] and len(p4.constraints) == 3


def test_eta_zero_is_mrc():
    rng = np.random.default_rng(1)
    h, g = cn(rng, 4), cn(rng, 4)
    cfg = make_cfg(n=4, eta=(0.0,), max_power=2.0, noise_power=0.5)
    out = solve_beamforming(h, g, 0.0, cfg)
    assert out.status == BeamStatus.OPTIMAL and out.sdp is None
    assert_allclose(out.pair.w, 0.0)
    assert_allclose(out.sinr_com, 2.0 * np.vdot(h, h).real / 0.5, rtol=1e-12)
    assert_allclose(zf_oracle(h, g, 0.0, cfg)[0], out.sinr_com, rtol=1e-12)


def test_orthogonal_half_power():
    h = np.array([1.0, 0, 0, 0], dtype=complex) * 3.0
    g = np.array([0, 1.0, 1j, 0]) * 2.0
    cfg = make_cfg(n=4, eta=(1.0,), max_power=1.0, noise_power=0.2, clutter_power=0.3)
    eta = 0.5 * cfg.max_power * np.vdot(g, g).real / (cfg.noise_power + cfg.clutter_power)
    out = solve_beamforming(h, g, eta, cfg)
    expected = 0.5 * 9.0 / 0.2
    assert out.status == BeamStatus.OPTIMAL
    assert_allclose(out.sinr_com, expected, rtol=1e-6)
    sinr_zf, ok = zf_oracle(h, g, eta, cfg)
    assert ok
    assert_allclose(sinr_zf, expected, rtol=1e-12)


def test_infeasible_threshold():
    rng = np.random.default_rng(2)
    h, g = cn(rng, 3), cn(rng, 3)
    cfg = make_cfg(n=3)
    eta = 1.01 * cfg.max_power * np.vdot(g, g).real / (cfg.noise_power + cfg.clutter_power)
    out = solve_beamforming(h, g, eta, cfg)
    assert out.status == BeamStatus.INFEASIBLE and out.pair is None


def test_zf_not_applicable():
    with pytest.raises(OracleNotApplicable):
        zf_oracle([1.0], [1.0], 1.0, make_cfg(n=1))
    with pytest.raises(OracleNotApplicable):
        zf_oracle([1.0, 1j], [2.0, 2j], 1.0, make_cfg(n=2))


@pytest.mark.parametrize("n", [2, 4, 8])
def test_sdp_against_oracles(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(15):
        h, g, eta, cfg = random_instance(rng, n)
        out = solve_beamforming(h, g, eta, cfg)
        assert out.status == BeamStatus.OPTIMAL
        assert out.rank1_defect <= 1e-6
        # recovered vectors honour the constraints and reproduce the SINRs
        assert out.pair.power_used <= cfg.max_power * (1 + 1e-9)
        assert eta <= out.sinr_sen <= eta * (1 + 1e-6)
        assert_allclose(out.sinr_com, comm_sinr(out.pair.f, out.pair.w, h, cfg.noise_power))
        # zero-forcing is feasible, hence never better than the optimum
        zf, ok = zf_oracle(h, g, eta, cfg)
        if ok:
            assert zf <= out.sinr_com * (1 + 1e-7)
        grid = grid_oracle(h, g, eta, cfg)
        assert grid <= out.sinr_com * (1 + 1e-7)
        assert out.sinr_com - grid <= 1e-2 * out.sinr_com


def test_zf_exact_when_orthogonal():
    rng = np.random.default_rng(9)
    for n in (2, 4, 8):
        for _ in range(5):
            h, g, eta, cfg = random_instance(rng, n)
            g = g - h * np.vdot(h, g) / np.vdot(h, h)  # make g orthogonal to h
            eta = 0.3 * np.vdot(g, g).real / (cfg.noise_power + cfg.clutter_power)
            out = solve_beamforming(h, g, eta, cfg)
            zf, ok = zf_oracle(h, g, eta, cfg)
            assert ok
            assert_allclose(out.sinr_com, zf, rtol=1e-6)


def test_bending_beats_zero_forcing():
    # two antennas, g at 45 degrees to h: a slight tilt toward h saves power
    h = np.array([1.0, 0.0], dtype=complex) * 3.0
    g = np.array([1.0, 1.0], dtype=complex) * 3.0
    cfg = make_cfg(n=2, eta=(1.0,), noise_power=0.2, clutter_power=1e-3)
    eta = 0.2 * 18.0 / 0.201
    zf, _ = zf_oracle(h, g, eta, cfg)
    out = solve_beamforming(h, g, eta, cfg)
    assert out.sinr_com > zf * 1.01


def test_single_antenna_line_search():
    h, g = np.array([2.0 + 1j]), np.array([0.5 - 1j])
    cfg = make_cfg(n=1, eta=(1.0,), noise_power=0.1, clutter_power=0.05)
    eta = 0.4 * abs(g[0]) ** 2 / 0.15
    p_w = np.linspace(0, 1, 200_001)
    ok = p_w * abs(g[0]) ** 2 / 0.15 >= eta
    sinr = (1 - p_w) * abs(h[0]) ** 2 / (0.1 + p_w * abs(h[0]) ** 2)
    line = sinr[ok].max()
    grid = grid_oracle(h, g, eta, cfg)
    out = solve_beamforming(h, g, eta, cfg)
    assert_allclose(grid, line, rtol=1e-4)
    assert_allclose(out.sinr_com, line, rtol=1e-4)
    assert out.sinr_com >= line * (1 - 1e-9)


def test_grid_refinement_never_hurts():
    rng = np.random.default_rng(3)
    for _ in range(5):
        h, g, eta, cfg = random_instance(rng, 4)
        coarse = grid_oracle(h, g, eta, cfg, resolution=16, refine=False)
        fine = grid_oracle(h, g, eta, cfg, resolution=32, refine=False)
        assert fine >= coarse
        assert grid_oracle(h, g, eta, cfg, resolution=16) >= coarse


def test_grid_infeasible_sentinel():
    cfg = make_cfg(n=2)
    g = np.array([1.0, 0.0])
    assert grid_oracle([0.0, 1.0], g, 10.0, cfg) == -math.inf


def test_phase_convention_and_determinism():
    rng = np.random.default_rng(4)
    h, g, eta, cfg = random_instance(rng, 4)
    a = solve_beamforming(h, g, eta, cfg)
    b = solve_beamforming(h, g, eta, cfg)
    assert np.array_equal(a.pair.w, b.pair.w) and np.array_equal(a.pair.f, b.pair.f)
    for v in (a.pair.w, a.pair.f):
        first = v[np.argmax(np.abs(v) > 1e-12 * np.abs(v).max())]
        assert first.imag == 0 and first.real > 0


def test_raw_units_table1_scale(scenario, channels):
    cfg = scenario.cfg
    for g, eta in zip(channels.g, cfg.eta):
        out = solve_beamforming(channels.h, g, eta, cfg)
        assert out.status == BeamStatus.OPTIMAL
        assert out.sinr_sen >= eta
        assert_allclose(out.sinr_sen,
                        sensing_sinr(out.pair.w, g, cfg.noise_power, cfg.clutter_power))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.2, 0.9), st.floats(1.0, 3.0))
def test_monotone_in_eta_and_power(seed, shrink, grow):
    h, g, eta, cfg = random_instance(np.random.default_rng(seed), 3)
    base = solve_beamforming(h, g, eta, cfg).sinr_com
    easier = solve_beamforming(h, g, shrink * eta, cfg).sinr_com
    richer = solve_beamforming(h, g, eta, replace(cfg, max_power=grow * cfg.max_power)).sinr_com
    assert easier >= base * (1 - 1e-7)
    assert richer >= base * (1 - 1e-7)
