import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isac_edge import _kernels_py, kernels

compiled = pytest.importorskip("isac_edge._kernels")


def beam_args(seed, floor_frac):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    gu1, gu2, hu1 = z[0], z[1], abs(z[2])
    g2 = abs(gu1) ** 2 + abs(gu2) ** 2
    return (complex(gu1), complex(gu2), complex(hu1), 0j, float(hu1 ** 2), 1.0, 0.1,
            floor_frac * g2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.2), st.integers(0, 12), st.integers(0, 12))
def test_beam_grid_backends_agree(seed, frac, n_dir, n_pw):
    args = beam_args(seed, frac) + (0.0, 1.0, n_pw, 0.0, math.pi / 2, n_dir, 0.0, 2 * math.pi,
                                    n_dir)
    a = _kernels_py.beam_grid_search(*args)
    b = compiled.beam_grid_search(*args)
    np.testing.assert_array_equal(np.array(a), np.array(b))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(0, 60))
def test_simplex_backends_agree(seed, m, n):
    rng = np.random.default_rng(seed)
    # nonincreasing rows with deliberate ties
    table = np.round(np.sort(rng.uniform(0, 1, (m, n + 1)), axis=1)[:, ::-1], 1)
    a, b = _kernels_py.simplex_minmax(table, n), compiled.simplex_minmax(table, n)
    assert a[0] == b[0]
    np.testing.assert_array_equal(a[1], b[1])
    assert a[1].sum() == n


def test_simplex_brute_force():
    rng = np.random.default_rng(0)
    table = np.sort(rng.uniform(0, 1, (3, 16)), axis=1)[:, ::-1].copy()
    best = min(max(table[0, i], table[1, j], table[2, 15 - i - j])
               for i in range(16) for j in range(16 - i))
    assert _kernels_py.simplex_minmax(table, 15)[0] == best


def test_backend_selected_at_import():
    assert kernels.BACKEND == "cython"
    env = dict(os.environ, ISAC_EDGE_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from isac_edge import kernels; print(kernels.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True).stdout.strip()
    assert out == "python"
