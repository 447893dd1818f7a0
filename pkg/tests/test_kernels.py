"""Hot kernels: jitted and pure paths must agree bit for bit, and the
batched root finder must reproduce the companion-matrix eigenvalues."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigma_atlas import backend, kernels
from sigma_atlas.coeffset import make_set
from sigma_atlas.decide import start_indices, FIRST_ANY


def _pure(fn):
    return backend.python_version(fn)


def _search_args(elems, r=2.5, limit=2.0, depth=8):
    s = make_set(elems)
    arr = s.as_float_array()
    starts = start_indices(s, FIRST_ANY)
    path = np.empty(depth + 2, dtype=np.int64)
    return arr, starts, path


# ---------------------------------------------------------------------------
# jit vs pure bit-identity

@pytest.mark.parametrize("r", [1.5, 2.0, 3.3, -2.5, -4.0])
def test_one_step_real_jit_pure_identical(r):
    arr, starts, path = _search_args([0, 1, -1, 3, -3])
    path2 = path.copy()
    limit = 3.0 / (abs(r) - 1.0) + 1e-6
    got = kernels.search_one_step_real(arr, starts, r, limit, 8, 10 ** 7,
                                       path)
    want = _pure(kernels.search_one_step_real)(arr, starts, r, limit, 8,
                                               10 ** 7, path2)
    assert got == want
    assert np.array_equal(path, path2)


@pytest.mark.parametrize("two_r_cos,r_sq", [(1.0, 4.0), (2.5, 5.0),
                                            (0.0, 2.0), (3.0, 10.0)])
def test_two_step_jit_pure_identical(two_r_cos, r_sq):
    arr, starts, path = _search_args([0, 1, -1, 2, -2])
    path2 = path.copy()
    r = math.sqrt(r_sq)
    limit = 2.0 / (r - 1.0) ** 2 + 1e-6
    got = kernels.search_two_step(arr, starts, two_r_cos, r_sq, limit, 9,
                                  10 ** 7, path)
    want = _pure(kernels.search_two_step)(arr, starts, two_r_cos, r_sq,
                                          limit, 9, 10 ** 7, path2)
    assert got == want
    assert np.array_equal(path, path2)


def test_one_step_complex_jit_pure_identical():
    arr, starts, path = _search_args([0, 1, -1])
    path2 = path.copy()
    got = kernels.search_one_step_complex(arr, starts, 1.2, -1.1, 2.5, 8,
                                          10 ** 7, path)
    want = _pure(kernels.search_one_step_complex)(arr, starts, 1.2, -1.1,
                                                  2.5, 8, 10 ** 7, path2)
    assert got == want
    assert np.array_equal(path, path2)


def test_greedy_kernels_jit_pure_identical():
    arr = make_set([0, 1, -1, 2, -2, 3, -3]).as_float_array()
    got = kernels.greedy_real(arr, 2.75, 500, 1.0 + 1e-12)
    want = _pure(kernels.greedy_real)(arr, 2.75, 500, 1.0 + 1e-12)
    assert got == want
    got = kernels.greedy_two_step_interval(arr, 1.3, 3.1, -1.0, 1.0, 500,
                                           1e-12)
    want = _pure(kernels.greedy_two_step_interval)(arr, 1.3, 3.1, -1.0, 1.0,
                                                   500, 1e-12)
    assert got == want


def test_decide_batch_jit_pure_identical():
    s = make_set([0, 1, -1, 2, -2])
    arr = s.as_float_array()
    starts = start_indices(s, FIRST_ANY)
    rng = np.random.default_rng(7)
    ang = rng.uniform(0.0, math.pi, size=64)
    mod = rng.uniform(0.2, 0.95, size=64)
    re = mod * np.cos(ang)
    im = mod * np.sin(ang)
    c1 = np.empty(64, dtype=np.int64)
    d1 = np.empty(64, dtype=np.int64)
    c2 = np.empty(64, dtype=np.int64)
    d2 = np.empty(64, dtype=np.int64)
    kernels.decide_batch(re, im, arr, starts, 2.0, 10, 1e-6, 10 ** 7, c1, d1)
    _pure(kernels.decide_batch)(re, im, arr, starts, 2.0, 10, 1e-6, 10 ** 7,
                                c2, d2)
    assert np.array_equal(c1, c2)
    assert np.array_equal(d1, d2)


def test_render_rows_jit_pure_identical():
    s = make_set([0, 1, -1])
    arr = s.as_float_array()
    starts = start_indices(s, FIRST_ANY)
    xs = np.linspace(0.05, 0.9, 24)
    ys = np.linspace(0.0, 0.9, 24)
    a = np.empty((24, 24), dtype=np.uint8)
    b = np.empty((24, 24), dtype=np.uint8)
    args = (xs, ys, arr, starts, 1.0, 10, 4, 1e-6, 10 ** 7,
            True, 0.5, True, 1.0, 0.6)
    kernels.render_rows(*args, a)
    _pure(kernels.render_rows)(*args, b)
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# code semantics

def _path_for(depth):
    # the kernels write up to max_depth + 1 path entries
    return np.empty(depth + 2, dtype=np.int64)


def test_search_codes_cover_expected_cases():
    arr, starts, _ = _search_args([1, -1])
    # x = 1/4 on {+-1}: every branch escapes instantly
    code, depth, pruned, nodes = kernels.search_one_step_real(
        arr, starts, 4.0, 1.0 / 3.0 + 1e-6, 10, 10 ** 6, _path_for(10))
    assert code == kernels.CODE_OUT
    # x = 1/2 on {+-1}: alternating signs survive any depth
    code, depth, *_ = kernels.search_one_step_real(
        arr, starts, 2.0, 1.0 + 1e-6, 10, 10 ** 6, _path_for(10))
    assert code == kernels.CODE_PRESUMED_IN
    assert depth == 10
    # tiny node budget yields Unknown
    code, *_ = kernels.search_one_step_real(
        arr, starts, 2.0, 1.0 + 1e-6, 30, 3, _path_for(30))
    assert code == kernels.CODE_UNKNOWN


def test_survivor_path_is_replayable():
    arr, starts, _ = _search_args([1, -1])
    path = _path_for(12)
    code, depth, pruned, nodes = kernels.search_one_step_real(
        arr, starts, 2.0, 1.0 + 1e-6, 12, 10 ** 6, path)
    assert code == kernels.CODE_PRESUMED_IN
    q = 0.0
    for idx in path[:13]:
        q = arr[int(idx)] + 2.0 * q
        assert abs(q) <= 1.0 + 1e-6


# ---------------------------------------------------------------------------
# batched root finder vs companion matrix

def _solve_one(coeffs):
    """Run the kernel on a single coefficient vector c_0..c_d."""
    k = len(coeffs)
    block = np.zeros((1, k))
    block[0, :] = coeffs
    d = k - 1
    while d > 0 and block[0, d] == 0.0:
        d -= 1
    degs = np.array([d], dtype=np.int64)
    roots = np.zeros((1, k - 1), dtype=np.complex128)
    resid = np.zeros((1, k - 1))
    dpabs = np.zeros((1, k - 1))
    scale = np.zeros((1, k - 1))
    nroots = np.zeros(1, dtype=np.int64)
    ok = np.zeros(1, dtype=np.bool_)
    kernels.roots_batch(block, degs, roots, resid, dpabs, scale, nroots, ok)
    return roots[0, :d], resid[0, :d], scale[0, :d], bool(ok[0])


def _match_roots(got, want, tol):
    got = sorted(got, key=lambda z: (round(z.real, 7), round(z.imag, 7)))
    want = sorted(want, key=lambda z: (round(z.real, 7), round(z.imag, 7)))
    assert len(got) == len(want)
    for g, w in zip(got, want):
        assert abs(g - w) <= tol, (g, w)


@pytest.mark.parametrize("coeffs", [
    [1.0, -2.0],                       # single real root 1/2
    [1.0, -1.0, -1.0],                 # golden-ratio pair
    [1.0, -3.0, 12.0],                 # non-real quadratic pair
    [1.0, 1.0, 1.0, 1.0],              # roots of unity minus 1
    [-1.0, 4.0, 4.0, 4.0, 4.0],        # deep real antenna root near -1/5
])
def test_roots_batch_matches_numpy(coeffs):
    got, resid, scale, ok = _solve_one(coeffs)
    assert ok
    want = np.roots(list(reversed(coeffs)))
    _match_roots(list(got), list(want), 1e-8)
    assert np.all(resid <= 1e-9 * np.maximum(1.0, scale))


@given(st.lists(st.sampled_from([-3, -2, -1, 1, 2, 3]), min_size=2,
                max_size=9))
@settings(max_examples=100, deadline=None)
def test_roots_batch_random_int_polys(coeffs):
    cs = [float(c) for c in coeffs]
    got, resid, scale, ok = _solve_one(cs)
    if not ok:       # extremely clustered cases may be flagged, never wrong
        return
    want = np.roots(list(reversed(cs)))
    _match_roots(list(got), list(want), 1e-6)


def test_roots_batch_jit_pure_identical():
    block = np.array([[1.0, -1.0, -1.0, 1.0, 1.0]])
    degs = np.array([4], dtype=np.int64)
    out = []
    for fn in (kernels.roots_batch, _pure(kernels.roots_batch)):
        roots = np.zeros((1, 4), dtype=np.complex128)
        resid = np.zeros((1, 4))
        dpabs = np.zeros((1, 4))
        scale = np.zeros((1, 4))
        nroots = np.zeros(1, dtype=np.int64)
        ok = np.zeros(1, dtype=np.bool_)
        fn(block, degs, roots, resid, dpabs, scale, nroots, ok)
        out.append((roots.copy(), resid.copy(), ok.copy()))
    assert np.array_equal(out[0][0], out[1][0])
    assert np.array_equal(out[0][1], out[1][1])
    assert np.array_equal(out[0][2], out[1][2])
