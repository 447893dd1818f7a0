"""Tests for the brute-force enumeration oracle.

Oracle notes:
- The independent reference below re-enumerates small families with
  itertools.product and finds roots with np.roots, so agreement checks the
  streaming enumeration and the batched solver at once.
- Family-size formulas were frozen after checking them against explicit
  counts: with e elements, f admissible leading and l admissible trailing
  coefficients, the count through degree D is f + sum_{d=1}^{D} f e^(d-1) l.
- min-modulus values for {-1, 1} at degrees 3 and 4 were frozen from a run
  and are re-derivable from the reference enumeration.
"""

import csv
import itertools
import math

import numpy as np
import pytest

from sigma_atlas import make_set, span_set
from sigma_atlas.decide import FIRST_ANY, FIRST_ONE
from sigma_atlas.errors import (BudgetExceeded, EmptyRootSet,
                                PreconditionViolated)
from sigma_atlas.oracle import (
    DISC_EDGE,
    cross_check_decide,
    enumerate_roots,
    family_size,
    min_modulus_nonreal,
    verify_product_inequality,
    write_roots_csv,
)

PM_ONE = make_set([1, -1])


def reference_family(elements, degree, first_one=False):
    """Every coefficient tuple with nonzero first and last entries."""
    nonzero = [e for e in elements if e != 0]
    firsts = [1] if first_one else nonzero
    for p0 in firsts:
        yield (p0,)
    for d in range(1, degree + 1):
        for p0 in firsts:
            for mid in itertools.product(elements, repeat=d - 1):
                for pd in nonzero:
                    yield (p0,) + mid + (pd,)


# Comparison band: multiple roots exactly on the unit circle get perturbed
# by ~1e-8 in either direction by any floating-point solver, so multiset
# comparisons only count roots safely inside the circle.
SAFE_EDGE = 1e-5


def reference_disc_roots(elements, degree, first_one=False):
    """Disc roots of the reference family via np.roots."""
    out = []
    for cs in reference_family(elements, degree, first_one):
        if len(cs) == 1:
            continue
        for z in np.roots(list(reversed(cs))):
            if abs(z) < 1.0 - SAFE_EDGE:
                out.append(complex(z))
    return out


def as_multiset(zs, digits=8):
    return sorted((round(z.real, digits), round(z.imag, digits)) for z in zs)


# ---------------------------------------------------------------------------
# family sizes


def test_family_size_frozen_values():
    assert family_size(PM_ONE, 8, FIRST_ONE) == 511
    assert family_size(PM_ONE, 10, FIRST_ANY) == 4094
    assert family_size(span_set(2), 6, FIRST_ONE) == 15_625
    assert family_size(span_set(4), 8, FIRST_ONE) == 43_046_721
    assert family_size(span_set(4), 8, FIRST_ANY) == 344_373_768


@pytest.mark.parametrize("elements,degree,first_one", [
    ([1, -1], 5, False),
    ([1, -1], 6, True),
    ([0, 1, -1], 4, False),
    ([0, 1, -1, 2, -2], 3, True),
])
def test_family_size_matches_reference_count(elements, degree, first_one):
    s = make_set(elements)
    mode = FIRST_ONE if first_one else FIRST_ANY
    expected = sum(1 for _ in reference_family(elements, degree, first_one))
    assert family_size(s, degree, mode) == expected


def test_family_size_rejects_impossible_mode():
    with pytest.raises(PreconditionViolated):
        family_size(make_set([2, -2]), 4, FIRST_ONE)


# ---------------------------------------------------------------------------
# materialized root sets


def test_enumerate_matches_reference_roots_exactly():
    rs = enumerate_roots(PM_ONE, 5)
    safe = rs.roots[np.abs(rs.roots) < 1.0 - SAFE_EDGE]
    ref = reference_disc_roots([1, -1], 5)
    assert as_multiset(safe) == as_multiset(ref)


def test_enumerate_zero_set_matches_reference():
    rs = enumerate_roots(make_set([0, 1, -1]), 4, FIRST_ONE)
    safe = rs.roots[np.abs(rs.roots) < 1.0 - SAFE_EDGE]
    ref = reference_disc_roots([0, 1, -1], 4, first_one=True)
    assert as_multiset(safe) == as_multiset(ref)


def test_enumerate_bookkeeping_frozen():
    rs = enumerate_roots(PM_ONE, 6)
    assert rs.n_polys == 254
    assert rs.roots.size == 528
    assert rs.n_root_failures == 0
    assert float(rs.residual.max()) < 1e-12
    assert float(rs.moduli.max()) < 1.0
    # every reported root actually annihilates its polynomial
    for i in range(rs.roots.size):
        z = complex(rs.roots[i])
        cs = rs.coeffs[int(rs.poly_index[i])]
        acc = 0.0 + 0.0j
        for c in reversed(cs):
            acc = acc * z + c
        assert abs(acc) < 1e-10


def test_enumerate_rejects_bad_arguments():
    with pytest.raises(PreconditionViolated):
        enumerate_roots(PM_ONE, -1)
    with pytest.raises(BudgetExceeded):
        enumerate_roots(span_set(4), 8, budget=1000)


def test_roots_csv_roundtrip(tmp_path):
    rs = enumerate_roots(PM_ONE, 4)
    path = tmp_path / "roots.csv"
    write_roots_csv(rs, str(path))
    with open(path, encoding="ascii") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == rs.roots.size
    for row in rows:
        z = complex(float(row["re"]), float(row["im"]))
        assert float(row["modulus"]) == abs(z)
        cs = [float(v) for v in row["coeff_vector"].split(";")]
        assert int(row["degree"]) == len(cs) - 1
        acc = 0.0 + 0.0j
        for c in reversed(cs):
            acc = acc * z + c
        assert abs(acc) < 1e-10


# ---------------------------------------------------------------------------
# streaming statistics


def test_product_inequality_pm_one_frozen():
    rep = verify_product_inequality(PM_ONE, 8, FIRST_ONE)
    assert rep.ok
    assert rep.n_polys == 511
    assert rep.n_disc_roots == 1552
    assert rep.n_violations == 0
    assert rep.max_product == 1.0
    # all-circle-roots members settle via moment matching or the rescue
    # solver; nothing may stay unverified
    assert rep.n_poly_failures == 0
    assert rep.n_rescued == 1


def test_product_inequality_against_reference():
    # recompute the root products for every quartic directly
    rep = verify_product_inequality(PM_ONE, 4, tol=1e-7)
    worst = 0.0
    for cs in reference_family([1, -1], 4):
        if len(cs) == 1:
            continue
        prod = 1.0
        for z in np.roots(list(reversed(cs))):
            m = abs(z)
            if m < 1.0 - DISC_EDGE:
                prod *= 1.0 / m - 1.0
        assert prod <= max(abs(c) for c in cs) + 1e-7
        worst = max(worst, prod)
    assert rep.ok
    assert rep.max_product == pytest.approx(worst, rel=1e-9)


def test_min_modulus_nonreal_frozen_and_reference():
    assert min_modulus_nonreal(PM_ONE, 3) == pytest.approx(
        0.7373527057603276, abs=1e-12)
    assert min_modulus_nonreal(PM_ONE, 4) == pytest.approx(
        0.6814048819961059, abs=1e-12)
    ref = min(abs(z) for z in reference_disc_roots([1, -1], 4)
              if abs(z.imag) > 1e-8)
    assert min_modulus_nonreal(PM_ONE, 4) == pytest.approx(ref, abs=1e-9)


def test_min_modulus_mirror_reduction_is_exact():
    with_mirror = min_modulus_nonreal(PM_ONE, 5, mirror_reduce=True)
    without = min_modulus_nonreal(PM_ONE, 5, mirror_reduce=False)
    assert with_mirror == without


def test_min_modulus_empty_family_raises():
    with pytest.raises(EmptyRootSet):
        min_modulus_nonreal(PM_ONE, 1)
    with pytest.raises(EmptyRootSet):
        min_modulus_nonreal(PM_ONE, 2)
    with pytest.raises(PreconditionViolated):
        min_modulus_nonreal(make_set([1, 2]), 4, mirror_reduce=True)


# ---------------------------------------------------------------------------
# decide cross-checks


def test_cross_check_small_family_clean():
    rep = cross_check_decide(PM_ONE, 5)
    assert rep.ok
    assert rep.n_polys == 64
    assert rep.n_roots_checked == 88
    assert rep.n_contradictions == 0
    assert rep.contradictions == []


def test_cross_check_sampling_caps_work():
    rep = cross_check_decide(make_set([0, 1, -1]), 6, sample_size=400, seed=1)
    assert rep.ok
    assert rep.n_roots_checked == 400


def test_cross_check_report_serializes():
    import json
    rep = cross_check_decide(PM_ONE, 4)
    blob = json.loads(json.dumps(rep.to_json_dict()))
    assert blob["ok"] is True
    assert blob["n_contradictions"] == 0
