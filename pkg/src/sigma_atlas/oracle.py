"""Brute-force polynomial enumeration used as ground truth.

Enumerates all polynomials with coefficients in a set (nonzero constant
term, nonzero leading term), finds their roots with a batched solver, and
reduces statistics over the roots streamingly so degree-8 families with
tens of millions of members fit in memory.  Roots are validated by a
relative residual test; everything downstream treats the result as an inner
approximation of the true root set.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .coeffset import is_symmetric
from .decide import FIRST_ANY, FIRST_ONE, SearchConfig, start_indices
from .errors import (BudgetExceeded, EmptyRootSet, PreconditionViolated)

DEFAULT_BUDGET = 10_000_000
CHUNK_ROWS = 1 << 17

# roots this close to the unit circle are excluded from disc statistics
DISC_EDGE = 1e-9
# relative residual bound for accepting a computed root
ROOT_RESID_TOL = 1e-9
# |P|/|P'| bound for roots used in decide cross-checks
CROSS_CHECK_ERR = 1e-12
# rescue bound: a poly whose companion-matrix roots all sit at or above
# this modulus has every disc factor below one (true roots cannot stray
# below 1/2 from here), so it cannot violate the product inequality
RESCUE_MODULUS = 0.9


def _mode_indices(s, first_coeff):
    starts = start_indices(s, first_coeff)
    if starts.size == 0:
        raise PreconditionViolated(
            f"no admissible leading coefficient for mode {first_coeff!r}")
    return starts


def family_size(s, degree, first_coeff=FIRST_ANY):
    """Exact number of enumerated polynomials up to the degree bound."""
    n_e = len(s)
    n_f = _mode_indices(s, first_coeff).size
    n_l = start_indices(s, FIRST_ANY).size
    total = n_f
    for d in range(1, degree + 1):
        total += n_f * (n_e ** (d - 1)) * n_l
    return total


def _enumerate_chunks(s, degree, first_coeff, budget, mirror_reduce,
                      chunk_rows=CHUNK_ROWS):
    """Yield (degree, coeff_block) arrays covering the family once.

    mirror_reduce keeps one representative of each z -> -z pair (only valid
    for symmetric sets); the caller's statistic must be mirror-invariant.
    """
    total = family_size(s, degree, first_coeff)
    effective = (total + 1) // 2 if mirror_reduce else total
    if effective > budget:
        raise BudgetExceeded(
            f"family size {total} (effective {effective}) exceeds budget "
            f"{budget}")
    if mirror_reduce and not is_symmetric(s):
        raise PreconditionViolated("mirror reduction needs a symmetric set")

    elems = s.as_float_array()
    firsts = _mode_indices(s, first_coeff)
    lasts = start_indices(s, FIRST_ANY)
    n_e = len(elems)
    n_l = lasts.size

    for d in range(1, degree + 1):
        total_d = firsts.size * (n_e ** (d - 1)) * n_l
        signs = np.where(np.arange(d + 1) % 2 == 0, 1.0, -1.0)
        for lo in range(0, total_d, chunk_rows):
            hi = min(lo + chunk_rows, total_d)
            idx = np.arange(lo, hi, dtype=np.int64)
            block = np.empty((hi - lo, d + 1), dtype=np.float64)
            t = idx
            block[:, d] = elems[lasts[t % n_l]]
            t = t // n_l
            for pos in range(d - 1, 0, -1):
                block[:, pos] = elems[t % n_e]
                t = t // n_e
            block[:, 0] = elems[firsts[t]]
            if mirror_reduce:
                mirror = block * signs
                diff = block - mirror
                nz = np.abs(diff) > 0.0
                has = nz.any(axis=1)
                first_col = np.argmax(nz, axis=1)
                lead = np.take_along_axis(
                    diff, first_col[:, None], axis=1)[:, 0]
                keep = (~has) | (lead < 0.0)
                block = block[keep]
            if block.shape[0]:
                yield d, block


def _solve_chunk(block, d):
    """Run the batched root finder; returns the raw output arrays."""
    B = block.shape[0]
    degs = np.full(B, d, dtype=np.int64)
    roots = np.empty((B, d), dtype=np.complex128)
    resid = np.empty((B, d), dtype=np.float64)
    dpabs = np.empty((B, d), dtype=np.float64)
    scale = np.empty((B, d), dtype=np.float64)
    nroots = np.empty(B, dtype=np.int64)
    ok = np.empty(B, dtype=np.bool_)
    kernels.roots_batch(block, degs, roots, resid, dpabs, scale, nroots, ok)
    valid = resid <= ROOT_RESID_TOL * np.maximum(1.0, scale)
    return roots, resid, dpabs, valid, ok


# ---------------------------------------------------------------------------
# materialized root sets (small families, CSV export)

@dataclass
class OracleRootSet:
    """All validated roots strictly inside the unit disc for a family."""

    set: object
    degree_bound: int
    first_coeff: str
    roots: np.ndarray          # complex128
    poly_index: np.ndarray     # int64, into coeffs
    residual: np.ndarray       # float64
    coeffs: list               # tuple of coefficients per polynomial
    n_polys: int = 0
    n_root_failures: int = 0

    @property
    def moduli(self):
        return np.abs(self.roots)


def enumerate_roots(s, degree, first_coeff=FIRST_ANY, budget=DEFAULT_BUDGET):
    """Materialize the family's disc roots (intended for modest sizes)."""
    if degree < 0:
        raise PreconditionViolated("degree bound must be >= 0")
    all_roots = []
    all_poly = []
    all_resid = []
    coeff_list = []
    n_failures = 0
    n_polys = _mode_indices(s, first_coeff).size  # degree-0 constants
    for d, block in _enumerate_chunks(s, degree, first_coeff, budget,
                                      mirror_reduce=False):
        roots, resid, dpabs, valid, ok = _solve_chunk(block, d)
        n_failures += int((~ok).sum())
        inside = valid & (np.abs(roots) < 1.0 - DISC_EDGE)
        base = len(coeff_list)
        coeff_list.extend(tuple(row) for row in block)
        n_polys += block.shape[0]
        rows, cols = np.nonzero(inside)
        all_roots.append(roots[rows, cols])
        all_poly.append(rows + base)
        all_resid.append(resid[rows, cols])
    roots = (np.concatenate(all_roots) if all_roots
             else np.empty(0, dtype=np.complex128))
    poly = (np.concatenate(all_poly) if all_poly
            else np.empty(0, dtype=np.int64))
    resid = (np.concatenate(all_resid) if all_resid
             else np.empty(0, dtype=np.float64))
    return OracleRootSet(set=s, degree_bound=degree, first_coeff=first_coeff,
                         roots=roots, poly_index=poly, residual=resid,
                         coeffs=coeff_list, n_polys=n_polys,
                         n_root_failures=n_failures)


def write_roots_csv(rootset, path):
    """CSV columns: re, im, modulus, degree, coeff_vector, residual."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("re,im,modulus,degree,coeff_vector,residual\n")
        for i in range(rootset.roots.size):
            z = complex(rootset.roots[i])
            pi = int(rootset.poly_index[i])
            cs = rootset.coeffs[pi]
            vec = ";".join(repr(float(c)) for c in cs)
            fh.write(f"{z.real!r},{z.imag!r},{abs(z)!r},{len(cs) - 1},"
                     f"{vec},{float(rootset.residual[i])!r}\n")


# ---------------------------------------------------------------------------
# streaming statistics

@dataclass
class ProductInequalityReport:
    n_polys: int
    n_disc_roots: int
    n_violations: int
    max_product: float
    max_product_coeffs: tuple | None
    n_poly_failures: int
    n_edge_band: int
    tol: float
    n_rescued: int = 0

    @property
    def ok(self):
        return self.n_violations == 0

    def to_json_dict(self):
        return {"n_polys": self.n_polys, "n_disc_roots": self.n_disc_roots,
                "n_violations": self.n_violations,
                "max_product": self.max_product,
                "max_product_coeffs": (list(self.max_product_coeffs)
                                       if self.max_product_coeffs else None),
                "n_poly_failures": self.n_poly_failures,
                "n_edge_band": self.n_edge_band, "tol": self.tol,
                "n_rescued": self.n_rescued, "ok": self.ok}


def verify_product_inequality(s, degree, first_coeff=FIRST_ANY,
                              budget=DEFAULT_BUDGET, tol=1e-7):
    """Check prod(1/|root| - 1) <= max |coeff| over every family member.

    The product runs over all validated roots strictly inside the disc.
    When the batched solver cannot validate a polynomial (typically circle
    roots of high multiplicity), the companion-matrix solver is consulted:
    if every root then has modulus >= RESCUE_MODULUS the polynomial cannot
    violate the bound, because each disc factor 1/|z| - 1 is below one and
    the coefficient sup of a normalized family member is at least one.
    Only polynomials failing both paths are skipped and counted.
    """
    n_polys = _mode_indices(s, first_coeff).size
    n_roots = 0
    n_viol = 0
    n_fail = 0
    n_edge = 0
    n_rescued = 0
    max_prod = 0.0
    max_coeffs = None
    for d, block in _enumerate_chunks(s, degree, first_coeff, budget,
                                      mirror_reduce=False):
        n_polys += block.shape[0]
        roots, resid, dpabs, valid, ok = _solve_chunk(block, d)
        mods = np.abs(roots)
        inside = valid & (mods < 1.0 - DISC_EDGE)
        n_edge += int((valid & (np.abs(mods - 1.0) <= DISC_EDGE)).sum())
        all_valid = valid.all(axis=1)
        poly_ok = all_valid & ok
        if not poly_ok.all():
            # Multiple roots make the solver's displacement flag trip even
            # though every root validates; accept those rows when the root
            # multiset also reproduces the coefficient moments, which rules
            # out approximations collapsing onto a single root.
            vp = block[:, 0] / block[:, d] * (1.0 if d % 2 == 0 else -1.0)
            vs = -block[:, d - 1] / block[:, d]
            moments = ((np.abs(roots.prod(axis=1) - vp)
                        <= 1e-6 * np.maximum(1.0, np.abs(vp)))
                       & (np.abs(roots.sum(axis=1) - vs)
                          <= 1e-6 * np.maximum(1.0, np.abs(vs))))
            poly_ok |= all_valid & moments
        for i in np.nonzero(~poly_ok)[0]:
            zs = np.roots(block[i, ::-1])
            if (zs.size and np.isfinite(zs).all()
                    and float(np.abs(zs).min()) >= RESCUE_MODULUS):
                poly_ok[i] = True
                inside[i] = False
                n_rescued += 1
        n_roots += int(inside.sum())
        n_fail += int((~poly_ok).sum())
        factors = np.where(inside, 1.0 / np.maximum(mods, 1e-300) - 1.0, 1.0)
        prods = factors.prod(axis=1)
        sups = np.abs(block).max(axis=1)
        bad = poly_ok & (prods > sups + tol)
        n_viol += int(bad.sum())
        i = int(np.argmax(np.where(poly_ok, prods, -1.0)))
        if poly_ok[i] and prods[i] > max_prod:
            max_prod = float(prods[i])
            max_coeffs = tuple(block[i])
    return ProductInequalityReport(
        n_polys=n_polys, n_disc_roots=n_roots, n_violations=n_viol,
        max_product=max_prod, max_product_coeffs=max_coeffs,
        n_poly_failures=n_fail, n_edge_band=n_edge, tol=tol,
        n_rescued=n_rescued)


def min_modulus_nonreal(s, degree, first_coeff=FIRST_ANY,
                        budget=DEFAULT_BUDGET, mirror_reduce=None):
    """Smallest modulus of a validated non-real disc root in the family."""
    if mirror_reduce is None:
        mirror_reduce = is_symmetric(s)
    best = math.inf
    count = 0
    for d, block in _enumerate_chunks(s, degree, first_coeff, budget,
                                      mirror_reduce=mirror_reduce):
        roots, resid, dpabs, valid, ok = _solve_chunk(block, d)
        mods = np.abs(roots)
        pick = (valid & (mods < 1.0 - DISC_EDGE)
                & (np.abs(roots.imag) > kernels.IM_CUTOFF))
        count += int(pick.sum())
        if pick.any():
            m = float(mods[pick].min())
            if m < best:
                best = m
    if count == 0:
        raise EmptyRootSet("no non-real disc roots in the family")
    return best


@dataclass
class CrossCheckReport:
    n_polys: int
    n_roots_checked: int
    n_skipped_accuracy: int
    n_contradictions: int
    contradictions: list = field(default_factory=list)
    max_depth: int = 0
    slack: float = 0.0

    @property
    def ok(self):
        return self.n_contradictions == 0

    def to_json_dict(self):
        return {"n_polys": self.n_polys,
                "n_roots_checked": self.n_roots_checked,
                "n_skipped_accuracy": self.n_skipped_accuracy,
                "n_contradictions": self.n_contradictions,
                "contradictions": self.contradictions[:20],
                "max_depth": self.max_depth, "slack": self.slack,
                "ok": self.ok}


def cross_check_decide(s, degree, first_coeff=FIRST_ANY, sample_size=None,
                       max_depth=12, slack=3e-3, budget=DEFAULT_BUDGET,
                       seed=0, node_budget=5_000_000):
    """Soundness check: the search may never answer Out on a known root.

    Only roots with estimated error |P|/|P'| <= 1e-12 participate; a root
    that accurate cannot drift past the slack within the check depth, so an
    Out verdict would prove a real bug.  Mirror reduction is exact here:
    the mirrored root's search explores sign-flipped remainders with
    identical magnitudes.
    """
    starts = _mode_indices(s, first_coeff)
    elems = s.as_float_array()
    mirror = is_symmetric(s)
    n_polys = starts.size
    n_checked = 0
    n_skipped = 0
    n_contra = 0
    contradictions = []
    rng = np.random.default_rng(seed)

    sampled_re = []
    sampled_im = []
    sampled_info = []

    for d, block in _enumerate_chunks(s, degree, first_coeff, budget,
                                      mirror_reduce=mirror):
        n_polys += block.shape[0]
        roots, resid, dpabs, valid, ok = _solve_chunk(block, d)
        mods = np.abs(roots)
        pick = valid & (mods < 1.0 - DISC_EDGE) & (mods > 1e-12)
        accurate = pick & (resid <= CROSS_CHECK_ERR * np.maximum(dpabs, 1e-300))
        n_skipped += int((pick & ~accurate).sum())
        rows, cols = np.nonzero(accurate)
        if rows.size == 0:
            continue
        re = roots[rows, cols].real.copy()
        im = roots[rows, cols].imag.copy()
        if sample_size is not None:
            sampled_re.append(re)
            sampled_im.append(im)
            sampled_info.extend(
                (tuple(block[r]), complex(roots[r, c]))
                for r, c in zip(rows, cols))
            continue
        n_checked += rows.size
        codes = np.empty(rows.size, dtype=np.int64)
        depths = np.empty(rows.size, dtype=np.int64)
        kernels.decide_batch(re, im, elems, starts, float(s.max_abs),
                             max_depth, slack, node_budget, codes, depths)
        bad = np.nonzero(codes == kernels.CODE_OUT)[0]
        n_contra += bad.size
        for i in bad[:20]:
            contradictions.append(
                {"root": [float(re[i]), float(im[i])],
                 "coeffs": [float(v) for v in block[rows[i]]]})

    if sample_size is not None and sampled_re:
        re = np.concatenate(sampled_re)
        im = np.concatenate(sampled_im)
        if re.size > sample_size:
            sel = rng.choice(re.size, size=sample_size, replace=False)
            re = re[sel]
            im = im[sel]
            info = [sampled_info[int(i)] for i in sel]
        else:
            info = sampled_info
        n_checked = re.size
        codes = np.empty(re.size, dtype=np.int64)
        depths = np.empty(re.size, dtype=np.int64)
        kernels.decide_batch(re, im, elems, starts, float(s.max_abs),
                             max_depth, slack, node_budget, codes, depths)
        bad = np.nonzero(codes == kernels.CODE_OUT)[0]
        n_contra += bad.size
        for i in bad[:20]:
            cs, z = info[int(i)]
            contradictions.append(
                {"root": [z.real, z.imag],
                 "coeffs": [float(v) for v in cs]})

    return CrossCheckReport(n_polys=n_polys, n_roots_checked=n_checked,
                            n_skipped_accuracy=n_skipped,
                            n_contradictions=n_contra,
                            contradictions=contradictions,
                            max_depth=max_depth, slack=slack)
