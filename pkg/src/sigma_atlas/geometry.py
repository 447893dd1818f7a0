"""Closed-form geometry of the root sets: radial bounds, probe points,
rigidity scans, and the spike-band decomposition of the deep annulus.

Everything here is cheap arithmetic plus targeted calls into the decision
machinery; the heavy per-pixel work lives in render.
"""

from dataclasses import dataclass
import math

from .coeffset import TOL_SET, is_symmetric, total_gap
from .decide import (Decision, FIRST_ANY, IN, OUT, PRESUMED_IN, SearchConfig,
                     decide_point, decide_exact_quadratic)
from .errors import PreconditionViolated
from .recursion import Candidate, polynomial_root_check


def outer_annulus_bound(s):
    """No disc root has modulus below 1/(ratio+1); antenna endpoint bound."""
    return 1.0 / (s.max_ratio + 1.0)


def _max_small_element(s):
    """Largest element s0 with 1 <= s0 < 2 sqrt(max_abs) + 1."""
    m_abs = s.max_abs
    best = None
    for e in s.elements:
        if e < 1 - TOL_SET:
            continue
        if s.exact_integer:
            inside = e <= 1 or (e - 1) ** 2 < 4 * m_abs
        else:
            inside = e < 2.0 * math.sqrt(m_abs) + 1.0 - 1e-12
        if inside and (best is None or e > best):
            best = e
    return best


def rho_out_bounds(s):
    """Bracket for the deepest non-real root modulus: (low, high, k).

    low = 1/(sqrt(M)+1) is strict; high = 1/sqrt(M+k) is attained by the
    quadratic with the largest admissible small element k.
    """
    if not s.is_normalized or not is_symmetric(s):
        raise PreconditionViolated("bounds need a normalized symmetric set")
    m_abs = s.max_abs
    k = _max_small_element(s)
    if k is None:
        raise PreconditionViolated("no element in [1, 2 sqrt(max_abs) + 1)")
    low = 1.0 / (math.sqrt(m_abs) + 1.0)
    high = 1.0 / math.sqrt(m_abs + k)
    return low, high, k


def rho_theta_lower(s, theta):
    """Direction-dependent depth limit 1/(cos t + sqrt(cos t + M + 1))."""
    if not (0.0 < theta <= math.pi / 2.0 + 1e-12):
        raise PreconditionViolated("theta must lie in (0, pi/2]")
    ct = math.cos(theta)
    return 1.0 / (ct + math.sqrt(ct + s.max_abs + 1.0))


@dataclass(frozen=True)
class DepthReport:
    max_abs: float
    max_ratio: float
    outer_bound: float
    rho_out_low: float
    rho_out_high: float
    k_witness: float
    rho_inn_upper: float | None
    rho_theta: tuple
    spike_band_count: int

    def to_json_dict(self):
        return {"max_abs": self.max_abs, "max_ratio": self.max_ratio,
                "outer_bound": self.outer_bound,
                "rho_out_low": self.rho_out_low,
                "rho_out_high": self.rho_out_high,
                "k_witness": self.k_witness,
                "rho_inn_upper": self.rho_inn_upper,
                "rho_theta": [[t, v] for t, v in self.rho_theta],
                "spike_band_count": self.spike_band_count}


def depth_report(s, thetas=None):
    """Collect the radial-depth facts that hold for a normalized symmetric
    set: outer cutoff, deepest non-real root bracket, certified-annulus
    upper bound (gap 1 only), and per-direction limits."""
    low, high, k = rho_out_bounds(s)
    if thetas is None:
        thetas = [j * math.pi / 16.0 for j in range(1, 9)]
    pairs = []
    for t in thetas:
        ct = math.cos(t)
        # the bound is meaningful only when r^2 - 2 r cos t > 1 at its value
        if s.max_abs + ct - ct * ct > 0:
            pairs.append((t, rho_theta_lower(s, t)))
    gap = total_gap(s) if len(s) > 1 else None
    rho_inn = None
    if gap is not None and gap <= 1 + TOL_SET:
        rho_inn = 1.0 / math.sqrt(s.max_abs)
    return DepthReport(max_abs=s.max_abs, max_ratio=s.max_ratio,
                       outer_bound=outer_annulus_bound(s),
                       rho_out_low=low, rho_out_high=high, k_witness=k,
                       rho_inn_upper=rho_inn, rho_theta=tuple(pairs),
                       spike_band_count=len(spike_bands(s.max_abs)))


# ---------------------------------------------------------------------------
# rigidity probes

def rigidity_probe_root(max_coeff, k):
    """Upper root of (max_coeff + k) z^2 - (k+1) z + 1; modulus
    1/sqrt(max_coeff+k).  Admissible for integer 1 < k < 2 sqrt(M) + 1."""
    m_abs = int(max_coeff)
    k = int(k)
    if m_abs < 1:
        raise PreconditionViolated("max_coeff must be >= 1")
    if k < 2 or (k - 1) ** 2 >= 4 * m_abs:
        raise PreconditionViolated("k must satisfy 1 < k < 2 sqrt(M) + 1")
    return Candidate.from_quad(-(k + 1), m_abs + k)


@dataclass(frozen=True)
class RigidityRow:
    k: int
    expected_in: bool
    decision: Decision

    @property
    def agrees(self):
        return self.decision.in_like == self.expected_in


@dataclass(frozen=True)
class RigidityReport:
    rows: tuple

    @property
    def ok(self):
        return all(r.agrees for r in self.rows)

    def to_json_dict(self):
        return {"ok": self.ok,
                "rows": [{"k": r.k, "expected_in": r.expected_in,
                          "verdict": r.decision.verdict,
                          "agrees": r.agrees} for r in self.rows]}


def rigidity_scan(s, first_coeff=FIRST_ANY):
    """Exact membership of each probe root must match k in S exactly."""
    if not s.exact_integer or not s.is_normalized or not is_symmetric(s):
        raise PreconditionViolated(
            "rigidity scan needs a normalized symmetric integer set")
    m_abs = int(s.max_abs)
    rows = []
    k = 2
    while (k - 1) ** 2 < 4 * m_abs:
        dec = decide_exact_quadratic(s, -(k + 1), m_abs + k,
                                     first_coeff=first_coeff)
        rows.append(RigidityRow(k=k, expected_in=(k in s.elements),
                                decision=dec))
        k += 1
    return RigidityReport(rows=tuple(rows))


def quasi_probe_shift(max_coeff, k):
    """The positive real sigma with (max_coeff + sigma) sigma = k."""
    m_abs = float(max_coeff)
    k = float(k)
    sig = (math.sqrt(m_abs * m_abs + 4.0 * k) - m_abs) / 2.0
    if abs((m_abs + sig) * sig - k) > 1e-12 * max(1.0, k):
        raise PreconditionViolated("shift residual too large")
    return sig


@dataclass(frozen=True)
class QuasiRigidityReport:
    k: int
    sigma: float
    probe_x: float
    expected_in: bool
    search: Decision
    verdict: str
    witness: dict | None

    @property
    def agrees(self):
        return (self.verdict in (IN, PRESUMED_IN)) == self.expected_in

    def to_json_dict(self):
        return {"k": self.k, "sigma": self.sigma, "probe_x": self.probe_x,
                "expected_in": self.expected_in,
                "search_verdict": self.search.verdict,
                "search_depth": self.search.depth,
                "verdict": self.verdict, "witness": self.witness,
                "agrees": self.agrees}


def quasirigidity_probe(s, k, max_depth=8, slack=1e-6):
    """Probe x = 1/(M + sigma_k): in the root set iff S meets {k-1, k, k+1}.

    When k itself is in S the probe is certified In: x is a root of
    1 - M z - k z^2 by construction (the remainder after two steps is
    exactly zero), verified by the polynomial residual check.
    """
    if not s.exact_integer or not s.is_normalized or not is_symmetric(s):
        raise PreconditionViolated(
            "quasi-rigidity probe needs a normalized symmetric integer set")
    m_abs = int(s.max_abs)
    k = int(k)
    if not (1 < k < m_abs + 1):
        raise PreconditionViolated("k must satisfy 1 < k < max_abs + 1")
    sig = quasi_probe_shift(m_abs, k)
    x = 1.0 / (m_abs + sig)
    cand = Candidate.from_point(x, 0.0)
    expected = any(v in s.elements for v in (k - 1, k, k + 1))
    cfg = SearchConfig(max_depth=max_depth, slack=slack,
                       variant="one_step", first_coeff=FIRST_ANY)
    search = decide_point(s, cand, cfg)
    witness = None
    verdict = search.verdict
    if k in s.elements:
        coeffs = [1.0, -float(m_abs), -float(k)]
        if not polynomial_root_check(coeffs, cand, tol=1e-9):
            raise PreconditionViolated("probe polynomial residual too large")
        witness = {"polynomial": [1, -m_abs, -k], "remainder_after": 2}
        verdict = IN
    return QuasiRigidityReport(k=k, sigma=sig, probe_x=x,
                               expected_in=expected, search=search,
                               verdict=verdict, witness=witness)


# ---------------------------------------------------------------------------
# gap-3 disconnection

@dataclass(frozen=True)
class Gap3Report:
    gap_low: float
    r: float
    x: float
    probe: Decision
    bracket_low_x: float
    bracket_low: Decision
    bracket_high_x: float
    bracket_high: Decision

    @property
    def ok(self):
        return (self.probe.verdict == OUT and self.bracket_low.in_like
                and self.bracket_high.in_like)

    def to_json_dict(self):
        return {"gap_low": self.gap_low, "r": self.r, "x": self.x,
                "probe_verdict": self.probe.verdict,
                "probe_depth": self.probe.depth,
                "bracket_low_x": self.bracket_low_x,
                "bracket_low_verdict": self.bracket_low.verdict,
                "bracket_high_x": self.bracket_high_x,
                "bracket_high_verdict": self.bracket_high.verdict,
                "ok": self.ok}


def gap3_disconnection_candidate(s, max_depth=8, slack=1e-6):
    """Excluded real point inside the first gap of width >= 3.

    Solves (M + r) r = s0 + 3/2 for the gap's lower element s0 and probes
    x = 1/(M + r), expected Out at small depth; the bracketing points
    1/(M+1) and 1/M are certified In by exact cycle search.
    """
    if not s.is_normalized or not is_symmetric(s):
        raise PreconditionViolated("gap-3 probe needs normalized symmetric S")
    if s.max_abs < 4:
        raise PreconditionViolated("gap-3 probe needs max_abs >= 4")
    elems = s.elements
    gap_low = None
    for a, b in zip(elems, elems[1:]):
        if a >= 1 - TOL_SET and b - a >= 3 - TOL_SET:
            gap_low = a
            break
    if gap_low is None:
        raise PreconditionViolated("no positive gap of width >= 3")
    m_abs = float(s.max_abs)
    target = float(gap_low) + 1.5
    r = (-m_abs + math.sqrt(m_abs * m_abs + 4.0 * target)) / 2.0
    if abs((m_abs + r) * r - target) > 1e-10:
        raise PreconditionViolated("gap radius residual too large")
    x = 1.0 / (m_abs + r)
    cfg = SearchConfig(max_depth=max_depth, slack=slack, variant="one_step")
    probe = decide_point(s, Candidate.from_point(x, 0.0), cfg)

    exact_ok = s.exact_integer
    lo_x = 1.0 / (m_abs + 1.0)
    hi_x = 1.0 / m_abs
    exact_cfg = SearchConfig(exact=True)
    float_cfg = SearchConfig(max_depth=14, slack=slack, variant="one_step")
    if exact_ok:
        lo_dec = decide_point(s, Candidate.from_point(lo_x, 0.0), exact_cfg)
        hi_dec = decide_point(s, Candidate.from_point(hi_x, 0.0), exact_cfg)
    else:
        lo_dec = decide_point(s, Candidate.from_point(lo_x, 0.0), float_cfg)
        hi_dec = decide_point(s, Candidate.from_point(hi_x, 0.0), float_cfg)
    return Gap3Report(gap_low=float(gap_low), r=r, x=x, probe=probe,
                      bracket_low_x=lo_x, bracket_low=lo_dec,
                      bracket_high_x=hi_x, bracket_high=hi_dec)


# ---------------------------------------------------------------------------
# spike bands

@dataclass(frozen=True)
class SpikeBand:
    """Angular band of the k-th spike over r in [sqrt(M), sqrt(M)+1]:
    2 r cos(theta) within k +- M/(r-1)^2."""

    k: int
    r_lo: float
    r_hi: float
    max_coeff: int

    def cos_range(self, r):
        e2 = self.max_coeff / ((r - 1.0) ** 2)
        lo = (self.k - e2) / (2.0 * r)
        hi = (self.k + e2) / (2.0 * r)
        return max(lo, -1.0), min(hi, 1.0)

    def contains(self, r, cos_theta):
        if not (self.r_lo <= r <= self.r_hi):
            return False
        lo, hi = self.cos_range(r)
        return lo <= cos_theta <= hi

    @property
    def tip_modulus(self):
        """Modulus of the anchor root 1/sqrt(M+k) (k >= 2), or the inner
        annulus edge for the two shallow bands."""
        return 1.0 / math.sqrt(self.max_coeff + max(self.k, 1))


def spike_bands(max_coeff):
    """Bands k = 0, 1, then k >= 2 while (k-1)^2 < 4M; the count always
    equals ceil(2 sqrt(M) + 1)."""
    m_abs = int(max_coeff)
    if m_abs < 1:
        raise PreconditionViolated("max_coeff must be a positive integer")
    r_lo = math.sqrt(m_abs)
    r_hi = r_lo + 1.0
    bands = [SpikeBand(k=0, r_lo=r_lo, r_hi=r_hi, max_coeff=m_abs),
             SpikeBand(k=1, r_lo=r_lo, r_hi=r_hi, max_coeff=m_abs)]
    k = 2
    while (k - 1) ** 2 < 4 * m_abs:
        bands.append(SpikeBand(k=k, r_lo=r_lo, r_hi=r_hi, max_coeff=m_abs))
        k += 1
    expect = 2 + math.isqrt(4 * m_abs - 1)
    assert len(bands) == expect == math.ceil(2.0 * math.sqrt(m_abs) + 1.0 - 1e-12)
    return bands
