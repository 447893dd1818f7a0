"""Membership decisions for disc points against a coefficient set.

Float mode runs a pruned depth-first search over coefficient choices and can
answer PresumedIn (a branch survived to full depth), Out (every branch
escaped; sound modulo rounding), or Unknown (node budget hit).  It never
answers In.

Exact mode applies when the data is integral: every admissible remainder
sequence is then integer-valued, the admissible states form a finite set,
and cycle reachability decides membership outright (In with a replayable
cycle witness, or Out with an exhaustion certificate).
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .coeffset import TOL_SET, is_symmetric, total_gap
from .errors import GreedyFailed, PreconditionViolated
from .recursion import (Candidate, escape_threshold_angled,
                        escape_threshold_one_step, escape_threshold_two_step)

IN = "In"
PRESUMED_IN = "PresumedIn"
OUT = "Out"
UNKNOWN = "Unknown"

_CODE_TO_VERDICT = {
    kernels.CODE_IN: IN,
    kernels.CODE_PRESUMED_IN: PRESUMED_IN,
    kernels.CODE_UNKNOWN: UNKNOWN,
    kernels.CODE_OUT: OUT,
}

VARIANT_AUTO = "auto"
VARIANT_ONE_STEP = "one_step"
VARIANT_TWO_STEP = "two_step"

FIRST_ANY = "any_nonzero"
FIRST_ONE = "one"

DEFAULT_DEPTH = 14
DEFAULT_SLACK = 1e-6
DEFAULT_NODE_BUDGET = 200_000_000


@dataclass(frozen=True)
class SearchConfig:
    max_depth: int = DEFAULT_DEPTH
    slack: float = DEFAULT_SLACK
    variant: str = VARIANT_AUTO
    first_coeff: str = FIRST_ANY
    exact: bool = False
    node_budget: int = DEFAULT_NODE_BUDGET

    def to_json_dict(self):
        return {"max_depth": self.max_depth, "slack": self.slack,
                "variant": self.variant, "first_coeff": self.first_coeff,
                "exact": self.exact, "node_budget": self.node_budget}


@dataclass(frozen=True)
class Decision:
    verdict: str
    depth: int
    witness: dict | None = None
    certificate: dict | None = None
    note: str | None = None

    @property
    def in_like(self):
        return self.verdict in (IN, PRESUMED_IN)

    def to_json_dict(self):
        d = {"verdict": self.verdict, "depth": self.depth}
        if self.witness is not None:
            d["witness"] = self.witness
        if self.certificate is not None:
            d["certificate"] = self.certificate
        if self.note is not None:
            d["note"] = self.note
        return d


def start_indices(s, first_coeff):
    """Indices into the element array admissible as leading coefficient."""
    elems = s.elements
    if first_coeff == FIRST_ONE:
        idx = [i for i, e in enumerate(elems) if abs(e - 1.0) <= TOL_SET]
    elif first_coeff == FIRST_ANY:
        idx = [i for i, e in enumerate(elems) if abs(e) > TOL_SET]
    else:
        raise PreconditionViolated(f"unknown first_coeff mode {first_coeff!r}")
    return np.asarray(idx, dtype=np.int64)


def _float_threshold(s, cand, variant):
    if variant == VARIANT_ONE_STEP:
        return escape_threshold_one_step(s, cand)
    thr = escape_threshold_two_step(s, cand)
    if 0.0 < cand.theta <= math.pi / 2.0:
        den = cand.r * cand.r - 2.0 * cand.r * math.cos(cand.theta) - 1.0
        if den > 1e-9:
            alt = s.max_abs / den
            if alt < thr:
                thr = alt
    return thr


def _ordered_starts(s, first_coeff):
    """Exact-mode start coefficients: by magnitude, positive before negative."""
    if first_coeff == FIRST_ONE:
        return [e for e in s.elements if e == 1]
    return sorted((e for e in s.elements if e != 0),
                  key=lambda p: (abs(p), p < 0))


def decide_point(s, cand, cfg=None):
    """Decide whether the candidate is a root of some admissible series."""
    cfg = cfg or SearchConfig()
    if cfg.exact:
        return _decide_exact(s, cand, cfg)

    variant = cfg.variant
    if variant == VARIANT_AUTO:
        variant = VARIANT_ONE_STEP if cand.is_real else VARIANT_TWO_STEP
    if variant == VARIANT_TWO_STEP and cand.is_real:
        raise PreconditionViolated("two-step machine needs a non-real point")

    starts = start_indices(s, cfg.first_coeff)
    elems = s.as_float_array()
    thr = _float_threshold(s, cand, variant)
    limit = thr + cfg.slack
    path = np.empty(cfg.max_depth + 2, dtype=np.int64)

    if variant == VARIANT_ONE_STEP and cand.is_real:
        code, depth, pruned, nodes = kernels.search_one_step_real(
            elems, starts, cand.signed_r, limit, cfg.max_depth,
            cfg.node_budget, path)
    elif variant == VARIANT_ONE_STEP:
        rate = cand.r * complex(math.cos(cand.theta), -math.sin(cand.theta))
        code, depth, pruned, nodes = kernels.search_one_step_complex(
            elems, starts, rate.real, rate.imag, limit, cfg.max_depth,
            cfg.node_budget, path)
    else:
        two_r_cos = 2.0 * cand.r * math.cos(cand.theta)
        r_sq = cand.r * cand.r
        code, depth, pruned, nodes = kernels.search_two_step(
            elems, starts, two_r_cos, r_sq, limit, cfg.max_depth,
            cfg.node_budget, path)

    verdict = _CODE_TO_VERDICT[code]
    cert = {"variant": variant, "threshold": thr, "slack": cfg.slack,
            "max_depth": cfg.max_depth, "branches_pruned": int(pruned),
            "nodes": int(nodes)}
    witness = None
    note = None
    if verdict == PRESUMED_IN:
        prefix = [s.elements[int(i)] for i in path[:cfg.max_depth + 1]]
        witness = {"preperiod": prefix, "period": []}
    elif verdict == OUT:
        note = "modulo rounding"
    elif verdict == UNKNOWN:
        note = "node budget exhausted"
    return Decision(verdict=verdict, depth=int(depth), witness=witness,
                    certificate=cert, note=note)


# ---------------------------------------------------------------------------
# exact integer machines

def _decide_exact(s, cand, cfg):
    if not s.exact_integer:
        raise PreconditionViolated("exact mode needs an integer set")
    if cand.quad is not None:
        b, c = cand.quad
        return decide_exact_quadratic(s, b, c, first_coeff=cfg.first_coeff)
    if cand.is_real:
        rs = cand.signed_r
        r_int = round(rs)
        if abs(rs - r_int) > 1e-9:
            raise PreconditionViolated(
                "exact one-step mode needs an integer rate 1/x")
        return _exact_one_step(s, int(r_int), cfg.first_coeff)
    raise PreconditionViolated(
        "exact mode needs a real point with integer rate or a quad point")


def _exact_one_step(s, r_int, first_coeff):
    """Cycle reachability for integer rate; decides membership exactly."""
    elems = [int(e) for e in s.elements]
    m_abs = int(s.max_abs)
    ra = abs(r_int)
    if ra < 2:
        raise PreconditionViolated("exact one-step mode needs |r| >= 2")

    def exceeds(q):
        return abs(q) * (ra - 1) > m_abs

    black = set()
    max_len = 0

    for p0 in _ordered_starts(s, first_coeff):
        q0 = p0
        if exceeds(q0) or q0 in black:
            continue
        # iterative DFS; on_path maps state -> index in path
        on_path = {q0: 0}
        path = [(q0, p0)]
        iters = [iter(sorted(elems, key=lambda p, q=q0: (abs(p + r_int * q),
                                                         p)))]
        while iters:
            max_len = max(max_len, len(path))
            advanced = False
            for p in iters[-1]:
                qn = p + r_int * path[-1][0]
                if exceeds(qn) or qn in black:
                    continue
                if qn in on_path:
                    i = on_path[qn]
                    pre = [pc for _, pc in path[:i + 1]]
                    per = [pc for _, pc in path[i + 1:]] + [p]
                    return Decision(
                        verdict=IN, depth=len(path),
                        witness={"preperiod": pre, "period": per},
                        certificate={"variant": "one_step_exact",
                                     "rate": r_int})
                on_path[qn] = len(path)
                path.append((qn, p))
                iters.append(iter(sorted(
                    elems, key=lambda pp, q=qn: (abs(pp + r_int * q), pp))))
                advanced = True
                break
            if not advanced:
                q, _ = path.pop()
                del on_path[q]
                black.add(q)
                iters.pop()
    return Decision(verdict=OUT, depth=max_len,
                    certificate={"variant": "one_step_exact", "rate": r_int,
                                 "states_explored": len(black)})


def _quad_state_bound(m_abs, b, c):
    """Largest integer a with a <= M/(sqrt(c)-1)^2, decided in integers."""
    def exceeds(a):
        lhs = a * (c + 1) - m_abs
        return lhs > 0 and lhs * lhs > 4 * a * a * c
    a = 0
    while not exceeds(a + 1):
        a += 1
        if a > 8 * m_abs + 16:
            break
    return a


def decide_exact_quadratic(s, b, c, first_coeff=FIRST_ANY):
    """Exact membership for the upper root of c z^2 + b z + 1 = 0.

    Requires an integer set and b^2 < 4c.  The admissible remainder pairs
    form a finite integer grid; In iff a cycle is reachable from a start
    state, with the cycle returned as a replayable witness.
    """
    if not s.exact_integer:
        raise PreconditionViolated("exact quadratic mode needs an integer set")
    b = int(b)
    c = int(c)
    if c < 2 or b * b >= 4 * c:
        raise PreconditionViolated("need c >= 2 and b^2 < 4c")
    elems = [int(e) for e in s.elements]
    m_abs = int(s.max_abs)
    max_q = _quad_state_bound(m_abs, b, c)

    black = set()
    max_len = 0
    n_starts = 0

    for p0 in _ordered_starts(s, first_coeff):
        if abs(p0) > max_q:
            continue
        for p1 in elems:
            q1 = p1 - b * p0
            if abs(q1) > max_q:
                continue
            state0 = (p0, q1)
            if state0 in black:
                continue
            n_starts += 1
            on_path = {state0: 0}
            path = [(state0, (p0, p1))]
            iters = [iter(elems)]
            while iters:
                max_len = max(max_len, len(path) + 1)
                advanced = False
                u, v = path[-1][0]
                base = -b * v - c * u
                for p in iters[-1]:
                    qn = p + base
                    if abs(qn) > max_q:
                        continue
                    nxt = (v, qn)
                    if nxt in black:
                        continue
                    if nxt in on_path:
                        i = on_path[nxt]
                        pre = list(path[0][1])
                        for _, pc in path[1:i + 1]:
                            pre.append(pc)
                        per = [pc for _, pc in path[i + 1:]] + [p]
                        return Decision(
                            verdict=IN, depth=len(path) + 1,
                            witness={"preperiod": pre, "period": per},
                            certificate={"variant": "two_step_exact",
                                         "quad": [b, c],
                                         "state_bound": max_q})
                    on_path[nxt] = len(path)
                    path.append((nxt, p))
                    iters.append(iter(elems))
                    advanced = True
                    break
                if not advanced:
                    st, _ = path.pop()
                    del on_path[st]
                    black.add(st)
                    iters.pop()
    return Decision(verdict=OUT, depth=max_len,
                    certificate={"variant": "two_step_exact", "quad": [b, c],
                                 "state_bound": max_q,
                                 "states_explored": len(black),
                                 "start_states": n_starts})


def replay_exact_witness(witness, s, rate=None, quad=None, cycles=3):
    """Replay a cycle witness in exact arithmetic; True iff it closes.

    For a one-step witness pass rate (signed integer); for a two-step
    witness pass quad=(b, c).  The remainder state after the preperiod must
    recur after each run of the period.
    """
    pre = [int(p) for p in witness["preperiod"]]
    per = [int(p) for p in witness["period"]]
    if not per:
        return False
    for p in pre + per:
        if not s.contains(p):
            return False
    if rate is not None:
        q = 0
        for p in pre:
            q = p + rate * q
        anchor = q
        for _ in range(cycles):
            for p in per:
                q = p + rate * q
            if q != anchor:
                return False
        return True
    b, c = quad
    u, v = 0, 0
    first = True
    for p in pre:
        if first:
            u, v = 0, p
            first = False
        else:
            u, v = v, p - b * v - c * u
    anchor = (u, v)
    for _ in range(cycles):
        for p in per:
            u, v = v, p - b * v - c * u
        if (u, v) != anchor:
            return False
    return True


# ---------------------------------------------------------------------------
# greedy witnesses

GREEDY_BOUND_TOL = 1e-12


def witness_real_interval(s, x, steps=10_000):
    """Greedy surviving series for real x in [1/(max_abs+1), 1).

    Valid for normalized symmetric sets with total gap <= 2; the chosen
    remainders provably stay in [-1, 1], so failure raises GreedyFailed.
    """
    if not s.is_normalized or not is_symmetric(s):
        raise PreconditionViolated("greedy needs a normalized symmetric set")
    if total_gap(s) > 2 + TOL_SET:
        raise PreconditionViolated("greedy needs total gap <= 2")
    lo = 1.0 / (s.max_abs + 1.0)
    if not (lo - 1e-12 <= x < 1.0):
        raise PreconditionViolated("x outside [1/(max_abs+1), 1)")
    max_q, fail = kernels.greedy_real(
        s.as_float_array(), 1.0 / x, steps, 1.0 + GREEDY_BOUND_TOL)
    if fail >= 0:
        raise GreedyFailed(
            f"remainder left [-1, 1] at step {fail} (max {max_q})")
    return Decision(verdict=IN, depth=steps,
                    witness={"rule": "greedy_min_abs", "steps": steps,
                             "max_abs_q": float(max_q)},
                    certificate={"x": x, "bound": 1.0})


def witness_bounded_greedy(s, cand, steps=10_000):
    """Two-step greedy witness with unit leading coefficient.

    Targets [0, 1] in the dense-annulus regime (gap <= 1, r <= sqrt(max_abs)),
    else [-1, 1].  In when the remainders stay inside for all steps; a
    violation reports Unknown, never Out.
    """
    if not s.is_normalized or not is_symmetric(s):
        raise PreconditionViolated("greedy needs a normalized symmetric set")
    if cand.is_real:
        raise PreconditionViolated("bounded greedy needs a non-real point")
    if cand.theta > math.pi / 2.0 + 1e-12:
        raise PreconditionViolated("bounded greedy needs cos(theta) >= 0")
    m_abs = s.max_abs
    if total_gap(s) <= 1 + TOL_SET and cand.r <= math.sqrt(m_abs) + 1e-9:
        lo, hi = 0.0, 1.0
    else:
        lo, hi = -1.0, 1.0
    two_r_cos = 2.0 * cand.r * math.cos(cand.theta)
    r_sq = cand.r * cand.r
    max_dist, fail = kernels.greedy_two_step_interval(
        s.as_float_array(), two_r_cos, r_sq, lo, hi, steps, GREEDY_BOUND_TOL)
    if fail < 0:
        return Decision(verdict=IN, depth=steps,
                        witness={"rule": "greedy_2step_interval",
                                 "target": [lo, hi], "steps": steps},
                        certificate={"max_interval_dist": float(max_dist)})
    return Decision(verdict=UNKNOWN, depth=int(fail),
                    certificate={"target": [lo, hi], "fail_step": int(fail),
                                 "max_interval_dist": float(max_dist)},
                    note="greedy remainder left the target interval")
