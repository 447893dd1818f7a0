"""Finite real coefficient sets and their combinatorics.

A CoefficientSet is the alphabet the power-series searches draw from.  Most
downstream theory assumes the set is normalized (smallest nonzero magnitude
equal to 1); `normalize` rescales and reports the scale factor, which is all
that is needed because root sets only depend on the set up to scaling.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import NoNormalization, SingletonSet, PreconditionViolated

# float-mode membership / dedup tolerance
TOL_SET = 1e-9

DISCONNECTED = "Disconnected"
CONNECTED_LC = "ConnectedLC"
UNKNOWN_CONN = "Unknown"


def _is_integral(x):
    if isinstance(x, (int, np.integer)):
        return True
    return float(x).is_integer()


@dataclass(frozen=True)
class CoefficientSet:
    """Immutable finite set of real coefficients, sorted ascending.

    elements are stored as python ints when every value is integral
    (exact_integer is then True and integer-only fast paths apply),
    otherwise as floats.
    """

    elements: tuple
    exact_integer: bool

    @classmethod
    def from_values(cls, values):
        vals = [float(v) for v in values]
        if not vals:
            raise NoNormalization("coefficient set is empty")
        exact = all(_is_integral(v) for v in vals)
        if exact:
            elems = tuple(sorted({int(v) for v in vals}))
        else:
            vals.sort()
            merged = [vals[0]]
            for v in vals[1:]:
                if v - merged[-1] > TOL_SET:
                    merged.append(v)
            elems = tuple(merged)
        if all(v == 0 for v in elems):
            raise NoNormalization("coefficient set has no nonzero element")
        return cls(elements=elems, exact_integer=exact)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __str__(self):
        return "{" + ", ".join(str(e) for e in self.elements) + "}"

    @property
    def min_nonzero_abs(self):
        return min(abs(e) for e in self.elements if e != 0)

    @property
    def max_abs(self):
        return max(abs(e) for e in self.elements)

    @property
    def max_ratio(self):
        return self.max_abs / self.min_nonzero_abs

    @property
    def has_zero(self):
        return self.contains(0.0)

    @property
    def is_normalized(self):
        if self.exact_integer:
            return self.min_nonzero_abs == 1
        return abs(self.min_nonzero_abs - 1.0) <= TOL_SET

    def contains(self, x, tol=TOL_SET):
        if self.exact_integer and _is_integral(x):
            return int(x) in self.elements
        return any(abs(x - e) <= tol for e in self.elements)

    def as_float_array(self):
        return np.asarray(self.elements, dtype=np.float64)

    def symmetrized(self):
        return CoefficientSet.from_values(
            list(self.elements) + [-e for e in self.elements])

    def without(self, values):
        drop = [float(v) for v in values]
        kept = [e for e in self.elements
                if not any(abs(e - d) <= TOL_SET for d in drop)]
        return CoefficientSet.from_values(kept)


def make_set(values):
    return CoefficientSet.from_values(values)


def span_set(max_coeff):
    """All integers from -max_coeff to max_coeff inclusive."""
    n = int(max_coeff)
    if n < 1:
        raise PreconditionViolated("span bound must be a positive integer")
    return CoefficientSet.from_values(range(-n, n + 1))


def normalize(s):
    """Rescale so the smallest nonzero magnitude is 1; returns (set, scale)."""
    scale = s.min_nonzero_abs
    if s.is_normalized:
        return s, 1.0
    return CoefficientSet.from_values([e / scale for e in s.elements]), scale


def total_gap(s):
    """Largest spacing of consecutive sorted elements, in units of the
    smallest nonzero magnitude (so the value is scale invariant)."""
    if len(s) < 2:
        raise SingletonSet("gap needs at least two elements")
    e = s.elements
    raw = max(e[i + 1] - e[i] for i in range(len(e) - 1))
    return raw / s.min_nonzero_abs


def is_symmetric(s, tol=TOL_SET):
    """True when the set equals its negation."""
    return all(s.contains(-e, tol) for e in s.elements)


def difference_set(s):
    """All pairwise differences a - b of elements."""
    if s.exact_integer:
        vals = {a - b for a in s.elements for b in s.elements}
    else:
        vals = []
        for a in s.elements:
            for b in s.elements:
                vals.append(a - b)
    out = sorted(set(vals)) if s.exact_integer else sorted(vals)
    if not s.exact_integer:
        merged = [out[0]]
        for v in out[1:]:
            if v - merged[-1] > TOL_SET:
                merged.append(v)
        out = merged
    return tuple(out)


@dataclass(frozen=True)
class ConnGraph:
    """Vertices are the coefficients; an edge (a, b) certifies that every
    difference multiple (a - b) * s lands back in the difference set."""

    vertices: tuple
    edges: tuple
    connected: bool


def _subset_of_differences(candidates, diffs, exact):
    if exact:
        table = set(diffs)
        return all(c in table for c in candidates)
    return all(any(abs(c - d) <= TOL_SET for d in diffs) for c in candidates)


def connectivity_graph(s):
    """Graph whose connectivity feeds the connectedness classification."""
    verts = s.elements
    diffs = difference_set(s)
    edges = []
    for i, a in enumerate(verts):
        for b in verts[i + 1:]:
            scaled = [(a - b) * e for e in s.elements]
            if _subset_of_differences(scaled, diffs, s.exact_integer):
                edges.append((a, b))
    parent = {v: v for v in verts}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in edges:
        parent[find(a)] = find(b)
    connected = len({find(v) for v in verts}) == 1
    return ConnGraph(vertices=verts, edges=tuple(edges), connected=connected)


@dataclass(frozen=True)
class ConnectednessReport:
    """Classification of the root sets attached to a coefficient set.

    general: verdict for series with any nonzero leading coefficient.
    first_coeff_one: verdict for series with leading coefficient 1.
    Verdicts are Disconnected, ConnectedLC (connected and locally connected),
    or Unknown.
    """

    general: str
    first_coeff_one: str
    total_gap: float
    max_abs: float


def classify_connectedness(s):
    if not s.exact_integer:
        raise PreconditionViolated("classification expects an integer set")
    if not s.is_normalized:
        raise PreconditionViolated("classification expects a normalized set")
    if not is_symmetric(s):
        raise PreconditionViolated("classification expects a symmetric set")
    if not s.has_zero:
        raise PreconditionViolated("classification expects 0 in the set")
    gap = total_gap(s)
    m_abs = s.max_abs
    if gap >= 3 - TOL_SET and m_abs >= 4:
        general = first_one = DISCONNECTED
    elif gap <= 2 + TOL_SET:
        first_one = CONNECTED_LC
        general = CONNECTED_LC if m_abs >= 40 else UNKNOWN_CONN
    else:
        general = first_one = UNKNOWN_CONN
    return ConnectednessReport(general=general, first_coeff_one=first_one,
                               total_gap=gap, max_abs=m_abs)
