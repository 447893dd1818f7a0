"""Candidate points and the escape recursions attached to them.

A candidate is a point of the open unit disc, stored in inverse-polar form
(r = 1/|z| > 1, theta = arg folded into [0, pi]).  Folding is harmless
because every coefficient set here is real, making root sets closed under
conjugation.  Candidates that arise as roots of an integer quadratic
c z^2 + b z + 1 carry (b, c) so exact integer arithmetic can be used.

The recursions: with remainders q_j of a power series sum p_j z^j at z,
    one step:  q_{j+1} = p_{j+1} + r q_j          (r = 1/z)
    two step:  q_{j+2} = p_{j+2} + 2 r cos(theta) q_{j+1} - r^2 q_j
and a series has z as a root with all remainders bounded iff the search in
`decide` keeps |q_j| under the matching escape threshold forever.
"""

from dataclasses import dataclass
import cmath
import math

from .errors import PreconditionViolated, DegenerateDenominator

# float comparison guards
TOL_INEQ = 1e-7
TOL_IM = 1e-8
TOL_ROOT = 1e-9

# State1 is a single remainder value; State2 is (previous, current).
State1 = float
State2 = tuple


@dataclass(frozen=True)
class Candidate:
    """A point 1/r * e^(i*theta) of the open unit disc, r > 1."""

    r: float
    theta: float
    quad: tuple | None = None

    def __post_init__(self):
        if not (self.r > 1.0):
            raise PreconditionViolated(
                "candidate must lie strictly inside the unit disc (r > 1)")
        if not (0.0 <= self.theta <= math.pi):
            raise PreconditionViolated("theta must lie in [0, pi]")

    @classmethod
    def from_point(cls, re, im):
        mod = math.hypot(re, im)
        if not (0.0 < mod < 1.0):
            raise PreconditionViolated(
                "point must be nonzero and strictly inside the unit disc")
        return cls(r=1.0 / mod, theta=math.atan2(abs(im), re))

    @classmethod
    def from_polar(cls, modulus, theta):
        if not (0.0 < modulus < 1.0):
            raise PreconditionViolated("modulus must lie in (0, 1)")
        t = math.fmod(theta, 2.0 * math.pi)
        if t < 0.0:
            t += 2.0 * math.pi
        if t > math.pi:
            t = 2.0 * math.pi - t
        return cls(r=1.0 / modulus, theta=t)

    @classmethod
    def from_quad(cls, b, c):
        b = int(b)
        c = int(c)
        if c < 2:
            raise PreconditionViolated("quadratic needs c >= 2 for a disc root")
        if b * b >= 4 * c:
            raise PreconditionViolated("quadratic must have non-real roots")
        r = math.sqrt(c)
        cos_t = -b / (2.0 * r)
        return cls(r=r, theta=math.acos(max(-1.0, min(1.0, cos_t))),
                   quad=(b, c))

    @property
    def modulus(self):
        return 1.0 / self.r

    @property
    def is_real(self):
        return self.theta == 0.0 or self.theta == math.pi

    @property
    def signed_r(self):
        """1/z as a signed real; only meaningful for real candidates."""
        if not self.is_real:
            raise PreconditionViolated("signed_r needs a real candidate")
        return self.r if self.theta == 0.0 else -self.r

    @property
    def complex_value(self):
        return self.modulus * complex(math.cos(self.theta),
                                      math.sin(self.theta))

    def to_json_dict(self):
        d = {"re": self.complex_value.real, "im": self.complex_value.imag,
             "modulus": self.modulus, "r": self.r, "theta": self.theta}
        if self.quad is not None:
            d["quad"] = list(self.quad)
        return d


def step_one(q, p, r):
    """Advance the one-step remainder recursion."""
    return p + r * q


def step_two(state, p, two_r_cos, r_sq):
    """Advance the two-step remainder recursion; state is (prev, curr)."""
    u, v = state
    return (v, p + two_r_cos * v - r_sq * u)


def escape_threshold_one_step(s, cand):
    """Remainders beyond this bound can never return under the one-step
    recursion: max|p| / (r - 1)."""
    denom = cand.r - 1.0
    if denom <= 0.0:
        raise DegenerateDenominator("one-step threshold needs r > 1")
    return s.max_abs / denom


def escape_threshold_two_step(s, cand):
    """Two-step analogue for non-real candidates: max|p| / (r - 1)^2."""
    if cand.is_real:
        raise PreconditionViolated("two-step threshold needs non-real theta")
    denom = (cand.r - 1.0) ** 2
    return s.max_abs / denom


def escape_threshold_angled(s, cand):
    """Sharper two-step bound max|p| / (r^2 - 2 r cos(theta) - 1).

    Only meaningful when the denominator is positive; callers gate on that.
    Requires theta in (0, pi/2].
    """
    if cand.is_real or cand.theta > math.pi / 2.0 + 1e-15:
        raise PreconditionViolated(
            "angled threshold needs theta in (0, pi/2]")
    denom = cand.r * cand.r - 2.0 * cand.r * math.cos(cand.theta) - 1.0
    if denom <= 1e-12:
        raise DegenerateDenominator(
            "angled threshold needs r^2 - 2 r cos(theta) > 1")
    return s.max_abs / denom


def polynomial_root_check(coeffs, cand, tol=TOL_ROOT):
    """True when the candidate is (numerically) a root of sum c_j z^j.

    Runs the one-step recursion with complex rate 1/z; the final remainder
    equals P(z) * r^n up to phase, so the residual is compared against the
    recursion's own magnitude scale sum |c_j| r^(n-j).
    """
    cs = [float(c) for c in coeffs]
    if not cs:
        raise PreconditionViolated("empty coefficient vector")
    rate = cand.r * cmath.exp(complex(0.0, -cand.theta))
    q = complex(cs[0], 0.0)
    scale = abs(cs[0])
    for c in cs[1:]:
        q = c + rate * q
        scale = abs(c) + cand.r * scale
    return abs(q) <= tol * max(1.0, scale)
