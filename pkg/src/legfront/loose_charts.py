"""Quantitative loose-chart calculus.

A chart is a cube C in R^3 times a (p, q)-ball B_rho, meeting the Legendrian
in a zig-zag of action a times the disk J_rho = {p = 0}.  The size parameter
rho^2 / a classifies charts: loose above 1/2, pseudo-loose below, critical at
exactly 1/2 (rejected by both the squeezing and non-squeezing
constructions).  Rational inputs are handled exactly with Fractions.

Squeezing normalizes the chart to action 2 by contact scaling, then squeezes
the product front in the middle with the profile m_delta(|q| + 1 - rho),
producing k disjoint sub-charts whose size parameter can be made arbitrarily
large; the non-squeezing front is the doubled link whose pushed-off
component leaves the chart because its q-slope a/(2 rho) exceeds rho.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Optional

import numpy as np

from . import zigzags
from .contact_core import (ContactError, R3_STD, SampledLegendrian,
                           contact_scale_point, contact_scale_points,
                           contact_scale_curve, reeb_chords)

__all__ = [
    "ChartError",
    "ChartClass",
    "LooseChart",
    "make_loose_chart",
    "classify_chart",
    "contact_scale",
    "m_delta",
    "m_delta_prime",
    "SqueezedFront",
    "SqueezeReport",
    "squeeze_chart",
    "NonSqueezingReport",
    "nonsqueezing_front",
]


class ChartError(ContactError):
    """Invalid chart data or chart operation."""


class ChartClass(Enum):
    LOOSE = "Loose"
    PSEUDO_LOOSE = "PseudoLoose"
    CRITICAL = "Critical"

    def __str__(self):
        return self.value


def _is_rational(v) -> bool:
    return isinstance(v, Rational)


@dataclass
class LooseChart:
    """Chart data (C x B_rho, Z_a x J_rho); rho and action may be Fractions."""

    cube: list                      # [[x0,x1],[y0,y1],[z0,z1]]
    rho: object
    action: object
    zigzag: Optional[SampledLegendrian] = None

    def __post_init__(self):
        if not (self.rho > 0 and self.action > 0):
            raise ChartError("rho and action must be positive")
        if len(self.cube) != 3 or any(len(side) != 2 for side in self.cube):
            raise ChartError("cube must list three coordinate intervals")

    def size_parameter(self):
        """rho^2 / a, exact when rho and action are rational."""
        if _is_rational(self.rho) and _is_rational(self.action):
            return Fraction(self.rho) ** 2 / Fraction(self.action)
        return float(self.rho) ** 2 / float(self.action)

    def contains_zigzag(self, tol: float = 1e-9) -> bool:
        if self.zigzag is None:
            return True
        pts = self.zigzag.points
        for axis in range(3):
            lo, hi = float(self.cube[axis][0]), float(self.cube[axis][1])
            if np.any(pts[:, axis] < lo - tol) or np.any(pts[:, axis] > hi + tol):
                return False
        return True


def make_loose_chart(rho, action, n_samples: int = 4001,
                     margin: float = 0.05) -> LooseChart:
    """Chart around the canonical zig-zag Z_a with a fitted cube."""
    zz = zigzags.canonical_zigzag_lift(float(action), n_samples)
    cube = []
    for axis in range(3):
        lo = float(zz.points[:, axis].min())
        hi = float(zz.points[:, axis].max())
        pad = margin * max(hi - lo, 1e-9)
        cube.append([lo - pad, hi + pad])
    return LooseChart(cube=cube, rho=rho, action=action, zigzag=zz)


def classify_chart(chart: LooseChart):
    """(size_parameter, ChartClass) with strict inequalities at 1/2."""
    size = chart.size_parameter()
    half = Fraction(1, 2) if isinstance(size, Fraction) else 0.5
    if size > half:
        cls = ChartClass.LOOSE
    elif size < half:
        cls = ChartClass.PSEUDO_LOOSE
    else:
        cls = ChartClass.CRITICAL
    return size, cls


def contact_scale(obj, c):
    """Contact scaling phi_c: points, curves, or charts.

    phi_c(x, y, z, p, q) = (cx, cy, c^2 z, cp, cq); charts map by
    (C, rho, a) -> (cC, c rho, c^2 a), keeping the size parameter exactly
    invariant (in rational arithmetic when inputs are rational).
    """
    if c <= 0:
        raise ChartError("contact scaling requires c > 0")
    if isinstance(obj, LooseChart):
        c2 = c * c
        cube = [[side[0] * c, side[1] * c] for side in obj.cube[:2]]
        cube.append([obj.cube[2][0] * c2, obj.cube[2][1] * c2])
        zz = None
        if obj.zigzag is not None:
            zz = contact_scale_curve(obj.zigzag, float(c))
        return LooseChart(cube=cube, rho=obj.rho * c, action=obj.action * c2,
                          zigzag=zz)
    if isinstance(obj, SampledLegendrian):
        return contact_scale_curve(obj, float(c))
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 1:
        return contact_scale_point(arr, float(c))
    return contact_scale_points(arr, float(c))


# --- the squeezing profile m_delta -------------------------------------------

_W_FRAC = 0.25     # smoothing window as a fraction of delta


def _m_params(delta: float):
    # total rise delta over [delta/2, 2 delta] with two smoothed corners of
    # width w: s_mid (1.5 delta - w) + w/2 = delta
    w = _W_FRAC * delta
    s_mid = (delta - w / 2.0) / (1.5 * delta - w)
    return w, s_mid


def m_delta(x, delta: float):
    """The squeezing profile: x for x >= 2 delta, delta for x <= delta/2,
    an interpolation with slope at most 1 in between (smoothed corners).

    The corner smoothings live inside [delta/2, 2 delta]; the plateau value
    delta and the identity branch are met exactly.
    """
    if not 0 < delta:
        raise ChartError("delta must be positive")
    x = np.asarray(x, dtype=float)
    w, s_mid = _m_params(delta)
    a = delta / 2.0
    b = 2.0 * delta
    u1 = np.clip((x - a) / w, 0.0, 1.0)
    seg1 = delta + s_mid * w * zigzags.smoothstep_integral(u1)
    v_a_w = delta + s_mid * w / 2.0
    v_lin = v_a_w + s_mid * (x - (a + w))
    v_b_w = v_a_w + s_mid * (b - w - a - w)
    u2 = np.clip((x - (b - w)) / w, 0.0, 1.0)
    seg2 = (v_b_w + s_mid * (x - (b - w))
            + (1.0 - s_mid) * w * zigzags.smoothstep_integral(u2))
    val = np.where(x <= a, delta,
                   np.where(x <= a + w, seg1,
                            np.where(x <= b - w, v_lin,
                                     np.where(x <= b, seg2, x))))
    return val if val.ndim else float(val)


def m_delta_prime(x, delta: float):
    """Exact derivative of m_delta (everywhere <= 1)."""
    x = np.asarray(x, dtype=float)
    w, s_mid = _m_params(delta)
    a = delta / 2.0
    b = 2.0 * delta
    u1 = np.clip((x - a) / w, 0.0, 1.0)
    u2 = np.clip((x - (b - w)) / w, 0.0, 1.0)
    val = np.where(x <= a, 0.0,
                   np.where(x <= a + w, s_mid * zigzags.smoothstep(u1),
                            np.where(x <= b - w, s_mid,
                                     np.where(x <= b,
                                              s_mid + (1.0 - s_mid)
                                              * zigzags.smoothstep(u2),
                                              1.0))))
    return val if val.ndim else float(val)


_CAP_W = 0.02      # half-width scale of the smooth cap at height 1


def _capped_profile(sarg, delta: float):
    """m_delta(s) capped smoothly at 1: equal to m_delta below the cap zone
    s in [1 - 2w, 1 + 2w], exactly 1 above it, slope at most 1 throughout."""
    s = np.asarray(sarg, dtype=float)
    m = m_delta(s, delta)
    lo = 1.0 - 2.0 * _CAP_W
    u = np.clip((s - lo) / (4.0 * _CAP_W), 0.0, 1.0)
    # slope eases 1 -> 0, integrating to the exact cap height 1
    blend = lo + 4.0 * _CAP_W * (u - zigzags.smoothstep_integral(u))
    val = np.where(s <= lo, m, np.where(s >= 1.0 + 2.0 * _CAP_W, 1.0, blend))
    return val if val.ndim else float(val)


# the squeeze profile agrees with the product (h = 1) beyond this s-argument
_CAP_END = 1.0 + 2.0 * _CAP_W


def _h_profile(q, rho: float, delta: float):
    """Radial squeezing profile h(q) = capped m_delta(|q| + 1 - rho)."""
    return _capped_profile(np.abs(np.asarray(q, dtype=float)) + 1.0 - rho,
                           delta)


def _h_prime(q, rho: float, delta: float, step: float = 1e-7):
    q = np.asarray(q, dtype=float)
    return (_h_profile(q + step, rho, delta)
            - _h_profile(q - step, rho, delta)) / (2.0 * step)


# --- squeezing ------------------------------------------------------------------

@dataclass
class SqueezedFront:
    """The squeezed product front as a sampled multigraph z(x, q).

    The slice over q is the action-rescaled canonical zig-zag h(q) * Z_2
    ((x, y, z) -> (x, h y, h z), which multiplies the action by h); ``p``
    holds the lift momentum dz/dq = h'(q) * z_2(s).
    """

    q: np.ndarray          # (nq,)
    s: np.ndarray          # (ns,) canonical zig-zag parameter
    x: np.ndarray          # (ns,)
    z: np.ndarray          # (nq, ns)
    y: np.ndarray          # (nq, ns)
    p: np.ndarray          # (nq, ns)
    h: np.ndarray          # (nq,)

    def max_dz_dq(self) -> float:
        return float(np.max(np.abs(self.p)))


@dataclass
class SqueezeReport:
    delta: float
    rho_normalized: float
    rho_prime: float
    chart_rho: float
    q_centers: list
    max_dz_dq: float
    slope_bound: float
    slope_bound_satisfied: bool
    p_max: float
    p_within_rho: bool
    modified_q_halfwidth: float
    scale_to_normal: float
    omega: SqueezedFront


def _squeezed_front(rho: float, delta: float, nq: int, ns: int) -> SqueezedFront:
    """Sample the squeezed front Omega for the normalized (a = 2) chart."""
    zz = zigzags.canonical_zigzag_lift(2.0, ns)
    s = zz.params
    x2 = zz.points[:, 0]
    y2 = zz.points[:, 1]
    z2 = zz.points[:, 2]
    q = np.linspace(-(rho + 3.0 * _CAP_W), rho + 3.0 * _CAP_W, nq)
    h = _h_profile(q, rho, delta)
    hp = _h_prime(q, rho, delta)
    return SqueezedFront(q=q, s=s, x=x2,
                         z=h[:, None] * z2[None, :],
                         y=h[:, None] * y2[None, :],
                         p=hp[:, None] * z2[None, :],
                         h=h)


def squeeze_chart(chart: LooseChart, sigma: float, k: int = 1,
                  nq: int = 200, ns: int = 200):
    """k disjoint loose sub-charts of size parameter >= sigma, plus the
    squeezed front Omega.

    The chart is normalized to action 2 by contact scaling (so rho > 1);
    delta is found by the geometric scan delta = (rho - 1)/2^j, j = 1, 2, ...
    stopping at the first value whose sub-charts reach size sigma.  Each
    sub-chart is (C_x x delta C_yz) x B_rho~ around its own q-center, meeting
    the squeezed Legendrian in the action-rescaled zig-zag of action
    2 delta.  Outputs are mapped back to the input chart's scale.
    """
    size, cls = classify_chart(chart)
    if cls is not ChartClass.LOOSE:
        raise ChartError(f"squeeze requires a loose chart (size {size} <= 1/2)")
    if not sigma > 0.5:
        raise ChartError("sigma must exceed 1/2")
    if k < 1:
        raise ChartError("k must be at least 1")

    c = float(np.sqrt(2.0 / float(chart.action)))   # normalization phi_c
    rho = float(chart.rho) * c
    delta = None
    rho_prime = chart_rho = None
    for j in range(1, 60):
        d = (rho - 1.0) / 2.0**j
        rp = rho - 1.0 + d / 2.0
        cr = 0.98 * rp / k
        if cr * cr / (2.0 * d) >= sigma and 2.0 * d < 0.5:
            delta, rho_prime, chart_rho = d, rp, cr
            break
    if delta is None:
        raise ChartError("no admissible delta found (cannot occur for a loose "
                         "chart with sigma within the scan range)")

    omega = _squeezed_front(rho, delta, nq, ns)
    max_p = omega.max_dz_dq()
    bound = (1.0 - delta) / rho

    # sub-charts, centered at disjoint q-stations inside the plateau
    centers = [(2.0 * i - k + 1.0) * rho_prime / k for i in range(k)]
    back = 1.0 / c
    charts = []
    for _ in centers:
        zz = zigzags.canonical_zigzag_lift(2.0, 4001, z_scale=delta)
        zz = contact_scale_curve(zz, back)
        cube = []
        for axis in range(3):
            lo = float(zz.points[:, axis].min())
            hi = float(zz.points[:, axis].max())
            pad = 0.02 * max(hi - lo, 1e-12)
            cube.append([lo - pad, hi + pad])
        charts.append(LooseChart(cube=cube,
                                 rho=chart_rho * back,
                                 action=2.0 * delta * back * back,
                                 zigzag=zz))

    report = SqueezeReport(
        delta=delta, rho_normalized=rho, rho_prime=rho_prime,
        chart_rho=chart_rho,
        q_centers=[ci * back for ci in centers],
        max_dz_dq=max_p, slope_bound=bound,
        slope_bound_satisfied=bool(max_p <= bound + 1e-6),
        p_max=max_p, p_within_rho=bool(max_p < rho),
        modified_q_halfwidth=rho + 2.0 * _CAP_W,
        scale_to_normal=c, omega=omega)
    return charts, report


# --- non-squeezing --------------------------------------------------------------

@dataclass
class NonSqueezingReport:
    size_parameter: object
    pushoff_slope: object          # a / (2 rho), exact when inputs rational
    slope_exceeds_rho: bool
    component1_action: float
    q: np.ndarray
    x: np.ndarray
    z1: np.ndarray                 # (nq, ns) component 1 (product)
    z2: np.ndarray                 # (nq, ns) component 2 (z-shifted copy)


def nonsqueezing_front(rho, action, nq: int = 101, ns: int = 2001):
    """The doubled-link front showing pseudo-loose charts cannot be loose.

    Component 1 is the zig-zag front times the q-disk; component 2 is its
    z-shift by (a / 2 rho) |q|.  The report carries the pushed-off
    component's q-slope a / (2 rho) (exact for rational input), the verdict
    that it exceeds rho (so the pushed component misses C x B_rho), and the
    measured action of component 1.
    """
    if _is_rational(rho) and _is_rational(action):
        size = Fraction(rho) ** 2 / Fraction(action)
        slope = Fraction(action) / (2 * Fraction(rho))
        half = Fraction(1, 2)
    else:
        size = float(rho) ** 2 / float(action)
        slope = float(action) / (2.0 * float(rho))
        half = 0.5
    if not size < half:
        raise ChartError(
            f"non-squeezing requires a pseudo-loose chart (rho^2/a = {size} "
            "is not < 1/2)")

    a = float(action)
    r = float(rho)
    zz = zigzags.canonical_zigzag_lift(a, ns)
    x = zz.points[:, 0]
    z = zz.points[:, 2]
    q = np.linspace(-2.0 * r, 2.0 * r, nq)
    shift = (a / (2.0 * r)) * np.abs(q)
    z1 = np.broadcast_to(z[None, :], (nq, ns)).copy()
    z2 = z[None, :] + shift[:, None]

    _, act1 = reeb_chords(zz)
    return NonSqueezingReport(
        size_parameter=size,
        pushoff_slope=slope,
        slope_exceeds_rho=bool(slope > rho),
        component1_action=float(act1),
        q=q, x=x, z1=z1, z2=z2)
