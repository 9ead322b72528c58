"""Model contact spaces, contact-form evaluation, Legendrian residuals, Reeb chords.

Three model spaces are supported:

* ``R3Std``      -- (R^3, dz - y dx), coordinates (x, y, z),
* ``R2n1Std(n)`` -- (R^{2n+1}, dz - y dx - sum p_i dq_i), coordinates
                    (x, y, z, p_1..p_{n-1}, q_1..q_{n-1}),
* ``Unicycle``   -- (R^2 x S^1, cos(theta) dx - sin(theta) dy), coordinates
                    (x, y, theta).

Curves are sampled; tangents are taken by central finite differences (3-point
one-sided stencils at open ends), so nothing here requires symbolic input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "ContactError",
    "DimensionMismatchError",
    "DegenerateCurveError",
    "ContactModel",
    "R3_STD",
    "UNICYCLE",
    "r2n1_std",
    "SampledLegendrian",
    "ReebChord",
    "legendrian_residual",
    "reeb_chords",
    "action",
    "contact_scale_point",
    "contact_scale_points",
    "contact_scale_curve",
]


class ContactError(ValueError):
    """Base class for contact-geometry domain errors."""


class DimensionMismatchError(ContactError):
    """Point or tangent dimension does not match the contact model."""


class DegenerateCurveError(ContactError):
    """A sampled curve violates its sampling invariants."""


@dataclass(frozen=True)
class ContactModel:
    """A named model contact space with an evaluable contact form.

    ``kind`` is one of ``"R3Std"``, ``"R2n1Std"``, ``"Unicycle"``.  For
    ``R2n1Std`` the half-dimension ``n >= 2`` must be given; the coordinate
    order is (x, y, z, p_1..p_{n-1}, q_1..q_{n-1}).
    """

    kind: str
    n: int = 1

    def __post_init__(self):
        if self.kind not in ("R3Std", "R2n1Std", "Unicycle"):
            raise ContactError(f"unknown contact model kind {self.kind!r}")
        if self.kind == "R2n1Std" and self.n < 2:
            raise ContactError("R2n1Std requires n >= 2 (use R3Std for n = 1)")

    @property
    def dim(self) -> int:
        if self.kind == "R2n1Std":
            return 2 * self.n + 1
        return 3

    def _check(self, point, tangent=None):
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise DimensionMismatchError(
                f"{self.kind}: expected point of dimension {self.dim}, got shape {point.shape}"
            )
        if tangent is None:
            return point
        tangent = np.asarray(tangent, dtype=float)
        if tangent.shape != (self.dim,):
            raise DimensionMismatchError(
                f"{self.kind}: expected tangent of dimension {self.dim}, got shape {tangent.shape}"
            )
        return point, tangent

    def eval_form(self, point, tangent) -> float:
        """Evaluate the model's contact 1-form at ``point`` on ``tangent``."""
        point, tangent = self._check(point, tangent)
        if self.kind == "R3Std":
            return float(tangent[2] - point[1] * tangent[0])
        if self.kind == "Unicycle":
            th = point[2]
            return float(np.cos(th) * tangent[0] - np.sin(th) * tangent[1])
        # R2n1Std: alpha = dz - y dx - sum_i p_i dq_i
        m = self.n - 1
        val = tangent[2] - point[1] * tangent[0]
        p = point[3 : 3 + m]
        vq = tangent[3 + m : 3 + 2 * m]
        return float(val - np.dot(p, vq))

    def eval_form_many(self, points: np.ndarray, tangents: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`eval_form` over rows of ``points``/``tangents``."""
        points = np.asarray(points, dtype=float)
        tangents = np.asarray(tangents, dtype=float)
        if points.shape[1] != self.dim or tangents.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"{self.kind}: expected rows of dimension {self.dim}"
            )
        if self.kind == "R3Std":
            return tangents[:, 2] - points[:, 1] * tangents[:, 0]
        if self.kind == "Unicycle":
            th = points[:, 2]
            return np.cos(th) * tangents[:, 0] - np.sin(th) * tangents[:, 1]
        m = self.n - 1
        val = tangents[:, 2] - points[:, 1] * tangents[:, 0]
        return val - np.sum(points[:, 3 : 3 + m] * tangents[:, 3 + m : 3 + 2 * m], axis=1)

    def reeb_vector(self, point) -> np.ndarray:
        """Reeb vector field at ``point`` (satisfies alpha(R)=1, i_R dalpha=0)."""
        point = self._check(point)
        R = np.zeros(self.dim)
        if self.kind == "Unicycle":
            th = point[2]
            R[0] = np.cos(th)
            R[1] = -np.sin(th)
        else:
            R[2] = 1.0
        return R


R3_STD = ContactModel("R3Std")
UNICYCLE = ContactModel("Unicycle")


def r2n1_std(n: int) -> ContactModel:
    """The standard contact R^{2n+1} with coordinates (x, y, z, p, q)."""
    return ContactModel("R2n1Std", n)


@dataclass
class SampledLegendrian:
    """A parametric curve sampled on a 1-D grid in a contact model.

    ``points`` has one row per parameter value.  ``closed`` curves must have
    coinciding first and last samples (within 1e-12); consecutive samples must
    be distinct.
    """

    model: ContactModel
    params: np.ndarray
    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != self.model.dim:
            raise DimensionMismatchError(
                f"points must be (N, {self.model.dim}), got {self.points.shape}"
            )
        if len(self.params) != len(self.points) or len(self.params) < 2:
            raise DegenerateCurveError("need matching params/points with N >= 2")
        seg = np.diff(self.points, axis=0)
        if np.any(np.all(seg == 0.0, axis=1)):
            raise DegenerateCurveError("consecutive samples must be distinct")
        if self.closed:
            gap = np.max(np.abs(self.points[0] - self.points[-1]))
            if gap > 1e-12:
                raise DegenerateCurveError(
                    f"closed curve endpoints differ by {gap:.3e} > 1e-12"
                )

    def __len__(self) -> int:
        return len(self.params)


def _fd_tangents(curve: SampledLegendrian) -> np.ndarray:
    """Central-difference tangents; 3-point one-sided stencils at open ends.

    For closed curves the wrap-around central difference is used everywhere
    (the duplicated end sample is skipped).
    """
    pts = curve.points
    if curve.closed:
        ring = pts[:-1]
        tan = np.empty_like(pts)
        tan[:-1] = np.roll(ring, -1, axis=0) - np.roll(ring, 1, axis=0)
        tan[-1] = tan[0]
        return tan
    tan = np.empty_like(pts)
    tan[1:-1] = pts[2:] - pts[:-2]
    tan[0] = -3.0 * pts[0] + 4.0 * pts[1] - pts[2]
    tan[-1] = 3.0 * pts[-1] - 4.0 * pts[-2] + pts[-3]
    return tan


def legendrian_residual(curve: SampledLegendrian) -> float:
    """Maximum normalized contact-form residual of a sampled curve.

    At each sample the finite-difference tangent v is formed and
    |alpha(v)| / ||v||_inf is taken; the maximum over samples is returned.
    0 means Legendrian within discretization; a straight line (t, 0, t) in
    R3Std scores exactly 1 (unit defect per unit x).
    """
    tan = _fd_tangents(curve)
    norms = np.max(np.abs(tan), axis=1)
    if np.any(norms == 0.0):
        raise DegenerateCurveError("zero finite-difference tangent (degenerate segment)")
    vals = np.abs(curve.model.eval_form_many(curve.points, tan))
    return float(np.max(vals / norms))


@dataclass(frozen=True)
class ReebChord:
    """A vertical z-segment joining two curve points with equal (x, y)."""

    x_value: float
    endpoints: tuple  # (t, t') parameter values, t < t'
    length: float

    def __post_init__(self):
        if not self.length > 0.0:
            raise ContactError("Reeb chord length must be positive")


# --- Reeb chord detection -------------------------------------------------
#
# Chords of a curve in R3Std are pairs of parameters with equal x and y.
# The curve is split into maximal y-monotone runs; for each pair of runs the
# one-parameter family y(t) = y(t') is scanned for sign changes of
# x(t) - x(t'), refined by bisection.  Exactly-constant-y runs (straight
# horizontal tails) are handled separately, as are run-boundary extrema.

def _monotone_runs(y: np.ndarray):
    """Split indices 0..N-1 into maximal runs: ('const', i0, i1) / ('mono', i0, i1)."""
    n = len(y)
    dy = np.diff(y)
    runs = []
    i = 0
    while i < n - 1:
        if dy[i] == 0.0:
            j = i
            while j < n - 1 and dy[j] == 0.0:
                j += 1
            runs.append(("const", i, j))
            i = j
        else:
            s = np.sign(dy[i])
            j = i
            while j < n - 1 and (dy[j] == 0.0 or np.sign(dy[j]) == s):
                # zero-length y-steps inside a monotone stretch are tolerated
                if dy[j] == 0.0 and (j + 1 >= n - 1 or np.sign(dy[j + 1]) != s):
                    break
                j += 1
            runs.append(("mono", i, j))
            i = j
    return runs


def _interp_on_run(y: np.ndarray, vals: np.ndarray, i0: int, i1: int, yq):
    """Linear interpolation of vals over the (monotone) run y[i0..i1]."""
    ys = y[i0 : i1 + 1]
    vs = vals[i0 : i1 + 1]
    if ys[0] > ys[-1]:
        ys = ys[::-1]
        vs = vs[::-1]
    return np.interp(yq, ys, vs)


def reeb_chords(curve: SampledLegendrian, length_tol: float = 1e-9):
    """All Reeb chords of a curve in R3Std, plus the action (minimal length).

    Returns ``(chords, action)`` with ``chords`` sorted by (x, t); ``action``
    is ``None`` when the list is empty.  Chord locations are refined by
    bisection on the piecewise-linear samples to 1e-10 of the y-scale.
    """
    if curve.model.kind != "R3Std":
        raise ContactError("reeb_chords is defined for curves in R3Std")
    t = curve.params
    x, y, z = curve.points[:, 0], curve.points[:, 1], curve.points[:, 2]
    scale = max(np.ptp(x), np.ptp(y), 1e-30)
    ztol = max(length_tol, 1e-12 * max(np.ptp(z), 1.0))

    runs = _monotone_runs(y)
    found = []

    def emit(ta, tb, xa, za, zb):
        gap = abs(za - zb)
        if gap <= ztol or abs(ta - tb) <= 1e-12 * max(np.ptp(t), 1.0):
            return
        lo, hi = (ta, tb) if ta < tb else (tb, ta)
        found.append((float(xa), float(lo), float(hi), float(gap)))

    mono = [r for r in runs if r[0] == "mono"]
    const = [r for r in runs if r[0] == "const"]

    # monotone-run pairs: scan g(y) = x_P(y) - x_Q(y) for sign changes
    for a in range(len(mono)):
        for b in range(a, len(mono)):
            _, p0, p1 = mono[a]
            _, q0, q1 = mono[b]
            ylo = max(min(y[p0], y[p1]), min(y[q0], y[q1]))
            yhi = min(max(y[p0], y[p1]), max(y[q0], y[q1]))
            if yhi <= ylo:
                continue
            levels = np.unique(np.concatenate([
                y[p0 : p1 + 1][(y[p0 : p1 + 1] >= ylo) & (y[p0 : p1 + 1] <= yhi)],
                y[q0 : q1 + 1][(y[q0 : q1 + 1] >= ylo) & (y[q0 : q1 + 1] <= yhi)],
                [ylo, yhi],
            ]))
            if len(levels) < 2:
                continue
            xp = _interp_on_run(y, x, p0, p1, levels)
            xq = _interp_on_run(y, x, q0, q1, levels)
            tp = _interp_on_run(y, t, p0, p1, levels)
            tq = _interp_on_run(y, t, q0, q1, levels)
            g = xp - xq
            same = a == b
            for i in range(len(levels) - 1):
                g0, g1 = g[i], g[i + 1]
                if g0 == 0.0 and not same:
                    emit(tp[i], tq[i], xp[i],
                         _interp_on_run(y, z, p0, p1, levels[i]),
                         _interp_on_run(y, z, q0, q1, levels[i]))
                if g0 * g1 < 0.0:
                    lo, hi = levels[i], levels[i + 1]
                    for _ in range(60):
                        mid = 0.5 * (lo + hi)
                        gm = (_interp_on_run(y, x, p0, p1, mid)
                              - _interp_on_run(y, x, q0, q1, mid))
                        if g0 * gm <= 0.0:
                            hi = mid
                        else:
                            lo = mid
                        if hi - lo < 1e-10 * max(abs(ylo), abs(yhi), 1.0):
                            break
                    ys = 0.5 * (lo + hi)
                    emit(_interp_on_run(y, t, p0, p1, ys),
                         _interp_on_run(y, t, q0, q1, ys),
                         _interp_on_run(y, x, p0, p1, ys),
                         _interp_on_run(y, z, p0, p1, ys),
                         _interp_on_run(y, z, q0, q1, ys))

    # constant-y runs against monotone runs crossing that level
    for _, c0, c1 in const:
        level = y[c0]
        xlo, xhi = min(x[c0], x[c1]), max(x[c0], x[c1])
        for _, p0, p1 in mono:
            if not (min(y[p0], y[p1]) <= level <= max(y[p0], y[p1])):
                continue
            xs = float(_interp_on_run(y, x, p0, p1, level))
            if xlo - 1e-12 * scale <= xs <= xhi + 1e-12 * scale:
                xc = x[c0 : c1 + 1]
                tc = t[c0 : c1 + 1]
                zc = z[c0 : c1 + 1]
                order = np.argsort(xc)
                t_on_c = np.interp(xs, xc[order], tc[order])
                z_on_c = np.interp(xs, xc[order], zc[order])
                emit(float(t_on_c), float(_interp_on_run(y, t, p0, p1, level)),
                     xs, float(z_on_c), float(_interp_on_run(y, z, p0, p1, level)))
        # constant/constant overlaps: one representative chord
        for _, d0, d1 in const:
            if d0 <= c0 or y[d0] != level:
                continue
            lo = max(min(x[c0], x[c1]), min(x[d0], x[d1]))
            hi = min(max(x[c0], x[c1]), max(x[d0], x[d1]))
            if hi > lo + 1e-12 * scale:
                xm = 0.5 * (lo + hi)
                oc = np.argsort(x[c0 : c1 + 1])
                od = np.argsort(x[d0 : d1 + 1])
                emit(float(np.interp(xm, x[c0:c1 + 1][oc], t[c0:c1 + 1][oc])),
                     float(np.interp(xm, x[d0:d1 + 1][od], t[d0:d1 + 1][od])),
                     xm,
                     float(np.interp(xm, x[c0:c1 + 1][oc], z[c0:c1 + 1][oc])),
                     float(np.interp(xm, x[d0:d1 + 1][od], z[d0:d1 + 1][od])))

    # run-boundary extrema pairs (chords whose endpoints sit at y-turning points)
    bnd = sorted({r[1] for r in runs} | {r[2] for r in runs})
    for ii in range(len(bnd)):
        for jj in range(ii + 1, len(bnd)):
            i, j = bnd[ii], bnd[jj]
            if (abs(x[i] - x[j]) < 1e-9 * scale and abs(y[i] - y[j]) < 1e-9 * scale):
                emit(t[i], t[j], x[i], z[i], z[j])

    # deduplicate (t, t') pairs found through several routes
    dedup = {}
    tspan = max(np.ptp(t), 1.0)
    for xv, ta, tb, gap in found:
        key = (round(ta / (1e-7 * tspan)), round(tb / (1e-7 * tspan)))
        if key not in dedup or gap < dedup[key][3]:
            dedup[key] = (xv, ta, tb, gap)
    chords = [ReebChord(x_value=v[0], endpoints=(v[1], v[2]), length=v[3])
              for v in sorted(dedup.values())]
    act = min((c.length for c in chords), default=None)
    return chords, act


def action(curve: SampledLegendrian) -> Optional[float]:
    """Length of the smallest Reeb chord, or None when there are no chords."""
    return reeb_chords(curve)[1]


# --- contact scaling -------------------------------------------------------

def contact_scale_point(point: Sequence[float], c: float) -> np.ndarray:
    """Contact scaling (x, y, z, p, q) -> (cx, cy, c^2 z, cp, cq)."""
    if c <= 0:
        raise ContactError("contact scaling requires c > 0")
    p = np.asarray(point, dtype=float).copy()
    p *= c
    p[2] *= c
    return p


def contact_scale_points(points: np.ndarray, c: float) -> np.ndarray:
    if c <= 0:
        raise ContactError("contact scaling requires c > 0")
    out = np.asarray(points, dtype=float) * c
    out[:, 2] *= c
    return out


def contact_scale_curve(curve: SampledLegendrian, c: float) -> SampledLegendrian:
    """Contact scaling applied to every sample of a curve (params kept)."""
    return SampledLegendrian(
        model=curve.model,
        params=curve.params.copy(),
        points=contact_scale_points(curve.points, c),
        closed=curve.closed,
    )
