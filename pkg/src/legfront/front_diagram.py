"""Planar front diagrams: validation, Legendrian lifting, invariants, moves.

A front is stored geometrically as a list of sampled arcs (each strictly
x-monotone, optionally carrying exact slopes) together with a traversal
order.  Cusps live at traversal junctions where the x-direction reverses;
crossings are derived geometrically and resolved by condition (3): the
overcrossing strand is the one with the smaller slope.

Moves are implemented by two engines:

* grafts compose a compactly supported bump (kink or zig-zag climb) over a
  host strand, preserving slopes additively, and
* displacement maps push a selected sub-curve by a smooth, compactly
  supported plane map with an exact (Newton) inverse, used for the
  Reidemeister II and III moves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .contact_core import R3_STD, SampledLegendrian
from . import zigzags

__all__ = [
    "FrontError",
    "MovePatternError",
    "FrontArc",
    "DeclaredCrossing",
    "FrontDiagram",
    "Violation",
    "ValidationReport",
    "Crossing",
    "ClassicalInvariants",
    "validate_front",
    "lift_front",
    "front_projection",
    "crossings",
    "classical_invariants",
    "GraftSite",
    "FlowSite",
    "apply_move",
    "render_svg",
    "linking_number",
    "front_sup_distance",
]


class FrontError(ValueError):
    """Invalid front diagram or front operation."""


class MovePatternError(FrontError):
    """The move site does not match the expected local configuration."""


@dataclass
class FrontArc:
    """A sampled x-monotone planar arc with optional exact slopes."""

    points: np.ndarray            # (N, 2) columns (x, z)
    slopes: Optional[np.ndarray] = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise FrontError("arc points must be an (N, 2) array")
        if self.slopes is not None:
            self.slopes = np.asarray(self.slopes, dtype=float)
            if self.slopes.shape != (len(self.points),):
                raise FrontError("arc slopes must match the sample count")

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class DeclaredCrossing:
    """An externally declared crossing with explicit over/under slopes."""

    x: float
    z: float
    over_slope: float
    under_slope: float


@dataclass
class FrontDiagram:
    """A planar front: arcs plus a traversal order.

    ``orientation`` lists (arc_index, direction) pairs; direction -1 runs the
    stored arc backwards.  Consecutive arcs must join end-to-start; closed
    fronts join the last arc back to the first.  ``ambient_dim`` is 1 for
    planar fronts (higher-dimensional sheet fronts are separate types).
    """

    arcs: list
    orientation: list
    closed: bool = False
    ambient_dim: int = 1
    declared_crossings: list = field(default_factory=list)

    def traversal(self):
        """Concatenated samples along the traversal.

        Returns ``(points, slopes, cusp_idx, sample_arc)`` with junction
        duplicates removed.  ``slopes`` is None when any arc lacks slopes.
        ``cusp_idx`` are traversal indices of x-reversal junctions.
        """
        pts_list, slope_list, arc_ids = [], [], []
        have_slopes = all(self.arcs[a].slopes is not None
                          for a, _ in self.orientation)
        for k, (a, d) in enumerate(self.orientation):
            arc = self.arcs[a]
            p = arc.points if d > 0 else arc.points[::-1]
            s = None
            if have_slopes:
                s = arc.slopes if d > 0 else arc.slopes[::-1]
            if k > 0:
                gap = np.max(np.abs(pts_list[-1][-1] - p[0]))
                if gap > 1e-9:
                    raise FrontError(
                        f"traversal arcs {self.orientation[k-1][0]} -> {a} do not join "
                        f"(gap {gap:.3e})")
                p = p[1:]
                if s is not None:
                    s = s[1:]
            pts_list.append(p)
            if have_slopes:
                slope_list.append(s)
            arc_ids.append(np.full(len(p), a))
        pts = np.concatenate(pts_list)
        arcs_of = np.concatenate(arc_ids)
        slopes = np.concatenate(slope_list) if have_slopes else None
        if self.closed:
            gap = np.max(np.abs(pts[0] - pts[-1]))
            if gap > 1e-9:
                raise FrontError(f"closed traversal does not close up (gap {gap:.3e})")

        cusp_idx = []
        n = len(pts)
        dx = np.diff(pts[:, 0])
        # junction indices in traversal coordinates
        junctions = []
        acc = 0
        for k, (a, d) in enumerate(self.orientation):
            acc += len(self.arcs[a].points) - (1 if k > 0 else 0)
            junctions.append(acc - 1)
        inner = junctions[:-1]
        if self.closed:
            inner = inner + [n - 1]
        for j in inner:
            before = dx[j - 1] if j - 1 >= 0 else dx[-1]
            after = dx[j % (n - 1)] if j < n - 1 else dx[0]
            if before * after < 0.0:
                cusp_idx.append(j % (n - 1) if self.closed else j)
        return pts, slopes, sorted(set(cusp_idx)), arcs_of

    def cusps(self):
        """Cusp records: (traversal index, point, z-direction +1 up / -1 down)."""
        pts, _, cusp_idx, _ = self.traversal()
        n = len(pts)
        out = []
        for j in cusp_idx:
            if self.closed:
                jm, jp = (j - 1) % (n - 1), (j + 1) % (n - 1)
            else:
                jm, jp = max(j - 1, 0), min(j + 1, n - 1)
            dz = pts[jp, 1] - pts[jm, 1]
            out.append((j, pts[j].copy(), 1 if dz >= 0 else -1))
        return out


@dataclass(frozen=True)
class Violation:
    code: str
    location: tuple       # (x, z)
    detail: str

    def key(self):
        return (self.code, round(self.location[0], 9), round(self.location[1], 9))


@dataclass
class ValidationReport:
    ok: bool
    violations: list

    def multiset(self):
        return sorted(v.key() for v in self.violations)


@dataclass(frozen=True)
class Crossing:
    point: tuple           # (x, z)
    seg_a: int
    seg_b: int
    slope_over: float
    slope_under: float
    sign: int              # +1 right-handed under det(d_over, d_under) > 0


@dataclass(frozen=True)
class ClassicalInvariants:
    tb: int
    rot: int


# --- geometry helpers -------------------------------------------------------

def _segment_intersections(pts: np.ndarray, closed: bool):
    """All transverse interior intersections of the traversal polyline.

    Returns a list of (i, j, t_i, t_j, point) with i < j non-adjacent
    segment indices.  Candidate pairs come from an x-sweep, so the cost is
    O(n * overlap) rather than quadratic.
    """
    p = pts[:-1] if closed and np.allclose(pts[0], pts[-1]) else pts
    n = len(p)
    if closed:
        a = p
        b = np.roll(p, -1, axis=0)
    else:
        a = p[:-1]
        b = p[1:]
    m = len(a)
    d = b - a
    xlo = np.minimum(a[:, 0], b[:, 0])
    xhi = np.maximum(a[:, 0], b[:, 0])
    zlo = np.minimum(a[:, 1], b[:, 1])
    zhi = np.maximum(a[:, 1], b[:, 1])

    order = np.argsort(xlo, kind="stable")
    pairs_i, pairs_j = [], []
    active: list = []
    for idx in order:
        lo = xlo[idx]
        active = [k for k in active if xhi[k] >= lo]
        if active:
            ks = np.asarray(active)
            ok = (zlo[ks] <= zhi[idx]) & (zlo[idx] <= zhi[ks])
            for k in ks[ok]:
                i, j = (int(k), int(idx)) if k < idx else (int(idx), int(k))
                if j <= i + 1:
                    continue
                if closed and i == 0 and j == m - 1:
                    continue
                pairs_i.append(i)
                pairs_j.append(j)
        active.append(int(idx))
    if not pairs_i:
        return []
    ii = np.asarray(pairs_i)
    jj = np.asarray(pairs_j)
    r = d[ii]
    s = d[jj]
    qp = a[jj] - a[ii]
    den = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    ok = np.abs(den) > 1e-15
    safe = np.where(ok, den, 1.0)
    t = np.where(ok, (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / safe, -1.0)
    u = np.where(ok, (qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]) / safe, -1.0)
    hit = ok & (t >= 0.0) & (t < 1.0) & (u >= 0.0) & (u < 1.0)
    out = []
    for i, j, ti, ui in zip(ii[hit], jj[hit], t[hit], u[hit]):
        out.append((int(i), int(j), float(ti), float(ui),
                    tuple(a[i] + ti * d[i])))
    return out


def _traversal_slopes(front: FrontDiagram):
    """Per-sample slopes along the traversal (stored exactly or estimated).

    Estimated slopes use central differences inside arcs; near cusps the
    limit slope is recovered from the second differences of the cusp
    normal-form parametrization.
    """
    pts, slopes, cusp_idx, arcs_of = front.traversal()
    if slopes is not None:
        return pts, slopes, cusp_idx, arcs_of
    n = len(pts)
    x, z = pts[:, 0], pts[:, 1]
    y = np.empty(n)
    if front.closed:
        xr, zr = x[:-1], z[:-1]
        dxc = np.roll(xr, -1) - np.roll(xr, 1)
        dzc = np.roll(zr, -1) - np.roll(zr, 1)
        ddx = np.roll(xr, -1) - 2 * xr + np.roll(xr, 1)
        ddz = np.roll(zr, -1) - 2 * zr + np.roll(zr, 1)
        w = (np.ptp(x) * 1e-3) ** 2
        y[:-1] = (dzc * dxc + ddz * ddx) / (dxc**2 + ddx**2 + 1e-300)
        smooth = np.abs(dxc) > 1e3 * np.abs(ddx)
        y[:-1][smooth] = dzc[smooth] / dxc[smooth]
        _ = w
        y[-1] = y[0]
    else:
        dxc = x[2:] - x[:-2]
        dzc = z[2:] - z[:-2]
        ddx = x[2:] - 2 * x[1:-1] + x[:-2]
        ddz = z[2:] - 2 * z[1:-1] + z[:-2]
        y[1:-1] = (dzc * dxc + ddz * ddx) / (dxc**2 + ddx**2 + 1e-300)
        smooth = np.abs(dxc) > 1e3 * np.abs(ddx)
        y[1:-1][smooth] = dzc[smooth] / dxc[smooth]
        y[0] = (z[1] - z[0]) / (x[1] - x[0])
        y[-1] = (z[-1] - z[-2]) / (x[-1] - x[-2])
    return pts, y, cusp_idx, arcs_of


# --- validation --------------------------------------------------------------

def validate_front(front: FrontDiagram, slope_limit: float = 1e3,
                   tangency_tol: float = 1e-6) -> ValidationReport:
    """Check the front-diagram conditions; violations are data, not errors.

    (1) no vertical tangencies (within-arc x-reversals, or junctions whose
        one-sided slopes diverge), (2) singular points are transverse double
        crossings or slope-matched cusps, (3) declared crossings obey
        slope(over) < slope(under).
    """
    violations = []
    # per-arc strict x-monotonicity (cusp junctions exempt by construction)
    for a_id, arc in enumerate(front.arcs):
        dx = np.diff(arc.points[:, 0])
        if len(dx) and not (np.all(dx > 0.0) or np.all(dx < 0.0)):
            bad = np.nonzero(~(dx * np.sign(dx[np.argmax(np.abs(dx))]) > 0))[0]
            k = int(bad[0])
            violations.append(Violation(
                "vertical_tangency", tuple(arc.points[k + 1]),
                f"arc {a_id}: x not strictly monotone at sample {k + 1}"))

    try:
        pts, y, cusp_idx, _ = _traversal_slopes(front)
    except FrontError as exc:
        violations.append(Violation("traversal", (np.nan, np.nan), str(exc)))
        return ValidationReport(False, violations)

    n = len(pts)
    scale_y = max(np.median(np.abs(y)) if len(y) else 0.0, 1.0)
    for j in cusp_idx:
        jm = (j - 1) % (n - 1) if front.closed else max(j - 1, 0)
        jp = (j + 1) % (n - 1) if front.closed else min(j + 1, n - 1)
        y_in, y_out = y[jm], y[jp]
        if max(abs(y_in), abs(y_out)) > slope_limit * scale_y:
            violations.append(Violation(
                "vertical_tangency", tuple(pts[j]),
                f"junction slopes diverge ({y_in:.3g} / {y_out:.3g})"))
        elif abs(y_in - y_out) > 0.2 * (1.0 + abs(y_in) + abs(y_out)):
            violations.append(Violation(
                "kink", tuple(pts[j]),
                f"cusp branches disagree in slope ({y_in:.3g} vs {y_out:.3g})"))

    # geometric crossings: transversality and multiplicity
    inters = _segment_intersections(pts, front.closed)
    locs = np.array([it[4] for it in inters]) if inters else np.empty((0, 2))
    scale = max(np.ptp(pts[:, 0]), np.ptp(pts[:, 1]), 1.0)
    for k, (i, j, ti, ui, pt) in enumerate(inters):
        ya = y[i] * (1 - ti) + y[min(i + 1, n - 1)] * ti
        yb = y[j] * (1 - ui) + y[min(j + 1, n - 1)] * ui
        if abs(ya - yb) <= tangency_tol * (1.0 + abs(ya) + abs(yb)):
            violations.append(Violation(
                "self_tangency", tuple(pt),
                f"strands meet with equal slope {ya:.6g}"))
        near = np.sum(np.max(np.abs(locs - np.asarray(pt)), axis=1) < 1e-9 * scale)
        if near > 1:
            violations.append(Violation(
                "multiple_point", tuple(pt), "more than two strands meet"))

    for dc in front.declared_crossings:
        if not dc.over_slope < dc.under_slope:
            violations.append(Violation(
                "crossing_resolution", (dc.x, dc.z),
                f"declared over-slope {dc.over_slope:.6g} is not less than "
                f"under-slope {dc.under_slope:.6g}"))

    # deduplicate multiplicity reports
    seen = set()
    unique = []
    for v in violations:
        if v.key() not in seen:
            seen.add(v.key())
            unique.append(v)
    return ValidationReport(len(unique) == 0, unique)


# --- lifting -----------------------------------------------------------------

def fd_slopes(pts: np.ndarray, fallback: np.ndarray, closed: bool) -> np.ndarray:
    """Discrete lift slopes y = dz/dx by central differences of the samples.

    Where the central x-increment degenerates (cusps), ``fallback`` slopes
    are kept.  Setting y to the exact difference quotient makes the sampled
    lift's contact residual vanish identically away from cusps.
    """
    x, z = pts[:, 0], pts[:, 1]
    y = fallback.copy()
    if closed:
        xr, zr = x[:-1], z[:-1]
        dxc = np.roll(xr, -1) - np.roll(xr, 1)
        dzc = np.roll(zr, -1) - np.roll(zr, 1)
        ok = np.abs(dxc) > 0.35 * (np.abs(np.roll(xr, -1) - xr)
                                   + np.abs(xr - np.roll(xr, 1)))
        y[:-1][ok] = dzc[ok] / dxc[ok]
        y[-1] = y[0]
    else:
        dxc = x[2:] - x[:-2]
        dzc = z[2:] - z[:-2]
        ok = np.abs(dxc) > 0.35 * (np.abs(x[2:] - x[1:-1])
                                   + np.abs(x[1:-1] - x[:-2]))
        y[1:-1][ok] = dzc[ok] / dxc[ok]
        # one-sided three-point stencils at the ends
        vx0 = -3.0 * x[0] + 4.0 * x[1] - x[2]
        vz0 = -3.0 * z[0] + 4.0 * z[1] - z[2]
        if abs(vx0) > 1e-12 * max(abs(vz0), 1e-30):
            y[0] = vz0 / vx0
        vx1 = 3.0 * x[-1] - 4.0 * x[-2] + x[-3]
        vz1 = 3.0 * z[-1] - 4.0 * z[-2] + z[-3]
        if abs(vx1) > 1e-12 * max(abs(vz1), 1e-30):
            y[-1] = vz1 / vx1
    return y


def lift_front(front: FrontDiagram) -> SampledLegendrian:
    """Lift a valid planar front to a Legendrian curve in R3Std.

    The lift keeps the front's samples and fills y = dz/dx by central finite
    differences of the samples themselves (stored or cusp-fitted slopes keep
    filling in at the cusps, where the x-increment degenerates).  The front
    projection of the result reproduces the input exactly.
    """
    report = validate_front(front)
    if not report.ok:
        raise FrontError(
            "cannot lift an invalid front: "
            + "; ".join(f"{v.code}@{v.location}" for v in report.violations[:4]))
    pts, y0, _, _ = _traversal_slopes(front)
    closed = front.closed and np.max(np.abs(pts[0] - pts[-1])) < 1e-12
    if front.closed and not closed:
        pts = np.vstack([pts, pts[0]])
        y0 = np.concatenate([y0, y0[:1]])
        closed = True
    y = fd_slopes(pts, y0, closed)
    params = np.arange(len(pts), dtype=float)
    points = np.column_stack([pts[:, 0], y, pts[:, 1]])
    return SampledLegendrian(model=R3_STD, params=params, points=points,
                             closed=closed)


def front_projection(curve: SampledLegendrian) -> FrontDiagram:
    """Front projection (x, z) of a curve in R3Std, split into monotone arcs."""
    if curve.model.kind != "R3Std":
        raise FrontError("front projection is defined for curves in R3Std")
    x = curve.points[:, 0]
    y = curve.points[:, 1]
    z = curve.points[:, 2]
    dx = np.diff(x)
    sign = np.sign(dx)
    # split at sign reversals (the sample between opposite signs is a cusp)
    breaks = [0]
    for i in range(1, len(dx)):
        if sign[i] != 0 and sign[i - 1] != 0 and sign[i] != sign[i - 1]:
            breaks.append(i)
    breaks.append(len(x) - 1)
    arcs = []
    orientation = []
    for k in range(len(breaks) - 1):
        i0, i1 = breaks[k], breaks[k + 1]
        arcs.append(FrontArc(points=np.column_stack([x[i0:i1 + 1], z[i0:i1 + 1]]),
                             slopes=y[i0:i1 + 1].copy()))
        orientation.append((k, 1))
    closed = curve.closed
    return FrontDiagram(arcs=arcs, orientation=orientation, closed=closed)


# --- crossings and classical invariants ---------------------------------------

def crossings(front: FrontDiagram):
    """Geometric crossings with slope-resolved over/under and signs."""
    pts, y, _, _ = _traversal_slopes(front)
    n = len(pts)
    inters = _segment_intersections(pts, front.closed)
    out = []
    for i, j, ti, ui, pt in inters:
        ya = y[i] * (1 - ti) + y[min(i + 1, n - 1)] * ti
        yb = y[j] * (1 - ui) + y[min(j + 1, n - 1)] * ui
        da = pts[min(i + 1, n - 1)] - pts[i]
        db = pts[min(j + 1, n - 1)] - pts[j]
        if ya < yb:
            d_over, d_under = da, db
            so, su = ya, yb
        else:
            d_over, d_under = db, da
            so, su = yb, ya
        s = 1 if d_over[0] * d_under[1] - d_over[1] * d_under[0] > 0 else -1
        out.append(Crossing(point=tuple(pt), seg_a=i, seg_b=j,
                            slope_over=float(so), slope_under=float(su), sign=s))
    return out


def classical_invariants(front: FrontDiagram) -> ClassicalInvariants:
    """Thurston-Bennequin and rotation number of a closed valid front.

    tb = writhe - (#cusps)/2 with right-handed crossings counted +1;
    rot is the winding number of the lift tangent in the (x, y)-plane.
    """
    if not front.closed:
        raise FrontError("classical invariants require a closed front")
    report = validate_front(front)
    if not report.ok:
        raise FrontError("classical invariants require a valid front")
    pts, y, cusp_idx, _ = _traversal_slopes(front)
    writhe = sum(c.sign for c in crossings(front))
    n_cusps = len(cusp_idx)
    if n_cusps % 2:
        raise FrontError("closed front must have an even cusp count")
    tb = writhe - n_cusps // 2

    ring_p = pts[:-1] if np.max(np.abs(pts[0] - pts[-1])) < 1e-12 else pts
    ring_y = y[: len(ring_p)]
    dx = np.roll(ring_p[:, 0], -1) - np.roll(ring_p[:, 0], 1)
    dy = np.roll(ring_y, -1) - np.roll(ring_y, 1)
    total = np.sum(_angle_steps(dx, dy)) / (2 * np.pi)
    rot = int(round(total))
    if abs(total - rot) > 0.05:
        raise FrontError(f"rotation winding {total:.4f} is not an integer")
    return ClassicalInvariants(tb=int(tb), rot=rot)


def _angle_steps(dx, dy):
    ang = np.arctan2(dy, dx)
    steps = np.diff(np.concatenate([ang, ang[:1]]))
    steps = (steps + np.pi) % (2 * np.pi) - np.pi
    return steps


def linking_number(curve_a: SampledLegendrian, curve_b: SampledLegendrian,
                   direction=(0.138, 1.0, 0.071)) -> int:
    """Linking number of two closed space curves via a generic projection.

    Projects along ``direction``, counts signed crossings between the two
    projected polylines (sign from det(d_over, d_under), over = larger
    projection depth) and halves the sum.
    """
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    e1 = np.cross(u, [0.0, 0.0, 1.0])
    if np.linalg.norm(e1) < 1e-6:
        e1 = np.cross(u, [0.0, 1.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)

    def project(curve):
        p = curve.points[:-1] if np.max(np.abs(curve.points[0] - curve.points[-1])) < 1e-9 else curve.points
        return np.column_stack([p @ e1, p @ e2]), p @ u

    pa, da = project(curve_a)
    pb, db = project(curve_b)
    na, nb = len(pa), len(pb)
    sa = np.roll(pa, -1, axis=0) - pa
    sb = np.roll(pb, -1, axis=0) - pb
    total = 0
    for i in range(na):
        r = sa[i]
        qp = pb - pa[i]
        den = r[0] * sb[:, 1] - r[1] * sb[:, 0]
        ok = np.abs(den) > 1e-15
        t = np.where(ok, (qp[:, 0] * sb[:, 1] - qp[:, 1] * sb[:, 0]) / np.where(ok, den, 1.0), -1)
        v = np.where(ok, (qp[:, 0] * r[1] - qp[:, 1] * r[0]) / np.where(ok, den, 1.0), -1)
        hit = ok & (t >= 0) & (t < 1) & (v >= 0) & (v < 1)
        for j in np.nonzero(hit)[0]:
            depth_a = da[i] + t[j] * (da[(i + 1) % na] - da[i])
            depth_b = db[j] + v[j] * (db[(j + 1) % nb] - db[j])
            if depth_a > depth_b:
                d_over, d_under = r, sb[j]
            else:
                d_over, d_under = sb[j], r
            total += 1 if d_over[0] * d_under[1] - d_over[1] * d_under[0] > 0 else -1
    if total % 2:
        raise FrontError("odd signed crossing sum; projection not generic")
    return total // 2


def front_sup_distance(front_a: FrontDiagram, front_b: FrontDiagram) -> float:
    """Symmetric sup distance between the two fronts' sample polylines."""
    pa = front_a.traversal()[0]
    pb = front_b.traversal()[0]

    def one_sided(p, q):
        worst = 0.0
        seg = np.diff(q, axis=0)
        L2 = np.sum(seg**2, axis=1)
        for pt in p:
            w = pt - q[:-1]
            t = np.clip(np.sum(w * seg, axis=1) / np.maximum(L2, 1e-300), 0.0, 1.0)
            d = np.min(np.sum((w - t[:, None] * seg)**2, axis=1))
            worst = max(worst, d)
        return np.sqrt(worst)

    return max(one_sided(pa, pb), one_sided(pb, pa))


# --- move engine: bumps -------------------------------------------------------

def _hermite_eval(xs, zs, ys, xq):
    """Cubic Hermite interpolation of (z, slope) data over monotone xs."""
    order = np.argsort(xs)
    xs, zs, ys = xs[order], zs[order], ys[order]
    idx = np.clip(np.searchsorted(xs, xq) - 1, 0, len(xs) - 2)
    h = xs[idx + 1] - xs[idx]
    t = (xq - xs[idx]) / h
    h00 = 2 * t**3 - 3 * t**2 + 1
    h10 = t**3 - 2 * t**2 + t
    h01 = -2 * t**3 + 3 * t**2
    h11 = t**3 - t**2
    z = (h00 * zs[idx] + h10 * h * ys[idx]
         + h01 * zs[idx + 1] + h11 * h * ys[idx + 1])
    d00 = 6 * t**2 - 6 * t
    d10 = 3 * t**2 - 4 * t + 1
    d01 = -6 * t**2 + 6 * t
    d11 = 3 * t**2 - 2 * t
    y = (d00 * zs[idx] / h + d10 * ys[idx]
         + d01 * zs[idx + 1] / h + d11 * ys[idx + 1])
    return z, y


def _cubic_ramp(x0, x1, y0, dy0, y1, dy1, n):
    """Cubic Hermite slope profile y(x) on [x0, x1] and its z-antiderivative.

    Returns (x, y, z) with z(x0) = 0.
    """
    x = np.linspace(x0, x1, n)
    h = x1 - x0
    t = (x - x0) / h
    y = ((2 * t**3 - 3 * t**2 + 1) * y0 + (t**3 - 2 * t**2 + t) * h * dy0
         + (-2 * t**3 + 3 * t**2) * y1 + (t**3 - t**2) * h * dy1)
    # exact antiderivative of the Hermite basis
    z = h * ((t**4 / 2 - t**3 + t) * y0 + (t**4 / 4 - 2 * t**3 / 3 + t**2 / 2) * h * dy0
             + (-t**4 / 2 + t**3) * y1 + (t**4 / 4 - t**3 / 3) * h * dy1)
    return x, y, z


def _zig_bump(direction: int = 1, n: int = 801):
    """Compactly supported zig-zag climb bump: (bx, bz, by, core_span).

    Entry tail at level 0, the canonical zig-zag core climbing to the raw
    action height, an exit shelf, then a smooth slope-only descent back to 0.
    Both tails are horizontal, so the bump can ride any smooth strand.
    ``core_span`` are bump sample indices delimiting the exact zig-zag core.
    """
    A = zigzags.RAW_ACTION
    cx, cz, cy, _, _ = zigzags.zigzag_core_bump(max(n // 2, 241))
    n_tail = max(n // 8, 41)
    entry_x = np.linspace(-2.6, 0.0, n_tail, endpoint=False)
    shelf_x = np.linspace(0.0, 2.2, n_tail, endpoint=False)[1:]
    desc_u = np.linspace(0.0, 1.0, max(n // 4, 121), endpoint=False)
    desc_x = 2.2 + desc_u
    desc_z = A * (1.0 - zigzags.smoothstep(desc_u))
    desc_y = -A * (30 * desc_u**2 * (1 - desc_u)**2)
    exit_x = np.linspace(3.2, 3.6, n_tail)

    bx = np.concatenate([entry_x, cx, shelf_x, desc_x, exit_x])
    bz = np.concatenate([np.zeros_like(entry_x), cz, np.full_like(shelf_x, A),
                         desc_z, np.zeros_like(exit_x)])
    by = np.concatenate([np.zeros_like(entry_x), cy, np.zeros_like(shelf_x),
                         desc_y, np.zeros_like(exit_x)])
    i0 = len(entry_x)
    core_span = (i0, i0 + len(cx) - 1)
    if direction < 0:
        bz = -bz
        by = -by
    return bx, bz, by, core_span


_KINK_S = 1.9
_KINK_RAMP_W = 0.6


def _kink_bump(direction: int = 1, n: int = 801):
    """Compactly supported Reidemeister-I kink bump: two cusps, one crossing.

    Core (s^3 - 3s, (s^2-1)^3/3) for |s| <= 1.9, joined to horizontal tails
    by cubic slope ramps; the whole bump is normalized to tail level 0.
    """
    S = _KINK_S
    m = max(n // 2, 301)
    s = np.linspace(-S, S, m)
    kx = s**3 - 3 * s
    kz = (s**2 - 1) ** 3 / 3.0
    ky = 2.0 * s * (s**2 - 1) / 3.0
    x_end = S**3 - 3 * S
    y_end = 2.0 * S * (S**2 - 1) / 3.0
    dydx_end = (2.0 / 3.0) * (3 * S**2 - 1) / (3 * (S**2 - 1))
    # right ramp: from the core end slope back to horizontal
    rx, ry, rz = _cubic_ramp(x_end, x_end + _KINK_RAMP_W, y_end, dydx_end,
                             0.0, 0.0, max(n // 6, 81))
    rz = rz + kz[-1]
    # left ramp is the mirror image (x odd, z even, y odd)
    lx = -rx[::-1]
    ly = -ry[::-1]
    lz = rz[::-1]
    tail_z = rz[-1]
    n_tail = max(n // 10, 33)
    entry_x = np.linspace(lx[0] - 0.5, lx[0], n_tail, endpoint=False)
    exit_x = np.linspace(rx[-1], rx[-1] + 0.5, n_tail)[1:]

    bx = np.concatenate([entry_x, lx, kx[1:], rx[1:], exit_x])
    bz = np.concatenate([np.full_like(entry_x, tail_z), lz, kz[1:], rz[1:],
                         np.full_like(exit_x, tail_z)])
    by = np.concatenate([np.zeros_like(entry_x), ly, ky[1:], ry[1:],
                         np.zeros_like(exit_x)])
    bz = bz - tail_z
    if direction < 0:
        bz = -bz
        by = -by
    return bx, bz, by, None


@dataclass(frozen=True)
class GraftSite:
    """A graft site on a smooth strand: host arc, center x, scale, chirality."""

    arc: int
    x: float
    scale: float = 0.1
    sign: int = 1


@dataclass(frozen=True)
class FlowSite:
    """A displacement-map site for R2/R3 moves.

    For R2 give ``cusp`` (index into the front's cusp list); for R3 give
    ``arc`` (the strand to push) and ``center``.  ``displacement`` is the
    full push vector applied inside the support disk of radius ``radius``;
    ``invert`` applies the exact inverse map instead.
    """

    displacement: tuple
    radius: float
    cusp: Optional[int] = None
    arc: Optional[int] = None
    center: Optional[tuple] = None
    invert: bool = False


@dataclass
class MoveOutcome:
    front: FrontDiagram
    move: str
    details: dict


def _graft(front: FrontDiagram, site: GraftSite, bump, move_name: str):
    bx, bz, by, core_span = bump
    if not (0 <= site.arc < len(front.arcs)):
        raise MovePatternError(f"{move_name}: no arc {site.arc}")
    arc = front.arcs[site.arc]
    if arc.slopes is None:
        raise MovePatternError(f"{move_name}: host arc must carry slopes")
    lam = site.scale
    xs = arc.points[:, 0]
    window = (site.x + lam * (bx[0] - 0.05), site.x + lam * (bx[-1] + 0.05))
    xlo, xhi = min(xs[0], xs[-1]), max(xs[0], xs[-1])
    if not (xlo < window[0] and window[1] < xhi):
        raise MovePatternError(
            f"{move_name} expects a smooth strand: window [{window[0]:.4g}, "
            f"{window[1]:.4g}] not interior to arc {site.arc}")

    X = site.x + lam * bx
    base_z, base_y = _hermite_eval(xs, arc.points[:, 1], arc.slopes, X)
    Z = base_z + lam * bz          # the bump already carries its chirality
    Y = base_y + by

    increasing = xs[-1] > xs[0]
    new_pts = np.column_stack([X, Z])
    if not increasing:
        new_pts = new_pts[::-1]
        Y = Y[::-1]
    # keep host samples outside the window, splice the bump in between
    keep_lo = arc.points[:, 0] < window[0] if increasing else arc.points[:, 0] > window[1]
    keep_hi = arc.points[:, 0] > window[1] if increasing else arc.points[:, 0] < window[0]
    pts_all = np.vstack([arc.points[keep_lo], new_pts, arc.points[keep_hi]])
    y_all = np.concatenate([arc.slopes[keep_lo], Y, arc.slopes[keep_hi]])

    # split the composite at x-reversals into monotone arcs
    dx = np.diff(pts_all[:, 0])
    breaks = [0] + [i for i in range(1, len(dx))
                    if dx[i] * dx[i - 1] < 0] + [len(pts_all) - 1]
    sub_arcs = []
    for k in range(len(breaks) - 1):
        i0, i1 = breaks[k], breaks[k + 1]
        sub_arcs.append(FrontArc(points=pts_all[i0:i1 + 1].copy(),
                                 slopes=y_all[i0:i1 + 1].copy()))

    arcs = list(front.arcs)
    base_index = len(arcs)
    arcs_out = []
    for a in arcs:
        arcs_out.append(a)
    # replace the host arc by the composite pieces
    arcs_out[site.arc] = sub_arcs[0]
    extra_ids = []
    for piece in sub_arcs[1:]:
        extra_ids.append(len(arcs_out))
        arcs_out.append(piece)
    seq = [(site.arc, 1)] + [(i, 1) for i in extra_ids]

    orientation = []
    for a, d in front.orientation:
        if a != site.arc:
            orientation.append((a, d))
        elif d > 0:
            orientation.extend(seq)
        else:
            orientation.extend([(i, -1) for i, _ in reversed(seq)])
    out = FrontDiagram(arcs=arcs_out, orientation=orientation,
                       closed=front.closed,
                       declared_crossings=list(front.declared_crossings))
    details = {"window": window, "scale": lam, "sign": site.sign,
               "x": site.x, "base_index": base_index}
    if core_span is not None:
        details["zigzag_x_span"] = (site.x + lam * bx[core_span[0]],
                                    site.x + lam * bx[core_span[1]])
        details["zigzag_transform"] = {"x0": site.x, "scale": lam,
                                       "sign": site.sign}
    return MoveOutcome(front=out, move=move_name, details=details)


# --- move engine: displacement maps -------------------------------------------

def _chi(u):
    """Plateau bump: 1 on u <= 0.25, 0 on u >= 1, quintic in between."""
    u = np.asarray(u, dtype=float)
    w = np.clip((u - 0.25) / 0.75, 0.0, 1.0)
    return 1.0 - zigzags.smoothstep(w)


def _chi_prime(u):
    u = np.asarray(u, dtype=float)
    w = np.clip((u - 0.25) / 0.75, 0.0, 1.0)
    return -(30.0 * w**2 * (1 - w)**2) / 0.75


def _displacement_forward(pts, center, delta, radius):
    d = pts - center
    u = np.sqrt(np.sum(d * d, axis=1)) / radius
    return pts + np.outer(_chi(u), delta)


def _displacement_inverse(pts, center, delta, radius):
    """Exact inverse of the displacement map by fixed-point iteration."""
    q = pts
    p = q - np.outer(_chi(np.sqrt(np.sum((q - center)**2, axis=1)) / radius), delta)
    for _ in range(80):
        u = np.sqrt(np.sum((p - center)**2, axis=1)) / radius
        p_new = q - np.outer(_chi(u), delta)
        if np.max(np.abs(p_new - p)) < 1e-15:
            p = p_new
            break
        p = p_new
    return p


def _displacement_jacobian(p, center, delta, radius):
    """DPhi at p for Phi(p) = p + delta * chi(|p - c| / r)."""
    d = p - center
    rho = np.sqrt(np.sum(d * d, axis=1))
    u = rho / radius
    cp = _chi_prime(u) / (radius * np.maximum(rho, 1e-300))
    J = np.zeros((len(p), 2, 2))
    J[:, 0, 0] = 1.0 + delta[0] * cp * d[:, 0]
    J[:, 0, 1] = delta[0] * cp * d[:, 1]
    J[:, 1, 0] = delta[1] * cp * d[:, 0]
    J[:, 1, 1] = 1.0 + delta[1] * cp * d[:, 1]
    return J


def _transform_arc(arc: FrontArc, center, delta, radius, invert: bool) -> FrontArc:
    pts = arc.points
    if invert:
        new_pts = _displacement_inverse(pts, center, delta, radius)
        J = _displacement_jacobian(new_pts, center, delta, radius)
    else:
        new_pts = _displacement_forward(pts, center, delta, radius)
        J = _displacement_jacobian(pts, center, delta, radius)
    new_slopes = None
    if arc.slopes is not None:
        vx = np.ones_like(arc.slopes)
        vz = arc.slopes
        if invert:
            det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
            wx = (J[:, 1, 1] * vx - J[:, 0, 1] * vz) / det
            wz = (-J[:, 1, 0] * vx + J[:, 0, 0] * vz) / det
        else:
            wx = J[:, 0, 0] * vx + J[:, 0, 1] * vz
            wz = J[:, 1, 0] * vx + J[:, 1, 1] * vz
        new_slopes = wz / wx
    return FrontArc(points=new_pts, slopes=new_slopes)


def _arcs_in_disk(front: FrontDiagram, center, radius):
    hit = []
    c = np.asarray(center, dtype=float)
    for a_id, arc in enumerate(front.arcs):
        d = np.sqrt(np.sum((arc.points - c)**2, axis=1))
        if np.any(d < radius):
            hit.append(a_id)
    return hit


def _arcs_near_segment(front: FrontDiagram, p0, p1, radius, skip):
    """Arc ids (excluding ``skip``) with a sample within ``radius`` of [p0, p1]."""
    p0 = np.asarray(p0, dtype=float)
    seg = np.asarray(p1, dtype=float) - p0
    L2 = float(seg @ seg)
    hit = []
    for a_id, arc in enumerate(front.arcs):
        if a_id in skip:
            continue
        w = arc.points - p0
        t = np.clip((w @ seg) / max(L2, 1e-300), 0.0, 1.0)
        d2 = np.sum((w - t[:, None] * seg[None, :])**2, axis=1)
        if np.any(d2 < radius * radius):
            hit.append(a_id)
    return hit


def _flow_move(front: FrontDiagram, site: FlowSite, move_name: str):
    delta = np.asarray(site.displacement, dtype=float)
    if np.linalg.norm(delta) >= site.radius / 2.6:
        raise MovePatternError(
            f"{move_name}: displacement {np.linalg.norm(delta):.4g} too large for "
            f"radius {site.radius:.4g} (map would not be injective)")

    if move_name == "R2":
        cusps = front.cusps()
        if site.cusp is None or not (0 <= site.cusp < len(cusps)):
            raise MovePatternError(
                "R2 expects a cusp index (site.cusp) naming the cusp to push")
        _, cusp_pt, _ = cusps[site.cusp]
        center = np.asarray(site.center, dtype=float) if site.center is not None else cusp_pt
        # the two traversal arcs adjacent to the cusp
        pts, _, cusp_idx, arcs_of = front.traversal()
        j = cusp_idx[site.cusp]
        moved = {int(arcs_of[max(j - 1, 0)]), int(arcs_of[min(j + 1, len(pts) - 1)])}
        # the cusp must sweep across exactly one transverse strand
        sweep = -delta if site.invert else delta
        cap_r = max(0.35 * float(np.linalg.norm(delta)), 0.08 * site.radius)
        strangers = _arcs_near_segment(front, cusp_pt, cusp_pt + sweep,
                                       cap_r, moved)
        if len(strangers) != 1:
            raise MovePatternError(
                "R2 expects a cusp and exactly one transverse strand across the "
                f"cusp path (found {len(strangers)} other arcs)")
    elif move_name == "R3":
        if site.arc is None or site.center is None:
            raise MovePatternError(
                "R3 expects the strand arc (site.arc) and a disk center")
        center = np.asarray(site.center, dtype=float)
        moved = {site.arc}
        arc = front.arcs[site.arc]
        d = np.sqrt(np.sum((arc.points - center)**2, axis=1))
        if not np.any(d < site.radius):
            raise MovePatternError("R3: the named strand does not enter the disk")
        p0 = arc.points[int(np.argmin(d))]
        sweep = -delta if site.invert else delta
        cap_r = max(0.35 * float(np.linalg.norm(delta)), 0.08 * site.radius)
        strangers = _arcs_near_segment(front, p0, p0 + sweep, cap_r, moved)
        if len(strangers) != 2:
            raise MovePatternError(
                "R3 expects the strand to sweep across a crossing of exactly two "
                f"other strands (found {len(strangers)})")
    else:
        raise MovePatternError(f"unknown flow move {move_name}")

    arcs_out = []
    for a_id, arc in enumerate(front.arcs):
        if a_id in moved:
            arcs_out.append(_transform_arc(arc, center, delta, site.radius,
                                           site.invert))
        else:
            arcs_out.append(arc)
    out = FrontDiagram(arcs=arcs_out, orientation=list(front.orientation),
                       closed=front.closed,
                       declared_crossings=list(front.declared_crossings))
    report = validate_front(out)
    if not report.ok:
        raise MovePatternError(
            f"{move_name} at {tuple(np.round(center, 4))} produced an invalid "
            f"front: {report.violations[0].code} at {report.violations[0].location}")
    return MoveOutcome(front=out, move=move_name,
                       details={"center": tuple(center), "radius": site.radius,
                                "displacement": tuple(delta),
                                "moved_arcs": sorted(moved)})


def apply_move(front: FrontDiagram, move: str, site) -> MoveOutcome:
    """Apply a front move: R1, R2, R3 or Stabilize.

    R1 and Stabilize graft a compactly supported bump onto a smooth strand
    (site: GraftSite); R2 pushes a cusp through a transverse strand and R3
    pushes a strand across a crossing (site: FlowSite).  The output is
    validated; Stabilize reports the inserted zig-zag's location.
    """
    if move == "R1":
        out = _graft(front, site, _kink_bump(site.sign), "R1")
    elif move == "Stabilize":
        out = _graft(front, site, _zig_bump(site.sign), "Stabilize")
    elif move in ("R2", "R3"):
        return _flow_move(front, site, move)
    else:
        raise MovePatternError(f"unknown move {move!r}")
    report = validate_front(out.front)
    if not report.ok:
        raise MovePatternError(
            f"{move} graft at x={site.x:.4g} produced an invalid front: "
            f"{report.violations[0].code} at {report.violations[0].location}")
    return out


# --- SVG rendering -------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v:.9g}"


def render_svg(front: FrontDiagram, width: int = 480, stroke: str = "#1a6",
               break_under: bool = True) -> str:
    """Deterministic SVG 1.1 rendering: one path per arc, cusp glyphs,
    under-strands broken at crossings, viewBox fitted with a 5% margin."""
    arcs = front.arcs
    if not arcs or all(len(a) == 0 for a in arcs):
        return ('<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                'viewBox="0 0 1 1" width="%d" height="%d"></svg>' % (width, width))
    all_pts = np.vstack([a.points for a in arcs])
    xlo, xhi = all_pts[:, 0].min(), all_pts[:, 0].max()
    zlo, zhi = all_pts[:, 1].min(), all_pts[:, 1].max()
    span = max(xhi - xlo, zhi - zlo, 1e-9)
    m = 0.05 * span
    vb = (xlo - m, -(zhi + m), (xhi - xlo) + 2 * m, (zhi - zlo) + 2 * m)
    height = int(round(width * vb[3] / vb[2]))

    # under-strand break points: the strand with the larger slope is broken
    under_points = []
    if break_under:
        try:
            pts, y, _, _ = _traversal_slopes(front)
            n = len(pts)
            for c in crossings(front):
                ya = y[c.seg_a]
                yb = y[c.seg_b]
                i = c.seg_a if ya > yb else c.seg_b
                tang = pts[min(i + 1, n - 1)] - pts[i]
                under_points.append((np.asarray(c.point), tang))
        except FrontError:
            under_points = []

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
             f'viewBox="{_fmt(vb[0])} {_fmt(vb[1])} {_fmt(vb[2])} {_fmt(vb[3])}" '
             f'width="{width}" height="{height}">']
    sw = 0.012 * span
    gap_r = 0.02 * span
    for arc in arcs:
        p = arc.points
        drop = np.zeros(len(p), dtype=bool)
        for pt, tang in under_points:
            d = np.sqrt(np.sum((p - pt)**2, axis=1))
            near = d < gap_r
            if np.any(near):
                # break only the strand aligned with the under tangent
                k = int(np.argmin(d))
                k2 = min(k + 1, len(p) - 1)
                seg = p[k2] - p[max(k - 1, 0)]
                cosang = abs(seg @ tang) / (np.linalg.norm(seg) * np.linalg.norm(tang) + 1e-300)
                if cosang > 0.9:
                    drop |= near
        pieces = []
        start = 0
        for i in range(len(p)):
            if drop[i]:
                if i > start + 1:
                    pieces.append(p[start:i])
                start = i + 1
        if len(p) > start + 1:
            pieces.append(p[start:])
        for piece in pieces:
            if len(piece) < 2:
                continue
            d = "M " + " L ".join(f"{_fmt(q[0])} {_fmt(-q[1])}" for q in piece)
            parts.append(f'<path d="{d}" fill="none" stroke="{stroke}" '
                         f'stroke-width="{_fmt(sw)}"/>')
    for _, pt, updown in front.cusps():
        cls = "cusp-up" if updown > 0 else "cusp-down"
        parts.append(f'<circle class="cusp {cls}" cx="{_fmt(pt[0])}" '
                     f'cy="{_fmt(-pt[1])}" r="{_fmt(0.015 * span)}" '
                     f'fill="#c33"/>')
    parts.append("</svg>")
    return "\n".join(parts)
