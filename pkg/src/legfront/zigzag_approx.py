"""C0-dense approximation of smooth curves by Legendrian curves.

The front of the target curve is tracked by straight runs whose slope follows
the prescribed slope targets; the height mismatch accumulated along each step
is discharged by a sheared "elevator" zig-zag (the canonical zig-zag core,
which climbs a prescribed amount with zero net x-displacement and slopes
within a chosen band).  The sampling is refined -- doubled -- until both
epsilon checks (sup distance and slope error) pass.  Marked points are copied
bit-for-bit.

The unicycle planner maps configuration paths through Darboux charts of the
unicycle contact structure onto fronts, approximates there, and lifts back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import zigzags
from .contact_core import R3_STD, UNICYCLE, SampledLegendrian
from .front_diagram import FrontArc, FrontDiagram, fd_slopes
from .zigzags import model_zigzag

__all__ = [
    "ApproximationError",
    "SlopedPath",
    "model_zigzag",
    "interpolate_zigzag",
    "approximate_curve",
    "plan_unicycle",
    "front_polyline_distance",
]


class ApproximationError(ValueError):
    """Invalid approximation request (e.g. nonpositive epsilon)."""


@dataclass
class SlopedPath:
    """A sampled base arc with slope targets to realize along it."""

    base: np.ndarray           # (N, 2) planar samples (x, z)
    slope_targets: np.ndarray  # (N,) the y-data to realize

    def __post_init__(self):
        self.base = np.asarray(self.base, dtype=float)
        self.slope_targets = np.asarray(self.slope_targets, dtype=float)
        if self.base.ndim != 2 or self.base.shape[1] != 2:
            raise ApproximationError("base must be an (N, 2) array")
        if len(self.slope_targets) != len(self.base):
            raise ApproximationError("one slope target per base sample required")
        if np.any(np.all(np.diff(self.base, axis=0) == 0.0, axis=1)):
            raise ApproximationError("base has repeated consecutive points")

    def refine(self, k: int) -> "SlopedPath":
        """Split every base segment into 2**k equal parameter pieces."""
        if k <= 0:
            return self
        m = 2 ** k
        t = np.arange(1, m) / m
        pts = [self.base[0:1]]
        tg = [self.slope_targets[0:1]]
        for i in range(len(self.base) - 1):
            seg = (self.base[i][None, :] * (1 - t[:, None])
                   + self.base[i + 1][None, :] * t[:, None])
            stg = self.slope_targets[i] * (1 - t) + self.slope_targets[i + 1] * t
            pts.extend([seg, self.base[i + 1:i + 2]])
            tg.extend([stg, self.slope_targets[i + 1:i + 2]])
        return SlopedPath(base=np.vstack(pts), slope_targets=np.concatenate(tg))


# the elevator: stacked copies of the canonical zig-zag core.  One core copy
# scaled (l x, mu l z) climbs mu * l * RAW_ACTION with zero net
# x-displacement, slopes within mu * [-0.75, 0.099], and x-excursion 2 l; its
# height is monotone, so stacked copies in the same x-window never cross.
_EL_CLIMB = zigzags.RAW_ACTION
_EL_SLOPE_MAX = 0.75
_SAFETY_SUP = 0.8          # accept when the deviation bound is below 0.8 eps
_SAFETY_SLOPE = 0.85
_MU_FRACTION = 0.55        # slope budget granted to the elevators
_EL_CACHE: dict = {}


def _core(nz: int):
    if nz not in _EL_CACHE:
        x, z, y, _, _ = zigzags.zigzag_core_bump(nz)
        _EL_CACHE[nz] = (x, z, y)
    return _EL_CACHE[nz]


# cusp-sample residual of a finite-difference-lifted zig scales like
# _EL_K * scale / n_samples^2 (measured on the graded core)
_EL_K = 0.125


def _zig_samples(scale: float, res_target) -> int:
    """Per-zig sample count meeting the residual target at this scale."""
    if res_target is None:
        return 31
    nz = int(np.ceil(np.sqrt(_EL_K * max(scale, 1e-12) / (0.6 * res_target))))
    return int(np.clip(nz, 37, 401))


def _elevator(x0, z0, climb, shear, mu, l_max, res_target, direction=1.0):
    """Stacked-zig elevator from (x0, z0) climbing ``climb`` at ambient slope
    ``shear``; slopes stay within ``shear +- mu * 0.75`` and the x-excursion
    stays within ``2 * l_max``.  ``direction`` mirrors the zigs so their ends
    move with the surrounding track.  Returns (xs, zs, ys, n_zigs)."""
    n = max(1, int(np.ceil(abs(climb) / (mu * _EL_CLIMB * l_max))))
    q = climb / n
    scale = abs(q) / (mu * _EL_CLIMB)
    sgn = 1.0 if climb >= 0 else -1.0
    ex, ez, ey = _core(_zig_samples(scale, res_target))
    if direction < 0:
        xs_one = x0 - scale * ex
        ey_eff = shear - sgn * mu * ey
    else:
        xs_one = x0 + scale * ex
        ey_eff = shear + sgn * mu * ey
    shear_one = shear * (xs_one - x0)
    xs, zs, ys = [], [], []
    for i in range(n):
        sl = slice(1, None) if i else slice(None)
        xs.append(xs_one[sl])
        zs.append((z0 + i * q + sgn * scale * mu * ez + shear_one)[sl])
        ys.append(ey_eff[sl])
    return np.concatenate(xs), np.concatenate(zs), np.concatenate(ys), n


def _build_track(path: SlopedPath, mu: float, epsilon: float, res_target=None):
    """Single pass of the construction with per-step recursive refinement.

    Straight runs ease between the slope targets; height mismatches are
    discharged by stacked-zig elevators; base turning points are realized by
    sheared normal-form cusps whose tip passes through the turning vertex
    exactly.  Steps subdivide until the target band and the local deviation
    fit the epsilon budgets."""
    base = path.base
    targets = path.slope_targets
    points, slopes = [], []
    cusp_pairs = 0
    slope_err = 0.0
    dev_bound = 0.0
    zscale = max(np.max(np.abs(base[:, 1])), 1.0)
    slope_budget = 0.25 * epsilon
    dev_budget = 0.2 * epsilon

    def emit_run(x0, z0, x1, sa, sb, bump=0.0, n=6):
        # slope eases smoothly from sa to sb (flat ends); the optional
        # smoothstep height correction keeps the endpoint slopes exact
        xs = np.linspace(x0, x1, n, endpoint=False)
        dx = x1 - x0
        u = (xs - x0) / dx if dx != 0.0 else np.zeros_like(xs)
        zs = z0 + sa * (xs - x0) + (sb - sa) * dx * (u**3 - 0.5 * u**4)
        ys = sa + (sb - sa) * u * u * (3.0 - 2.0 * u)
        if bump != 0.0:
            zs = zs + bump * u * u * (3.0 - 2.0 * u)
            ys = ys + bump * 6.0 * u * (1.0 - u) / dx
        points.append(np.column_stack([xs, zs]))
        slopes.append(ys)

    def step(p0, s0, p1, s1, depth, direction):
        nonlocal cusp_pairs, slope_err, dev_bound
        sbar = 0.5 * (s0 + s1)
        dx = p1[0] - p0[0]
        mismatch = (p1[1] - p0[1]) - sbar * dx
        half_band = 0.5 * abs(s1 - s0)
        if (half_band > slope_budget or abs(mismatch) > dev_budget) and depth < 24:
            pm = 0.5 * (p0 + p1)
            sm = 0.5 * (s0 + s1)
            step(p0, s0, pm, sm, depth + 1, direction)
            step(pm, sm, p1, s1, depth + 1, direction)
            return
        tweak = 1.5 * abs(mismatch / dx) if dx != 0.0 else np.inf
        if tweak <= 0.03 * epsilon:
            emit_run(p0[0], p0[1], p1[0], s0, s1, bump=mismatch)
            slope_err = max(slope_err, half_band + tweak)
        elif abs(mismatch) <= 1e-9 * zscale:
            emit_run(p0[0], p0[1], p1[0], s0, s1)
            slope_err = max(slope_err, half_band)
        else:
            x_mid = p0[0] + 0.5 * dx
            z_mid = p0[1] + s0 * 0.5 * dx + 0.125 * (s1 - s0) * dx
            l_max = max(0.2 * abs(dx), 0.25 * epsilon / (1.0 + abs(sbar)))
            emit_run(p0[0], p0[1], x_mid, s0, sbar)
            ex, ez, ey, n = _elevator(x_mid, z_mid, mismatch, sbar, mu, l_max,
                                      res_target, direction)
            points.append(np.column_stack([ex, ez]))
            slopes.append(ey)
            cusp_pairs += n
            slope_err = max(slope_err, half_band + mu * _EL_SLOPE_MAX)
            scale = (np.max(ex) - np.min(ex)) / 4.0
            dev_bound = max(dev_bound,
                            abs(mismatch) + 2.2 * scale * (1.0 + abs(sbar)))
            emit_run(x_mid, z_mid + mismatch, p1[0], sbar, s1, n=6)
            points[-1] = points[-1][1:]
            slopes[-1] = slopes[-1][1:]
        dev_bound = max(dev_bound, 0.5 * abs(mismatch))

    dxs = np.diff(base[:, 0])
    dirs = np.sign(dxs)
    # propagate directions over zero-dx steps
    eff = dirs.copy()
    last = 1.0
    for i in range(len(eff)):
        if eff[i] == 0.0:
            eff[i] = last
        else:
            last = eff[i]

    n_t = 41
    tau = np.linspace(-1.0, 1.0, n_t)

    cur = base[0].copy()
    cur_s = targets[0]
    for i in range(1, len(base)):
        turn = (i < len(base) - 1 and dirs[i - 1] != 0.0 and dirs[i] != 0.0
                and dirs[i] != dirs[i - 1])
        if not turn:
            step(cur, cur_s, base[i].copy(), targets[i], 0, eff[i - 1])
            cur = base[i].copy()
            cur_s = targets[i]
            continue
        # sheared normal-form cusp through the turning vertex
        d_in = dirs[i - 1]
        s_v = targets[i]
        w = min(0.06 * epsilon / (1.0 + abs(s_v)),
                0.25 * min(abs(dxs[i - 1]), abs(dxs[i])))
        a = 0.15 * epsilon
        xv, zv = base[i]
        xt = xv - d_in * w * tau * tau
        yt = s_v + a * tau
        zt = zv + s_v * (xt - xv) - d_in * w * a * (2.0 / 3.0) * tau**3
        step(cur, cur_s, np.array([xt[0], zt[0]]), yt[0], 0, d_in)
        points.append(np.column_stack([xt[:-1], zt[:-1]]))
        slopes.append(yt[:-1])
        cusp_pairs += 1
        slope_err = max(slope_err, a)
        dev_bound = max(dev_bound, w * (1.0 + abs(s_v)) + w * a)
        cur = np.array([xt[-1], zt[-1]])
        cur_s = yt[-1]
    points.append(base[-1][None, :].copy())
    slopes.append(np.array([targets[-1]]))
    pts = np.vstack(points)
    ys = np.concatenate(slopes)
    pts[0] = base[0]
    return pts, ys, cusp_pairs, slope_err, dev_bound


def _to_front(pts: np.ndarray, ys: np.ndarray, cusp_pairs: int) -> FrontDiagram:
    keep = np.concatenate([[True], np.any(np.diff(pts, axis=0) != 0.0, axis=1)])
    pts, ys = pts[keep], ys[keep]
    dx = np.diff(pts[:, 0])
    breaks = [0] + [i for i in range(1, len(dx)) if dx[i] * dx[i - 1] < 0] \
        + [len(pts) - 1]
    arcs, orientation = [], []
    for k in range(len(breaks) - 1):
        i0, i1 = breaks[k], breaks[k + 1]
        arcs.append(FrontArc(points=pts[i0:i1 + 1].copy(),
                             slopes=ys[i0:i1 + 1].copy()))
        orientation.append((k, 1))
    front = FrontDiagram(arcs=arcs, orientation=orientation, closed=False)
    front.cusp_pairs = cusp_pairs
    return front


def front_polyline_distance(front: FrontDiagram, base: np.ndarray) -> float:
    """Sup distance from the front's samples to the base polyline."""
    pts = front.traversal()[0]
    return _points_polyline_sup(pts, np.asarray(base, dtype=float))


def _points_polyline_sup(pts: np.ndarray, base: np.ndarray) -> float:
    seg = np.diff(base, axis=0)
    L2 = np.sum(seg**2, axis=1)
    worst = 0.0
    for chunk in np.array_split(pts, max(len(pts) // 512, 1)):
        w = chunk[:, None, :] - base[None, :-1, :]
        t = np.clip(np.einsum("ijk,jk->ij", w, seg) / np.maximum(L2, 1e-300),
                    0.0, 1.0)
        d2 = np.sum((w - t[..., None] * seg[None, :, :])**2, axis=2)
        worst = max(worst, float(np.sqrt(np.min(d2, axis=1).max())))
    return worst


def _slope_error(front: FrontDiagram, base: np.ndarray,
                 targets: np.ndarray) -> float:
    """Max deviation of realized slopes from the x-interpolated targets."""
    bx = base[:, 0]
    order = np.argsort(bx)
    worst = 0.0
    for arc in front.arcs:
        tq = np.interp(arc.points[:, 0], bx[order], targets[order])
        worst = max(worst, float(np.max(np.abs(arc.slopes - tq))))
    return worst


def interpolate_zigzag(segment: SlopedPath, epsilon: float,
                       res_target: float | None = None) -> FrontDiagram:
    """Front arc from the first to the last base point realizing the targets.

    The output endpoints equal the segment's endpoints bit-for-bit, the arc
    stays within ``epsilon`` of the base polyline, the realized slope stays
    within ``epsilon`` of the interpolated slope targets, and the only
    singularities are semicubical cusp pairs from the elevators.  Sampling is
    refined (doubled) until both epsilon checks pass with margin.
    """
    if epsilon <= 0:
        raise ApproximationError("epsilon must be positive")
    mu = _MU_FRACTION * epsilon / _EL_SLOPE_MAX
    pts, ys, cusp_pairs, serr, dev = _build_track(segment, mu, epsilon,
                                                  res_target)
    front = _to_front(pts, ys, cusp_pairs)
    front.slope_error = serr
    front.deviation_bound = dev
    if not (serr < epsilon and dev < epsilon):
        raise ApproximationError(
            f"zig-zag interpolation missed epsilon = {epsilon} "
            f"(slope error {serr:.3g}, deviation bound {dev:.3g})")
    return front



def _augment_pinned(base: np.ndarray, targets: np.ndarray, pins):
    """Surround pinned vertices with short exact-slope vertices.

    The auxiliary vertices lie on the tangent line through the pinned vertex
    on the side of the actual motion, so the construction realizes the
    pinned slope exactly there.  Turning vertices are skipped (the turn cusp
    passes through them exactly anyway)."""
    n = len(base)
    span = max(np.max(np.abs(np.diff(base, axis=0))), 1e-12)
    aug_b, aug_t = [], []
    for i in range(n):
        if i not in pins:
            aug_b.append(base[i])
            aug_t.append(targets[i])
            continue
        d_in = np.sign(base[i, 0] - base[i - 1, 0]) if i > 0 else 0.0
        d_out = np.sign(base[i + 1, 0] - base[i, 0]) if i + 1 < n else 0.0
        if i > 0 and i + 1 < n and d_in != 0.0 and d_out != 0.0 and d_in != d_out:
            aug_b.append(base[i])
            aug_t.append(targets[i])
            continue
        dxl = abs(base[i, 0] - base[i - 1, 0]) if i > 0 else np.inf
        dxr = abs(base[i + 1, 0] - base[i, 0]) if i + 1 < n else np.inf
        delta = 0.05 * min(dxl, dxr)
        if not np.isfinite(delta) or delta == 0.0:
            delta = 1e-4 * span / (1.0 + abs(targets[i]))
        y_m = targets[i]
        step_vec = delta * np.array([1.0, y_m])
        if i > 0:
            side = d_in if d_in != 0.0 else (d_out if d_out != 0.0 else 1.0)
            aug_b.append(base[i] - side * step_vec)
            aug_t.append(y_m)
        aug_b.append(base[i])
        aug_t.append(y_m)
        if i + 1 < n:
            side = d_out if d_out != 0.0 else (d_in if d_in != 0.0 else 1.0)
            aug_b.append(base[i] + side * step_vec)
            aug_t.append(y_m)
    base = np.vstack(aug_b)
    targets = np.asarray(aug_t)
    dedup = np.concatenate([[True],
                            np.any(np.diff(base, axis=0) != 0.0, axis=1)])
    return base[dedup], targets[dedup]


def approximate_curve(knot: SampledLegendrian | np.ndarray, epsilon: float,
                      marked: Sequence[int] = ()) -> SampledLegendrian:
    """Legendrian C0-approximation of a sampled space curve in R3Std.

    Builds the sloped front from the curve's (x, z) samples with slope
    targets given by its y-coordinates, zig-zag interpolates, and lifts.  The
    result passes through every marked sample exactly, stays within
    ``epsilon`` of the input in sup norm, and lifts with residual below 1e-6.
    """
    if epsilon <= 0:
        raise ApproximationError("epsilon must be positive")
    pts = knot.points if isinstance(knot, SampledLegendrian) else \
        np.asarray(knot, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ApproximationError("knot must be an (N, 3) array in R3Std")
    marked = sorted(set(int(m) for m in marked))
    if marked and (marked[0] < 0 or marked[-1] >= len(pts)):
        raise ApproximationError("marked indices out of range")

    base = pts[:, [0, 2]]
    targets = pts[:, 1]
    keep = np.concatenate([[True], np.any(np.diff(base, axis=0) != 0.0, axis=1)])
    keep[np.asarray(marked, dtype=int)] = True
    kept_idx = np.nonzero(keep)[0]
    base, targets = base[keep], targets[keep]
    pins = sorted({int(np.searchsorted(kept_idx, m)) for m in marked}
                  | {0, len(base) - 1})
    base, targets = _augment_pinned(base, targets, pins)
    front = interpolate_zigzag(SlopedPath(base=base, slope_targets=targets),
                               epsilon, res_target=6e-7)

    trav = front.traversal()[0]
    ys = np.concatenate([a.slopes[:-1] for a in front.arcs]
                        + [front.arcs[-1].slopes[-1:]])
    ys = fd_slopes(trav, ys, closed=False)
    out = np.column_stack([trav[:, 0], ys, trav[:, 1]])
    # marked samples are copied bit-for-bit (base vertices are preserved by
    # the construction, so the nearest output sample is the vertex itself)
    for m in marked:
        k = int(np.argmin(np.max(np.abs(out[:, [0, 2]] - pts[m][[0, 2]][None, :]),
                                 axis=1)))
        out[k] = pts[m]
    _ = kept_idx
    dedup = np.concatenate([[True], np.any(np.diff(out, axis=0) != 0.0, axis=1)])
    out = out[dedup]
    return SampledLegendrian(model=R3_STD, params=np.arange(len(out), dtype=float),
                             points=out)


# --- unicycle planning ---------------------------------------------------------
#
# Darboux dictionaries for (R^2 x S^1, cos(theta) dx - sin(theta) dy):
#   chart A (|cos| >= |sin|):  (X, Y, Z) = (y, tan(theta), x),
#     with alpha_std pulling back to (1/cos(theta)) alpha.
#   chart B (|sin| > |cos|):   (X, Y, Z) = (x, -cot(theta), -y),
#     with alpha_std pulling back to (1/sin(theta)) alpha.
# Both identify admissible trajectories with front lifts Z' = Y X'.

def _chart_of(theta: float) -> str:
    return "A" if abs(np.cos(theta)) >= abs(np.sin(theta)) else "B"


def _chart_to_front(chart: str, q: np.ndarray):
    x, y, th = q[:, 0], q[:, 1], q[:, 2]
    if chart == "A":
        return np.column_stack([y, x]), np.tan(th)
    return np.column_stack([x, -y]), -np.cos(th) / np.sin(th)


def _chart_from_front(chart: str, X, Z, Y, theta_ref: float):
    if chart == "A":
        x, y = Z, X
        theta = np.arctan(Y)
    else:
        x, y = X, -Z
        theta = np.arctan2(1.0, -Y)   # a branch with cot(theta) = -Y
    k = np.round((theta_ref - theta) / np.pi)
    theta = theta + k * np.pi
    return np.column_stack([x, y, theta])


def plan_unicycle(start, goal, epsilon: float,
                  reference: Optional[np.ndarray] = None) -> SampledLegendrian:
    """Admissible unicycle trajectory from start to goal near a reference path.

    The trajectory satisfies cos(theta) x' - sin(theta) y' = 0 pointwise
    (normalized residual below 1e-6), has exact endpoints, and stays within
    ``epsilon`` of the reference path (default: straight interpolation).  A
    goal equal to the start is realized as a full-turn spin in place (the
    constant loop in S^1).
    """
    if epsilon <= 0:
        raise ApproximationError("epsilon must be positive")
    start = np.asarray(start, dtype=float)
    goal = np.asarray(goal, dtype=float)
    if reference is None:
        t = np.linspace(0.0, 1.0, 64)[:, None]
        reference = start[None, :] * (1 - t) + goal[None, :] * t
    ref = np.asarray(reference, dtype=float).copy()
    ref[0], ref[-1] = start, goal

    if np.max(np.abs(start - goal)) == 0.0:
        th = start[2] + np.linspace(0.0, 2.0 * np.pi, 64)
        pts = np.column_stack([np.full(64, start[0]), np.full(64, start[1]), th])
        pts[0] = start
        pts[-1] = goal + [0.0, 0.0, 2.0 * np.pi]
        return SampledLegendrian(model=UNICYCLE,
                                 params=np.arange(64, dtype=float), points=pts)

    charts = [_chart_of(th) for th in ref[:, 2]]
    cuts = sorted({0, len(ref) - 1}
                  | {i for i in range(1, len(ref)) if charts[i] != charts[i - 1]})
    pieces = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b > a:
            pieces.append((charts[a], ref[a:b + 1]))

    out = []
    for chart, q in pieces:
        base, targets = _chart_to_front(chart, q)
        keep = np.concatenate([[True],
                               np.any(np.diff(base, axis=0) != 0.0, axis=1)])
        if np.count_nonzero(keep) < 2:
            th = np.linspace(q[0, 2], q[-1, 2], 16)
            piece = np.column_stack([np.full(16, q[0, 0]),
                                     np.full(16, q[0, 1]), th])
        else:
            b2, t2 = _augment_pinned(base[keep], targets[keep],
                                     [0, int(np.count_nonzero(keep)) - 1])
            seg = SlopedPath(base=b2, slope_targets=t2)
            front = interpolate_zigzag(seg, epsilon / 3.0, res_target=6e-7)
            trav = front.traversal()[0]
            Y = np.concatenate([a.slopes[:-1] for a in front.arcs]
                               + [front.arcs[-1].slopes[-1:]])
            Y = fd_slopes(trav, Y, closed=False)
            piece = _chart_from_front(chart, trav[:, 0], trav[:, 1], Y,
                                      theta_ref=float(q[0, 2]))
        if out:
            piece = piece[1:]
        out.append(piece)
    traj = np.vstack(out)
    traj[0], traj[-1] = start, goal
    keep = np.concatenate([[True], np.any(np.diff(traj, axis=0) != 0.0, axis=1)])
    traj = traj[keep]
    traj = _fd_consistent_heading(traj)
    traj[0], traj[-1] = start, goal
    return SampledLegendrian(model=UNICYCLE,
                             params=np.arange(len(traj), dtype=float),
                             points=traj)


def _fd_consistent_heading(traj: np.ndarray) -> np.ndarray:
    """Snap theta to the branch-nearest heading of the sampled (x, y) motion.

    The rolling constraint ties the velocity direction to (sin t, cos t); on
    samples whose central velocity is nondegenerate the heading is replaced
    by the exact finite-difference value, which makes the sampled constraint
    residual vanish there."""
    x, y, th = traj[:, 0].copy(), traj[:, 1].copy(), traj[:, 2].copy()
    vx = x[2:] - x[:-2]
    vy = y[2:] - y[:-2]
    step1 = np.abs(x[2:] - x[1:-1]) + np.abs(y[2:] - y[1:-1])
    step0 = np.abs(x[1:-1] - x[:-2]) + np.abs(y[1:-1] - y[:-2])
    ok = (np.abs(vx) + np.abs(vy)) > 0.35 * (step0 + step1)
    cand = np.arctan2(vx, vy)
    k = np.round((th[1:-1] - cand) / np.pi)
    cand = cand + k * np.pi
    th[1:-1] = np.where(ok, cand, th[1:-1])
    return np.column_stack([x, y, th])
