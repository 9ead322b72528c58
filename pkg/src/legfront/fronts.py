"""Front builders: unknots, stadium fronts, zig-zag fronts, random corpora.

The random closed fronts are stadium unknots decorated with zig-zag bumps
and kinks; on request they carry prepared sites for the R2 move (a tall
zig-zag bump whose upper cusp sits just below the opposite strand) and the
R3 move (a deep kink whose dip crosses the opposite strand, so its own
crossing and the two strand crossings form a triangle).
"""

from __future__ import annotations

import numpy as np

from . import zigzags
from .front_diagram import (FrontArc, FrontDiagram, FlowSite, GraftSite,
                            apply_move, validate_front)

__all__ = [
    "stadium_front",
    "unknot_front",
    "zigzag_front",
    "shear_front",
    "scale_front",
    "random_closed_front",
    "RandomFront",
]


def _cap_arc(w: float, rx: float, h: float, n: int):
    """Quarter-cap samples with a C^3 flat junction and a semicubical cusp.

    x = w + rx * (3 th - th^3)/2 and z = h * (1 - 15 th^4 + 24 th^5 - 10 th^6)
    over th in [0, 1]: z is flat to third order at th = 0 (so caps join flat
    strands without curvature jumps) and behaves like (1 - th)^3 at the cusp,
    which together with the quadratic x-fold is exactly semicubical.
    """
    th = np.linspace(0.0, 1.0, n)
    x = w + rx * (3.0 * th - th**3) / 2.0
    z = h * (1.0 - 15.0 * th**4 + 24.0 * th**5 - 10.0 * th**6)
    y = -(h / rx) * 40.0 * th**3 * (1.0 - th) / (1.0 + th)
    return x, z, y


def stadium_front(w: float = 5.0, rx: float = 1.2, h: float = 1.0,
                  n: int = 600) -> FrontDiagram:
    """Closed two-cusp unknot front with flat top/bottom strands of width 2w.

    With w = 0 this degenerates to the round two-cusp 'eye' front
    (the flying-saucer slice).
    """
    n_cap = max(n // 4, 48)
    cx, cz, cy = _cap_arc(w, rx, h, n_cap)

    if w > 0:
        # flat spacing matched to the cap's junction speed (1.5 rx / n_cap)
        dx_cap = 1.5 * rx / (n_cap - 1)
        n_flat = max(int(np.ceil(2.0 * w / dx_cap)), 4)
        fx = np.linspace(-w, w, n_flat, endpoint=False)
        top_x = np.concatenate([-cx[::-1][:-1], fx, cx])
        top_z = np.concatenate([cz[::-1][:-1], np.full(n_flat, h), cz])
        top_y = np.concatenate([-cy[::-1][:-1], np.zeros(n_flat), cy])
    else:
        top_x = np.concatenate([-cx[::-1][:-1], cx])
        top_z = np.concatenate([cz[::-1][:-1], cz])
        top_y = np.concatenate([-cy[::-1][:-1], cy])
    top = FrontArc(points=np.column_stack([top_x, top_z]), slopes=top_y)
    bottom = FrontArc(points=np.column_stack([top_x, -top_z]), slopes=-top_y)
    return FrontDiagram(arcs=[top, bottom], orientation=[(0, 1), (1, -1)],
                        closed=True)


def unknot_front(rx: float = 1.0, h: float = 1.0, n: int = 600) -> FrontDiagram:
    """The standard two-cusp unknot front (round stadium)."""
    return stadium_front(w=0.0, rx=rx, h=h, n=n)


def zigzag_front(a: float = 1.0, n: int = 2001) -> FrontDiagram:
    """The canonical zig-zag Z_a as an open planar front with exact slopes."""
    curve = zigzags.canonical_zigzag_lift(a, n)
    x = curve.points[:, 0]
    y = curve.points[:, 1]
    z = curve.points[:, 2]
    dx = np.diff(x)
    breaks = [0] + [i for i in range(1, len(dx)) if dx[i] * dx[i - 1] < 0] \
        + [len(x) - 1]
    arcs, orientation = [], []
    for k in range(len(breaks) - 1):
        i0, i1 = breaks[k], breaks[k + 1]
        arcs.append(FrontArc(points=np.column_stack([x[i0:i1 + 1], z[i0:i1 + 1]]),
                             slopes=y[i0:i1 + 1].copy()))
        orientation.append((k, 1))
    return FrontDiagram(arcs=arcs, orientation=orientation, closed=False)


def shear_front(front: FrontDiagram, a: float, b: float = 0.0) -> FrontDiagram:
    """Apply the validity-preserving shear (x, z) -> (x, z + a x + b x^2)."""
    arcs = []
    for arc in front.arcs:
        x = arc.points[:, 0]
        z = arc.points[:, 1] + a * x + b * x * x
        s = None if arc.slopes is None else arc.slopes + a + 2.0 * b * x
        arcs.append(FrontArc(points=np.column_stack([x, z]), slopes=s))
    return FrontDiagram(arcs=arcs, orientation=list(front.orientation),
                        closed=front.closed,
                        declared_crossings=list(front.declared_crossings))


def scale_front(front: FrontDiagram, c: float, shift=(0.0, 0.0)) -> FrontDiagram:
    """Uniform scaling plus translation (slopes are preserved by scaling)."""
    arcs = []
    for arc in front.arcs:
        pts = arc.points * c + np.asarray(shift, dtype=float)
        s = None if arc.slopes is None else arc.slopes.copy()
        arcs.append(FrontArc(points=pts, slopes=s))
    return FrontDiagram(arcs=arcs, orientation=list(front.orientation),
                        closed=front.closed,
                        declared_crossings=list(front.declared_crossings))


# --- randomized corpus --------------------------------------------------------

# geometry of the bump/kink models needed for site planning
_ZIG_TOP = zigzags.RAW_ACTION                        # bump climb height
_ZIG_CUSP_H = zigzags.RAW_ACTION / 2.0 + 1.09206     # upper cusp height factor
_KINK_X0_DEPTH = 4.2764                              # crossing depth factor
_KINK_DIP_DEPTH = 7.2767                             # dip depth factor


class RandomFront:
    """A random closed front plus prepared, verified move sites."""

    def __init__(self, front, r1_site, stab_site, r2_site, r3_site):
        self.front = front
        self.r1_site = r1_site
        self.stab_site = stab_site
        self.r2_site = r2_site
        self.r3_site = r3_site


def _cusp_index_near(front: FrontDiagram, point, tol: float):
    best, best_d = None, np.inf
    for k, (_, pt, _) in enumerate(front.cusps()):
        d = float(np.hypot(pt[0] - point[0], pt[1] - point[1]))
        if d < best_d:
            best, best_d = k, d
    if best is None or best_d > tol:
        raise ValueError("expected cusp not found near the gadget site")
    return best


def _strand_arc_at(front: FrontDiagram, x: float, halfwidth: float,
                   prefer: str) -> int:
    """Arc id of the top/bottom strand spanning [x - halfwidth, x + halfwidth]."""
    best, best_z = None, None
    for a_id, arc in enumerate(front.arcs):
        xs = arc.points[:, 0]
        if min(xs[0], xs[-1]) < x - halfwidth and x + halfwidth < max(xs[0], xs[-1]):
            k = int(np.argmin(np.abs(xs - x)))
            z = arc.points[k, 1]
            if best is None or (z > best_z if prefer == "top" else z < best_z):
                best, best_z = a_id, z
    if best is None:
        raise ValueError(f"no strand arc spans x = {x:.4g}")
    return best


def random_closed_front(rng: np.random.Generator, with_gadgets: bool = True):
    """A randomized valid closed front with prepared move sites.

    Returns a :class:`RandomFront`; all sites have been planned but no move
    has been applied yet.
    """
    w0 = 8.0 + 2.0 * rng.random()
    rx0 = 1.0 + 0.5 * rng.random()
    front = stadium_front(w=w0, rx=rx0, h=1.0, n=900)
    front = shear_front(front, a=0.12 * (rng.random() - 0.5),
                        b=0.01 * (rng.random() - 0.5))
    c = 0.7 + 0.6 * rng.random()
    shift = (2.0 * (rng.random() - 0.5), 2.0 * (rng.random() - 0.5))
    front = scale_front(front, c, shift=shift)
    w, h = w0 * c, c
    xc = shift[0]

    # lay out disjoint x-slots sized for each gadget's footprint
    lam2 = 0.25 * h
    lam3 = 2.0 * h / 5.5
    widths = {"r2": 2.6 * h, "r3": 5.8 * lam3, "deco": 1.6 * h,
              "r1": 0.9 * h, "stab": 0.9 * h}
    order = list(widths)
    rng.shuffle(order)
    total = sum(widths.values()) + 0.4 * h * (len(order) + 1)
    cursor = xc - total / 2.0
    slot = {}
    for name in order:
        cursor += 0.4 * h
        slot[name] = cursor + widths[name] / 2.0
        cursor += widths[name]

    # a decorative graft pointing away from the interior
    if rng.integers(0, 2):
        lam = 0.05 * h * (0.5 + rng.random())
        arc = _strand_arc_at(front, slot["deco"], 0.5 * h, "bottom")
        front = apply_move(front, "Stabilize",
                           GraftSite(arc=arc, x=slot["deco"], scale=lam,
                                     sign=-1)).front

    r2_site = r3_site = None
    r2_cusp_pt = None
    if with_gadgets:
        # R2 gadget: a zig-zag bump on the bottom strand whose upper cusp sits
        # just below the smooth dip of a kink hung from the top strand.
        x2 = slot["r2"]
        arc = _strand_arc_at(front, x2, 3.3 * lam2, "bottom")
        front = apply_move(front, "Stabilize",
                           GraftSite(arc=arc, x=x2, scale=lam2, sign=1)).front
        cand = [pt for _, pt, _ in front.cusps()
                if abs(pt[0] - x2) < 2.2 * lam2 + 1e-9]
        r2_cusp_pt = max(cand, key=lambda p: p[1])
        gap = 0.2 * lam2
        xk = float(r2_cusp_pt[0])
        top_arc = _strand_arc_at(front, xk, 1.0 * h, "top")
        tz = front.arcs[top_arc].points[
            int(np.argmin(np.abs(front.arcs[top_arc].points[:, 0] - xk))), 1]
        lam_k = (tz - (r2_cusp_pt[1] + gap)) / _KINK_DIP_DEPTH
        front = apply_move(front, "R1",
                           GraftSite(arc=top_arc, x=xk, scale=lam_k,
                                     sign=1)).front
        push = 1.3 * gap

        # R3 gadget: deep kink from the top strand crossing the bottom strand.
        x3 = slot["r3"]
        arc = _strand_arc_at(front, x3, 2.9 * lam3, "top")
        top_z = front.arcs[arc].points[
            int(np.argmin(np.abs(front.arcs[arc].points[:, 0] - x3))), 1]
        strand = _strand_arc_at(front, x3, 1.2 * lam3, "bottom")
        strand_z = front.arcs[strand].points[
            int(np.argmin(np.abs(front.arcs[strand].points[:, 0] - x3))), 1]
        front = apply_move(front, "R1",
                           GraftSite(arc=arc, x=x3, scale=lam3, sign=1)).front
        x0_z = top_z - _KINK_X0_DEPTH * lam3    # the kink's own crossing height
        lift = (x0_z - strand_z) + 0.35 * lam3
        r3_site = FlowSite(arc=strand, center=(x3, 0.5 * (x0_z + strand_z)),
                           displacement=(0.0, lift), radius=2.8 * lift)

        # cusp indices are only stable now that all grafts are in place
        k2 = _cusp_index_near(front, r2_cusp_pt, 1e-9)
        r2_site = FlowSite(cusp=k2, displacement=(0.0, push),
                           radius=3.0 * push)

    r1_site = GraftSite(arc=_strand_arc_at(front, slot["r1"], 0.45 * h, "top"),
                        x=slot["r1"], scale=0.05 * h, sign=1)
    stab_site = GraftSite(arc=_strand_arc_at(front, slot["stab"], 0.45 * h, "bottom"),
                          x=slot["stab"], scale=0.05 * h, sign=-1)

    report = validate_front(front)
    if not report.ok:
        raise ValueError(f"random front invalid: {report.violations[:2]}")
    return RandomFront(front=front, r1_site=r1_site, stab_site=stab_site,
                       r2_site=r2_site, r3_site=r3_site)
