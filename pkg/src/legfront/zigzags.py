"""Model zig-zags: the psi_delta family and the canonical cut-off zig-zag.

``psi_delta(t) = (t^3 - 3 delta t, int_0^t (s^2 - delta)^2 ds)`` is the model
interpolating zig-zag; its exact Legendrian lift has slope
``y = (t^2 - delta)/3`` and, for ``delta > 0``, a single Reeb chord joining
the parameters ``t = +-sqrt(3 delta)`` of length ``(8 sqrt 3 / 5) delta^{5/2}``.

The canonical cut-off zig-zag (used by loose charts) is a different closed
form with the same cusp structure but

* deep cusps (cusp depth ~0.92 of the half-chord), keeping the cut-off model's
  total height close to half its action, and
* an upper branch that continues past the chord as a slightly sheared copy of
  the lower branch, so every cross-section gap exceeds the chord gap and the
  model has exactly one Reeb chord,

then bends to horizontal tails.  All pieces are closed-form polynomials in
the curve parameter (plus one inverse-cubic expressed through arccos).
"""

from __future__ import annotations

import numpy as np

from .contact_core import R3_STD, SampledLegendrian

__all__ = [
    "model_zigzag",
    "psi_point",
    "psi_slope",
    "psi_lift_curve",
    "psi_chord_parameter",
    "psi_action",
    "RAW_ACTION",
    "RAW_TAIL_HEIGHT",
    "RAW_X_END",
    "canonical_profile",
    "canonical_zigzag_lift",
    "canonical_zigzag_extents",
    "zigzag_core_bump",
    "smoothstep",
    "smoothstep_integral",
]


# --- the psi_delta family ---------------------------------------------------

def model_zigzag(delta: float, t):
    """Evaluate the model zig-zag ``psi_delta`` and its derivative at ``t``.

    Returns ``((x, z), (dx, dz))``; both are exact closed forms.  For
    ``delta > 0`` the velocity vanishes exactly at ``t = +-sqrt(delta)``
    (the two semicubical cusps); ``delta = 0`` is the embryo moment.
    """
    t = np.asarray(t, dtype=float)
    x = t**3 - 3.0 * delta * t
    z = t**5 / 5.0 - (2.0 * delta / 3.0) * t**3 + delta**2 * t
    dx = 3.0 * (t**2 - delta)
    dz = (t**2 - delta) ** 2
    return (x, z), (dx, dz)


def psi_point(delta: float, t):
    """Front point of psi_delta at parameter t."""
    return model_zigzag(delta, t)[0]


def psi_slope(delta: float, t):
    """Exact front slope dz/dx = (t^2 - delta)/3 of psi_delta."""
    t = np.asarray(t, dtype=float)
    return (t**2 - delta) / 3.0


def psi_chord_parameter(delta: float) -> float:
    """The Reeb chord of the psi_delta lift joins t = +-sqrt(3 delta)."""
    return float(np.sqrt(3.0 * delta))


def psi_action(delta: float) -> float:
    """Chord length of the psi_delta lift: (8 sqrt 3 / 5) delta^{5/2}."""
    return float(8.0 * np.sqrt(3.0) / 5.0 * delta**2.5)


def psi_lift_curve(delta: float, t_grid) -> SampledLegendrian:
    """Exact Legendrian lift of psi_delta sampled at ``t_grid``."""
    t = np.asarray(t_grid, dtype=float)
    (x, z), _ = model_zigzag(delta, t)
    y = psi_slope(delta, t)
    return SampledLegendrian(model=R3_STD, params=t, points=np.column_stack([x, y, z]))


# --- quintic blending helpers ----------------------------------------------

def smoothstep(u):
    """Quintic smoothstep: 0 -> 1 on [0, 1] with vanishing first derivatives."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    return u**3 * (10.0 - 15.0 * u + 6.0 * u**2)


def smoothstep_integral(u):
    """Antiderivative of smoothstep with value 0 at u = 0."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    return 2.5 * u**4 - 3.0 * u**5 + u**6


# --- the canonical cut-off zig-zag ------------------------------------------
#
# Core profile on |t| <= sqrt(3):
#   x(t) = t^3 - 3t
#   y(t) = (t^2 - 1)(3 - t^2)^2 / 12
#   z(t) = (1/4) [ t^9/9 - 8 t^7/7 + 22 t^5/5 - 8 t^3 + 9 t ]
# with z' = y x' exactly.  Cusps at t = +-1; the single chord joins
# t = +-sqrt(3) at x = 0 with horizontal chord slope.  The upper branch then
# continues as a copy of the lower branch sheared upward by eta*x^2 (keeping
# the cross-section gap strictly above the chord gap), fades its slope to the
# pure shear value near x = 2, bends to horizontal and runs out as a tail.

_ETA = 0.012        # quadratic shear separating the extended upper branch
_FADE_WIDTH = 0.08  # parameter width of the slope fade before the branch end
_DROP_WIDTH = 0.25  # x-width of the final bend from slope 4*eta to 0
_X_TAIL_END = 3.0   # tails reach |x| = _X_TAIL_END

_SQRT3 = float(np.sqrt(3.0))

_POLY = np.polynomial.Polynomial
_X_POLY = _POLY([0.0, -3.0, 0.0, 1.0])                       # t^3 - 3t
_XDOT_POLY = _X_POLY.deriv()
_Y_POLY = _POLY([-9.0, 0.0, 15.0, 0.0, -7.0, 0.0, 1.0]) / 12.0
_Z_POLY = (_Y_POLY * _XDOT_POLY).integ()                     # z(0) = 0

# slope fade W: 1 at tau = -1 - _FADE_WIDTH, 0 at tau = -1, flat ends.
# All fade polynomials are built in the shifted variable v = tau + 1 so they
# stay well conditioned at the branch end.
_SS_POLY = _POLY([0.0, 0.0, 0.0, 10.0, -15.0, 6.0])
_V_SHIFT = _POLY([-1.0, 1.0])                                # tau = -1 + v
_W_OF_V = _SS_POLY(_POLY([0.0, -1.0 / _FADE_WIDTH]))         # SS(-v / w)
_TAU_FADE = -1.0 - _FADE_WIDTH
_ZFADE_OF_V = (_Y_POLY(_V_SHIFT) * _W_OF_V * _XDOT_POLY(_V_SHIFT)).integ()


def _core_x(t):
    return _X_POLY(np.asarray(t, dtype=float))


def _core_y(t):
    return _Y_POLY(np.asarray(t, dtype=float))


def _core_z(t):
    return _Z_POLY(np.asarray(t, dtype=float))


_CUSP_DEPTH = float(_core_z(1.0))          # ~1.09206
RAW_ACTION = float(2.0 * _core_z(_SQRT3))  # ~2.37538
RAW_X_END = _X_TAIL_END


def _ext_y(tau):
    """Upper-branch slope over the lower-branch parameter tau in [-sqrt3, -1]."""
    tau = np.asarray(tau, dtype=float)
    x = _X_POLY(tau)
    y = np.where(tau <= _TAU_FADE, _Y_POLY(tau),
                 _Y_POLY(tau) * _W_OF_V(tau + 1.0))
    return y + _ETA * x * x


def _ext_z(tau):
    """Upper-branch height; exact antiderivative of _ext_y along x."""
    tau = np.asarray(tau, dtype=float)
    x = _X_POLY(tau)
    shear = _ETA * x**3 / 3.0
    plain = _Z_POLY(tau)
    faded = (_Z_POLY(_TAU_FADE)
             + _ZFADE_OF_V(tau + 1.0) - _ZFADE_OF_V(_TAU_FADE + 1.0))
    base = np.where(tau <= _TAU_FADE, plain, faded)
    return base + RAW_ACTION + shear


_Z_DROP_START = float(_ext_z(-1.0))
_DROP_SLOPE = 4.0 * _ETA                    # _ext_y(-1) = eta * x(-1)^2
RAW_TAIL_HEIGHT = float(_Z_DROP_START + 0.5 * _DROP_SLOPE * _DROP_WIDTH)


# parameter layout:  core |s| <= sqrt3 is the psi-like zig-zag (cusps at +-1);
# the upper-branch extension reuses the lower-branch parameter (polynomial,
# x from 0 to 2 with a smooth slowdown at x = 2), then a quadratic-ramp slope
# drop and a linear horizontal tail.  Every piece junction matches the
# parameter speed, so central-difference lifts stay second order throughout.
_S_EXT_END = 2.0 * _SQRT3 - 1.0
_L_DROP = 0.5
_S_DROP_END = _S_EXT_END + _L_DROP
_V_TAIL = 2.0 * _DROP_WIDTH / _L_DROP
_S_END = _S_DROP_END + (_X_TAIL_END - 2.0 - _DROP_WIDTH) / _V_TAIL


def canonical_profile(s):
    """Raw canonical zig-zag (x, y, z) at curve parameters ``s``.

    The parameter runs over |s| <= _S_END; the zig-zag core is the region
    |s| <= sqrt(3) (cusps at s = +-1), followed by the sheared upper-branch
    extension, the slope bend, and the horizontal tails.  The raw model has
    action RAW_ACTION with a single Reeb chord at x = 0 joining
    s = +-sqrt(3).
    """
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    x = np.empty_like(s)
    y = np.empty_like(s)
    z = np.empty_like(s)

    sign = np.where(s >= 0.0, 1.0, -1.0)
    a = np.abs(s)

    core = a <= _SQRT3
    t = s[core]
    x[core] = _core_x(t)
    y[core] = _core_y(t)
    z[core] = _core_z(t)

    ext = (~core) & (a <= _S_EXT_END)
    tau = a[ext] - 2.0 * _SQRT3            # lower-branch parameter in [-sqrt3, -1]
    x[ext] = sign[ext] * _core_x(tau)
    y[ext] = _ext_y(tau)
    z[ext] = sign[ext] * _ext_z(tau)

    drop = (a > _S_EXT_END) & (a <= _S_DROP_END)
    sigma = (a[drop] - _S_EXT_END) / _L_DROP
    u = sigma**2                            # x ramps quadratically out of the slowdown
    x[drop] = sign[drop] * (2.0 + _DROP_WIDTH * u)
    y[drop] = _DROP_SLOPE * (1.0 - smoothstep(u))
    z[drop] = sign[drop] * (_Z_DROP_START
                            + _DROP_SLOPE * _DROP_WIDTH * (u - smoothstep_integral(u)))

    tail = a > _S_DROP_END
    x[tail] = sign[tail] * (2.0 + _DROP_WIDTH + _V_TAIL * (a[tail] - _S_DROP_END))
    y[tail] = 0.0
    z[tail] = sign[tail] * RAW_TAIL_HEIGHT

    if scalar:
        return float(x[0]), float(y[0]), float(z[0])
    return x, y, z


_GRADE = 0.75  # blend weight of the quadratic grading (keeps spacing bounded)


def _graded_piece(a: float, b: float, n: int, g0: bool, g1: bool) -> np.ndarray:
    """n samples of [a, b) with spacing compressed toward flagged endpoints."""
    xi = np.linspace(0.0, 1.0, n, endpoint=False)
    if g0 and g1:
        m = xi * xi / (xi * xi + (1.0 - xi) ** 2)
    elif g0:
        m = xi * xi
    elif g1:
        m = 1.0 - (1.0 - xi) ** 2
    else:
        m = xi
    m = (1.0 - _GRADE) * xi + _GRADE * m
    return a + (b - a) * m


def _canonical_param_grid(n_samples: int) -> np.ndarray:
    """Parameter grid hitting the cusps (s = +-1) and piece junctions exactly.

    Sampling is graded toward the cusps and the branch-extension slowdowns,
    where the parametrization speed vanishes.
    """
    s_end = _S_END
    knots = [
        (-s_end, -_S_DROP_END, False, False),
        (-_S_DROP_END, -_S_EXT_END, False, True),
        (-_S_EXT_END, -_SQRT3, True, False),
        (-_SQRT3, -1.0, False, True),
        (-1.0, 0.0, True, False),
        (0.0, 1.0, False, True),
        (1.0, _SQRT3, True, False),
        (_SQRT3, _S_EXT_END, False, True),
        (_S_EXT_END, _S_DROP_END, True, False),
        (_S_DROP_END, s_end, False, False),
    ]
    lengths = np.array([b - a for a, b, _, _ in knots])
    counts = np.maximum(3, np.round(lengths / lengths.sum() * n_samples).astype(int))
    pieces = [_graded_piece(a, b, c, g0, g1)
              for (a, b, g0, g1), c in zip(knots, counts)]
    return np.concatenate(pieces + [[s_end]])


def canonical_zigzag_lift(a: float, n_samples: int = 4001,
                          z_scale: float = 1.0) -> SampledLegendrian:
    """The canonical zig-zag Z_a as an exact sampled Legendrian in R3Std.

    Z_a is the contact scaling ``phi_c`` with ``c = sqrt(a / RAW_ACTION)`` of
    the raw model, so its single minimal Reeb chord has length exactly ``a``.
    ``z_scale`` applies the additional action-linear scaling
    (x, y, z) -> (x, h y, h z) used when squeezing charts (it multiplies the
    action by h and leaves x alone).
    """
    if a <= 0:
        raise ValueError("zig-zag action must be positive")
    s = _canonical_param_grid(n_samples)
    x, y, z = canonical_profile(s)
    c = np.sqrt(a / RAW_ACTION)
    pts = np.column_stack([c * x, c * y * z_scale, c * c * z * z_scale])
    return SampledLegendrian(model=R3_STD, params=s, points=pts)


def canonical_zigzag_extents(a: float, z_scale: float = 1.0):
    """(x, y, z) half-extent-style bounds [(xlo,xhi),(ylo,yhi),(zlo,zhi)] of Z_a."""
    c = float(np.sqrt(a / RAW_ACTION))
    s = _canonical_param_grid(2001)
    x, y, z = canonical_profile(s)
    return [
        (c * float(x.min()), c * float(x.max())),
        (c * z_scale * float(y.min()), c * z_scale * float(y.max())),
        (c * c * z_scale * float(z.min()), c * c * z_scale * float(z.max())),
    ]


def zigzag_core_bump(n_samples: int = 481, graded: bool = True):
    """The pure zig-zag core as a climb bump for grafts and elevators.

    Returns ``(x, z, y, cusp_indices, s)`` sampled over the core
    |s| <= sqrt(3) shifted so it starts at (0, 0) with slope 0 and ends at
    (0, RAW_ACTION) with slope 0.  Both endpoint slopes vanish exactly, so
    the bump can ride any smooth strand.  Graded sampling compresses
    quadratically toward the cusps, where lifts are finite-difference
    limited.
    """
    m = max(n_samples // 4, 6)
    if graded:
        def quad(a, b, n, toward_end):
            xi = np.linspace(0.0, 1.0, n, endpoint=False)
            mm = 1.0 - (1.0 - xi) ** 2 if toward_end else xi**2
            return a + (b - a) * mm

        s = np.concatenate([
            quad(-_SQRT3, -1.0, m, True),
            quad(-1.0, 0.0, m, False),
            quad(0.0, 1.0, m, True),
            quad(1.0, _SQRT3, max(n_samples - 3 * m - 1, 4), False),
            [_SQRT3],
        ])
        s = np.unique(s)
    else:
        s = np.concatenate([
            np.linspace(-_SQRT3, -1.0, m, endpoint=False),
            np.linspace(-1.0, 1.0, 2 * m, endpoint=False),
            np.linspace(1.0, _SQRT3, max(n_samples - 3 * m, 4)),
        ])
    x = _core_x(s)
    y = _core_y(s)
    z = _core_z(s) + RAW_ACTION / 2.0
    cusps = [int(np.argmin(np.abs(s + 1.0))), int(np.argmin(np.abs(s - 1.0)))]
    return x, z, y, cusps, s
