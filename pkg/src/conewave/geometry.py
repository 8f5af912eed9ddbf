"""Exact Minkowski geometry in radial coordinates.

Conventions used throughout the package:

* metric signature (-, +, ..., +), wave operator  box = -d_tt + Lap;
* a spacetime covector is stored as radial components (w_t, w_r), a vector
  likewise; indices are raised with g^{tt} = -1, g^{rr} = +1;
* "unit" normal means |g(N, N)| = 1 (timelike normals square to -1);
* all regions are open sets, membership on the boundary is False.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "sphere_area",
    "ball_volume",
    "MinkowskiPoint",
    "RaySpec",
    "ShiftedWeight",
    "ConeSpec",
    "AnnulusSpec",
    "SlabSpec",
    "LateralSlabSpec",
    "ConeSegmentSpec",
    "BoxSpec",
    "ExteriorRegionSpec",
    "TimeSlicePiece",
    "CylinderPiece",
    "ConePiece",
    "LevelSetPiece",
    "NullConePiece",
    "AdmissibleRegionSpec",
    "eval_weight",
    "eval_weight_gradient",
    "minkowski_norm_sq",
    "contains",
    "angle_parameter",
    "oriented_normal",
    "measure_density",
    "lateral_boundary",
    "normal_weight_derivative_bounds",
    "covering_check",
    "CoveringResult",
]


def sphere_area(n: int) -> float:
    """Area of the unit (n-1)-sphere; for n = 1 this is 2 (two points)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    return sphere_area(n) / n


@dataclass(frozen=True)
class MinkowskiPoint:
    """A point (t, x) in R x R^n; x is stored as a tuple."""

    t: float
    x: tuple

    def __post_init__(self):
        if len(self.x) < 1:
            raise ValueError("spatial dimension must be >= 1")

    @classmethod
    def radial(cls, t, r, n=1):
        """Point on the positive first axis at radius r."""
        if r < 0:
            raise ValueError("radius must be >= 0")
        return cls(float(t), (float(r),) + (0.0,) * (n - 1))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def r(self) -> float:
        return math.sqrt(sum(c * c for c in self.x))


@dataclass(frozen=True)
class RaySpec:
    """Future timelike ray zeta(t) = (t, t v) from the origin, |v| < 1."""

    velocity: tuple = ()

    @property
    def speed(self) -> float:
        return math.sqrt(sum(c * c for c in self.velocity))

    def __post_init__(self):
        if self.speed >= 1.0:
            raise ValueError("ray velocity must satisfy |v| < 1")

    def position(self, t: float) -> tuple:
        return tuple(t * c for c in self.velocity)

    def inside_cone(self, sigma: float) -> bool:
        return self.speed < sigma

    @property
    def is_axis(self) -> bool:
        return self.speed == 0.0


AXIS_RAY = RaySpec(())


@dataclass(frozen=True)
class ShiftedWeight:
    """The Lorentz square distance from zeta(t_star):

    f_{t*,zeta}(t, x) = 1/4 [ |x - x(zeta(t*))|^2 - (t - t*)^2 ].

    The unshifted weight f = (r^2 - t^2)/4 is the case t* = 0, v = 0.
    """

    t_star: float = 0.0
    ray: RaySpec = AXIS_RAY

    def center(self, n: int) -> np.ndarray:
        c = np.zeros(n)
        v = self.ray.velocity
        c[: len(v)] = np.asarray(v) * self.t_star
        return c

    # Radial fast paths, valid when the ray is the time axis (center at r=0).
    def require_axis(self):
        if not self.ray.is_axis:
            raise ValueError("radial evaluation requires the axis ray")

    def value_radial(self, t, r):
        self.require_axis()
        t = np.asarray(t, dtype=float)
        r = np.asarray(r, dtype=float)
        return 0.25 * (r * r - (t - self.t_star) ** 2)

    def grad_radial(self, t, r):
        """Covariant components (d_t f, d_r f) on the axis-ray weight."""
        self.require_axis()
        t = np.asarray(t, dtype=float)
        r = np.asarray(r, dtype=float)
        return -0.5 * (t - self.t_star), 0.5 * r


UNSHIFTED = ShiftedWeight()


# --------------------------------------------------------------------------
# Region specs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeSpec:
    """Interior of the future time cone, {0 < r < sigma t}."""

    sigma: float

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("cone aperture must lie in (0, 1)")


@dataclass(frozen=True)
class AnnulusSpec:
    """Fixed-time annulus {sigma0 |t| < r < sigma1 |t|} at time t != 0."""

    sigma0: float
    sigma1: float
    t: float

    def __post_init__(self):
        if not 0.0 < self.sigma0 < self.sigma1 < 1.0:
            raise ValueError("apertures must satisfy 0 < sigma0 < sigma1 < 1")
        if self.t == 0.0:
            raise ValueError("annulus time level must be nonzero")


@dataclass(frozen=True)
class SlabSpec:
    """Time slab inside the cone around |t| = |t*|.

    For t* > 0 the set is {t*/gamma < t < gamma t*} within the future cone;
    for t* < 0 the reflected set within the past cone.
    """

    sigma: float
    gamma: float
    t_star: float

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("cone aperture must lie in (0, 1)")
        if self.gamma <= 1.0:
            raise ValueError("slab thickness parameter gamma must exceed 1")
        if self.t_star == 0.0:
            raise ValueError("slab center time must be nonzero")

    def time_window(self):
        a = abs(self.t_star) / self.gamma
        b = abs(self.t_star) * self.gamma
        if self.t_star > 0:
            return a, b
        return -b, -a


@dataclass(frozen=True)
class LateralSlabSpec:
    """Piece of the cone boundary, {r = sigma t, t*/eta < t < eta t*}, t* > 0."""

    sigma: float
    eta: float
    t_star: float

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("cone aperture must lie in (0, 1)")
        if self.eta <= 1.0:
            raise ValueError("eta must exceed 1")
        if self.t_star <= 0.0:
            raise ValueError("lateral slab requires t* > 0")

    def time_window(self):
        return self.t_star / self.eta, self.t_star * self.eta

    def piece(self, outward_sign: int = 1) -> "ConePiece":
        lo, hi = self.time_window()
        return ConePiece(self.sigma, lo, hi, outward_sign=outward_sign)


@dataclass(frozen=True)
class ConeSegmentSpec:
    """Cone interior restricted to a time window, {t_lo < t < t_hi, 0 < r < sigma t}."""

    sigma: float
    t_lo: float
    t_hi: float

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("cone aperture must lie in (0, 1)")
        if not 0.0 <= self.t_lo < self.t_hi:
            raise ValueError("need 0 <= t_lo < t_hi")


@dataclass(frozen=True)
class BoxSpec:
    """Rectangle {t0 < t < t1, r0 < r < r1} in the (t, r) half plane."""

    t0: float
    t1: float
    r0: float
    r1: float

    def __post_init__(self):
        if not (self.t0 < self.t1 and 0.0 <= self.r0 < self.r1):
            raise ValueError("degenerate box")

    def inside_exterior(self) -> bool:
        """Whole closure inside D = {r > |t|} (for the unshifted weight)."""
        return self.r0 > max(abs(self.t0), abs(self.t1))


@dataclass(frozen=True)
class ExteriorRegionSpec:
    """Intersection of the cone with the exterior of the double null cone
    from zeta(t*): {|t - t*| < |x - x(zeta(t*))|} n {0 < r < sigma t}."""

    sigma: float
    t_star: float
    ray: RaySpec = AXIS_RAY
    eps: float = 0.0  # inner cut {f > eps}; 0 means up to the null boundary

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("cone aperture must lie in (0, 1)")
        if self.t_star <= 0.0:
            raise ValueError("exterior region requires t* > 0")
        if not self.ray.inside_cone(self.sigma):
            raise ValueError("ray must lie inside the cone")
        if self.eps < 0.0:
            raise ValueError("eps must be >= 0")

    @property
    def weight(self) -> ShiftedWeight:
        return ShiftedWeight(self.t_star, self.ray)

    def time_window(self):
        """t-range of the region (axis ray).

        Solves r_min(t) = sigma t with r_min = sqrt((t-t*)^2 + 4 eps).
        """
        self.weight.require_axis()
        sig, ts, eps = self.sigma, self.t_star, self.eps
        disc = sig * sig * ts * ts - 4.0 * eps * (1.0 - sig * sig)
        if disc <= 0.0:
            raise ValueError("eps too large: region is empty")
        root = math.sqrt(disc)
        return (ts - root) / (1.0 - sig * sig), (ts + root) / (1.0 - sig * sig)

    def inner_radius(self, t):
        return np.sqrt((np.asarray(t, dtype=float) - self.t_star) ** 2 + 4.0 * self.eps)


# --------------------------------------------------------------------------
# Boundary pieces
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeSlicePiece:
    """Spacelike plane {t = level, r_lo < r < r_hi}; inward = +dt at a bottom
    face (region above), -dt at a top face."""

    level: float
    r_lo: float
    r_hi: float
    inward_sign: int  # +1 bottom, -1 top

    def __post_init__(self):
        if self.inward_sign not in (-1, 1):
            raise ValueError("inward_sign must be +-1")
        if not 0.0 <= self.r_lo < self.r_hi:
            raise ValueError("degenerate slice")


@dataclass(frozen=True)
class CylinderPiece:
    """Timelike cylinder {r = radius, t_lo < t < t_hi}; outward = +dr when the
    region sits inside the cylinder, -dr when outside."""

    radius: float
    t_lo: float
    t_hi: float
    outward_sign: int

    def __post_init__(self):
        if self.outward_sign not in (-1, 1):
            raise ValueError("outward_sign must be +-1")
        if self.radius <= 0.0 or self.t_lo >= self.t_hi:
            raise ValueError("degenerate cylinder")


@dataclass(frozen=True)
class ConePiece:
    """Timelike cone piece {r = slope (t - t_apex), t_lo < t < t_hi}, slope in (0,1).

    `weight` marks the shifted weight whose zero set meets the ends of the
    piece; quadrature then grades toward those ends and hands integrands the
    stably computed weight value.
    """

    slope: float
    t_lo: float
    t_hi: float
    t_apex: float = 0.0
    outward_sign: int = 1
    weight: ShiftedWeight | None = None
    singular_lo: bool = False
    singular_hi: bool = False

    def __post_init__(self):
        if not 0.0 < self.slope < 1.0:
            raise ValueError("cone piece slope must lie in (0, 1): null or "
                             "spacelike cones are not timelike pieces")
        if self.t_lo >= self.t_hi:
            raise ValueError("degenerate cone piece")
        if self.outward_sign not in (-1, 1):
            raise ValueError("outward_sign must be +-1")

    def radius(self, t):
        return self.slope * (np.asarray(t, dtype=float) - self.t_apex)

    def weight_on_piece(self, t):
        """f along the piece in product form (axis-ray weight only).

        With roots t_- = t*/(1+slope), t_+ = t*/(1-slope) of f restricted to
        the cone r = slope*t:  f = (1-slope^2)(t_+ - t)(t - t_-)/4.
        The product form stays accurate near the roots where the naive
        difference of squares cancels catastrophically.
        """
        if self.weight is None:
            raise ValueError("piece carries no weight")
        self.weight.require_axis()
        if self.t_apex != 0.0:
            t = np.asarray(t, dtype=float)
            r = self.radius(t)
            return self.weight.value_radial(t, r)
        ts = self.weight.t_star
        tm = ts / (1.0 + self.slope)
        tp = ts / (1.0 - self.slope)
        t = np.asarray(t, dtype=float)
        return 0.25 * (1.0 - self.slope ** 2) * (tp - t) * (t - tm)


@dataclass(frozen=True)
class LevelSetPiece:
    """Timelike level set {f_{t*,zeta} = eps} inside the cone (axis ray)."""

    weight: ShiftedWeight
    eps: float
    t_lo: float
    t_hi: float
    outward_sign: int = -1  # -1: region is {f > eps}; +1: region is {f < eps}

    def __post_init__(self):
        if self.eps <= 0.0:
            raise ValueError("level value must be positive")
        if self.t_lo >= self.t_hi:
            raise ValueError("degenerate level piece")
        if self.outward_sign not in (-1, 1):
            raise ValueError("outward_sign must be +-1")
        self.weight.require_axis()

    def radius(self, t):
        t = np.asarray(t, dtype=float)
        return np.sqrt((t - self.weight.t_star) ** 2 + 4.0 * self.eps)


@dataclass(frozen=True)
class NullConePiece:
    """Marker for a null boundary piece {f = 0}; carries no unit normal."""

    weight: ShiftedWeight


@dataclass(frozen=True)
class AdmissibleRegionSpec:
    """Bulk region with a closed piecewise boundary per the divergence-theorem
    conventions: every non-null piece spacelike or timelike, oriented normals
    inward on spacelike and outward on timelike pieces."""

    bulk: object  # BoxSpec | ExteriorRegionSpec | "frustum" tuple, see carleman
    pieces: tuple = field(default_factory=tuple)

    def __post_init__(self):
        for p in self.pieces:
            if isinstance(p, NullConePiece):
                raise ValueError("admissible regions cannot contain null pieces")


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------

def _split(P):
    if isinstance(P, MinkowskiPoint):
        return P.t, np.asarray(P.x, dtype=float)
    t, x = P
    return float(t), np.atleast_1d(np.asarray(x, dtype=float))


def eval_weight(w: ShiftedWeight, P) -> float:
    """f_{t*,zeta}(P); may be negative, callers decide region membership."""
    t, x = _split(P)
    c = w.center(x.shape[-1])
    dx = x - c
    return float(0.25 * (np.dot(dx, dx) - (t - w.t_star) ** 2))


def eval_weight_gradient(w: ShiftedWeight, P) -> np.ndarray:
    """Contravariant gradient of f, components (t, x1..xn).

    grad f = (t - t*)/2 d_t + sum (x^i - x^i(zeta(t*)))/2 d_i, and
    g(grad f, grad f) = f pointwise.
    """
    t, x = _split(P)
    c = w.center(x.shape[-1])
    out = np.empty(x.shape[-1] + 1)
    out[0] = 0.5 * (t - w.t_star)
    out[1:] = 0.5 * (x - c)
    return out


def minkowski_norm_sq(vec) -> float:
    """g(v, v) with signature (-,+,...,+); vec = (t component, spatial...)."""
    v = np.asarray(vec, dtype=float)
    return float(-v[0] ** 2 + np.dot(v[1:], v[1:]))


def contains(region, P) -> bool:
    """Exact open-set membership by the defining inequalities."""
    t, x = _split(P)
    r = float(np.sqrt(np.dot(x, x)))
    if isinstance(region, ConeSpec):
        return 0.0 < r < region.sigma * t
    if isinstance(region, AnnulusSpec):
        return t == region.t and region.sigma0 * abs(t) < r < region.sigma1 * abs(t)
    if isinstance(region, SlabSpec):
        lo, hi = region.time_window()
        return lo < t < hi and 0.0 < r < region.sigma * abs(t)
    if isinstance(region, ConeSegmentSpec):
        return region.t_lo < t < region.t_hi and 0.0 < r < region.sigma * t
    if isinstance(region, BoxSpec):
        return region.t0 < t < region.t1 and region.r0 < r < region.r1
    if isinstance(region, ExteriorRegionSpec):
        if not (0.0 < r < region.sigma * t):
            return False
        c = region.weight.center(x.shape[-1])
        dist = float(np.sqrt(np.dot(x - c, x - c)))
        if region.eps == 0.0:
            return abs(t - region.t_star) < dist
        return eval_weight(region.weight, (t, x)) > region.eps
    raise TypeError(f"unsupported region type {type(region).__name__}")


def angle_parameter(w: ShiftedWeight, P) -> float:
    """Angle theta with tan(theta) = (t - t*)/r_shift; |theta| <= pi/4 on the
    cone part of the exterior-region boundary."""
    t, x = _split(P)
    c = w.center(x.shape[-1])
    rs = float(np.sqrt(np.dot(x - c, x - c)))
    if rs == 0.0:
        raise ZeroDivisionError("angle parameter undefined on the shifted axis")
    return math.atan2(t - w.t_star, rs)


def oriented_normal(piece, P) -> np.ndarray:
    """Oriented unit normal at P, radial components (N^t, N^r).

    Inward on spacelike pieces, outward on timelike ones; cone pieces carry
    N = (1 - s^2)^{-1/2} (s d_t + d_r); level sets of f carry
    N = -f^{-1/2} grad f (sign flipped when the region is {f < eps}).
    """
    if isinstance(piece, NullConePiece):
        raise ValueError("null pieces have no unit normal")
    t, x = _split(P)
    r = float(np.sqrt(np.dot(x, x)))
    if isinstance(piece, TimeSlicePiece):
        return np.array([float(piece.inward_sign), 0.0])
    if isinstance(piece, CylinderPiece):
        return np.array([0.0, float(piece.outward_sign)])
    if isinstance(piece, ConePiece):
        s = piece.slope
        scale = piece.outward_sign / math.sqrt(1.0 - s * s)
        return np.array([scale * s, scale])
    if isinstance(piece, LevelSetPiece):
        ts = piece.weight.t_star
        fval = 0.25 * (r * r - (t - ts) ** 2)
        if fval <= 0.0:
            raise ValueError("point not on a positive level of the weight")
        scale = piece.outward_sign / math.sqrt(fval)
        return np.array([scale * 0.5 * (t - ts), scale * 0.5 * r])
    raise TypeError(f"unsupported piece type {type(piece).__name__}")


def measure_density(obj, P, n: int) -> float:
    """Induced measure density in the radial reduction.

    Bulk regions: area(S^{n-1}) r^{n-1} per dr dt; slice {t=c}: the same per
    dr; cylinder {r=c}: area(S^{n-1}) c^{n-1} per dt; cone {r = s t}:
    area(S^{n-1}) sqrt(1-s^2) (s t)^{n-1} per dt; level set {f=eps}:
    area(S^{n-1}) 2 sqrt(eps) r^{n-3} * r per dt.
    """
    t, x = _split(P)
    r = float(np.sqrt(np.dot(x, x)))
    om = sphere_area(n)
    if isinstance(obj, TimeSlicePiece):
        return om * r ** (n - 1)
    if isinstance(obj, CylinderPiece):
        return om * obj.radius ** (n - 1)
    if isinstance(obj, ConePiece):
        rr = float(obj.radius(t))
        return om * math.sqrt(1.0 - obj.slope ** 2) * rr ** (n - 1)
    if isinstance(obj, LevelSetPiece):
        rr = float(obj.radius(t))
        return om * 2.0 * math.sqrt(obj.eps) * rr ** (n - 2)
    # bulk region: spacetime density in (t, r)
    return om * r ** (n - 1)


def lateral_boundary(region: ExteriorRegionSpec) -> ConePiece:
    """Cone part of the exterior-region boundary (axis ray), from
    t*/(1+sigma) to t*/(1-sigma), with the weight's zero set flagged at
    both ends."""
    region.weight.require_axis()
    ts, sig = region.t_star, region.sigma
    return ConePiece(
        slope=sig,
        t_lo=ts / (1.0 + sig),
        t_hi=ts / (1.0 - sig),
        outward_sign=1,
        weight=region.weight,
        singular_lo=True,
        singular_hi=True,
    )


def normal_weight_derivative_bounds(sigma: float, ray: RaySpec):
    """Closed-form range of N(f_{t*,zeta})/t* on the cone boundary piece.

    On r = sigma t the cone normal gives
    N(f) = (sigma t* - x_hat . x(zeta(t*))) / (2 sqrt(1 - sigma^2)),
    so N(f)/t* lies in [(sigma-|v|), (sigma+|v|)] / (2 sqrt(1-sigma^2));
    in particular N(f) = sigma t* / (2 sqrt(1-sigma^2)) exactly for the axis.
    """
    v = ray.speed
    den = 2.0 * math.sqrt(1.0 - sigma * sigma)
    return (sigma - v) / den, (sigma + v) / den


# --------------------------------------------------------------------------
# Two-ray covering check
# --------------------------------------------------------------------------

@dataclass
class CoveringResult:
    covered: bool
    witness: MinkowskiPoint | None = None
    boundary_ok: bool | None = None
    boundary_witness: MinkowskiPoint | None = None

    def __bool__(self):
        ok = self.covered
        if self.boundary_ok is not None:
            ok = ok and self.boundary_ok
        return ok


def _in_exterior_cartesian(t, x, sigma, t_star, center):
    r = math.sqrt(float(np.dot(x, x)))
    if not (0.0 < r < sigma * t):
        return False
    d = x - center
    return abs(t - t_star) < math.sqrt(float(np.dot(d, d)))


def covering_check(sigma, gamma, t_star, ray0: RaySpec, ray1: RaySpec,
                   sample_count=2000, n=3, eta=None, seed=0) -> CoveringResult:
    """Sample the slab and test coverage by the two exterior regions.

    Deterministic lattice in the plane spanned by the two ray velocities,
    plus targeted probes near the excluded double-cone tips zeta_i(t*), plus
    seeded random points in the full ball. When `eta` is given, also checks
    that both cone-boundary pieces sit inside the lateral slab of that eta.
    """
    if t_star <= 0:
        raise ValueError("covering check requires t* > 0")
    for ray in (ray0, ray1):
        if not ray.inside_cone(sigma):
            raise ValueError("rays must lie inside the cone")

    def embed(v):
        out = np.zeros(n)
        out[: len(v)] = v
        return out

    c0 = embed(ray0.velocity) * t_star
    c1 = embed(ray1.velocity) * t_star
    # orthonormal pair spanning the plane of the two centers
    e1 = np.zeros(n)
    e1[0] = 1.0
    if np.linalg.norm(c0) > 0:
        e1 = c0 / np.linalg.norm(c0)
    elif np.linalg.norm(c1) > 0:
        e1 = c1 / np.linalg.norm(c1)
    e2 = None
    if n > 1:
        cand = c1 - c0
        cand = cand - np.dot(cand, e1) * e1
        if np.linalg.norm(cand) > 1e-14:
            e2 = cand / np.linalg.norm(cand)
        else:
            for k in range(n):
                trial = np.zeros(n)
                trial[k] = 1.0
                trial -= np.dot(trial, e1) * e1
                if np.linalg.norm(trial) > 1e-8:
                    e2 = trial / np.linalg.norm(trial)
                    break

    def in_union(t, x):
        return (_in_exterior_cartesian(t, x, sigma, t_star, c0)
                or _in_exterior_cartesian(t, x, sigma, t_star, c1))

    t_lo, t_hi = t_star / gamma, t_star * gamma
    m = max(8, int(round(sample_count ** (1.0 / 3.0))))
    tgrid = np.linspace(t_lo, t_hi, m + 2)[1:-1]
    samples = []
    for t in tgrid:
        rmax = sigma * t
        for u in np.linspace(-rmax, rmax, m + 2)[1:-1]:
            if e2 is None:
                x = u * e1
                samples.append((t, x))
            else:
                for w in np.linspace(-rmax, rmax, m + 2)[1:-1]:
                    if u * u + w * w < rmax * rmax:
                        samples.append((t, u * e1 + w * e2))
    # probes near the excluded tips at several offsets from t*
    for c in (c0, c1):
        cd = np.linalg.norm(c)
        direction = -c / cd if cd > 0 else e1
        for frac in (0.5, 0.25, 0.1):
            for sgn in (-1.0, 1.0):
                t = t_star + sgn * frac * (gamma - 1.0) * t_star
                rho = 0.5 * abs(t - t_star)
                x = c + rho * direction
                samples.append((t, x))
    rng = np.random.default_rng(seed)
    for _ in range(sample_count):
        t = rng.uniform(t_lo, t_hi)
        u = rng.standard_normal(n)
        u /= np.linalg.norm(u)
        x = u * (rng.uniform(0, 1) ** (1.0 / n) * sigma * t)
        samples.append((t, x))

    witness = None
    for (t, x) in samples:
        r = math.sqrt(float(np.dot(x, x)))
        if not (0.0 < r < sigma * t and t_lo < t < t_hi):
            continue
        if not in_union(t, x):
            witness = MinkowskiPoint(float(t), tuple(x))
            break

    result = CoveringResult(covered=witness is None, witness=witness)
    if eta is not None:
        if eta <= 1.0:
            raise ValueError("eta must exceed 1")
        bad = None
        for c in (c0, c1):
            for t in np.linspace(t_star / (1.0 + sigma) * 0.5,
                                 t_star / (1.0 - sigma) * 1.5, 160):
                if t <= 0:
                    continue
                dirs = [e1, -e1]
                if e2 is not None:
                    dirs += [e2, -e2, (e1 + e2) / math.sqrt(2.0)]
                for d in dirs:
                    x = sigma * t * d
                    dx = x - c
                    if abs(t - t_star) < math.sqrt(float(np.dot(dx, dx))):
                        # point on the relevant boundary piece
                        if not (t_star / eta < t < t_star * eta):
                            bad = MinkowskiPoint(float(t), tuple(x))
                            break
                if bad:
                    break
            if bad:
                break
        result.boundary_ok = bad is None
        result.boundary_witness = bad
    return result
