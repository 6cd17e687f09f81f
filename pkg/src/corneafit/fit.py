"""Fitting the model to elevation meshes.

Calibration uses two apex measurements. With h'(0) = 0 the central
radius of curvature of the linearized surface is rho(0) = 2 I0(sqrt(a))/b,
and the apex height is h0(0) = (b/a)(1 - 1/I0(sqrt(a))); eliminating b
leaves a scalar root problem for a,

    g(a) = (1/2) h0(0) rho(0) a - I0(sqrt(a)) + 1 = 0,

whose trivial root a = 0 is excluded by bracketing a sign change on
(1e-8, 100]. Both measurements enter nondimensionally (divided by the
scale radius), so the root is very sensitive to their ratio: d(a)/a is
roughly 8x the relative error of h0(0) rho(0) near a = 2. The pipeline
below is ordered to keep that product clean.

Elliptical domains: the footprint and the level curves of real corneas
are mildly elliptical, so the radial coordinate is replaced by
sqrt(x^2/R1^2 + y^2/R2^2) with the semi-axes normalized to geometric
mean 1. Eccentricity is estimated from the half-maximum level curve.

Axial distance: d = sqrt(x^2 + y^2) sqrt(1 + 1/(h_x^2 + h_y^2)), the
distance from the surface point to the axis along the surface normal.
It is undefined where the gradient vanishes (the apex), so points with
gradient norm below a floor are masked to NaN rather than reported.
"""

import math
from dataclasses import dataclass

import numpy as np

from .data import SurfaceMesh
from .errors import ApexNotFound, DegenerateLevelSet, NoConvergence, NoRoot
from .kernel import ModelParams
from .solver import _dh0_values, _h0_values
from .special import bessel_i


@dataclass(frozen=True)
class ApexMeasurements:
    """The two dimensional calibration inputs plus the length scale, mm."""

    max_deflection: float
    central_radius: float
    scale_radius: float

    def __post_init__(self):
        for name in ("max_deflection", "central_radius", "scale_radius"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite")
        if not self.max_deflection < self.scale_radius:
            raise ValueError("max_deflection must be smaller than scale_radius")


@dataclass(frozen=True)
class DomainEllipse:
    """Axis-aligned footprint ellipse, semi-axes normalized to geometric mean 1.

    signed_ecc_sq = 1 - (min/max)^2, negative when the y semi-axis is the
    longer one (prolate), positive when x is (oblate).
    """

    semi_axis_x: float
    semi_axis_y: float
    signed_ecc_sq: float

    def __post_init__(self):
        if not (self.semi_axis_x > 0.0 and self.semi_axis_y > 0.0):
            raise ValueError("semi-axes must be positive")
        if abs(self.semi_axis_x * self.semi_axis_y - 1.0) > 1e-9:
            raise ValueError("semi-axes must have geometric mean 1")
        small = min(self.semi_axis_x, self.semi_axis_y)
        big = max(self.semi_axis_x, self.semi_axis_y)
        implied = 1.0 - (small / big) ** 2
        if self.semi_axis_y > self.semi_axis_x:
            implied = -implied
        if abs(self.signed_ecc_sq - implied) > 1e-9:
            raise ValueError("signed_ecc_sq inconsistent with the semi-axes")

    @classmethod
    def from_semi_axes(cls, semi_axis_x, semi_axis_y):
        if not (semi_axis_x > 0.0 and semi_axis_y > 0.0):
            raise ValueError("semi-axes must be positive")
        mean = math.sqrt(semi_axis_x * semi_axis_y)
        rx, ry = semi_axis_x / mean, semi_axis_y / mean
        ecc = 1.0 - (min(rx, ry) / max(rx, ry)) ** 2
        if ry > rx:
            ecc = -ecc
        return cls(semi_axis_x=rx, semi_axis_y=ry, signed_ecc_sq=ecc)

    @classmethod
    def from_signed_ecc_sq(cls, signed_ecc_sq):
        if not abs(signed_ecc_sq) < 1.0:
            raise ValueError("signed_ecc_sq must lie in (-1, 1)")
        rest = 1.0 - abs(signed_ecc_sq)
        big, small = rest**-0.25, rest**0.25
        if signed_ecc_sq >= 0.0:
            return cls(semi_axis_x=big, semi_axis_y=small, signed_ecc_sq=signed_ecc_sq)
        return cls(semi_axis_x=small, semi_axis_y=big, signed_ecc_sq=signed_ecc_sq)


@dataclass(frozen=True)
class FitOptions:
    level_fraction: float = 0.5
    apex_window_fraction: float = 0.4
    gradient_floor: float = 1e-8
    apex_mask_radius: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.level_fraction < 1.0:
            raise ValueError("level_fraction must lie in (0, 1)")
        if not 0.0 < self.apex_window_fraction <= 1.0:
            raise ValueError("apex_window_fraction must lie in (0, 1]")
        if not self.gradient_floor > 0.0:
            raise ValueError("gradient_floor must be positive")
        if not self.apex_mask_radius >= 0.0:
            raise ValueError("apex_mask_radius must be nonnegative")


@dataclass(frozen=True)
class FitResult:
    params: ModelParams
    ellipse: DomainEllipse
    scale_radius: float
    mean_abs_error_mm: float
    mean_rel_error: float
    axial_mean_abs_error_mm: float
    axial_mean_rel_error: float
    n_points_used: int

    def __post_init__(self):
        errors = (
            self.mean_abs_error_mm,
            self.mean_rel_error,
            self.axial_mean_abs_error_mm,
            self.axial_mean_rel_error,
        )
        if any(not (e >= 0.0) for e in errors):
            raise ValueError("error statistics must be nonnegative")
        if self.n_points_used < 0:
            raise ValueError("n_points_used must be nonnegative")

    def error_summary(self):
        """Elevation error in the conventional form, e.g. '0.035 mm (3.6%)'."""
        return f"{self.mean_abs_error_mm:.3f} mm ({100.0 * self.mean_rel_error:.1f}%)"


@dataclass(frozen=True, eq=False)
class ModelSurface:
    """Analytic surface z = S h0(elliptical radius) on a template's grid.

    The template supplies grid geometry only (its z is ignored); the
    apex is assumed at the template's coordinate origin.
    """

    params: ModelParams
    scale_radius: float
    template: SurfaceMesh

    def __post_init__(self):
        if not (self.scale_radius > 0.0 and math.isfinite(self.scale_radius)):
            raise ValueError("scale_radius must be positive and finite")


def calibrate_b(a, rho0_nondim):
    """b from the central radius of curvature: b = 2 I0(sqrt(a))/rho(0)."""
    if not (a > 0.0 and math.isfinite(a)):
        raise ValueError("a must be positive and finite")
    if not (rho0_nondim > 0.0 and math.isfinite(rho0_nondim)):
        raise ValueError("rho0_nondim must be positive and finite")
    return 2.0 * bessel_i(0, math.sqrt(a)) / rho0_nondim


def calibrate_a(h00_nondim, rho0_nondim):
    """Smallest positive root of g(a) = (1/2) h00 rho0 a - I0(sqrt(a)) + 1.

    g(0) = 0 always, so the trivial root is excluded by scanning
    (1e-8, 100] for a sign change, then bisecting and polishing with
    Newton to |g| <= 1e-12. Raises NoRoot when the scan finds no sign
    change, which signals measurements inconsistent with the model
    (h00 rho0 <= 1/2 leaves g negative everywhere).
    """
    if not (h00_nondim > 0.0 and math.isfinite(h00_nondim)):
        raise ValueError("h00_nondim must be positive and finite")
    if not (rho0_nondim > 0.0 and math.isfinite(rho0_nondim)):
        raise ValueError("rho0_nondim must be positive and finite")
    half_product = 0.5 * h00_nondim * rho0_nondim

    def g(a):
        return half_product * a - bessel_i(0, math.sqrt(a)) + 1.0

    def dg(a):
        root = math.sqrt(a)
        return half_product - bessel_i(1, root) / (2.0 * root)

    grid = np.geomspace(1e-8, 100.0, 600)
    values = np.array([g(a) for a in grid])
    bracket = None
    for i in range(grid.size - 1):
        if values[i] > 0.0 and values[i + 1] <= 0.0:
            bracket = (grid[i], grid[i + 1])
            break
    if bracket is None:
        raise NoRoot("no sign change of the calibration function in (1e-8, 100]")

    lo, hi = bracket  # g(lo) > 0 >= g(hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    for _ in range(8):
        value = g(a)
        if abs(value) <= 1e-12:
            return a
        slope = dg(a)
        if slope == 0.0:
            break
        trial = a - value / slope
        if not lo * 0.5 <= trial <= hi * 2.0:
            break
        a = trial
    if abs(g(a)) <= 1e-12:
        return a
    raise NoConvergence("calibration root polish did not reach |g| <= 1e-12")


def elliptical_radius(x, y, ellipse):
    """sqrt(x^2/R1^2 + y^2/R2^2); the Euclidean radius when R1 = R2 = 1."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.sqrt((x / ellipse.semi_axis_x) ** 2 + (y / ellipse.semi_axis_y) ** 2)
    if out.ndim == 0:
        return float(out)
    return out


def _mesh_grids(mesh):
    return np.meshgrid(mesh.x_coords, mesh.y_coords)


def _measure_apex(mesh, options):
    """Locate the apex and return (x, y, height, central radius), all mm.

    Least squares of a quartic even-order surface over the valid points
    within apex_window_fraction of the footprint radius around the
    highest node, refined by Newton to the polynomial's critical point.
    The quartic terms matter: the true profile's fourth-order variation
    over a window wide enough to average noise would otherwise bias the
    curvature (and the calibrated a with it) by several percent.
    """
    z, valid = mesh.z, mesh.valid
    if not np.any(valid):
        raise ApexNotFound("mesh has no valid samples")
    grid_x, grid_y = _mesh_grids(mesh)
    flat = int(np.argmax(np.where(valid, z, -np.inf)))
    i0, j0 = divmod(flat, mesh.n_x)
    if i0 in (0, mesh.n_y - 1) or j0 in (0, mesh.n_x - 1):
        raise ApexNotFound("maximum elevation lies on the mesh boundary")

    node_x, node_y = grid_x[i0, j0], grid_y[i0, j0]
    dist = np.hypot(grid_x - node_x, grid_y - node_y)
    footprint = float(dist[valid].max())
    if footprint <= 0.0:
        raise ApexNotFound("footprint is a single point")
    window_radius = options.apex_window_fraction * footprint
    window = valid & (dist <= window_radius)
    # window-normalized coordinates keep the quartic basis conditioned
    # regardless of the mesh's length unit
    u = (grid_x - node_x)[window] / window_radius
    v = (grid_y - node_y)[window] / window_radius
    w = z[window]
    if u.size < 9:
        raise ApexNotFound("too few valid samples near the maximum")

    basis = np.column_stack(
        [np.ones_like(u), u, v, u * u, u * v, v * v, u**4, u * u * v * v, v**4]
    )
    c, *_ = np.linalg.lstsq(basis, w, rcond=None)

    def gradient_hessian(p, q):
        gu = c[1] + 2.0 * c[3] * p + c[4] * q + 4.0 * c[6] * p**3 + 2.0 * c[7] * p * q * q
        gv = c[2] + c[4] * p + 2.0 * c[5] * q + 2.0 * c[7] * p * p * q + 4.0 * c[8] * q**3
        huu = 2.0 * c[3] + 12.0 * c[6] * p * p + 2.0 * c[7] * q * q
        huv = c[4] + 4.0 * c[7] * p * q
        hvv = 2.0 * c[5] + 2.0 * c[7] * p * p + 12.0 * c[8] * q * q
        return gu, gv, huu, huv, hvv

    p = q = 0.0
    for _ in range(12):
        gu, gv, huu, huv, hvv = gradient_hessian(p, q)
        det = huu * hvv - huv * huv
        if not (math.isfinite(det) and det != 0.0):
            raise ApexNotFound("apex surface fit has a singular Hessian")
        dp = -(hvv * gu - huv * gv) / det
        dq = -(huu * gv - huv * gu) / det
        p += dp
        q += dq
        if math.hypot(dp, dq) <= 1e-13:
            break
    if math.hypot(p, q) > 1.0:
        raise ApexNotFound("apex estimate left the fit window")

    height = float(
        c[0] + c[1] * p + c[2] * q + c[3] * p * p + c[4] * p * q + c[5] * q * q
        + c[6] * p**4 + c[7] * p * p * q * q + c[8] * q**4
    )
    _, _, huu, _, hvv = gradient_hessian(p, q)
    curvature = -0.5 * (huu + hvv) / window_radius**2
    if not (height > 0.0 and curvature > 0.0):
        raise ApexNotFound("no dome-shaped maximum in the fit window")
    return node_x + window_radius * p, node_y + window_radius * q, height, 1.0 / curvature


def _level_crossings(coords, values, valid, level):
    """1D linear-interpolation crossings of values == level on valid pairs."""
    crossings = []
    for j in range(values.size - 1):
        if not (valid[j] and valid[j + 1]):
            continue
        s0, s1 = values[j] - level, values[j + 1] - level
        if s0 == 0.0:
            crossings.append(coords[j])
        elif s0 * s1 < 0.0:
            t = s0 / (s0 - s1)
            crossings.append(coords[j] + t * (coords[j + 1] - coords[j]))
    return crossings


def estimate_ellipse(mesh, level_fraction=0.5, *, center=None, level=None):
    """Fit an axis-aligned ellipse to a level curve of the elevation.

    The curve at level_fraction x (apex height) is located by linear
    interpolation along every mesh row and column; the points (relative
    to the apex) are fitted by least squares on alpha x^2 + beta y^2 = 1,
    which is linear in (alpha, beta); the half-maximum default stays
    away from both apex flatness and the ragged footprint rim. center
    and level override the internal apex fit when the caller has already
    measured it. Raises DegenerateLevelSet when fewer than 8 crossings
    are found or the fit does not describe an ellipse.
    """
    if center is None or level is None:
        apex_x, apex_y, height, _ = _measure_apex(mesh, FitOptions())
        if center is None:
            center = (apex_x, apex_y)
        if level is None:
            if not 0.0 < level_fraction < 1.0:
                raise ValueError("level_fraction must lie in (0, 1)")
            level = level_fraction * height

    x, y = mesh.x_coords, mesh.y_coords
    points_u, points_v = [], []
    for i in range(mesh.n_y):
        for u in _level_crossings(x, mesh.z[i], mesh.valid[i], level):
            points_u.append(u - center[0])
            points_v.append(y[i] - center[1])
    for j in range(mesh.n_x):
        for v in _level_crossings(y, mesh.z[:, j], mesh.valid[:, j], level):
            points_u.append(x[j] - center[0])
            points_v.append(v - center[1])

    if len(points_u) < 8:
        raise DegenerateLevelSet(f"only {len(points_u)} level-curve points")
    u = np.array(points_u)
    v = np.array(points_v)
    u2, v2 = u * u, v * v
    normal = np.array([[np.sum(u2 * u2), np.sum(u2 * v2)], [np.sum(u2 * v2), np.sum(v2 * v2)]])
    rhs = np.array([np.sum(u2), np.sum(v2)])
    try:
        alpha, beta = np.linalg.solve(normal, rhs)
    except np.linalg.LinAlgError:
        raise DegenerateLevelSet("level-curve points do not span both axes") from None
    if not (alpha > 0.0 and beta > 0.0):
        raise DegenerateLevelSet("level curve is not an ellipse")
    return DomainEllipse.from_semi_axes(1.0 / math.sqrt(alpha), 1.0 / math.sqrt(beta))


def fit_mesh(mesh, options=None):
    """Calibrate (a, b), ellipse and scale from a mesh; report errors.

    Pipeline: apex fit (height and central curvature), level-curve
    ellipse, then footprint scale as the largest elliptical radial
    extent of the valid data about the apex. The scale must be measured
    in the elliptical metric: a Euclidean footprint radius over an
    eccentric domain is biased by up to half the eccentricity, and the
    calibration amplifies that ~8x into a. Apex measurements divided by
    the scale then calibrate a and b, and the model surface
    S h0(elliptical radius / S) is compared against the data; axial
    distance statistics are computed over points where both the mesh
    and model maps are defined, outside apex_mask_radius.
    """
    if options is None:
        options = FitOptions()
    apex_x, apex_y, height_mm, rho0_mm = _measure_apex(mesh, options)
    ellipse = estimate_ellipse(
        mesh,
        options.level_fraction,
        center=(apex_x, apex_y),
        level=options.level_fraction * height_mm,
    )

    grid_x, grid_y = _mesh_grids(mesh)
    radial_mm = elliptical_radius(grid_x - apex_x, grid_y - apex_y, ellipse)
    scale = float(radial_mm[mesh.valid].max())
    apex = ApexMeasurements(
        max_deflection=height_mm, central_radius=rho0_mm, scale_radius=scale
    )
    a = calibrate_a(apex.max_deflection / scale, apex.central_radius / scale)
    b = calibrate_b(a, apex.central_radius / scale)
    params = ModelParams(a=a, b=b)

    rel = radial_mm / scale
    use = mesh.valid & (rel <= 1.0)
    model_z = scale * _h0_values(params, np.clip(rel[use], 0.0, 1.0))
    abs_errors = np.abs(mesh.z[use] - model_z)
    mean_abs = float(abs_errors.mean())
    mean_rel = mean_abs / height_mm

    shifted = SurfaceMesh(
        n_x=mesh.n_x,
        n_y=mesh.n_y,
        spacing_x=mesh.spacing_x,
        spacing_y=mesh.spacing_y,
        origin_x=mesh.origin_x - apex_x,
        origin_y=mesh.origin_y - apex_y,
        z=mesh.z,
    )
    d_mesh = axial_distance_map(shifted, ellipse, gradient_floor=options.gradient_floor)
    d_model = axial_distance_map(
        ModelSurface(params=params, scale_radius=scale, template=shifted),
        ellipse,
        gradient_floor=options.gradient_floor,
    )
    common = np.isfinite(d_mesh) & np.isfinite(d_model) & (rel > options.apex_mask_radius)
    if not np.any(common):
        raise ValueError("no overlap between mesh and model axial-distance maps")
    axial_diff = np.abs(d_mesh[common] - d_model[common])
    axial_mean_abs = float(axial_diff.mean())
    axial_mean_rel = float((axial_diff / d_mesh[common]).mean())

    return FitResult(
        params=params,
        ellipse=ellipse,
        scale_radius=scale,
        mean_abs_error_mm=mean_abs,
        mean_rel_error=mean_rel,
        axial_mean_abs_error_mm=axial_mean_abs,
        axial_mean_rel_error=axial_mean_rel,
        n_points_used=int(use.sum()),
    )


def axial_distance_map(mesh_or_model, ellipse, gradient_floor=1e-8):
    """Axial distance d = sqrt(x^2+y^2) sqrt(1 + 1/||grad h||^2), in mm.

    The surface axis is the coordinate origin of the source grid. For a
    SurfaceMesh the gradient is centered differences (defined where both
    neighbors along each axis are valid, so boundary rows and columns
    are not); for a ModelSurface it is the chain rule on S h0(rel),
    using the given ellipse, defined where rel <= 1. Points with
    gradient norm below gradient_floor come out NaN, not raised: the
    formula diverges at the apex.
    """
    if isinstance(mesh_or_model, ModelSurface):
        model = mesh_or_model
        template = model.template
        grid_x, grid_y = _mesh_grids(template)
        scale = model.scale_radius
        rel = elliptical_radius(grid_x / scale, grid_y / scale, ellipse)
        inside = rel <= 1.0
        # z_x = q x / (S R1^2), z_y = q y / (S R2^2) with q = h0'(rel)/rel,
        # whose apex limit is h0''(0) = -b / (2 I0(sqrt(a))).
        q = np.full(rel.shape, np.nan)
        apex_limit = -model.params.b / (2.0 * bessel_i(0, math.sqrt(model.params.a)))
        positive = inside & (rel > 0.0)
        q[positive] = _dh0_values(model.params, rel[positive]) / rel[positive]
        q[inside & (rel == 0.0)] = apex_limit
        grad_x = q * grid_x / (scale * ellipse.semi_axis_x**2)
        grad_y = q * grid_y / (scale * ellipse.semi_axis_y**2)
        defined = inside
    else:
        mesh = mesh_or_model
        grid_x, grid_y = _mesh_grids(mesh)
        z, valid = mesh.z, mesh.valid
        grad_x = np.full(z.shape, np.nan)
        grad_y = np.full(z.shape, np.nan)
        both_x = valid[:, 2:] & valid[:, :-2]
        both_y = valid[2:, :] & valid[:-2, :]
        with np.errstate(invalid="ignore"):
            grad_x[:, 1:-1] = np.where(
                both_x, (z[:, 2:] - z[:, :-2]) / (2.0 * mesh.spacing_x), np.nan
            )
            grad_y[1:-1, :] = np.where(
                both_y, (z[2:, :] - z[:-2, :]) / (2.0 * mesh.spacing_y), np.nan
            )
        defined = valid & np.isfinite(grad_x) & np.isfinite(grad_y)

    norm_sq = grad_x * grad_x + grad_y * grad_y
    with np.errstate(invalid="ignore"):
        usable = defined & (norm_sq >= gradient_floor**2)
    out = np.full(norm_sq.shape, np.nan)
    radius = np.hypot(grid_x, grid_y)
    out[usable] = radius[usable] * np.sqrt(1.0 + 1.0 / norm_sq[usable])
    return out
