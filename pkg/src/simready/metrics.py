"""Evaluation metrics: point-cloud distances, PSNR, scale and joint errors.

Chamfer distance is the squared-distance variant, both directions averaged
and summed; F-score counts points within a Euclidean threshold and reports
the harmonic mean on a 0..100 scale. Nearest-neighbor queries run on a
k-d tree and are required (and tested) to match a brute-force scan to
within 1e-9.

Clouds are expected in normalized coordinates; ``normalize_unit_cube``
maps a cloud into [-0.5, 0.5]^3 by its own bounding box, which is how the
geometry evaluation path feeds the distance metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .asset import JointSpec
from .errors import InvalidInputError
from .voxel import TriangleMesh, frozen_array

DEFAULT_FSCORE_TAU = 0.05
PSNR_PEAK = 255.0


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray  # (N, 3) float64

    def __post_init__(self):
        pts = frozen_array(self.points, np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise InvalidInputError("points must be (N, 3)")
        if pts.size and not np.isfinite(pts).all():
            raise InvalidInputError("non-finite point coordinates")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class GrayImage:
    """8-bit grayscale image, pixels row-major."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        px = frozen_array(self.pixels, np.uint8).reshape(-1)
        if self.width < 1 or self.height < 1:
            raise InvalidInputError("image dimensions must be >= 1")
        if px.size != self.width * self.height:
            raise InvalidInputError("pixel count != width * height")
        object.__setattr__(self, "pixels", px)


@dataclass(frozen=True)
class KinematicError:
    """Per-component joint parameter errors plus their unweighted mean."""

    position_mse: float  # m^2
    direction_err: float  # sign-invariant squared unit-vector distance
    type_err: float  # 0 or 1
    limit_mse: float
    limits_compared: bool
    composite: float


@dataclass(frozen=True)
class MetricResult:
    """One asset's metric bundle, units per the reporting conventions."""

    cd_times_1e3: float | None = None
    fscore_times_1e2: float | None = None
    psnr_db: float | None = None  # math.inf on identical images
    scale_mse: float | None = None  # m^2
    kinematic: KinematicError | None = None


def sample_points(mesh: TriangleMesh, n: int, seed: int) -> PointCloud:
    """Uniform area-weighted surface samples from a seeded generator."""
    if mesh.is_empty:
        raise InvalidInputError("cannot sample an empty mesh")
    if n < 1:
        raise InvalidInputError("sample count must be >= 1")
    tris = mesh.vertices[mesh.faces]  # (F, 3, 3)
    cross = np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0])
    areas = 0.5 * np.linalg.norm(cross, axis=1)
    total = areas.sum()
    if total <= 0:
        raise InvalidInputError("mesh has zero surface area")

    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(tris), size=n, p=areas / total)
    u = rng.random(n)
    v = rng.random(n)
    flip = u + v > 1.0
    u[flip] = 1.0 - u[flip]
    v[flip] = 1.0 - v[flip]
    t = tris[chosen]
    pts = t[:, 0] + u[:, None] * (t[:, 1] - t[:, 0]) \
        + v[:, None] * (t[:, 2] - t[:, 0])
    return PointCloud(pts)


def normalize_unit_cube(cloud: PointCloud) -> PointCloud:
    """Center a cloud and scale its longest AABB edge to 1."""
    if len(cloud) == 0:
        raise InvalidInputError("empty cloud")
    lo = cloud.points.min(axis=0)
    hi = cloud.points.max(axis=0)
    span = float((hi - lo).max())
    if span <= 0:
        span = 1.0
    return PointCloud((cloud.points - (lo + hi) / 2.0) / span)


def _check_clouds(a: PointCloud, b: PointCloud) -> None:
    if len(a) == 0 or len(b) == 0:
        raise InvalidInputError("point clouds must be non-empty")


def chamfer_distance(a: PointCloud, b: PointCloud) -> float:
    """Mean squared nearest-neighbor distance, both directions summed."""
    _check_clouds(a, b)
    d_ab = cKDTree(b.points).query(a.points)[0]
    d_ba = cKDTree(a.points).query(b.points)[0]
    return float(np.mean(d_ab ** 2) + np.mean(d_ba ** 2))


def fscore(a: PointCloud, b: PointCloud,
           tau: float = DEFAULT_FSCORE_TAU) -> float:
    """F-score at threshold ``tau`` on a 0..100 scale."""
    _check_clouds(a, b)
    if not tau > 0:
        raise InvalidInputError("tau must be positive")
    d_ab = cKDTree(b.points).query(a.points)[0]
    d_ba = cKDTree(a.points).query(b.points)[0]
    precision = float(np.mean(d_ab <= tau))
    recall = float(np.mean(d_ba <= tau))
    if precision + recall == 0.0:
        return 0.0
    return 200.0 * precision * recall / (precision + recall)


def psnr(a: GrayImage, b: GrayImage) -> float:
    """10 log10(peak^2 / MSE); +inf for identical images."""
    if (a.width, a.height) != (b.width, b.height):
        raise InvalidInputError("image dimensions differ")
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(PSNR_PEAK ** 2 / mse)


def scale_mse(pred, gt) -> float:
    """Mean squared per-axis difference of two scale triples (m^2)."""
    p = np.asarray(pred, dtype=np.float64)
    g = np.asarray(gt, dtype=np.float64)
    if p.shape != (3,) or g.shape != (3,):
        raise InvalidInputError("scales must be triples")
    if (p <= 0).any() or (g <= 0).any():
        raise InvalidInputError("scales must be positive")
    return float(np.mean((p - g) ** 2))


def symmetric_percentage_error(pred: float, judged: float) -> float:
    """SPE = 200 |p - g| / (p + g), bounded in [0, 200]."""
    if not (pred > 0 and judged > 0):
        raise InvalidInputError("dimensions must be positive")
    return 200.0 * abs(pred - judged) / (pred + judged)


def score_from_spe(spe: float) -> float:
    """Linear map of SPE in [0, 200] onto a 100..0 plausibility score."""
    return 100.0 * (1.0 - spe / 200.0)


def scale_plausibility(pred_max_dim: float, judged_max_dim: float) -> float:
    return score_from_spe(symmetric_percentage_error(pred_max_dim,
                                                     judged_max_dim))


def kinematic_error(pred: JointSpec, gt: JointSpec) -> KinematicError:
    """Componentwise joint parameter errors; see KinematicError."""
    po = np.asarray(pred.origin_m)
    go = np.asarray(gt.origin_m)
    if not (np.isfinite(po).all() and np.isfinite(go).all()):
        raise InvalidInputError("non-finite joint origins")
    position_mse = float(np.mean((po - go) ** 2))

    pa = np.asarray(pred.axis, dtype=np.float64)
    ga = np.asarray(gt.axis, dtype=np.float64)
    direction_err = float(min(np.sum((pa - ga) ** 2), np.sum((pa + ga) ** 2)))

    type_err = 0.0 if pred.kind is gt.kind else 1.0

    if pred.has_limits and gt.has_limits:
        limit_mse = float(np.mean([
            (pred.limit_lower - gt.limit_lower) ** 2,
            (pred.limit_upper - gt.limit_upper) ** 2,
        ]))
        limits_compared = True
    else:
        limit_mse = 0.0
        limits_compared = False

    composite = (position_mse + direction_err + type_err + limit_mse) / 4.0
    return KinematicError(position_mse, direction_err, type_err,
                          limit_mse, limits_compared, composite)


def _rank(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based), ties sharing their mean rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def pearson_r(x, y) -> float:
    """Product-moment correlation; NaN flags a constant series."""
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.shape != yv.shape or xv.ndim != 1 or len(xv) < 2:
        raise InvalidInputError("need two equal-length series of >= 2 values")
    dx = xv - xv.mean()
    dy = yv - yv.mean()
    den = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if den == 0.0:
        return math.nan
    return float(dx @ dy) / den


def spearman_rho(x, y) -> float:
    """Pearson correlation of average ranks; NaN on constant input."""
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.shape != yv.shape or xv.ndim != 1 or len(xv) < 2:
        raise InvalidInputError("need two equal-length series of >= 2 values")
    return pearson_r(_rank(xv), _rank(yv))


def metric_report(result: MetricResult) -> str:
    """Flat key=value lines for one MetricResult."""
    lines = []
    if result.cd_times_1e3 is not None:
        lines.append(f"cd_x1e3={result.cd_times_1e3:.6f}")
    if result.fscore_times_1e2 is not None:
        lines.append(f"fscore={result.fscore_times_1e2:.4f}")
    if result.psnr_db is not None:
        value = "inf" if math.isinf(result.psnr_db) else f"{result.psnr_db:.4f}"
        lines.append(f"psnr_db={value}")
    if result.scale_mse is not None:
        lines.append(f"scale_mse={result.scale_mse:.9g}")
    if result.kinematic is not None:
        k = result.kinematic
        lines.append(f"kin_position_mse={k.position_mse:.9g}")
        lines.append(f"kin_direction_err={k.direction_err:.9g}")
        lines.append(f"kin_type_err={k.type_err:.0f}")
        lines.append(f"kin_limit_mse={k.limit_mse:.9g}")
        lines.append(f"kin_limits_compared="
                     f"{'true' if k.limits_compared else 'false'}")
        lines.append(f"kin_composite={k.composite:.9g}")
    return "\n".join(lines) + "\n"


METRIC_TABLE_COLUMNS = (
    "asset_id", "cd_x1e3", "fscore", "psnr_db", "scale_mse", "kin_composite")


def metric_table(rows: dict[str, MetricResult]) -> str:
    """CSV table, one row per asset, stable column order."""
    def cell(value) -> str:
        if value is None:
            return ""
        if isinstance(value, float) and math.isinf(value):
            return "inf"
        return f"{value:.6g}"

    lines = [",".join(METRIC_TABLE_COLUMNS)]
    for asset_id in sorted(rows):
        r = rows[asset_id]
        kin = r.kinematic.composite if r.kinematic else None
        lines.append(",".join([
            asset_id,
            cell(r.cd_times_1e3),
            cell(r.fscore_times_1e2),
            cell(r.psnr_db),
            cell(r.scale_mse),
            cell(kin),
        ]))
    return "\n".join(lines) + "\n"
