"""Benchmark harness: judge-score validation, aggregation, human alignment.

Judge scores are produced externally (VLM judges watching renders and
simulation videos) and arrive as JSON files, one response object or an
array of them per file, with a ``"version": 1`` marker:

    {
      "version": 1,
      "asset_id": "cabinet_03",
      "geometry": {"clip": 0.77, "consistency_3d": 64.5, "visual_quality": 4},
      "scale": {"judged_max_dim_m": 1.8},
      "material": {"freefall": 61.0, "waterdrop": 57.5},
      "affordance": 70.5,
      "kinematics": {"prior_part": 82.0, "revealed_entity": 74.0,
                     "global_coherence": 81.0},
      "description": 39.0
    }

The harness turns these into the six benchmark dimensions: geometry scores
pass through (CLIP stays on its native 0..1 scale), the 1..5 visual grade
maps onto 0..100, scale becomes a plausibility score against the asset's
own maximum dimension, material averages the free-fall and water-drop
scenarios, and kinematics is the weighted average of its three components.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .asset import PhysicalAsset
from .errors import InvalidInputError
from .metrics import pearson_r, scale_plausibility, spearman_rho

WIRE_VERSION = 1

DIMENSIONS = ("clip", "consistency_3d", "visual_quality", "scale",
              "material", "affordance", "kinematics", "description")

DEFAULT_KINEMATICS_WEIGHTS = (0.4, 0.2, 0.4)


@dataclass(frozen=True)
class JudgeResponse:
    """Scores from the external judges for one asset; None = not evaluated."""

    asset_id: str
    clip: float | None = None  # [0, 1]
    consistency_3d: float | None = None  # [0, 100]
    visual_quality: int | None = None  # grade 1..5
    judged_max_dim_m: float | None = None  # > 0
    freefall: float | None = None  # [0, 100]
    waterdrop: float | None = None  # [0, 100]
    affordance: float | None = None  # [0, 100]
    prior_part: float | None = None  # [0, 100]
    revealed_entity: float | None = None  # [0, 100]
    global_coherence: float | None = None  # [0, 100]
    description: float | None = None  # [0, 100]


@dataclass(frozen=True)
class BenchReport:
    """Aggregated six-dimension scores, per asset and averaged."""

    kinematics_weights: tuple[float, float, float]
    per_asset: dict[str, dict[str, float]] = field(default_factory=dict)
    means: dict[str, float] = field(default_factory=dict)


def response_from_mapping(data: dict) -> JudgeResponse:
    """Build a response from the nested wire mapping."""
    if data.get("version") != WIRE_VERSION:
        raise InvalidInputError(
            f"unsupported judge response version {data.get('version')!r}")
    if "asset_id" not in data:
        raise InvalidInputError("judge response missing asset_id")
    geometry = data.get("geometry", {})
    scale = data.get("scale", {})
    material = data.get("material", {})
    kinematics = data.get("kinematics", {})
    vq = geometry.get("visual_quality")
    return JudgeResponse(
        asset_id=str(data["asset_id"]),
        clip=geometry.get("clip"),
        consistency_3d=geometry.get("consistency_3d"),
        visual_quality=None if vq is None else int(vq),
        judged_max_dim_m=scale.get("judged_max_dim_m"),
        freefall=material.get("freefall"),
        waterdrop=material.get("waterdrop"),
        affordance=data.get("affordance"),
        prior_part=kinematics.get("prior_part"),
        revealed_entity=kinematics.get("revealed_entity"),
        global_coherence=kinematics.get("global_coherence"),
        description=data.get("description"),
    )


def response_to_mapping(r: JudgeResponse) -> dict:
    return {
        "version": WIRE_VERSION,
        "asset_id": r.asset_id,
        "geometry": {
            "clip": r.clip,
            "consistency_3d": r.consistency_3d,
            "visual_quality": r.visual_quality,
        },
        "scale": {"judged_max_dim_m": r.judged_max_dim_m},
        "material": {"freefall": r.freefall, "waterdrop": r.waterdrop},
        "affordance": r.affordance,
        "kinematics": {
            "prior_part": r.prior_part,
            "revealed_entity": r.revealed_entity,
            "global_coherence": r.global_coherence,
        },
        "description": r.description,
    }


def load_judge_responses(path: str | Path) -> list[JudgeResponse]:
    """One response object or an array of them from a JSON file."""
    data = json.loads(Path(path).read_text())
    items = data if isinstance(data, list) else [data]
    return [response_from_mapping(item) for item in items]


_RANGES = {
    "geometry.clip": ("clip", 0.0, 1.0),
    "geometry.consistency_3d": ("consistency_3d", 0.0, 100.0),
    "scale.judged_max_dim_m": ("judged_max_dim_m", None, None),
    "material.freefall": ("freefall", 0.0, 100.0),
    "material.waterdrop": ("waterdrop", 0.0, 100.0),
    "affordance": ("affordance", 0.0, 100.0),
    "kinematics.prior_part": ("prior_part", 0.0, 100.0),
    "kinematics.revealed_entity": ("revealed_entity", 0.0, 100.0),
    "kinematics.global_coherence": ("global_coherence", 0.0, 100.0),
    "description": ("description", 0.0, 100.0),
}

_DIMENSION_FIELDS = {
    "geometry": ("clip", "consistency_3d", "visual_quality"),
    "scale": ("judged_max_dim_m",),
    "material": ("freefall", "waterdrop"),
    "affordance": ("affordance",),
    "kinematics": ("prior_part", "revealed_entity", "global_coherence"),
    "description": ("description",),
}


def validate_judge(response: JudgeResponse,
                   required_dimensions: tuple[str, ...] = tuple(
                       _DIMENSION_FIELDS)) -> list[str]:
    """Range and presence violations; an empty list means usable scores."""
    out: list[str] = []
    for dim in required_dimensions:
        if dim not in _DIMENSION_FIELDS:
            out.append(f"unknown dimension {dim!r}")
            continue
        for fname in _DIMENSION_FIELDS[dim]:
            if getattr(response, fname) is None:
                out.append(f"{response.asset_id}: missing {dim}.{fname}")

    for label, (fname, lo, hi) in _RANGES.items():
        value = getattr(response, fname)
        if value is None:
            continue
        if not math.isfinite(value):
            out.append(f"{response.asset_id}: {label}: not finite")
        elif fname == "judged_max_dim_m":
            if value <= 0:
                out.append(f"{response.asset_id}: {label}: must be > 0")
        elif not lo <= value <= hi:
            out.append(f"{response.asset_id}: {label}: {value} outside "
                       f"[{lo:g}, {hi:g}]")

    vq = response.visual_quality
    if vq is not None and vq not in (1, 2, 3, 4, 5):
        out.append(f"{response.asset_id}: geometry.visual_quality: "
                   f"{vq} outside grades 1..5")
    return out


def grade_to_score(grade: int) -> float:
    """Visual-quality grades 1..5 map linearly onto 0..100."""
    if grade not in (1, 2, 3, 4, 5):
        raise InvalidInputError(f"grade {grade} outside 1..5")
    return (grade - 1) * 25.0


def aggregate_kinematics(scores, weights) -> float:
    """Weighted average of the three kinematics components."""
    if len(scores) != 3 or len(weights) != 3:
        raise InvalidInputError("kinematics takes three scores and weights")
    if any(w < 0 for w in weights):
        raise InvalidInputError("weights must be non-negative")
    total = math.fsum(weights)
    if total <= 0:
        raise InvalidInputError("weights must not all be zero")
    return math.fsum(w * s for w, s in zip(weights, scores)) / total


def aggregate_report(responses: list[JudgeResponse],
                     assets: dict[str, PhysicalAsset],
                     weights=DEFAULT_KINEMATICS_WEIGHTS) -> BenchReport:
    """Fold validated judge responses into the six-dimension report.

    ``assets`` maps the ids the judges used (for file-based runs, the
    asset file stem) to the corresponding PhysicalAsset.
    """
    by_id = assets
    per_asset: dict[str, dict[str, float]] = {}
    for response in responses:
        problems = validate_judge(response)
        if problems:
            raise InvalidInputError("; ".join(problems))
        if response.asset_id in per_asset:
            raise InvalidInputError(f"duplicate asset id {response.asset_id}")
        asset = by_id.get(response.asset_id)
        if asset is None:
            raise InvalidInputError(
                f"no asset matches judge response {response.asset_id!r}")

        row = {
            "clip": response.clip,
            "consistency_3d": response.consistency_3d,
            "visual_quality": grade_to_score(response.visual_quality),
            "scale": scale_plausibility(max(asset.scale_m),
                                        response.judged_max_dim_m),
            "material": (response.freefall + response.waterdrop) / 2.0,
            "affordance": response.affordance,
            "kinematics": aggregate_kinematics(
                (response.prior_part, response.revealed_entity,
                 response.global_coherence), weights),
            "description": response.description,
        }
        per_asset[response.asset_id] = row

    if not per_asset:
        raise InvalidInputError("no judge responses to aggregate")

    means = {
        dim: math.fsum(row[dim] for row in per_asset.values()) / len(per_asset)
        for dim in DIMENSIONS
    }
    total = math.fsum(weights)
    return BenchReport(tuple(w / total for w in weights), per_asset, means)


def human_alignment(method_scores, human_scores) -> tuple[float, float]:
    """(Spearman rho, Pearson r) between benchmark and human scores."""
    if len(method_scores) != len(human_scores) or len(method_scores) < 2:
        raise InvalidInputError("need matched scores for at least 2 methods")
    return (spearman_rho(method_scores, human_scores),
            pearson_r(method_scores, human_scores))


# --- tabular output -------------------------------------------------------------

def report_csv(report: BenchReport) -> str:
    """Machine-readable rows: one line per asset plus a mean row."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("asset_id",) + DIMENSIONS)
    for asset_id in sorted(report.per_asset):
        row = report.per_asset[asset_id]
        writer.writerow([asset_id] + [f"{row[d]:.6g}" for d in DIMENSIONS])
    writer.writerow(["mean"] + [f"{report.means[d]:.6g}" for d in DIMENSIONS])
    return buf.getvalue()


def report_text(report: BenchReport) -> str:
    """Human-readable aligned table with the weights recorded."""
    headers = ("asset",) + DIMENSIONS
    rows = [[aid] + [f"{report.per_asset[aid][d]:.2f}" for d in DIMENSIONS]
            for aid in sorted(report.per_asset)]
    rows.append(["mean"] + [f"{report.means[d]:.2f}" for d in DIMENSIONS])
    widths = [max(len(headers[i]), *(len(r[i]) for r in rows))
              for i in range(len(headers))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    w = report.kinematics_weights
    lines.append(f"kinematics weights: prior_part={w[0]:g} "
                 f"revealed_entity={w[1]:g} global_coherence={w[2]:g}")
    return "\n".join(lines) + "\n"


def method_summary_csv(report: BenchReport, method: str) -> str:
    """(method, dimension, score) rows for the alignment pipeline."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("method", "dimension", "score"))
    for dim in DIMENSIONS:
        writer.writerow((method, dim, f"{report.means[dim]:.6g}"))
    return buf.getvalue()


def parse_score_csv(text: str) -> dict[str, dict[str, float]]:
    """Parse (method, dimension, score) rows into dimension -> method -> score."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header[:3]] != \
            ["method", "dimension", "score"]:
        raise InvalidInputError(
            "score table must start with 'method,dimension,score'")
    out: dict[str, dict[str, float]] = {}
    for row in reader:
        if not row:
            continue
        method, dimension, score = row[0].strip(), row[1].strip(), row[2]
        out.setdefault(dimension, {})[method] = float(score)
    return out


def alignment_from_tables(bench: dict[str, dict[str, float]],
                          human: dict[str, dict[str, float]],
                          ) -> dict[str, tuple[float, float]]:
    """Per-dimension (rho, r) over the methods present in both tables."""
    out: dict[str, tuple[float, float]] = {}
    for dimension in sorted(set(bench) & set(human)):
        methods = sorted(set(bench[dimension]) & set(human[dimension]))
        if len(methods) < 2:
            continue
        out[dimension] = human_alignment(
            [bench[dimension][m] for m in methods],
            [human[dimension][m] for m in methods])
    return out
