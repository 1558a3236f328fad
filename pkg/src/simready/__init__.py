"""Simulation-ready 3D asset toolkit.

Voxel substrate and template-RLE geometry codec, the tree-structured
physical asset model with its canonical text form, URDF export, the
conventional evaluation metrics and the ground-truth-free benchmark
aggregation, plus a batch CLI (``simready``).
"""

from .asset import (
    JointKind,
    JointSpec,
    MaterialSpec,
    PartSpec,
    PhysicalAsset,
    affordance_ranking,
    parse_asset,
    serialize_asset,
    validate,
)
from .bench import (
    BenchReport,
    JudgeResponse,
    aggregate_kinematics,
    aggregate_report,
    human_alignment,
    validate_judge,
)
from .codec import (
    CodeStats,
    Layer,
    LayerKind,
    PartCode,
    compute_stats,
    decode_part,
    decode_slice,
    encode_part,
    encode_plain_rle_baseline,
    encode_slice,
    encode_voxel_index_baseline,
    parse_part,
    serialize_part,
    token_count,
)
from .errors import (
    AssetError,
    CodeParseError,
    ExportError,
    InvalidInputError,
    MalformedCodeError,
    SimreadyError,
)
from .metrics import (
    GrayImage,
    KinematicError,
    MetricResult,
    PointCloud,
    chamfer_distance,
    fscore,
    kinematic_error,
    pearson_r,
    psnr,
    sample_points,
    scale_mse,
    scale_plausibility,
    spearman_rho,
)
from .urdf import UrdfBundle, export_urdf, validate_urdf
from .voxel import (
    PartGrid,
    SliceMask,
    TriangleMesh,
    VoxelGrid,
    extract_boundary_mesh,
    fill_solid,
    slice_z,
    split_parts,
    voxelize_surface,
)

__version__ = "0.1.0"
