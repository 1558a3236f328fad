"""Template-based run-length codec for part voxel volumes.

A part grid is encoded slice by slice along z. Each slice becomes one of
four layer forms:

* ``E`` — all cells empty;
* ``F`` — all cells occupied;
* ``T <runs>`` — a template: the slice's own run-length encoding;
* ``D<k> <runs>`` — a delta: the RLE of the slice XOR the k-th template
  (templates are numbered in order of appearance, starting at 0).

Runs alternate empty/occupied counts over the row-major (x-fastest)
linearization of the slice, always starting with the empty count, which
may be zero. The serialized alphabet is digits, ``P T D E F``, space and
``|`` only, so the text rides on any stock tokenizer vocabulary.

The encoder is greedy and deterministic: a delta is chosen only when it is
strictly cheaper (in tokens) than a fresh template, ties between templates
resolving to the lowest index. This makes the template encoding never
worse than plain per-slice RLE, and an exact repeat of a template costs
two tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import CodeParseError, MalformedCodeError
from .voxel import PartGrid, SliceMask, VoxelGrid


class LayerKind(Enum):
    EMPTY = "E"
    FULL = "F"
    TEMPLATE = "T"
    DELTA = "D"


@dataclass(frozen=True)
class Layer:
    """One encoded z-slice."""

    kind: LayerKind
    runs: tuple[int, ...] | None = None  # TEMPLATE / DELTA only
    template_index: int | None = None  # DELTA only

    def token_cost(self) -> int:
        if self.kind in (LayerKind.EMPTY, LayerKind.FULL):
            return 1
        return 1 + len(self.runs)


@dataclass(frozen=True)
class PartCode:
    """Ordered layer list for one part; layer index is the z coordinate."""

    resolution: int
    layers: tuple[Layer, ...]

    @property
    def depth(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class CodeStats:
    """Token accounting for one part under the three encodings."""

    token_count: int
    template_count: int
    delta_count: int
    empty_count: int
    full_count: int
    plain_rle_tokens: int
    voxel_index_tokens: int


def _runs_of_bits(bits: np.ndarray) -> tuple[int, ...]:
    """Alternating empty/occupied run lengths, empty count first."""
    n = bits.size
    if not bits.any():
        return (n,)
    flips = np.flatnonzero(np.diff(bits.view(np.int8))) + 1
    lengths = np.diff(np.concatenate(([0], flips, [n])))
    runs = lengths.tolist()
    if bits[0]:
        runs.insert(0, 0)
    return tuple(int(r) for r in runs)


def _run_count_rows(rows: np.ndarray) -> np.ndarray:
    """len(runs) per row of a (N, R*R) bit matrix, without materializing."""
    flips = np.count_nonzero(np.diff(rows.view(np.int8), axis=1), axis=1)
    return flips + 1 + rows[:, 0]


def _expand_runs(runs: tuple[int, ...], n_cells: int,
                 layer: int | None = None) -> np.ndarray:
    if len(runs) == 0:
        raise MalformedCodeError("empty run list", layer)
    if runs[0] < 0 or any(r < 1 for r in runs[1:]):
        raise MalformedCodeError("runs after the first must be >= 1", layer)
    if sum(runs) != n_cells:
        raise MalformedCodeError(
            f"run sum {sum(runs)} != cell count {n_cells}", layer)
    values = np.arange(len(runs)) % 2  # 0 = empty, 1 = occupied
    return np.repeat(values, runs).astype(bool)


def encode_slice(mask: SliceMask) -> tuple[int, ...]:
    """RLE of one slice mask, empty count first."""
    return _runs_of_bits(mask.linear())


def decode_slice(runs: tuple[int, ...] | list[int],
                 resolution: int) -> SliceMask:
    """Inverse of encode_slice; rejects run lists whose sum is not R^2."""
    bits = _expand_runs(tuple(runs), resolution * resolution)
    return SliceMask.from_linear(bits, resolution)


def encode_part(part: PartGrid) -> PartCode:
    """Greedy template/delta encoding of all z-slices of a part."""
    R = part.grid.resolution
    occ = part.grid.occupancy
    layers: list[Layer] = []
    template_rows: list[np.ndarray] = []

    for z in range(R):
        bits = occ[:, :, z].flatten(order="F")
        ones = int(bits.sum())
        if ones == 0:
            layers.append(Layer(LayerKind.EMPTY))
            continue
        if ones == bits.size:
            layers.append(Layer(LayerKind.FULL))
            continue

        fresh_runs = _runs_of_bits(bits)
        fresh_cost = 1 + len(fresh_runs)
        if template_rows:
            xors = np.vstack(template_rows) ^ bits
            delta_costs = 1 + _run_count_rows(xors)
            ti = int(np.argmin(delta_costs))  # first minimum: lowest index
            if int(delta_costs[ti]) < fresh_cost:
                layers.append(Layer(LayerKind.DELTA,
                                    _runs_of_bits(xors[ti]), ti))
                continue
        layers.append(Layer(LayerKind.TEMPLATE, fresh_runs))
        template_rows.append(bits)

    return PartCode(R, tuple(layers))


def decode_part(code: PartCode, part_id: int = 0) -> PartGrid:
    """Rebuild the part grid on the canonical lattice (origin 0, size 1)."""
    R = code.resolution
    if code.depth != R:
        raise MalformedCodeError(
            f"code has {code.depth} layers, grid needs {R}")
    n_cells = R * R
    slices = []
    templates: list[np.ndarray] = []
    for z, layer in enumerate(code.layers):
        if layer.kind is LayerKind.EMPTY:
            bits = np.zeros(n_cells, dtype=bool)
        elif layer.kind is LayerKind.FULL:
            bits = np.ones(n_cells, dtype=bool)
        elif layer.kind is LayerKind.TEMPLATE:
            bits = _expand_runs(layer.runs, n_cells, layer=z)
            templates.append(bits)
        else:
            k = layer.template_index
            if k is None or not 0 <= k < len(templates):
                raise MalformedCodeError(
                    f"delta references template {k} but only "
                    f"{len(templates)} templates precede it", layer=z)
            bits = templates[k] ^ _expand_runs(layer.runs, n_cells, layer=z)
        slices.append(bits.reshape((R, R), order="F"))

    return PartGrid(part_id, VoxelGrid(R, np.stack(slices, axis=2)))


def serialize_part(code: PartCode) -> str:
    """Render a code in the textual grammar (header ``P<R>``, ``|`` layers)."""
    fields = [f"P{code.resolution}"]
    for layer in code.layers:
        if layer.kind is LayerKind.EMPTY:
            fields.append("E")
        elif layer.kind is LayerKind.FULL:
            fields.append("F")
        elif layer.kind is LayerKind.TEMPLATE:
            fields.append("T " + " ".join(str(r) for r in layer.runs))
        else:
            fields.append(f"D{layer.template_index} "
                          + " ".join(str(r) for r in layer.runs))
    return "|".join(fields)


def _parse_int(text: str, pos: int, what: str) -> tuple[int, int]:
    end = pos
    while end < len(text) and text[end].isdigit():
        end += 1
    if end == pos:
        raise CodeParseError(f"expected {what}", pos)
    return int(text[pos:end]), end


def parse_part(text: str) -> PartCode:
    """Strict inverse of serialize_part; faults carry their byte offset."""
    if not text.startswith("P"):
        raise CodeParseError("code must start with 'P'", 0)
    resolution, pos = _parse_int(text, 1, "resolution after 'P'")
    if resolution < 2:
        raise CodeParseError(f"resolution {resolution} < 2", 1)
    n_cells = resolution * resolution

    layers: list[Layer] = []
    template_count = 0
    while pos < len(text):
        if text[pos] != "|":
            raise CodeParseError("expected '|' between layers", pos)
        pos += 1
        if pos >= len(text):
            raise CodeParseError("trailing '|' without a layer", pos)
        tag = text[pos]
        field_start = pos
        if tag in ("E", "F"):
            pos += 1
            if pos < len(text) and text[pos] != "|":
                raise CodeParseError(f"garbage after '{tag}' layer", pos)
            layers.append(Layer(LayerKind.EMPTY if tag == "E"
                                else LayerKind.FULL))
            continue
        if tag == "T":
            pos += 1
            tindex = None
        elif tag == "D":
            tindex, pos = _parse_int(text, pos + 1, "template index after 'D'")
            if tindex >= template_count:
                raise CodeParseError(
                    f"delta references template {tindex} but only "
                    f"{template_count} templates precede it", field_start)
        else:
            raise CodeParseError(f"unknown layer tag {tag!r}", pos)

        runs = []
        while pos < len(text) and text[pos] == " ":
            run, pos = _parse_int(text, pos + 1, "run length")
            runs.append(run)
        if pos < len(text) and text[pos] != "|":
            raise CodeParseError("expected space-separated runs", pos)
        if not runs:
            raise CodeParseError("layer carries no runs", field_start)
        if runs[0] < 0 or any(r < 1 for r in runs[1:]):
            raise CodeParseError("runs after the first must be >= 1",
                                 field_start)
        if sum(runs) != n_cells:
            raise CodeParseError(
                f"run sum {sum(runs)} != {n_cells}", field_start)
        if tindex is None:
            layers.append(Layer(LayerKind.TEMPLATE, tuple(runs)))
            template_count += 1
        else:
            layers.append(Layer(LayerKind.DELTA, tuple(runs), tindex))

    return PartCode(resolution, tuple(layers))


def token_count(text: str) -> int:
    """Tokens under the separator proxy: split on whitespace and ``|``."""
    return len(text.replace("|", " ").split())


def encode_voxel_index_baseline(part: PartGrid) -> str:
    """Ascending linear indices of occupied voxels (x-fastest order)."""
    linear = part.grid.occupancy.flatten(order="F")
    return " ".join(str(i) for i in np.flatnonzero(linear))


def decode_voxel_index_baseline(text: str, resolution: int,
                                part_id: int = 0) -> PartGrid:
    occ = np.zeros(resolution ** 3, dtype=bool)
    if text.strip():
        occ[np.array(text.split(), dtype=np.int64)] = True
    occ = occ.reshape((resolution,) * 3, order="F")
    return PartGrid(part_id, VoxelGrid(resolution, occ))


def encode_plain_rle_baseline(part: PartGrid) -> str:
    """Per-slice RLE in the same grammar, never using deltas."""
    R = part.grid.resolution
    occ = part.grid.occupancy
    layers = []
    for z in range(R):
        bits = occ[:, :, z].flatten(order="F")
        ones = int(bits.sum())
        if ones == 0:
            layers.append(Layer(LayerKind.EMPTY))
        elif ones == bits.size:
            layers.append(Layer(LayerKind.FULL))
        else:
            layers.append(Layer(LayerKind.TEMPLATE, _runs_of_bits(bits)))
    return serialize_part(PartCode(R, tuple(layers)))


def compute_stats(part: PartGrid) -> CodeStats:
    """Token accounting of the template encoding against both baselines."""
    code = encode_part(part)
    kinds = [layer.kind for layer in code.layers]
    return CodeStats(
        token_count=token_count(serialize_part(code)),
        template_count=kinds.count(LayerKind.TEMPLATE),
        delta_count=kinds.count(LayerKind.DELTA),
        empty_count=kinds.count(LayerKind.EMPTY),
        full_count=kinds.count(LayerKind.FULL),
        plain_rle_tokens=token_count(encode_plain_rle_baseline(part)),
        voxel_index_tokens=token_count(encode_voxel_index_baseline(part)),
    )


def stats_of_text(text: str) -> CodeStats:
    """Token accounting for an existing serialized code.

    Layer counts come from the code as written; the baselines are computed
    fresh from the decoded grid, so the report compares the file's actual
    cost against what the alternatives would have spent.
    """
    code = parse_part(text.strip())
    part = decode_part(code)
    kinds = [layer.kind for layer in code.layers]
    return CodeStats(
        token_count=token_count(text),
        template_count=kinds.count(LayerKind.TEMPLATE),
        delta_count=kinds.count(LayerKind.DELTA),
        empty_count=kinds.count(LayerKind.EMPTY),
        full_count=kinds.count(LayerKind.FULL),
        plain_rle_tokens=token_count(encode_plain_rle_baseline(part)),
        voxel_index_tokens=token_count(encode_voxel_index_baseline(part)),
    )


def stats_report(stats: CodeStats, budget: int = 16384) -> str:
    """Flat key=value report for one part's CodeStats."""
    lines = [
        f"token_count={stats.token_count}",
        f"template_count={stats.template_count}",
        f"delta_count={stats.delta_count}",
        f"empty_count={stats.empty_count}",
        f"full_count={stats.full_count}",
        f"plain_rle_tokens={stats.plain_rle_tokens}",
        f"voxel_index_tokens={stats.voxel_index_tokens}",
        f"budget={budget}",
        f"within_budget={'true' if stats.token_count <= budget else 'false'}",
    ]
    return "\n".join(lines) + "\n"
