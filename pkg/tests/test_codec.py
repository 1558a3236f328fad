import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simready.codec import (
    CodeStats,
    Layer,
    LayerKind,
    PartCode,
    compute_stats,
    decode_part,
    decode_slice,
    decode_voxel_index_baseline,
    encode_part,
    encode_plain_rle_baseline,
    encode_slice,
    encode_voxel_index_baseline,
    parse_part,
    serialize_part,
    stats_report,
    token_count,
)
from simready.errors import CodeParseError, MalformedCodeError
from simready.voxel import PartGrid, SliceMask, VoxelGrid

from meshes import random_part_grid
from oracles import expand_runs_naive

CODE_ALPHABET = set("0123456789PTDEF |")


def make_part(occ):
    occ = np.asarray(occ, dtype=bool)
    return PartGrid(0, VoxelGrid(occ.shape[0], occ))


def first_row_mask(R=4):
    bits = np.zeros((R, R), dtype=bool)
    bits[:, 0] = True
    return SliceMask(bits)


class TestSliceRle:
    def test_all_zero(self):
        assert encode_slice(SliceMask(np.zeros((4, 4), dtype=bool))) == (16,)

    def test_first_row_ones(self):
        assert encode_slice(first_row_mask()) == (0, 4, 12)

    def test_random_round_trip_against_expansion_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            bits = rng.random((8, 8)) < rng.uniform(0.05, 0.95)
            mask = SliceMask(bits)
            runs = encode_slice(mask)
            assert np.array_equal(expand_runs_naive(runs), mask.linear())
            assert np.array_equal(decode_slice(runs, 8).bits, bits)

    def test_decode_all_zero(self):
        assert not decode_slice((16,), 4).bits.any()

    def test_decode_all_one(self):
        assert decode_slice((0, 16), 4).bits.all()

    def test_decode_sum_mismatch(self):
        with pytest.raises(MalformedCodeError):
            decode_slice((3, 5, 9), 4)

    def test_decode_interior_zero_rejected(self):
        with pytest.raises(MalformedCodeError):
            decode_slice((4, 0, 12), 4)

    def test_no_mergeable_runs(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            mask = SliceMask(rng.random((6, 6)) < 0.5)
            runs = encode_slice(mask)
            assert runs[0] >= 0
            assert all(r >= 1 for r in runs[1:])


class TestEncodePart:
    def test_all_empty(self):
        code = encode_part(make_part(np.zeros((8, 8, 8), dtype=bool)))
        assert all(l.kind is LayerKind.EMPTY for l in code.layers)

    def test_prism_is_one_template_plus_deltas(self):
        occ = np.zeros((64, 64, 64), dtype=bool)
        occ[10:30, 12:40, :] = True  # constant cross-section, full height
        code = encode_part(make_part(occ))
        kinds = [l.kind for l in code.layers]
        assert kinds.count(LayerKind.TEMPLATE) == 1
        assert kinds.count(LayerKind.DELTA) == 63
        for layer in code.layers:
            if layer.kind is LayerKind.DELTA:
                assert layer.runs == (64 * 64,)
                assert layer.template_index == 0

    def test_full_layers(self):
        occ = np.ones((4, 4, 4), dtype=bool)
        code = encode_part(make_part(occ))
        assert all(l.kind is LayerKind.FULL for l in code.layers)

    @pytest.mark.parametrize("resolution", [8, 16, 32])
    def test_round_trip_random(self, resolution):
        rng = np.random.default_rng(resolution)
        for _ in range(8):
            part = random_part_grid(resolution, rng)
            code = encode_part(part)
            back = decode_part(code)
            assert np.array_equal(back.grid.occupancy, part.grid.occupancy)

    def test_deterministic_serialization(self):
        rng = np.random.default_rng(21)
        part = random_part_grid(16, rng)
        a = serialize_part(encode_part(part))
        b = serialize_part(encode_part(
            PartGrid(0, VoxelGrid(16, part.grid.occupancy.copy()))))
        assert a == b


class TestDecodePartErrors:
    def test_all_empty_layers(self):
        code = PartCode(4, tuple(Layer(LayerKind.EMPTY) for _ in range(4)))
        assert decode_part(code).grid.count() == 0

    def test_template_then_identity_delta(self):
        runs = (0, 4, 12)
        code = PartCode(4, (
            Layer(LayerKind.TEMPLATE, runs),
            Layer(LayerKind.DELTA, (16,), 0),
            Layer(LayerKind.EMPTY),
            Layer(LayerKind.EMPTY),
        ))
        grid = decode_part(code).grid
        assert np.array_equal(grid.occupancy[:, :, 0], grid.occupancy[:, :, 1])
        assert grid.occupancy[:, :, 0].sum() == 4

    def test_dangling_template_reference(self):
        code = PartCode(4, (
            Layer(LayerKind.TEMPLATE, (0, 4, 12)),
            Layer(LayerKind.EMPTY),
            Layer(LayerKind.DELTA, (16,), 3),
            Layer(LayerKind.EMPTY),
        ))
        with pytest.raises(MalformedCodeError) as err:
            decode_part(code)
        assert err.value.layer == 2
        assert "layer 2" in str(err.value)

    def test_run_sum_mismatch_names_layer(self):
        code = PartCode(4, (
            Layer(LayerKind.EMPTY),
            Layer(LayerKind.TEMPLATE, (3, 5)),
            Layer(LayerKind.EMPTY),
            Layer(LayerKind.EMPTY),
        ))
        with pytest.raises(MalformedCodeError) as err:
            decode_part(code)
        assert err.value.layer == 1

    def test_depth_mismatch(self):
        code = PartCode(4, (Layer(LayerKind.EMPTY), Layer(LayerKind.EMPTY)))
        with pytest.raises(MalformedCodeError):
            decode_part(code)


class TestGrammar:
    def test_two_empty_layers(self):
        code = PartCode(4, (Layer(LayerKind.EMPTY), Layer(LayerKind.EMPTY)))
        assert serialize_part(code) == "P4|E|E"

    def test_template_then_delta(self):
        occ = np.zeros((4, 4, 4), dtype=bool)
        occ[:, 0, 0] = True
        occ[:, 0, 1] = True
        code = encode_part(make_part(occ))
        text = serialize_part(code)
        assert text == "P4|T 0 4 12|D0 16|E|E"

    def test_parse_empty_layers(self):
        code = parse_part("P4|E|E|E|E")
        assert code.resolution == 4
        assert all(l.kind is LayerKind.EMPTY for l in code.layers)

    def test_parse_unknown_tag_offset(self):
        with pytest.raises(CodeParseError) as err:
            parse_part("P4|X")
        assert err.value.offset == 3

    def test_parse_rejects_trailing_garbage(self):
        with pytest.raises(CodeParseError):
            parse_part("P4|E|E junk")

    def test_parse_rejects_bad_run_sum(self):
        with pytest.raises(CodeParseError):
            parse_part("P4|T 3 5")

    def test_parse_rejects_dangling_delta(self):
        with pytest.raises(CodeParseError):
            parse_part("P4|D0 16")

    def test_parse_rejects_missing_resolution(self):
        with pytest.raises(CodeParseError) as err:
            parse_part("P|E")
        assert err.value.offset == 1

    def test_round_trip_on_random_codes(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            part = random_part_grid(8, rng)
            text = serialize_part(encode_part(part))
            assert serialize_part(parse_part(text)) == text

    def test_alphabet_is_closed(self):
        rng = np.random.default_rng(41)
        for _ in range(20):
            part = random_part_grid(16, rng)
            text = serialize_part(encode_part(part))
            assert set(text) <= CODE_ALPHABET


class TestTokenCount:
    def test_examples(self):
        assert token_count("P4|E|E") == 3
        assert token_count("P4|T 0 4 12|D0 16") == 7
        assert token_count("") == 0


class TestBaselines:
    def test_voxel_index_single(self):
        occ = np.zeros((4, 4, 4), dtype=bool)
        occ[0, 0, 0] = True
        assert encode_voxel_index_baseline(make_part(occ)) == "0"

    def test_voxel_index_cube_count(self):
        occ = np.zeros((16, 16, 16), dtype=bool)
        occ[:, :, :] = True
        text = encode_voxel_index_baseline(make_part(occ))
        assert token_count(text) == 4096

    def test_voxel_index_round_trip(self):
        rng = np.random.default_rng(6)
        occ = rng.random((8, 8, 8)) < 0.3
        text = encode_voxel_index_baseline(make_part(occ))
        back = decode_voxel_index_baseline(text, 8)
        assert np.array_equal(back.grid.occupancy, occ)

    def test_plain_rle_repeats_full_runs(self):
        occ = np.zeros((8, 8, 8), dtype=bool)
        occ[2:5, 3:6, :] = True
        text = encode_plain_rle_baseline(make_part(occ))
        fields = text.split("|")[1:]
        assert len(set(fields)) == 1  # identical template per slice
        assert all(f.startswith("T ") for f in fields)

    def test_plain_rle_equal_on_empty(self):
        part = make_part(np.zeros((8, 8, 8), dtype=bool))
        assert token_count(encode_plain_rle_baseline(part)) == \
            token_count(serialize_part(encode_part(part)))

    def test_template_never_worse(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            part = random_part_grid(16, rng)
            assert token_count(serialize_part(encode_part(part))) <= \
                token_count(encode_plain_rle_baseline(part))


class TestCodeStats:
    def test_counts_consistent(self):
        rng = np.random.default_rng(19)
        part = random_part_grid(16, rng)
        stats = compute_stats(part)
        assert stats.template_count + stats.delta_count + stats.empty_count \
            + stats.full_count == 16
        assert stats.token_count <= stats.plain_rle_tokens

    def test_report_format(self):
        stats = CodeStats(10, 1, 2, 3, 0, 12, 40)
        report = stats_report(stats)
        assert "token_count=10" in report
        assert "within_budget=true" in report
        for line in report.strip().splitlines():
            assert "=" in line


# --- property tests -----------------------------------------------------------

@st.composite
def part_grids(draw, max_resolution=12):
    resolution = draw(st.sampled_from([4, 8, max_resolution]))
    seed = draw(st.integers(0, 2 ** 31 - 1))
    rng = np.random.default_rng(seed)
    return random_part_grid(resolution, rng)


@settings(max_examples=40, deadline=None)
@given(part_grids())
def test_property_lossless(part):
    back = decode_part(encode_part(part))
    assert np.array_equal(back.grid.occupancy, part.grid.occupancy)


@settings(max_examples=40, deadline=None)
@given(part_grids())
def test_property_grammar_closure(part):
    text = serialize_part(encode_part(part))
    assert set(text) <= CODE_ALPHABET
    assert serialize_part(parse_part(text)) == text


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 60), st.integers(0, 2 ** 31 - 1))
def test_property_repeated_slice_costs_at_most_three_tokens(height, seed):
    # extrusions of the same cross-section: one more identical slice adds
    # at most tag + run tokens
    rng = np.random.default_rng(seed)
    mask = rng.random((8, 8)) < 0.4
    if not mask.any() or mask.all():
        mask[0, 0] = True
        mask[1, 0] = False
    occ = np.zeros((8, 8, 8), dtype=bool)
    base = np.zeros((8, 8, 8), dtype=bool)
    h = min(height, 7)
    occ[:, :, :h + 1] = mask[:, :, None]
    base[:, :, :h] = mask[:, :, None]
    longer = token_count(serialize_part(encode_part(make_part(occ))))
    shorter = token_count(serialize_part(encode_part(make_part(base))))
    assert longer - shorter <= 3
