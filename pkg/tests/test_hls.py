"""Playlist grammar, segmentation, and the render/parse inverse pair."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drmtestbed.hls import (
    AUDIO_MAGIC,
    BITRATE_LADDER,
    DEFAULT_CHUNK_BYTES,
    SEGMENT_SECONDS,
    IndexManifest,
    ManifestError,
    MasterManifest,
    MediaAsset,
    assemble,
    parse_index,
    parse_master,
    render_index,
    render_master,
    segment,
)

# ------------------------------------------------------------ media model


def test_media_asset_validation():
    MediaAsset("t", "Title", {320: b"x"})
    with pytest.raises(ValueError):
        MediaAsset("", "Title", {320: b"x"})
    with pytest.raises(ValueError):
        MediaAsset("t", "Title", {})
    with pytest.raises(ValueError):
        MediaAsset("t", "Title", {192: b"x"})  # not on the ladder
    with pytest.raises(ValueError):
        MediaAsset("t", "Title", {320: b""})


def test_media_asset_accessors():
    asset = MediaAsset("t", "Title", {64: b"low", 320: b"hi", 128: b"mid"})
    assert asset.top_bitrate() == 320
    assert asset.variant(64) == b"low"
    assert not asset.premium


def test_ladder_and_defaults_are_pinned():
    assert BITRATE_LADDER == (320, 128, 64, 32, 16)
    assert DEFAULT_CHUNK_BYTES == 32768
    assert SEGMENT_SECONDS == 10.0
    assert AUDIO_MAGIC == b"AUD0"


# ------------------------------------------------------------- manifests


def test_master_rejects_duplicate_bandwidth():
    with pytest.raises(ValueError):
        MasterManifest(entries=[(128, "a.m3u8"), (128, "b.m3u8")])


def test_master_best_picks_highest_bandwidth():
    m = MasterManifest(entries=[(64, "a"), (320, "b"), (128, "c")])
    assert m.best() == (320, "b")


def test_render_master_exact_bytes():
    m = MasterManifest(entries=[(320000, "hi/index.m3u8"), (64000, "lo/index.m3u8")])
    assert render_master(m) == (
        "#EXTM3U\n"
        "#EXT-X-STREAM-INF:BANDWIDTH=320000\n"
        "hi/index.m3u8\n"
        "#EXT-X-STREAM-INF:BANDWIDTH=64000\n"
        "lo/index.m3u8\n"
    )


def test_render_index_exact_bytes():
    m = IndexManifest(variant_bitrate=128, segments=[("seg_00000.ts", 10.0), ("seg_00001.ts", 3.5)])
    assert render_index(m) == (
        "#EXTM3U\n"
        "#EXTINF:10.0,\n"
        "seg_00000.ts\n"
        "#EXTINF:3.5,\n"
        "seg_00001.ts\n"
        "#EXT-X-ENDLIST\n"
    )


def test_parse_master_round_trip():
    m = MasterManifest(entries=[(320, "a.m3u8"), (16, "b.m3u8")])
    assert parse_master(render_master(m)) == m


def test_parse_index_round_trip_with_out_of_band_bitrate():
    m = IndexManifest(variant_bitrate=64, segments=[("s0.ts", 10.0), ("s1.ts", 0.25)])
    assert parse_index(render_index(m), variant_bitrate=64) == m


def test_parse_empty_master_is_legal():
    assert parse_master("#EXTM3U\n") == MasterManifest(entries=[])


def test_parse_empty_index_needs_endlist():
    assert parse_index("#EXTM3U\n#EXT-X-ENDLIST\n") == IndexManifest(variant_bitrate=0, segments=[])


# ------------------------------------------------- parse errors with lines


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("#EXTM3U8\n", 1),
    ("#EXTM3U\nnot-a-tag\n", 2),
    ("#EXTM3U\n#EXT-X-STREAM-INF:BANDWIDTH=abc\nuri\n", 2),
    ("#EXTM3U\n#EXT-X-STREAM-INF:BANDWIDTH=\nuri\n", 2),
    ("#EXTM3U\n#EXT-X-STREAM-INF:BANDWIDTH=12\n", 3),
    ("#EXTM3U\n#EXT-X-STREAM-INF:BANDWIDTH=12\n#comment\n", 3),
])
def test_parse_master_error_lines(text, line):
    with pytest.raises(ManifestError) as info:
        parse_master(text)
    assert info.value.line == line
    assert f"line {line}:" in str(info.value)


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("#EXTM3U\n#EXTINF:10.0,\nseg.ts\n", 4),            # missing endlist
    ("#EXTM3U\n#EXTINF:10.0\nseg.ts\n#EXT-X-ENDLIST\n", 2),  # no trailing comma
    ("#EXTM3U\n#EXTINF:ten,\nseg.ts\n#EXT-X-ENDLIST\n", 2),
    ("#EXTM3U\n#EXTINF:10.0,\n\n#EXT-X-ENDLIST\n", 3),  # blank uri
    ("#EXTM3U\n#EXT-X-ENDLIST\nextra\n", 3),            # content after endlist
    ("#EXTM3U\nseg.ts\n", 2),                            # bare uri
])
def test_parse_index_error_lines(text, line):
    with pytest.raises(ManifestError) as info:
        parse_index(text)
    assert info.value.line == line


def test_cr_rejected_with_line_number():
    with pytest.raises(ManifestError) as info:
        parse_master("#EXTM3U\r\n")
    assert info.value.line == 1
    with pytest.raises(ManifestError) as info:
        parse_index("#EXTM3U\n#EXTINF:1.0,\r\nx\n#EXT-X-ENDLIST\n")
    assert info.value.line == 2


# ------------------------------------------------------------ segmentation


def test_segment_exact_chunking():
    chunks, index = segment(b"abcdefghij", 4, bitrate=64, uri_prefix="p/")
    assert chunks == [b"abcd", b"efgh", b"ij"]
    assert index.variant_bitrate == 64
    assert index.segments == [
        ("p/seg_00000.ts", SEGMENT_SECONDS),
        ("p/seg_00001.ts", SEGMENT_SECONDS),
        ("p/seg_00002.ts", SEGMENT_SECONDS),
    ]


def test_segment_empty_media():
    chunks, index = segment(b"", 16)
    assert chunks == [] and index.segments == []
    assert assemble(chunks) == b""


def test_segment_rejects_nonpositive_chunk():
    with pytest.raises(ValueError):
        segment(b"x", 0)


def test_assemble_inverts_segment():
    rng = random.Random(77)
    for _ in range(50):
        media = rng.randbytes(rng.randrange(0, 5000))
        chunk = rng.randrange(1, 700)
        chunks, index = segment(media, chunk)
        assert assemble(chunks) == media
        assert len(chunks) == len(index.segments)
        # every chunk but the last is exactly chunk bytes
        assert all(len(c) == chunk for c in chunks[:-1])


# ------------------------------------------------------------- properties

uri_chars = st.text(
    alphabet=st.characters(codec="ascii", exclude_characters="#\n\r",
                           categories=("L", "N", "P", "S")),
    min_size=1, max_size=40,
)


@given(st.lists(st.tuples(st.integers(min_value=0, max_value=10 ** 9), uri_chars),
                max_size=8, unique_by=lambda e: e[0]))
@settings(max_examples=80)
def test_master_render_parse_identity(entries):
    m = MasterManifest(entries=entries)
    assert parse_master(render_master(m)) == m


@given(st.lists(st.tuples(uri_chars, st.floats(min_value=0.0, max_value=10 ** 6,
                                               allow_nan=False, allow_infinity=False)),
                max_size=8))
@settings(max_examples=80)
def test_index_render_parse_identity(segments):
    m = IndexManifest(variant_bitrate=128, segments=segments)
    assert parse_index(render_index(m), variant_bitrate=128) == m
