import json

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.extra.numpy import arrays

from oodlab.config import Split
from oodlab.corpus import (SPECIAL_TOKENS, UNK, Alphabet, DatasetManifest, GrayImage,
                           SampleRef, build_alphabet, load_image, load_manifest,
                           load_split_images, normalize_text, resize_image, save_image,
                           write_manifest)
from oodlab.errors import DataError, ManifestError, UsageError

from conftest import write_pgm


# ============================================================================
# PGM
# ============================================================================

class TestPgm:
    def test_reads_hand_written_file(self, tmp_path):
        raster = np.array([[0, 128, 255], [255, 0, 64]], dtype=np.uint8)
        img = load_image(write_pgm(tmp_path / "a.pgm", raster))
        assert img.shape == (2, 3)
        np.testing.assert_array_equal(img.pixels, raster / 255.0)

    def test_header_comments_are_skipped(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5\n# made by hand\n2 1\n# max\n255\n" + bytes([10, 20]))
        np.testing.assert_array_equal(load_image(path).quantized(), [[10, 20]])

    def test_save_then_load_is_bit_exact(self, tmp_path, rng):
        raster = rng.integers(0, 256, size=(5, 7)).astype(np.uint8)
        img = GrayImage.from_array(raster / 255.0)
        loaded = load_image(save_image(img, tmp_path / "x.pgm"))
        np.testing.assert_array_equal(loaded.quantized(), raster)

    @pytest.mark.parametrize("payload, fragment", [
        (b"P2\n1 1\n255\n\x00", "magic"),
        (b"P5\n1 1\n65535\n\x00\x00", "max value"),
        (b"P5\n2 2\n255\n\x00\x00", "truncated payload"),
        (b"P5\n2", "truncated header"),
    ])
    def test_malformed_files(self, tmp_path, payload, fragment):
        path = tmp_path / "bad.pgm"
        path.write_bytes(payload)
        with pytest.raises(DataError, match=fragment):
            load_image(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_image(tmp_path / "none.pgm")

    def test_out_of_range_pixels(self):
        with pytest.raises(DataError):
            GrayImage.from_array(np.array([[1.5]]))


# ============================================================================
# RESIZE
# ============================================================================

class TestResize:
    def test_same_size_is_identity(self, rng):
        img = GrayImage.from_array(rng.random((4, 6)))
        np.testing.assert_array_equal(resize_image(img, 4, 6).pixels, img.pixels)

    def test_checkerboard_upsampling_weights(self):
        img = GrayImage.from_array(np.array([[0.0, 1.0], [1.0, 0.0]]))
        out = resize_image(img, 4, 4).pixels
        assert out[0, 0] == 0.0 and out[3, 3] == 0.0
        assert out[0, 3] == 1.0 and out[3, 0] == 1.0
        # (0.75, 0.25) weights on both axes
        assert out[1, 1] == pytest.approx(0.375)
        assert out[1, 2] == pytest.approx(0.625)

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
                  elements=st.floats(0.0, 1.0)),
           st.integers(1, 9), st.integers(1, 9))
    def test_output_stays_within_input_range(self, pixels, h, w):
        out = resize_image(GrayImage.from_array(pixels), h, w).pixels
        assert out.shape == (h, w)
        assert out.min() >= pixels.min() - 1e-12
        assert out.max() <= pixels.max() + 1e-12

    def test_non_positive_size(self):
        with pytest.raises(UsageError):
            resize_image(GrayImage.from_array(np.ones((2, 2))), 0, 3)


# ============================================================================
# MANIFESTS
# ============================================================================

def _write_lines(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
    return path


class TestManifest:
    def test_load_resolves_paths(self, tmp_path):
        path = _write_lines(tmp_path / "m.jsonl", [
            {"name": "iam", "language": "en"},
            {"split": "train", "image": "img/1.pgm", "text": "A MOVE"},
            {"split": "test", "image": "img/2.pgm", "text": "to stop"},
        ])
        manifest = load_manifest(path)
        assert manifest.name == "iam"
        assert manifest.split_sizes() == {"train": 1, "val": 0, "test": 1}
        assert manifest.split(Split.TRAIN)[0].image_path == tmp_path / "img" / "1.pgm"
        assert manifest.texts(Split.TEST) == ["to stop"]
        assert manifest.all_texts() == ["A MOVE", "to stop"]

    def test_write_then_load(self, tmp_path):
        manifest = DatasetManifest(name="rimes", language="fr", splits={
            Split.VAL: [SampleRef(tmp_path / "i" / "a.pgm", "Élève")],
            Split.TRAIN: [SampleRef(tmp_path / "i" / "b.pgm", "deux mots")],
        })
        loaded = load_manifest(write_manifest(manifest, tmp_path / "out.jsonl"))
        assert loaded.texts(Split.VAL) == ["Élève"]
        assert loaded.split(Split.TRAIN)[0].image_path == tmp_path / "i" / "b.pgm"
        lines = (tmp_path / "out.jsonl").read_text(encoding="utf-8").splitlines()
        assert json.loads(lines[1])["split"] == "train"

    @pytest.mark.parametrize("records, line, fragment", [
        ([{"name": "x", "language": "en"},
          {"split": "dev", "image": "a.pgm", "text": "t"}], 2, "unknown split"),
        ([{"name": "x", "language": "en"},
          {"split": "train", "image": "a.pgm", "text": "t"},
          {"split": "train", "image": "a.pgm", "text": "u"}], 3, "duplicate image"),
        ([{"name": "x", "language": "english"}], 1, "bad header"),
        ([{"name": "x", "language": "en"},
          {"split": "train", "image": "a.pgm"}], 2, "malformed record"),
        ([{"name": "x", "language": "en"},
          {"split": "train", "image": "a.pgm", "text": "  \t"}], 2, "malformed record"),
        ([{"name": "x", "language": "en"},
          {"split": "train", "image": "a.pgm", "text": "t"},
          {"split": "train", "image": " a.pgm ", "text": "u"}], 3, "duplicate image"),
        ([{"name": "  ", "language": "en"}], 1, "bad header"),
    ])
    def test_errors_cite_the_line(self, tmp_path, records, line, fragment):
        path = _write_lines(tmp_path / "m.jsonl", records)
        with pytest.raises(ManifestError, match=fragment) as info:
            load_manifest(path)
        assert info.value.line == line

    def test_same_image_in_two_splits_is_allowed(self, tmp_path):
        path = _write_lines(tmp_path / "m.jsonl", [
            {"name": "x", "language": "en"},
            {"split": "train", "image": "a.pgm", "text": "t"},
            {"split": "test", "image": "a.pgm", "text": "t"},
        ])
        assert load_manifest(path).split_sizes()["test"] == 1

    def test_empty_and_missing(self, tmp_path):
        (tmp_path / "empty.jsonl").write_text("")
        with pytest.raises(ManifestError, match="empty"):
            load_manifest(tmp_path / "empty.jsonl")
        with pytest.raises(ManifestError, match="not found"):
            load_manifest(tmp_path / "none.jsonl")

    def test_split_images_are_resized(self, make_synthetic):
        manifest = make_synthetic("a", lines=10)
        stack = load_split_images(manifest, Split.TRAIN, 16, 64)
        assert stack.shape == (8, 16, 64)
        assert stack.min() >= 0.0 and stack.max() <= 1.0

    def test_empty_split_images(self, tmp_path):
        manifest = DatasetManifest(name="x", language="en")
        with pytest.raises(DataError, match="empty"):
            load_split_images(manifest, Split.VAL, 8, 8)


# ============================================================================
# ALPHABET
# ============================================================================

def _manifest(*texts):
    return DatasetManifest(name="m", language="en", splits={
        Split.TRAIN: [SampleRef(f"{i}.pgm", text) for i, text in enumerate(texts)],
    })


class TestAlphabet:
    def test_specials_come_first(self):
        alphabet = build_alphabet([_manifest("ba", "c a")])
        assert alphabet.symbols[:4] == SPECIAL_TOKENS
        assert alphabet.characters == (" ", "a", "b", "c")

    def test_union_is_folded(self):
        alphabet = build_alphabet([_manifest("é"), _manifest("e”")])
        assert "é" not in alphabet
        assert "e" in alphabet and '"' in alphabet

    def test_normalize_folds_and_marks_unknown(self):
        alphabet = Alphabet.from_characters("abe")
        assert normalize_text("bée", alphabet) == ("b", "e", "e")
        assert normalize_text("az", alphabet) == ("a", UNK)
        assert alphabet.index("z") == alphabet.specials[UNK]

    @settings(max_examples=60)
    @given(st.text(max_size=30))
    def test_normalize_is_idempotent(self, text):
        alphabet = Alphabet.from_characters("abcdefe ")
        once = normalize_text(text, alphabet)
        assert normalize_text(once, alphabet) == once
        assert all(symbol in alphabet for symbol in once)

    def test_invalid_alphabets(self):
        with pytest.raises(DataError, match="duplicate"):
            Alphabet(symbols=SPECIAL_TOKENS + ("a", "a"))
        with pytest.raises(DataError, match="missing special"):
            Alphabet(symbols=("a", "b"))
        with pytest.raises(DataError):
            build_alphabet([])
