import json

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from oodlab.config import Split
from oodlab.corpus import load_image, load_manifest
from oodlab.errors import DataError, UsageError
from oodlab.synthgen import (LANGUAGES, MANIFEST_NAME, STYLE_NAME, BitmapFont, StyleParams,
                             line_seed, make_domain, render_line, sample_lines, split_indices)


def test_default_font_height(font):
    assert font.height == 14
    assert font.glyph("A").shape[0] == 14
    assert "a" in font and " " in font
    assert BitmapFont.default(upscale=1).height == 7


def test_font_rejects_bad_upscale():
    with pytest.raises(UsageError):
        BitmapFont.default(upscale=0)


# ============================================================================
# RENDERING
# ============================================================================

class TestRender:
    def test_same_inputs_same_pixels(self, font):
        style = StyleParams(noise_sigma=0.1, baseline_jitter=2, seed=9)
        a = render_line("Hello world", font, style)
        b = render_line("Hello world", font, style)
        np.testing.assert_array_equal(a.pixels, b.pixels)

    def test_noise_follows_the_seed(self, font):
        a = render_line("abc", font, StyleParams(noise_sigma=0.1, seed=1))
        b = render_line("abc", font, StyleParams(noise_sigma=0.1, seed=2))
        assert a.shape == b.shape
        assert not np.array_equal(a.pixels, b.pixels)

    def test_clean_render_has_paper_and_ink_only(self, font):
        img = render_line("ink", font, StyleParams())
        assert img.shape[0] == 32
        assert set(np.unique(img.pixels)) == {0.0, 1.0}
        assert img.pixels[0, 0] == 1.0

    def test_inverted_polarity(self, font):
        img = render_line("ink", font, StyleParams(paper=0.0, ink_level=1.0))
        assert img.pixels[0, 0] == 0.0
        assert img.pixels.max() == 1.0

    def test_slant_widens_the_line(self, font):
        upright = render_line("slanted", font, StyleParams())
        slanted = render_line("slanted", font, StyleParams(slant=0.25))
        assert slanted.shape[0] == upright.shape[0]
        assert slanted.shape[1] == upright.shape[1] + 8

    def test_bolder_ink_covers_more_pixels(self, font):
        thin = render_line("bold", font, StyleParams())
        bold = render_line("bold", font, StyleParams(ink=1))
        assert (bold.pixels == 0.0).sum() > (thin.pixels == 0.0).sum()

    def test_missing_glyph(self, font):
        with pytest.raises(DataError, match="no glyph"):
            render_line("naïve", font, StyleParams())

    def test_canvas_too_small(self, font):
        with pytest.raises(UsageError, match="does not fit"):
            render_line("abc", font, StyleParams(height=10))


# ============================================================================
# DOMAINS
# ============================================================================

class TestDomain:
    def test_split_partition(self):
        parts = split_indices(10)
        assert [len(parts[s]) for s in (Split.TRAIN, Split.VAL, Split.TEST)] == [8, 1, 1]
        assert sorted(i for indices in parts.values() for i in indices) == list(range(10))
        assert all(indices == sorted(indices) for indices in parts.values())

    @given(st.integers(0, 300))
    def test_split_sizes(self, n):
        parts = split_indices(n)
        assert len(parts[Split.TRAIN]) == int(n * 0.8)
        assert len(parts[Split.VAL]) == int(n * 0.1)
        assert sum(len(indices) for indices in parts.values()) == n

    def test_line_seeds_are_stable(self):
        assert line_seed(7, 3) == line_seed(7, 3)
        assert line_seed(7, 3) != line_seed(7, 4)
        assert 0 <= line_seed(7, 3) < 2 ** 64

    def test_make_domain_writes_manifest_and_style(self, tmp_path, font):
        corpus = sample_lines("fr", 10, seed=4)
        style = StyleParams(slant=0.2, seed=11)
        manifest = make_domain(corpus, font, style, tmp_path / "fr", name="fr-slant",
                               language="fr", max_workers=2)
        assert manifest.split_sizes() == {"train": 8, "val": 1, "test": 1}

        loaded = load_manifest(tmp_path / "fr" / MANIFEST_NAME)
        assert loaded.name == "fr-slant" and loaded.language == "fr"
        assert sorted(loaded.texts(Split.TRAIN) + loaded.texts(Split.VAL)
                      + loaded.texts(Split.TEST)) == sorted(corpus)

        sidecar = json.loads((tmp_path / "fr" / STYLE_NAME).read_text(encoding="utf-8"))
        assert sidecar["num_lines"] == 10
        assert sidecar["style"]["slant"] == 0.2
        assert sidecar["font"]["height"] == 14

        first = loaded.split(Split.TRAIN)[0]
        assert load_image(first.image_path).shape[0] == 32

    def test_rebuild_is_byte_identical(self, tmp_path, font):
        corpus = sample_lines("en", 5, seed=2)
        style = StyleParams(noise_sigma=0.05, seed=3)
        make_domain(corpus, font, style, tmp_path / "a", name="a")
        make_domain(corpus, font, style, tmp_path / "b", name="a")
        for path in sorted((tmp_path / "a" / "images").iterdir()):
            assert path.read_bytes() == (tmp_path / "b" / "images" / path.name).read_bytes()

    def test_unmapped_lines_are_all_listed(self, tmp_path, font):
        with pytest.raises(DataError, match="2 line"):
            make_domain(["ok", "café", "über"], font, StyleParams(), tmp_path / "x", name="x")

    def test_empty_corpus(self, tmp_path, font):
        with pytest.raises(DataError):
            make_domain([], font, StyleParams(), tmp_path / "x", name="x")


# ============================================================================
# TEXT SAMPLING
# ============================================================================

class TestSampleLines:
    def test_deterministic(self):
        assert sample_lines("de", 5, seed=8) == sample_lines("de", 5, seed=8)
        assert sample_lines("de", 5, seed=8) != sample_lines("de", 5, seed=9)

    @pytest.mark.parametrize("language", LANGUAGES)
    def test_lines_render_with_default_font(self, language, font):
        for line in sample_lines(language, 20, seed=1):
            assert 3 <= len(line.split()) <= 7
            assert line[0].isupper()
            assert not font.missing(line)

    def test_unknown_language(self):
        with pytest.raises(UsageError, match="xx"):
            sample_lines("xx", 1, seed=0)
        with pytest.raises(UsageError):
            sample_lines("en", -1, seed=0)
