"""Three-stage correction, image pipeline, PNG interchange, discriminability."""

from __future__ import annotations

import io

import numpy as np
import pytest

from conftest import decode_rgb, make_rgb, png_bytes
from huecap.colorspace import Color, Encoding, linear_to_srgb, srgb_to_linear
from huecap.cvd_model import (
    CvdProfile,
    CvdType,
    apply_matrix3,
    correction_matrix_for,
    matrix_for,
    simulate,
)
from huecap.daltonize import (
    CONFUSION_SETS,
    Image,
    Mode,
    Space,
    correct,
    decode_png,
    discriminability_gain,
    encode_png,
    perception_error,
    quantize_u8,
    read_png,
    recolor_image,
    recolor_png_bytes,
    recolor_u8,
    write_png,
)
from huecap.errors import DomainError, EncodingMismatch, ParseError

TYPES = [CvdType.PROTAN, CvdType.DEUTAN, CvdType.TRITAN]


class TestScalarStages:
    def test_error_zero_at_zero_severity(self):
        e = perception_error(Color(0.3, 0.7, 0.2, Encoding.LINEAR),
                             CvdProfile(CvdType.PROTAN, 0.0))
        assert tuple(e) == (0.0, 0.0, 0.0)

    def test_error_on_gray_is_tiny(self):
        e = perception_error(Color(0.5, 0.5, 0.5, Encoding.LINEAR),
                             CvdProfile(CvdType.DEUTAN, 1.0))
        assert np.abs(e).max() <= 2e-3

    def test_error_pure_red_full_protan(self):
        m = matrix_for(CvdType.PROTAN, 1.0)
        sim = [min(max(v, 0.0), 1.0) for v in m[:, 0]]
        e = perception_error(Color(1, 0, 0, Encoding.LINEAR),
                             CvdProfile(CvdType.PROTAN, 1.0))
        expected = np.array([1, 0, 0], dtype=float) - sim
        assert np.abs(e - expected).max() <= 1e-12

    def test_error_requires_linear(self):
        with pytest.raises(EncodingMismatch):
            perception_error(Color(1, 0, 0), CvdProfile(CvdType.PROTAN, 1.0))

    def test_correct_identity_at_zero_severity(self):
        c = Color(0.25, 0.5, 0.75, Encoding.LINEAR)
        assert correct(c, CvdProfile(CvdType.TRITAN, 0.0)) is c

    def test_correct_gray_nearly_unchanged(self):
        for cvd_type in TYPES:
            out = correct(Color(0.5, 0.5, 0.5, Encoding.LINEAR),
                          CvdProfile(cvd_type, 1.0))
            assert max(abs(v - 0.5) for v in out.channels()) <= 5e-3

    def test_correct_red_composed_by_hand(self):
        profile = CvdProfile(CvdType.PROTAN, 1.0)
        c = Color(1, 0, 0, Encoding.LINEAR)
        e = perception_error(c, profile)
        cm = correction_matrix_for(CvdType.PROTAN)
        dr, dg, db = apply_matrix3(cm, e[0], e[1], e[2])
        expected = (min(max(1 + dr, 0), 1), min(max(0 + dg, 0), 1),
                    min(max(0 + db, 0), 1))
        assert correct(c, profile).channels() == pytest.approx(expected, abs=1e-15)

    def test_protan_correction_leaves_red_channel(self):
        # zero first correction row: the deficient channel gets nothing back
        c = Color(0.8, 0.1, 0.3, Encoding.LINEAR)
        out = correct(c, CvdProfile(CvdType.PROTAN, 1.0))
        assert out.r == c.r

    def test_output_clamped_at_extremes(self):
        for channels in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1)]:
            for cvd_type in TYPES:
                out = correct(Color(*channels, Encoding.LINEAR),
                              CvdProfile(cvd_type, 1.0))
                assert all(0.0 <= v <= 1.0 for v in out.channels())


class TestImageType:
    def test_bad_shapes_rejected(self):
        for shape in [(0, 4, 3), (4, 0, 3), (4, 4), (4, 4, 4)]:
            with pytest.raises(DomainError):
                Image(np.zeros(shape))

    def test_non_finite_rejected(self):
        px = np.zeros((2, 2, 3))
        px[0, 0, 0] = np.nan
        with pytest.raises(DomainError):
            Image(px)

    def test_alpha_shape_must_match(self):
        with pytest.raises(DomainError):
            Image(np.zeros((2, 2, 3)), np.zeros((3, 3), dtype=np.uint8))

    def test_pixels_clamped(self):
        img = Image(np.array([[[-0.5, 0.5, 1.5]]]))
        assert img.pixels[0, 0].tolist() == [0.0, 0.5, 1.0]


class TestRecolorImage:
    def test_zero_severity_identical(self):
        img = Image(make_rgb(16, 16, seed=1) / 255.0)
        for mode in Mode:
            out = recolor_image(img, CvdProfile(CvdType.PROTAN, 0.0), mode)
            assert np.array_equal(out.pixels, img.pixels)

    def test_one_by_one_gray_within_one_step(self):
        img = Image(np.full((1, 1, 3), 128 / 255.0))
        for cvd_type in TYPES:
            out = recolor_image(img, CvdProfile(cvd_type, 1.0), Mode.CORRECT)
            assert np.abs(quantize_u8(out.pixels).astype(int) - 128).max() <= 1

    def test_two_by_two_simulate_matches_scalar(self):
        colors = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]
        px = np.array(colors, dtype=float).reshape(2, 2, 3)
        profile = CvdProfile(CvdType.PROTAN, 1.0)
        out = recolor_image(Image(px), profile, Mode.SIMULATE)
        for i in range(2):
            for j in range(2):
                c = Color(*px[i, j], Encoding.SRGB)
                expected = linear_to_srgb(simulate(srgb_to_linear(c), profile))
                assert tuple(out.pixels[i, j]) == expected.channels()

    @pytest.mark.parametrize("mode", list(Mode))
    @pytest.mark.parametrize("space", list(Space))
    def test_scalar_image_equivalence_random(self, mode, space):
        rng = np.random.default_rng(5)
        px = rng.random((8, 8, 3))
        profile = CvdProfile(CvdType.DEUTAN, 0.85)
        out = recolor_image(Image(px), profile, mode, space)
        cm = correction_matrix_for(CvdType.DEUTAN)
        for i in range(8):
            for j in range(8):
                c = Color(*px[i, j], Encoding.SRGB)
                if space is Space.LINEAR:
                    work = srgb_to_linear(c)
                else:
                    work = Color(*c.channels(), Encoding.LINEAR)
                if mode is Mode.CORRECT:
                    done = correct(work, profile, cm)
                else:
                    done = simulate(work, profile)
                if space is Space.LINEAR:
                    expected = linear_to_srgb(done).channels()
                else:
                    expected = done.channels()
                assert tuple(out.pixels[i, j]) == expected

    def test_alpha_passthrough(self):
        rgb = make_rgb(6, 5, seed=2) / 255.0
        alpha = make_rgb(6, 5, seed=3)[..., 0]
        img = Image(rgb, alpha)
        out = recolor_image(img, CvdProfile(CvdType.PROTAN, 1.0), Mode.CORRECT)
        assert np.array_equal(out.alpha, alpha)
        assert out.alpha is not img.alpha  # a copy, not a shared buffer

    def test_mode_space_type_checked(self):
        img = Image(np.zeros((1, 1, 3)))
        with pytest.raises(DomainError):
            recolor_image(img, CvdProfile(CvdType.PROTAN, 1.0), "correct")


class TestQuantization:
    def test_round_half_away_from_zero(self):
        # 127.5/255 must round up to 128
        assert quantize_u8(np.array([[[127.5 / 255.0] * 3]]))[0, 0, 0] == 128

    def test_endpoints(self):
        assert quantize_u8(np.array([[[0.0, 1.0, 0.999999]]])).tolist() == [[[0, 255, 255]]]


class TestPngInterchange:
    def test_round_trip_rgb(self, tmp_path):
        rgb = make_rgb(9, 11, seed=4)
        path = tmp_path / "t.png"
        write_png(Image(rgb / 255.0), path)
        back = read_png(path)
        assert np.array_equal(quantize_u8(back.pixels), rgb)
        assert back.alpha is None

    def test_round_trip_rgba(self, tmp_path):
        rgb = make_rgb(7, 7, seed=5)
        alpha = make_rgb(7, 7, seed=6)[..., 1]
        path = tmp_path / "t.png"
        write_png(Image(rgb / 255.0, alpha), path)
        back = read_png(path)
        assert np.array_equal(back.alpha, alpha)

    def test_undecodable_raises_parse_error(self):
        with pytest.raises(ParseError):
            read_png(io.BytesIO(b"not a png"))

    def test_recolor_png_bytes_matches_float_pipeline(self):
        rgb = make_rgb(20, 30, seed=8)
        data = png_bytes(rgb)
        profile = CvdProfile(CvdType.TRITAN, 0.6)
        fused = recolor_png_bytes(data, profile, Mode.CORRECT, Space.LINEAR)
        img = read_png(io.BytesIO(data))
        slow = recolor_image(img, profile, Mode.CORRECT, Space.LINEAR)
        buf = io.BytesIO()
        write_png(slow, buf)
        assert fused == buf.getvalue()

    def test_recolor_png_preserves_alpha_bytes(self):
        rgb = make_rgb(12, 12, seed=9)
        alpha = make_rgb(12, 12, seed=10)[..., 2]
        data = png_bytes(rgb, alpha)
        out = recolor_png_bytes(data, CvdProfile(CvdType.PROTAN, 1.0))
        _, alpha_back = decode_png(io.BytesIO(out))
        assert np.array_equal(alpha_back, alpha)

    def test_identity_profile_preserves_pixels(self):
        rgb = make_rgb(10, 10, seed=11)
        out = recolor_png_bytes(png_bytes(rgb), CvdProfile(CvdType.NONE, 0.0))
        assert np.array_equal(decode_rgb(out), rgb)

    def test_encode_decode_helpers(self):
        rgb = make_rgb(5, 5, seed=12)
        data = encode_png(rgb)
        back, alpha = decode_png(io.BytesIO(data))
        assert np.array_equal(back, rgb) and alpha is None

    def test_recolor_u8_identity_returns_copy(self):
        rgb = make_rgb(4, 4, seed=13)
        out = recolor_u8(rgb, CvdProfile(CvdType.NONE, 0.0))
        assert np.array_equal(out, rgb) and out is not rgb


class TestDiscriminability:
    def test_identical_sets_zero(self):
        colors = [Color(0.5, 0.2, 0.1, Encoding.LINEAR)]
        report = discriminability_gain(colors, colors, CvdProfile(CvdType.PROTAN, 1.0))
        assert report.pre == report.post == report.gain == 0.0

    def test_zero_severity_zero_gain(self):
        fig, gnd = CONFUSION_SETS[CvdType.PROTAN]
        report = discriminability_gain(fig, gnd, CvdProfile(CvdType.PROTAN, 0.0))
        assert report.gain == 0.0

    @pytest.mark.parametrize("cvd_type", TYPES)
    def test_confusion_sets_gain_positive_at_full_severity(self, cvd_type):
        fig, gnd = CONFUSION_SETS[cvd_type]
        report = discriminability_gain(fig, gnd, CvdProfile(cvd_type, 1.0))
        assert report.gain > 0.0, report

    @pytest.mark.parametrize("cvd_type", TYPES)
    @pytest.mark.parametrize("s", [0.5, 0.7])
    def test_confusion_sets_gain_positive_at_partial_severity(self, cvd_type, s):
        fig, gnd = CONFUSION_SETS[cvd_type]
        assert discriminability_gain(fig, gnd, CvdProfile(cvd_type, s)).gain > 0.0

    def test_empty_sets_rejected(self):
        c = [Color(0.5, 0.5, 0.5, Encoding.LINEAR)]
        with pytest.raises(DomainError):
            discriminability_gain([], c, CvdProfile(CvdType.PROTAN, 1.0))
        with pytest.raises(DomainError):
            discriminability_gain(c, [], CvdProfile(CvdType.PROTAN, 1.0))
