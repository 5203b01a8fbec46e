import numpy as np
import pytest

from multidx.imaging import (
    GrayImage,
    ImagingError,
    SpectralRecord,
    binarize,
    convex_hull,
    convex_hull_crop,
    png_bytes,
    rasterize_spectrum,
    read_png,
    resize,
    write_png,
)
from oracles import convex_hull_contains, otsu_threshold_bruteforce


class TestRasterize:
    def test_constant_spectrum_mid_height_line(self):
        rec = SpectralRecord(intensities=np.full(900, 7.7))
        img = rasterize_spectrum(rec, 64)
        black_rows, black_cols = np.nonzero(img.pixels == 0.0)
        assert set(black_rows.tolist()) == {32}
        assert sorted(black_cols.tolist()) == list(range(64))

    def test_increasing_ramp_descends(self):
        rec = SpectralRecord(intensities=np.linspace(0, 1, 200))
        img = rasterize_spectrum(rec, 64)
        first_black = [np.nonzero(img.pixels[:, c] == 0.0)[0].min() for c in range(64)]
        assert all(a >= b for a, b in zip(first_black, first_black[1:]))

    def test_every_column_has_trace(self):
        rng = np.random.default_rng(0)
        rec = SpectralRecord(intensities=rng.normal(size=900))
        img = rasterize_spectrum(rec, 64)
        assert img.pixels.shape == (64, 64)
        # scanline oracle: walk each column and look for >= 1 black pixel
        for c in range(64):
            assert (img.pixels[:, c] == 0.0).any()

    def test_affine_intensity_invariance(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=900)
        base = rasterize_spectrum(SpectralRecord(intensities=x), 64)
        shifted = rasterize_spectrum(SpectralRecord(intensities=2.0 * x + 3.0), 64)
        assert np.array_equal(base.pixels, shifted.pixels)

    def test_resolution_floor(self):
        with pytest.raises(ImagingError):
            rasterize_spectrum(SpectralRecord(intensities=np.arange(10.0)), 8)


class TestBinarize:
    def test_all_white_is_all_background(self):
        img = GrayImage(pixels=np.ones((8, 8)))
        out = binarize(img)
        assert (out.pixels == 1.0).all()

    def test_bimodal_split(self):
        pixels = np.concatenate([np.full(32, 0.1), np.full(32, 0.9)]).reshape(8, 8)
        out = binarize(GrayImage(pixels=pixels))
        assert (out.pixels[pixels == 0.1] == 0.0).all()
        assert (out.pixels[pixels == 0.9] == 1.0).all()

    def test_matches_exhaustive_otsu_oracle(self):
        rng = np.random.default_rng(6)
        # ECG-like synthetic: pale grid + dark trace + noise
        base = 0.85 + 0.05 * rng.random((40, 60))
        base[::5, :] = 0.7
        trace_rows = (20 + 8 * np.sin(np.arange(60) / 6)).astype(int)
        base[trace_rows, np.arange(60)] = 0.08 + 0.04 * rng.random(60)
        img = GrayImage(pixels=np.clip(base, 0, 1))
        levels = np.rint(img.pixels * 255).astype(np.int64)
        t = otsu_threshold_bruteforce(levels)
        expected = np.where(levels <= t, 0.0, 1.0)
        assert np.array_equal(binarize(img).pixels, expected)

    def test_output_is_binary(self):
        rng = np.random.default_rng(2)
        out = binarize(GrayImage(pixels=rng.random((16, 16))))
        assert set(np.unique(out.pixels)) <= {0.0, 1.0}


class TestConvexHullCrop:
    def test_filled_rectangle_crops_to_itself(self):
        pixels = np.ones((20, 30))
        pixels[5:12, 4:19] = 0.0
        out = convex_hull_crop(GrayImage(pixels=pixels))
        assert out.pixels.shape == (7, 15)
        assert (out.pixels == 0.0).all()

    def test_single_pixel_rejected(self):
        pixels = np.ones((10, 10))
        pixels[3, 3] = 0.0
        with pytest.raises(ImagingError, match="no tracing region"):
            convex_hull_crop(GrayImage(pixels=pixels))

    def test_collinear_rejected(self):
        pixels = np.ones((10, 10))
        pixels[4, 2:8] = 0.0
        with pytest.raises(ImagingError, match="no tracing region"):
            convex_hull_crop(GrayImage(pixels=pixels))

    def test_known_extremes_bounding_box(self):
        pixels = np.ones((64, 64))
        # scattered points with known extremes (x,y): (2,3) .. (40,57)
        for x, y in [(2, 3), (40, 57), (10, 30), (25, 7), (33, 44), (2, 57)]:
            pixels[y, x] = 0.0
        out = convex_hull_crop(GrayImage(pixels=pixels))
        assert (out.width, out.height) == (39, 55)

    def test_idempotent(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            pixels = np.ones((24, 24))
            pts = rng.integers(2, 22, size=(12, 2))
            pixels[pts[:, 0], pts[:, 1]] = 0.0
            img = GrayImage(pixels=pixels)
            try:
                once = convex_hull_crop(img)
            except ImagingError:
                continue
            twice = convex_hull_crop(once)
            assert np.array_equal(once.pixels, twice.pixels)

    def test_hull_contains_every_foreground_pixel(self):
        rng = np.random.default_rng(11)
        pixels = np.ones((32, 32))
        pts = rng.integers(0, 32, size=(25, 2))
        pixels[pts[:, 0], pts[:, 1]] = 0.0
        ys, xs = np.nonzero(pixels == 0.0)
        hull = convex_hull(list(zip(xs.tolist(), ys.tolist())))
        for x, y in zip(xs.tolist(), ys.tolist()):
            assert convex_hull_contains(hull, (x, y))


class TestResize:
    def test_identity_same_size(self):
        rng = np.random.default_rng(3)
        img = GrayImage(pixels=rng.random((9, 7)))
        out = resize(img, 7, 9)
        assert out is img

    def test_checkerboard_average(self):
        img = GrayImage(pixels=np.array([[0.0, 1.0], [1.0, 0.0]]))
        out = resize(img, 1, 1)
        assert out.pixels[0, 0] == pytest.approx(0.5, abs=1e-12)

    def test_hand_evaluated_bilinear_weights(self):
        # 4x4 -> 2x2 with half-pixel centers: output (0,0) samples src (0.5, 0.5)
        grid = np.arange(16, dtype=float).reshape(4, 4) / 15.0
        out = resize(GrayImage(pixels=grid), 2, 2)
        expect_00 = (grid[0, 0] + grid[0, 1] + grid[1, 0] + grid[1, 1]) / 4
        expect_11 = (grid[2, 2] + grid[2, 3] + grid[3, 2] + grid[3, 3]) / 4
        assert out.pixels[0, 0] == pytest.approx(expect_00, abs=1e-12)
        assert out.pixels[1, 1] == pytest.approx(expect_11, abs=1e-12)

    def test_upscale_range_preserved(self):
        rng = np.random.default_rng(8)
        img = GrayImage(pixels=rng.random((5, 5)))
        out = resize(img, 17, 13)
        assert out.pixels.shape == (13, 17)
        assert out.pixels.min() >= img.pixels.min() - 1e-12
        assert out.pixels.max() <= img.pixels.max() + 1e-12


class TestPngIO:
    def test_round_trip_grayscale(self, tmp_path):
        rng = np.random.default_rng(5)
        img = GrayImage(pixels=np.rint(rng.random((12, 10)) * 255) / 255.0)
        path = tmp_path / "img.png"
        write_png(img, path)
        back = read_png(path)
        assert np.allclose(back.pixels, img.pixels, atol=1e-12)

    def test_bytes_round_trip(self):
        img = GrayImage(pixels=np.zeros((4, 4)))
        back = read_png(png_bytes(img))
        assert (back.pixels == 0.0).all()

    def test_color_converted_by_luma(self, tmp_path):
        from PIL import Image

        rgb = np.zeros((2, 2, 3), dtype=np.uint8)
        rgb[0, 0] = (255, 0, 0)
        rgb[0, 1] = (0, 255, 0)
        rgb[1, 0] = (0, 0, 255)
        path = tmp_path / "c.png"
        Image.fromarray(rgb, mode="RGB").save(path)
        img = read_png(path)
        assert img.pixels[0, 0] == pytest.approx(0.299, abs=1e-9)
        assert img.pixels[0, 1] == pytest.approx(0.587, abs=1e-9)
        assert img.pixels[1, 0] == pytest.approx(0.114, abs=1e-9)

    def test_malformed_png_rejected(self):
        with pytest.raises(ImagingError, match="malformed png"):
            read_png(b"not a png at all")
