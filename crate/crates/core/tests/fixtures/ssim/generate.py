"""Regenerates the SSIM fixture pairs and their reference scores.

Requires numpy, scipy and scikit-image. Scores are computed on luma
(0.299 R + 0.587 G + 0.114 B) with an 11x11 Gaussian window, sigma 1.5.
"""
import numpy as np
from scipy.ndimage import gaussian_filter
from skimage.metrics import structural_similarity

rng = np.random.default_rng(2024)
W, H = 48, 40


def write_ppm(path, img):
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (img.shape[1], img.shape[0]))
        f.write(img.astype(np.uint8).tobytes())


def base(k):
    y, x = np.mgrid[0:H, 0:W].astype(float)
    r = 128 + 80 * np.sin(x * 0.21 + k) * np.cos(y * 0.17)
    g = 100 + 60 * np.cos(x * 0.11 - y * 0.07 + k)
    b = 90 + 50 * np.sin((x + y) * 0.15)
    img = np.stack([r, g, b], -1) + rng.normal(0, 6, (H, W, 3))
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def u8(a):
    return np.clip(np.rint(a), 0, 255).astype(np.uint8)


OPS = [
    ("noise_small", lambda a: u8(a + rng.normal(0, 4, a.shape))),
    ("noise_large", lambda a: u8(a + rng.normal(0, 25, a.shape))),
    ("brighter", lambda a: u8(a.astype(float) * 1.3)),
    ("darker", lambda a: u8(a.astype(float) * 0.6)),
    ("low_contrast", lambda a: u8((a.astype(float) - 128) * 0.5 + 128)),
    ("blur", lambda a: u8(gaussian_filter(a.astype(float), sigma=(1.2, 1.2, 0)))),
    ("shift", lambda a: np.roll(a, (1, 2), axis=(0, 1))),
    ("quantized", lambda a: (a // 32) * 32 + 16),
    ("channel_swap", lambda a: a[:, :, ::-1].copy()),
    ("unrelated", lambda a: base(7.0)),
]


def luma(a):
    a = a.astype(np.float64)
    return 0.299 * a[..., 0] + 0.587 * a[..., 1] + 0.114 * a[..., 2]


def main():
    lines = ["name,ssim"]
    for i, (name, op) in enumerate(OPS):
        a = base(float(i))
        b = op(a)
        write_ppm(f"{i:02d}_{name}_a.ppm", a)
        write_ppm(f"{i:02d}_{name}_b.ppm", b)
        s = structural_similarity(
            luma(a), luma(b), gaussian_weights=True, sigma=1.5, use_sample_covariance=False, data_range=255.0
        )
        lines.append(f"{i:02d}_{name},{s:.12f}")
    with open("expected.csv", "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
