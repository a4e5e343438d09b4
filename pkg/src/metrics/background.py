"""
Background preservation: MSE, PSNR and SSIM restricted to background pixels.

Images are float RGB in [0, 1].
"""

import math

import numpy as np
from scipy.ndimage import gaussian_filter

from ..core.constants import PSNR_CAP
from ..core.errors import EmptyBackground, ShapeError

SSIM_SIGMA = 1.5
SSIM_TRUNCATE = 3.5  # radius 5 -> 11x11 window
SSIM_K1 = 0.01
SSIM_K2 = 0.03
DATA_RANGE = 1.0


def _check(edited: np.ndarray, source: np.ndarray, background: np.ndarray) -> np.ndarray:
    if edited.shape != source.shape:
        raise ShapeError(f"Edited image {edited.shape} and source {source.shape} differ")
    mask = np.asarray(background).astype(bool)
    if mask.shape != edited.shape[:2]:
        raise ShapeError(f"Background mask {mask.shape} does not match image {edited.shape[:2]}")
    if not mask.any():
        raise EmptyBackground("Background mask is empty")
    return mask


def mse(edited: np.ndarray, source: np.ndarray, background: np.ndarray) -> float:
    mask = _check(edited, source, background)
    diff = np.asarray(edited, dtype=np.float64) - np.asarray(source, dtype=np.float64)
    return float(np.mean(diff[mask] ** 2))


def psnr(edited: np.ndarray, source: np.ndarray, background: np.ndarray) -> float:
    """PSNR in dB, capped at PSNR_CAP for identical backgrounds."""
    error = mse(edited, source, background)
    if error == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(DATA_RANGE ** 2 / error))


def _ssim_map(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    def blur(x):
        return gaussian_filter(x, sigma=SSIM_SIGMA, truncate=SSIM_TRUNCATE)

    c1 = (SSIM_K1 * DATA_RANGE) ** 2
    c2 = (SSIM_K2 * DATA_RANGE) ** 2
    mu_a, mu_b = blur(a), blur(b)
    var_a = blur(a * a) - mu_a ** 2
    var_b = blur(b * b) - mu_b ** 2
    cov = blur(a * b) - mu_a * mu_b
    return ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / ((mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2))


def ssim(edited: np.ndarray, source: np.ndarray, background: np.ndarray) -> float:
    """Per-channel Gaussian-window SSIM, averaged over background pixels."""
    mask = _check(edited, source, background)
    edited = np.asarray(edited, dtype=np.float64)
    source = np.asarray(source, dtype=np.float64)
    maps = [_ssim_map(edited[..., c], source[..., c]) for c in range(edited.shape[2])]
    return float(np.mean([m[mask] for m in maps]))


def background_preservation(
    edited: np.ndarray, source: np.ndarray, background: np.ndarray,
) -> tuple[float, float, float]:
    """(psnr, ssim, mse) over background pixels."""
    return psnr(edited, source, background), ssim(edited, source, background), mse(edited, source, background)
