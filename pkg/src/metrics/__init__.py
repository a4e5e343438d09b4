"""
Leakage and background-preservation metrics.
"""

from .leakage import region_mask, tels, tils, editing_performance
from .background import mse, psnr, ssim, background_preservation
from .report import ImageMetric, MetricAdapters, LeakageReport, build_report

__all__ = [
    "region_mask",
    "tels",
    "tils",
    "editing_performance",
    "mse",
    "psnr",
    "ssim",
    "background_preservation",
    "ImageMetric",
    "MetricAdapters",
    "LeakageReport",
    "build_report",
]
