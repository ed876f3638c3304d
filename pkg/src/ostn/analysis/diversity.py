"""Diversity-order estimation from outage-versus-SNR points."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from ..errors import DomainError


def diversity_fit(points: Iterable[tuple[float, float]]) -> float:
    """Least-squares slope of -log10(op) against snr_db / 10."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise DomainError("diversity_fit needs at least 3 (snr_db, op) points")
    if np.any(pts[:, 1] <= 0):
        raise DomainError("diversity_fit needs strictly positive outage values")
    slope, _ = np.polyfit(pts[:, 0] / 10.0, -np.log10(pts[:, 1]), 1)
    return float(slope)
