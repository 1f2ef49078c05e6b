"""Inverse-width current model — current per unit width dilutes as the electrode widens."""

from __future__ import annotations

import numpy as np

from app.plugins.base import CurrentModel


class InverseWidthCurrent(CurrentModel):
    @property
    def name(self) -> str:
        return "inverse_width"

    @property
    def display_name(self) -> str:
        return "Inverse width"

    def weight(self, base_width: float, width: np.ndarray) -> np.ndarray:
        return base_width / np.asarray(width, dtype=float)
