"""Per-arm density of an estimated propensity score."""

from __future__ import annotations

import numpy as np
import pandas as pd
from scipy.stats import gaussian_kde

from acekit.core.models import Dataset
from acekit.exceptions import InsufficientGroupSizeError
from acekit.propensity import PropensityFunction


def ps_density(data: Dataset, ps: PropensityFunction, grid_points: int = 201) -> pd.DataFrame:
    """Gaussian kernel density (Silverman bandwidth) of the PS within each arm on a grid over [0, 1]."""
    scores = ps.evaluate(data.x)
    grid = np.linspace(0.0, 1.0, grid_points)
    columns = {"grid": grid}
    for arm, mask in ((0, data.control), (1, data.treated)):
        values = scores[mask]
        if values.size < 2 or np.ptp(values) == 0.0:
            raise InsufficientGroupSizeError(
                f"arm T={arm} needs at least two distinct propensity scores for a density"
            )
        columns[f"density_t{arm}"] = gaussian_kde(values, bw_method="silverman")(grid)
    return pd.DataFrame(columns)
