"""Rank-adaptive covariance testing with Ky-Fan(k) statistics."""

import json

from ._core import RactError, __version__, cli, ky_fan_norm, omega_sq, select_K, t_k_grid
from ._core import _test_json


def test(group1, group2, B=1000, seed=0, k_cutoff=0.8, K=None, baselines=True, workers=1):
    """Permutation test of equal covariance; returns the report as a dict."""
    return json.loads(_test_json(group1, group2, B, seed, k_cutoff, K, baselines, workers))


test.__test__ = False  # keep pytest from collecting it

__all__ = ["RactError", "cli", "ky_fan_norm", "omega_sq", "select_K", "t_k_grid", "test", "__version__"]
