"""Sparse-grid Hermite collocation for log-Gaussian diffusion problems."""

from ._core import (
    ConfigError,
    IndexSet,
    MultiIndex,
    NumericalError,
    WeightFamily,
    brownian_bridge_kl,
    bspline_cutoff,
    build_lambda,
    combination_coeffs,
    count_evaluation_points,
    exact_qoi,
    expected_qoi,
    fem_solve,
    gauss_hermite_rule,
    hermite_eval,
    interpolate,
    matern_cov,
    posterior_mean_linear,
    quadrature,
    resolved_config,
    run_study,
    sample_grf,
)


def line(n):
    """The one-dimensional set {0, e_0, ..., n e_0}."""
    return IndexSet([MultiIndex.unit(0, k) for k in range(n + 1)])


__all__ = [name for name in dir() if not name.startswith("_")]
