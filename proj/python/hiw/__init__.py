"""Python bindings for the hiw experiments library."""

from ._core import (
    Series,
    apply_tp2,
    builtin_form,
    builtin_form_names,
    class_survey,
    cli,
    corollary_count,
    estimate_cf,
    extract_eigenvalue,
    fourth_moment_exponent,
    legendre,
    progression_e,
    read_qexp,
    salie_closed,
    salie_direct,
    shimura_relation_check,
    sign_counts,
    sqrt_mod,
    voronoi_check,
)

__all__ = [
    "Series",
    "apply_tp2",
    "builtin_form",
    "builtin_form_names",
    "class_survey",
    "cli",
    "corollary_count",
    "estimate_cf",
    "extract_eigenvalue",
    "fourth_moment_exponent",
    "legendre",
    "progression_e",
    "read_qexp",
    "salie_closed",
    "salie_direct",
    "shimura_relation_check",
    "sign_counts",
    "sqrt_mod",
    "voronoi_check",
]
