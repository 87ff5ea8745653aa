"""Exact arithmetic for the Minkowski question-mark function and its folds."""

from .cf import cf_from_rational, cf_to_rational, canonicalize, continuant
from .minkowski import Dyadic, fixed_point_orbit, iterate_qm, qm_inverse, qm_of_cf, qm_of_rational
from .folding import FoldInput, fold_step, fold_range_bounds, image_prefix
from .setm import MSpec, certify_image_membership, certify_membership, kappa2, minimal_spec
from .cahen import cahen_q, cahen_spec, sylvester
from .deriv import chain_factor_table, cylinder_interval, fn_difference_quotient, qm_cylinder_log_ratio

__all__ = [
    "cf_from_rational", "cf_to_rational", "canonicalize", "continuant",
    "Dyadic", "fixed_point_orbit", "iterate_qm", "qm_inverse", "qm_of_cf", "qm_of_rational",
    "FoldInput", "fold_step", "fold_range_bounds", "image_prefix",
    "MSpec", "certify_image_membership", "certify_membership", "kappa2", "minimal_spec",
    "cahen_q", "cahen_spec", "sylvester",
    "chain_factor_table", "cylinder_interval", "fn_difference_quotient", "qm_cylinder_log_ratio",
]
