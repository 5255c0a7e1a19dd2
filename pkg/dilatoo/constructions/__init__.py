"""Dilation constructions and their registry."""

from .base import Construction, register, available_constructions, get_construction
from .totals import (
    antisymmetric_canonical,
    circulant_family_dilation,
    constant_diagonal_unitary,
    equal_diagonal_unitary,
    equal_singular_halving,
    halving_total_dilation,
    normal_total_dilation,
    orthogonal_total_dilation,
    unitary_total_dilation,
)
from .monotone import (
    ConditionSpec,
    Triangle,
    economical_monotone_family,
    hermitian_monotone_family,
    monotone_family,
    monotone_pair,
    numerical_range_pair,
)
