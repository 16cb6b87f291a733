"""Schur and Bogomolov multipliers of small finite groups, with exact checks
of restriction, corestriction, stable elements and local control."""

__version__ = "0.1.0"

from .bogomolov import bogomolov_multiplier, sha2, sha2_via_all_abelian, sha2_with_action
from .catalog import load_catalog, parse_group_file
from .cohomology import cocycle_space, h2_zmod, schur_h2
from .groups import (
    GroupTable,
    Subgroup,
    build_group_from_perms,
    group_from_table,
    normalizer,
    permutation_from_cycles,
    sylow_subgroup,
)
from .linalg import AbelianInvariants, smith_normal_form

__all__ = [
    "AbelianInvariants",
    "GroupTable",
    "Subgroup",
    "bogomolov_multiplier",
    "build_group_from_perms",
    "cocycle_space",
    "group_from_table",
    "h2_zmod",
    "load_catalog",
    "normalizer",
    "parse_group_file",
    "permutation_from_cycles",
    "schur_h2",
    "sha2",
    "sha2_via_all_abelian",
    "sha2_with_action",
    "smith_normal_form",
    "sylow_subgroup",
]
