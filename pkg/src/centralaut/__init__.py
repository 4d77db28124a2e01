"""Automorphisms of finite p-groups.

Matrix model of Aut for abelian p-groups, central extensions with their
lifting construction, and brute-force oracles over multiplication tables.
"""
from .abelian import AbelianPGroup, IndexProfile, elem_add, elem_neg, elem_order, elem_scale, index_profile, make_group
from .endomat import (
    EndoMatrix,
    apply,
    aut_order,
    canonicalize,
    compose,
    count_abc,
    decompose_diagonal,
    enumerate_abc,
    enumerate_autos,
    enumerate_endos,
    in_Rp,
    is_automorphism,
    satisfies_abc,
    theorem_lower_bound,
)
from .errors import CentralAutError, CheckFailed, InputError
from .extension import (
    CentralExtensionGroup,
    GAutomorphism,
    build_extension,
    center_of,
    construct_chi,
    dagger_check,
    extend_automorphism,
    extension_family,
    extension_from_json,
    is_p2_abelian,
    is_p_central,
    star_coefficients,
    verify_star,
)
from .oracle import brute_aut, brute_aut_count, center_and_inn, check_conjecture_A, out_p_part, table_from_extension
from .tablegroup import TableGroup

__version__ = "0.1.0"
