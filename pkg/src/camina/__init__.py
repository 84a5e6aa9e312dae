"""Exact verification toolkit for Camina pairs built from Heisenberg groups
over finite fields: field arithmetic, a generic finite-group engine, the
construction tower H(F) <= K(F) <= G(F), Camina/Frobenius/p-closedness
decision procedures, and exact character tables with Gagola detection.
"""

__version__ = "0.1.0"

from .errors import (
    CaminaError,
    CapacityError,
    InternalError,
    ScaleError,
    SpecMismatchError,
    UnsupportedOperationError,
)
from .fields import FieldElement, FieldSpec, frobenius, make_field, units
from .groups import (
    ClassData,
    GroupHandle,
    QuotientHandle,
    center,
    centralizer,
    closure,
    conjugacy_classes,
    core_p,
    cyclic_group,
    derived_subgroup,
    dihedral_group,
    exponent,
    group_from_mult,
    is_normal,
    is_solvable,
    is_subgroup,
    normal_subgroups,
    p_length,
    p_prime_core,
    quotient,
    residual_p,
    sylow_p,
)
from .constructions import (
    ConstructionBundle,
    GroupElement,
    PipelineResult,
    build_bundle,
    dump_group,
    g_mult,
    h_mult,
    heisenberg_element,
    structural_checks,
    theorem_pipeline,
)
from .verify import (
    CaminaVerdict,
    classify_camina,
    is_camina_pair,
    is_camina_pair_fast,
    is_frobenius_kernel,
    is_p_closed,
)
from .chars import (
    CharacterTable,
    ClassFunction,
    GagolaReport,
    constituent_stabilizer,
    constituents,
    dixon_table,
    gagola_characters,
    gagola_consistency,
    induce,
    inner_product,
    restrict,
)

__all__ = [name for name in dir() if not name.startswith("_")]
