"""Iterated adjoints of finite-dimensional multilinear maps.

Submodules:

``tensor``  dense k-linear maps, adjoint/flip/evaluation/composition, regularity
``words``   adjoint/flip words: parsing, normal forms, signatures, equivalence
``arens``   algebras, Arens products, modules, tri-derivation checks
``corpus``  finite groups, matrix algebras, seeded generators
``io``      JSON tensor and bundle files
``cli``     the ``adjcalc`` command
"""

from .errors import AdjcalcError, CayleyError, InputError, ParseError, StructureError
from .tensor import (
    MultiTensor,
    SpaceRef,
    Vector,
    adjoint,
    compose_into_slot,
    compose_linear_after,
    evaluate,
    flip,
    is_regular,
    iterated_limit_eval,
)
from .words import AdjWord, NormalWord, Signature, Verdict, equivalent, infer_signature, normalize, parse

__version__ = "0.1.0"
