"""
Group core package.

Explicit finite groups, element sets, homomorphisms, constructors and
conjugation orbits.
"""

from .conjugacy import (
    center,
    centralizer,
    class_representatives,
    conjugacy_classes,
    conjugates,
    normal_closure,
)
from .constructors import (
    cyclic_group,
    direct_product,
    from_permutation_generators,
    from_table,
    induced_group,
    quotient,
    semidirect_product,
)
from .element_set import ElementSet
from .finite_group import FiniteGroup, Provenance
from .homomorphism import Homomorphism, extend_to_homomorphism

__all__ = [
    "ElementSet",
    "FiniteGroup",
    "Homomorphism",
    "Provenance",
    "center",
    "centralizer",
    "class_representatives",
    "conjugacy_classes",
    "conjugates",
    "cyclic_group",
    "direct_product",
    "extend_to_homomorphism",
    "from_permutation_generators",
    "from_table",
    "induced_group",
    "normal_closure",
    "quotient",
    "semidirect_product",
]
