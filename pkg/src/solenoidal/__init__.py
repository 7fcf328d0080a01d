"""Rotation theory for homeomorphisms of the universal one-dimensional solenoid."""
from .core_numbers import (
    DEFAULT_DEPTH,
    ExactSum,
    ProfiniteInt,
    Rational,
    is_monothetic_generator,
    parse_rational,
    profinite_add,
    profinite_project,
)
from .solenoid import (
    Character,
    SolenoidPoint,
    add,
    base_leaf,
    canonicalize,
    char_eval,
    char_phase,
    is_irrational,
    level_project,
    metric,
    point,
    zero,
)
from .dynamics import (
    CharacterPolynomial,
    ConjugatedMap,
    LevelPeriodicTable,
    OrbitRecord,
    RotationEstimate,
    SolenoidMap,
    apply,
    bmv_deviations,
    find_fixed_point,
    identity_map,
    iterate,
    rotation_element_birkhoff,
    rotation_element_exact_haar,
    rotation_interval,
    rotation_map,
    semiconjugacy_sup,
)
from .constructions import denjoy_construction

__version__ = "0.1.0"
