"""Exact analysis of split and infinitely split Nash equilibria on finite posets.

The modules build on each other:

- :mod:`splitnash.poset`: finite posets, products, chains, inductivity
- :mod:`splitnash.game`: static games, Nash sets, order-positivity
- :mod:`splitnash.fixedpoint`: set-valued maps and the fixed point check
- :mod:`splitnash.dual`: dual games with one adjustment operator
- :mod:`splitnash.repeated`: operator schedules, discounted values
- :mod:`splitnash.bertrand`: a two-firm price model on rational grids
- :mod:`splitnash.specfile` and :mod:`splitnash.cli`: input documents and reports

All arithmetic is exact (:class:`fractions.Fraction`).  Players are numbered
from 0 in the Python API and from 1 in CLI reports.
"""

from .common import DEFAULT_CAPS, CapExceeded, Caps, Check, parse_rational
from .dual import DualGame, ProfileOperator, check_theorem1, is_increasing, is_split_ne, pi, split_ne_set
from .fixedpoint import SetValuedMap, fixed_points, verify_theorem_a
from .game import StaticGame, bound_M, is_nash, is_order_positive, nash_set
from .poset import FinitePoset, OrderAxiomError, PosetError, ProductPoset, product, validate_poset
from .repeated import (
    OperatorSchedule,
    RepeatedGame,
    H,
    check_proposition1,
    check_theorem2,
    detect_cycle,
    h,
    inf_split_ne_set,
    is_inf_split_ne,
    is_repeated_ne,
    psi,
)
from .specfile import GameSpec, SpecError, parse_spec

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CAPS", "CapExceeded", "Caps", "Check", "parse_rational",
    "DualGame", "ProfileOperator", "check_theorem1", "is_increasing", "is_split_ne", "pi", "split_ne_set",
    "SetValuedMap", "fixed_points", "verify_theorem_a",
    "StaticGame", "bound_M", "is_nash", "is_order_positive", "nash_set",
    "FinitePoset", "OrderAxiomError", "PosetError", "ProductPoset", "product", "validate_poset",
    "OperatorSchedule", "RepeatedGame", "H", "check_proposition1", "check_theorem2", "detect_cycle",
    "h", "inf_split_ne_set", "is_inf_split_ne", "is_repeated_ne", "psi",
    "GameSpec", "SpecError", "parse_spec",
]
