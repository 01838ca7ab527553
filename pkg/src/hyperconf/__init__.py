"""Hyperconfusions: set-family information elements, their Heyting algebra and entropies."""
from .core import Hyperconfusion, SampleSpace, from_maximal_sets, maximal_sets
from .entropy import (
    ProbSpace, capacity, coarse_entropy, conditional_entropy, fractional_max_entropy,
    integral_max_entropy, min_entropy, mutual_information, shannon_entropy,
)
from .errors import (
    HyperconfusionError, InfeasibleRequirementError, InputError, SizeLimitError, UndefinedValueError,
)
from .formula import evaluate, medvedev_check, parse
from .heyting import (
    construct, event, full, generated_sublattice, implication, is_ordinary, join, meet, negation, null, oi,
    sing,
)
from .product import embed, independence_test, product

__version__ = "0.1.0"
