"""The algebra Ω_[n](M) of functions on (ΠT)^n M.

Exact computer algebra for the worm algebra over rational functions, the
operator calculus of the Diff(R^{0|n}) action, Berezin integration with an
Euler-characteristic pipeline, highest-weight dimension counts and truncated
cohomology.
"""
from .algebra import Ctx, Deriv, Elem, apply_deriv, bracket, make_context, mul, multidegree
from .coef import Coef, CoefField, default_field, field_for

__all__ = [
    "Coef",
    "CoefField",
    "Ctx",
    "Deriv",
    "Elem",
    "apply_deriv",
    "bracket",
    "default_field",
    "field_for",
    "make_context",
    "mul",
    "multidegree",
]
__version__ = "0.1.0"
