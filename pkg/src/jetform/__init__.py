"""jetform: exact symbolic calculus of contact forms on jet bundles.

Finite-order contact decomposition, interior Euler and residual operators,
canonical splittings of variational morphisms, and Lepage equivalents
(Poincare-Cartan and Krupka-Betounes, first and second order), all over
exact rational arithmetic with decidable normal-form equality.
"""

from .forms import Context, Form
from .lepage import Lagrangian
from .symexpr import Scalar

__all__ = ["Context", "Form", "Lagrangian", "Scalar"]
__version__ = "0.1.0"
