"""Normality and hyponormality checks for Toeplitz operators with rational matrix symbols."""

__version__ = "0.1.0"

from .blaschke import BlaschkePotapov, FiniteBlaschke, ModelSpaceBasis, model_space_basis  # noqa: E402
from .errors import InputError, NumericalError, ToeplitzLabError  # noqa: E402
from .rational_core import Polynomial, RationalFunction  # noqa: E402
from .symbol import MatrixSymbol  # noqa: E402

__all__ = [
    "BlaschkePotapov",
    "FiniteBlaschke",
    "InputError",
    "MatrixSymbol",
    "ModelSpaceBasis",
    "NumericalError",
    "Polynomial",
    "RationalFunction",
    "ToeplitzLabError",
    "model_space_basis",
]
