"""Render the standard campaign plots from published CSV tables.

This package only reads files; all physics lives upstream in the solver
that wrote them.
"""

__version__ = "0.1.0"

from .plots import (  # noqa: F401
    FigureSpec,
    plot_correlations,
    plot_scaling,
    plot_spectrum_profile,
    render,
)
from .tables import (  # noqa: F401
    CorrelationsTable,
    ScalingTable,
    SchemaError,
    SpectrumTable,
    load_correlations,
    load_scaling,
    load_spectrum,
)
