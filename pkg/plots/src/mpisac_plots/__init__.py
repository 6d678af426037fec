"""Figures from mpisac experiment CSVs.

Renders the three standard views of the tool's output: the voting
accuracy curve, the budget sweep against baselines, and the
accuracy/rate trade-off region. Input is always a CSV written by the
mpisac command line; nothing here imports the simulator itself.
"""

from .figures import FigureSpec, SchemaError, render

__version__ = "0.1.0"

__all__ = ["FigureSpec", "SchemaError", "render"]
