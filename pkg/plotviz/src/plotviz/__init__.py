"""Offline figure rendering for simulation CSV output."""

__version__ = "0.1.0"

from .render import FigureSpec, RenderResult, SchemaError, render

__all__ = ["FigureSpec", "RenderResult", "SchemaError", "render", "__version__"]
