"""qspsem: semantic embedding toolkit for QSP/QSVT protocols."""

from . import nesting, poly, qsp, qsvt, synthesis  # noqa: F401

__version__ = "0.1.0"
