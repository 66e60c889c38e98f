"""toriclab : germes de fibrations toriques de Fano en arithmétique exacte."""

__version__ = "0.1.0"
