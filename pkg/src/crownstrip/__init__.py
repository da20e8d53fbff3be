"""Strip deformations of decorated crowned hyperbolic surfaces and decorated Margulis spacetimes."""

__version__ = "0.1.0"
