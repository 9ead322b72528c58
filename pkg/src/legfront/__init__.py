"""Computational contact topology of Legendrian fronts.

Front-diagram manipulation and lifting, zig-zag approximation of smooth
curves, the quantitative loose-chart calculus, explicit wrinkle models, and a
combinatorial microsupport engine producing non-looseness certificates.
"""

__version__ = "0.1.0"
