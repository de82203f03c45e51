"""Exact computations for archimedean valuation rings O of Q, Q(sqrt d) and Q(i).

Submodules: ``field`` (exact arithmetic and norms), ``omod`` (free O-modules and
cofibrations), ``wreath`` (GL_n(O) = E wr S_n), ``residue`` (the residue field
F_inf), ``ktheory`` (K-group descriptors), ``sconstr`` (S-construction objects)
and ``cli``.
"""
from .abgroup import OMEGA, AbGroupDescriptor
from .field import QQ, QQ_I, FieldDescriptor, FieldElement, norm

__all__ = ["OMEGA", "AbGroupDescriptor", "QQ", "QQ_I", "FieldDescriptor", "FieldElement", "norm"]
__version__ = "0.1.0"
