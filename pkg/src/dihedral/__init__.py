"""Exact and numerical certification of a two-parameter family of
logarithmic flat connections on the projective plane, together with its
induced Painleve VI / Garnier solutions, dihedral monodromy, and
Lotka-Volterra foliation identities."""

__version__ = "0.1.0"
