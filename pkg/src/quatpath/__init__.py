"""Quaternion-path toolkit: orders and ideals in B_{p,oo}, prime sampling
via quadratic forms, ideal-to-isogeny translation, and the reductions
tying isogeny path finding to endomorphism ring computation."""

__version__ = "0.1.0"
