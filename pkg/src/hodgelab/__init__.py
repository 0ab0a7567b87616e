"""Spectral-geometry verification lab on triangulated closed surfaces.

Builds sphere/spheroid meshes, assembles discrete exterior-calculus operators
and Hodge-de Rham Laplacians on functions and one-forms, solves for their low
spectra, estimates curvature bounds, samples analytic Killing and gradient
fields, and verifies eigenvalue bounds, Weitzenboeck-type identities, and
sphere-rigidity equations both discretely and against an exact sphere oracle.
"""

__version__ = "0.1.0"
