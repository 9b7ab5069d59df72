"""Exact computer-algebra workbench for vertex rings and their companions.

Submodules:

* :mod:`vertexlab.exact_algebra` -- coefficient rings and truncated power series
* :mod:`vertexlab.fgl` -- one-dimensional commutative formal group laws
* :mod:`vertexlab.hs_vertex` -- Hasse-Schmidt derivations and the vertex operators they induce
* :mod:`vertexlab.modular_forms` -- q-expansions, Eisenstein series, eta, j, modular derivatives
* :mod:`vertexlab.mlde` -- monic modular linear differential equations and Frobenius solutions
* :mod:`vertexlab.pierce` -- idempotents, Boolean spectra and Pierce stalks of finite rings
* :mod:`vertexlab.lattice_theta` -- lattices, short vectors and genus-1/genus-2 theta series
"""

__version__ = "0.1.0"
