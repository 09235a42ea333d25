"""Numerical ODE/IM machinery for twisted affine algebras.

Submodules: ``liealg_core`` (folding data), ``repmatrix`` (evaluation
representations), ``spectra`` (cyclic-element spectra), ``intertwiners``
(the maps ``m_i``), ``odeflow`` (integration and spectral determinants),
``bethe`` (functional relations and zeros), ``airy`` (integral solutions
for the linear potential) and ``cli``.
"""

__version__ = "0.1.0"
