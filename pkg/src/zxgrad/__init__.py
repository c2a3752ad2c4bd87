"""Gradients of parametrised quantum circuits through ZXW diagrams.

Submodules:

* :mod:`zxgrad.zxw_core` ZXW generators, diagram composition and evaluation
* :mod:`zxgrad.param_unitaries` parametrised gates built from eigendecompositions
* :mod:`zxgrad.gradient_engine` batched statevector gradients
* :mod:`zxgrad.shift_rules` parameter-shift rule synthesis and the ancilla recipe
* :mod:`zxgrad.ansatz_library` benchmark ansätze
* :mod:`zxgrad.barren_analyzer` gradient variance by quadrature, sampling and diagrams
* :mod:`zxgrad.cli` the ``zxgrad`` command
"""

__version__ = "0.1.0"
