"""Simulation toolkit for the whole-vs-parts ignorance game on single qudits.

Submodules:

* :mod:`ignorance.qudit` -- Weyl operators, Fourier transform, encodings.
* :mod:`ignorance.game` -- guessing probabilities and the min-entropy splitting bound.
* :mod:`ignorance.photonics` -- weak coherent source contamination and loss.
* :mod:`ignorance.counting` -- Monte Carlo photon counting with shot noise.
* :mod:`ignorance.modes` -- Laguerre-Gauss fields carrying the d-rail qudit.
* :mod:`ignorance.cli` -- sweep and render commands.
"""

__version__ = "0.1.0"
