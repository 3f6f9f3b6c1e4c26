"""Laser-assisted Fano resonances in helium photoionization.

Single-active-electron TDSE solver on a finite-element DVR grid, a two-level
resonance model of the 1s3p window line, an analytic complex-plane lineshape
engine, and RABBIT spectrogram fitting / wave-packet reconstruction tools.
"""

__version__ = "0.1.0"
