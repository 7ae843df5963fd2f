"""Quantum predictions for Clauser-Horne tests with noisy photon-number readout."""

__version__ = "0.1.0"
