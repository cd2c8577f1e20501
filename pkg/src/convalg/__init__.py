"""Convolution algebras on finite domains and recovery of their Fourier kernels."""

__version__ = "0.1.0"
