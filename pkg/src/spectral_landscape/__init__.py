"""Fourier-domain analysis and mitigation of noisy parameterised-circuit landscapes."""
