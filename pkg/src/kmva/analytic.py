"""Discrete analytic signal via the FFT half-spectrum doubling convention."""

import warnings

import numpy as np
import scipy.signal

from ._validation import as_matrix, column_means_are_small
from .exceptions import DimensionMismatchError

__all__ = ["hilbert_analytic", "phase_amplitude"]


def hilbert_analytic(m):
    """Per-column analytic signal of a real time-by-space matrix.

    Each column x is mapped to z = x + i*H(x) by the standard DFT
    construction: the spectrum is doubled on positive-frequency bins,
    kept as-is at DC (and at Nyquist for even n), and zeroed on
    negative-frequency bins before inverse transforming.  The real part
    of z therefore reproduces x exactly and a bin-frequency cosine maps
    to the complex exponential exp(i*2*pi*k*t/n).

    Parameters
    ----------
    m : DataMatrix or array-like of shape (n, d)
        Real-valued input with n >= 4 rows.  Columns should already be
        mean-free; if they are not, a warning is emitted (the DC bin is
        kept, so an offset survives into the real part and shifts
        instantaneous amplitudes).

    Returns
    -------
    ndarray of complex128, shape (n, d)

    Raises
    ------
    TypeError
        If the input is complex-valued (already analytic, or not a signal
        this transform applies to).
    DimensionMismatchError
        If n < 4.
    """
    values = as_matrix(m, "m", min_rows=2)
    if values.dtype.kind == "c":
        raise TypeError("input is complex-valued; the analytic signal is defined for real input")
    if values.shape[0] < 4:
        raise DimensionMismatchError(
            f"analytic signal needs n >= 4 samples, got {values.shape[0]}"
        )
    centered = getattr(m, "centered", None)
    if centered is None:
        centered = column_means_are_small(values, rtol=1e-8)
    if not centered:
        warnings.warn("columns are not centered; DC offsets pass through the analytic signal",
                      stacklevel=2)
    return scipy.signal.hilbert(values, axis=0)


def phase_amplitude(z):
    """Split a complex array into (amplitude, phase) maps.

    amplitude = |z| elementwise; phase = arg(z) in (-pi, pi], with the
    convention arg(0) = 0.
    """
    z = np.asarray(z)
    return np.abs(z), np.angle(z)
