"""Principal-branch complex log-gamma via the Lanczos approximation.

Every Mellin-Barnes kernel in this package works with gamma products in
log space (magnitude + phase), so this is the single primitive the whole
contour machinery rests on.  The 15-term g = 607/128 coefficient set keeps
the relative error of exp(ln_gamma_complex(z)) below ~1e-13 over the test
grid, comfortably inside the 1e-12 contract.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError

_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = np.array(
    [
        0.99999999999999709182,
        57.156235665862923517,
        -59.597960355475491248,
        14.136097974741747174,
        -0.49191381609762019978,
        0.33994649984811888699e-4,
        0.46523628927048575665e-4,
        -0.98374475304879564677e-4,
        0.15808870322491248884e-3,
        -0.21026444172410488319e-3,
        0.21743961811521264320e-3,
        -0.16431810653676389022e-3,
        0.84418223983852743293e-4,
        -0.26190838401581408670e-4,
        0.36899182659531622704e-5,
    ]
)
_LOG_SQRT_2PI = 0.91893853320467274178  # log(sqrt(2*pi))


def _lanczos_right(z):
    """Lanczos sum, valid for Re(z) >= 0.5."""
    zm1 = z - 1.0
    series = np.full_like(z, _LANCZOS_C[0])
    for k in range(1, len(_LANCZOS_C)):
        series = series + _LANCZOS_C[k] / (zm1 + k)
    t = zm1 + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zm1 + 0.5) * np.log(t) - t + np.log(series)


def _log_sin_pi_upper(z):
    """log(sin(pi z)) for Im(z) >= 0, continuous and overflow-free.

    Uses sin(pi z) = -exp(-i pi z) (1 - exp(2 i pi z)) / (2i) so the
    exponentials stay bounded in the upper half-plane.
    """
    return (
        -1j * np.pi * z
        + np.log1p(-np.exp(2j * np.pi * z))
        + np.log(0.5j)
    )


def ln_gamma_complex(z):
    """Principal branch of log Gamma(z) for complex (or real) input.

    Accepts scalars or numpy arrays.  Raises DomainError when any entry is
    a pole of the gamma function (a non-positive integer).
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)

    on_real_axis = z.imag == 0.0
    at_pole = on_real_axis & (z.real <= 0.0) & (z.real == np.floor(z.real))
    if np.any(at_pole):
        bad = z[at_pole].flat[0]
        raise DomainError(f"log-gamma pole at z = {bad.real:g}")

    out = np.empty_like(z)

    right = z.real >= 0.5
    if np.any(right):
        out[right] = _lanczos_right(z[right])

    left = ~right
    if np.any(left):
        zl = z[left]
        # Reflection formula; conjugate symmetry maps Im < 0 into the
        # upper half-plane where the unwound log-sin is valid.
        flip = zl.imag < 0.0
        zu = np.where(flip, np.conj(zl), zl)
        refl = np.log(np.pi) - _log_sin_pi_upper(zu) - _lanczos_right(1.0 - zu)
        refl = np.where(flip, np.conj(refl), refl)
        out[left] = refl

    return out[0] if scalar else out


def gamma_complex(z):
    """Gamma(z) through the log-space path (overflow -> inf)."""
    return np.exp(ln_gamma_complex(z))
