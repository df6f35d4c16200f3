"""Meijer-G evaluation on vertical Mellin-Barnes contours."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, EvaluationError
from .mellin import ContourPlan, GammaRow, MBKernel, mb_eval


@dataclass(frozen=True)
class MeijerGSpec:
    """G^{m,n}_{p,q}(argument | a_top ; b_bottom).

    a_top holds the p upper coefficients, the first n of which sit in the
    numerator; b_bottom holds the q lower coefficients, the first m in the
    numerator.
    """

    a_top: tuple
    b_bottom: tuple
    n: int
    m: int
    argument: float

    def __post_init__(self):
        object.__setattr__(self, "a_top", tuple(float(x) for x in self.a_top))
        object.__setattr__(self, "b_bottom", tuple(float(x) for x in self.b_bottom))
        if not 0 <= self.n <= len(self.a_top):
            raise DomainError("need 0 <= n <= p")
        if not 0 <= self.m <= len(self.b_bottom):
            raise DomainError("need 0 <= m <= q")
        if not self.argument > 0:
            raise DomainError("argument must be positive")

    @property
    def p(self):
        return len(self.a_top)

    @property
    def q(self):
        return len(self.b_bottom)

    def decay_exponent(self):
        """m + n - (p + q)/2; the contour integral needs this positive."""
        return self.m + self.n - 0.5 * (self.p + self.q)

    def to_kernel(self):
        one = (1.0,)
        return MBKernel(
            nvars=1,
            args=(self.argument,),
            upper_num=[GammaRow(a, one) for a in self.a_top[: self.n]],
            upper_den=[GammaRow(a, one) for a in self.a_top[self.n :]],
            lower_num=[GammaRow(b, one) for b in self.b_bottom[: self.m]],
            lower_den=[GammaRow(b, one) for b in self.b_bottom[self.m :]],
        )

    def inverted(self):
        """Equivalent spec with the argument replaced by its reciprocal."""
        return MeijerGSpec(
            a_top=tuple(1.0 - b for b in self.b_bottom),
            b_bottom=tuple(1.0 - a for a in self.a_top),
            n=self.m,
            m=self.n,
            argument=1.0 / self.argument,
        )


def meijer_g_full(spec, plan=None):
    """Evaluate; returns (value, error_estimate, meta)."""
    if spec.decay_exponent() <= 0:
        raise DomainError(
            "Mellin-Barnes integral for this parameter combination does not "
            f"converge on a vertical contour (m+n-(p+q)/2 = {spec.decay_exponent():g})"
        )
    value, err, meta = mb_eval(spec.to_kernel(), plan)
    imag = abs(value.imag)
    scale = max(abs(value), 1e-300)
    if imag > max(1e-8 * scale, 10.0 * err):
        raise EvaluationError(
            f"Meijer-G evaluation returned imaginary residue {imag:g} "
            f"against magnitude {scale:g}"
        )
    return value.real, err + imag, meta


def meijer_g(spec, plan=None):
    """Real Meijer-G value for a positive argument."""
    return meijer_g_full(spec, plan)[0]


def meijer_g_batch(spec, arguments, plan=None):
    """Evaluate one coefficient set over many positive arguments.

    The gamma products are computed once per contour node and reused, so a
    whole sweep costs little more than a single evaluation.  Returns
    (values, error_estimates).
    """
    arguments = np.asarray(arguments, dtype=float)
    if np.any(arguments <= 0):
        raise DomainError("arguments must be positive")
    if arguments.size == 0:
        return np.empty(0), np.empty(0)
    if spec.decay_exponent() <= 0:
        raise DomainError("non-convergent Meijer-G parameter combination")

    plan = plan or ContourPlan(tolerance=1e-10, placement="optimize")
    zs = arguments.ravel()
    values = np.empty_like(zs)
    errors = np.empty_like(zs)

    # One shared contour per decade band; the abscissa is tuned for the
    # band so extreme arguments keep their relative accuracy.
    bands = np.floor(np.log10(zs)).astype(int)
    for band in np.unique(bands):
        idx = np.flatnonzero(bands == band)
        v, e = _batch_band(spec, zs[idx], plan)
        values[idx] = v
        errors[idx] = e
    return values.reshape(arguments.shape), errors.reshape(arguments.shape)


def _batch_band(spec, zs, plan):
    from .mellin import (  # reuse internals deliberately
        _auto_height,
        _axis_grid,
        _axis_log_factor,
        _choose_abscissae,
        _panel_counts,
    )

    zref = float(np.exp(np.mean(np.log(zs))))
    base = MeijerGSpec(spec.a_top, spec.b_bottom, spec.n, spec.m, zref)
    kernel = base.to_kernel()
    work, sigma, bounds, _meta = _choose_abscissae(kernel, plan)
    T = np.array([_auto_height(work, sigma, 0, plan.tolerance)])
    counts = _panel_counts(work, T, plan)
    lo, hi = bounds[0]
    clearance = min(
        sigma[0] - lo if np.isfinite(lo) else np.inf,
        hi - sigma[0] if np.isfinite(hi) else np.inf,
    )
    clearance = None if np.isinf(clearance) else float(clearance)

    def values_at(k):
        t, wt = _axis_grid(T[0], k, plan.nodes_per_panel, clearance)
        s = sigma[0] + 1j * t
        lf = _axis_log_factor(work, 0, s)
        # _axis_log_factor folded in zref**-s; undo it.
        lf = lf + s * np.log(work.args[0])
        mshift = np.max(lf.real)
        f = np.exp(lf - mshift) * wt
        zpow = np.exp(-np.outer(np.log(zs), s))
        vals = zpow @ f
        mass = np.abs(zpow) @ np.abs(f)
        return vals * np.exp(mshift) / (2.0 * np.pi), mass * np.exp(mshift) / (
            2.0 * np.pi
        )

    v1, _ = values_at(counts[0])
    v2, mass = values_at(int(np.ceil(counts[0] * 1.6)))
    err = 1.5 * np.abs(v2 - v1) + np.abs(v2.imag) + 5e-16 * mass
    return v2.real, err
