"""Mellin-Barnes contour quadrature shared by Meijer-G and Fox-H evaluation.

A kernel is a product of gamma factors of affine arguments in 1-3 complex
variables, integrated over vertical lines.  Evaluation uses composite
Gauss-Legendre panels on truncated contours; truncation heights come from
the exponential decay rate of the gamma products and panel counts from the
oscillation rate, then a refinement pass provides the error estimate.

All gamma products are accumulated in log space (magnitude + phase), so
kernels with dozens of factors stay inside double range.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import (
    ConvergenceError,
    CostBudgetError,
    DomainError,
    PoleSeparationError,
)
from .gammaln import ln_gamma_complex

_LOG2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class ContourPlan:
    """Numerical plan for one Mellin-Barnes evaluation.

    abscissa / half_height are per-variable; None selects them
    automatically (pole-gap placement, decay-based truncation).
    """

    abscissa: tuple | None = None
    half_height: tuple | None = None
    panels: int = 16
    tolerance: float = 1e-8
    nodes_per_panel: int = 12
    max_axis_nodes: int = 12_000
    max_total_nodes: int = 40_000_000
    placement: str = "midpoint"  # or "optimize"

    def __post_init__(self):
        if self.panels < 8:
            raise DomainError("contour plan needs at least 8 panels")
        if not 0.0 < self.tolerance < 1.0:
            raise DomainError("contour tolerance must lie in (0, 1)")


@dataclass(frozen=True)
class GammaRow:
    """One gamma factor; scales has one entry per integration variable."""

    offset: float
    scales: tuple

    def scale(self, i):
        return self.scales[i]


@dataclass
class MBKernel:
    """Product-of-gammas integrand over `nvars` vertical contours.

    Gamma factor groups (s is the integration vector):
      upper_num: Gamma(1 - offset - scales.s) in the numerator
      lower_num: Gamma(offset + scales.s)     in the numerator
      upper_den: Gamma(offset + scales.s)     in the denominator
      lower_den: Gamma(1 - offset - scales.s) in the denominator
    The integrand carries prod_i args[i]**(-s_i).
    """

    nvars: int
    args: tuple
    upper_num: list = field(default_factory=list)
    lower_num: list = field(default_factory=list)
    upper_den: list = field(default_factory=list)
    lower_den: list = field(default_factory=list)
    coefficient: float = 1.0

    def __post_init__(self):
        if any(a <= 0 for a in self.args):
            raise DomainError("Mellin-Barnes arguments must be positive")
        for row in self.all_rows():
            if len(row.scales) != self.nvars:
                raise DomainError("gamma row has wrong arity")

    def all_rows(self):
        return (
            list(self.upper_num)
            + list(self.lower_num)
            + list(self.upper_den)
            + list(self.lower_den)
        )

    def decay_rate(self, i):
        """Exponential decay rate of |integrand| along axis i (per |t|)."""
        num = sum(abs(r.scale(i)) for r in self.upper_num)
        num += sum(abs(r.scale(i)) for r in self.lower_num)
        den = sum(abs(r.scale(i)) for r in self.upper_den)
        den += sum(abs(r.scale(i)) for r in self.lower_den)
        return 0.5 * np.pi * (num - den)

    def _per_var_rows(self, i):
        """Rows involving only variable i, split by family."""
        un, ln_, = [], []
        for r in self.upper_num:
            if r.scale(i) != 0.0 and all(
                r.scale(j) == 0.0 for j in range(self.nvars) if j != i
            ):
                un.append(r)
        for r in self.lower_num:
            if r.scale(i) != 0.0 and all(
                r.scale(j) == 0.0 for j in range(self.nvars) if j != i
            ):
                ln_.append(r)
        return un, ln_

    def _joint_rows(self):
        out = []
        for kind, rows in (("upper", self.upper_num), ("lower", self.lower_num)):
            for r in rows:
                if sum(1 for sc in r.scales if sc != 0.0) > 1:
                    out.append((kind, r))
        return out


def _axis_bounds(kernel, i):
    """Open interval of admissible abscissae from per-variable pole rows."""
    upper_rows, lower_rows = kernel._per_var_rows(i)
    lo = -np.inf
    hi = np.inf
    for r in lower_rows:
        sc = r.scale(i)
        if sc > 0:
            lo = max(lo, -r.offset / sc)
        else:
            hi = min(hi, -r.offset / sc)
    for r in upper_rows:
        sc = r.scale(i)
        if sc > 0:
            hi = min(hi, (1.0 - r.offset) / sc)
        else:
            lo = max(lo, (1.0 - r.offset) / sc)
    return lo, hi


def _choose_abscissae(kernel, plan):
    """Pick the vertical-line real parts; returns (sigma, meta)."""
    meta = {"perturbed": False}
    work = kernel
    for attempt in range(3):
        bounds = [_axis_bounds(work, i) for i in range(work.nvars)]
        gap_ok = all(lo < hi - 1e-14 for lo, hi in bounds)
        if gap_ok:
            break
        # Pole families touch (integer-spaced offsets colliding): nudge the
        # right-family offsets and retry with the perturbation recorded.
        eps = 1e-6 * (8.0**attempt)
        work = replace(
            work,
            upper_num=[
                GammaRow(r.offset - eps, r.scales) for r in work.upper_num
            ],
        )
        meta["perturbed"] = True
        meta["epsilon"] = eps
    else:
        raise PoleSeparationError(
            f"pole families overlap on axes {[i for i, (lo, hi) in enumerate(bounds) if lo >= hi]}"
        )

    sigma = np.empty(work.nvars)
    for i, (lo, hi) in enumerate(bounds):
        if np.isinf(lo) and np.isinf(hi):
            sigma[i] = 0.0
        elif np.isinf(lo):
            sigma[i] = hi - 1.0
        elif np.isinf(hi):
            sigma[i] = lo + 1.0
        else:
            sigma[i] = 0.5 * (lo + hi)

    if plan.placement == "optimize":
        sigma = _optimize_abscissae(work, sigma, bounds)

    sigma = _fix_joint_constraints(work, sigma, bounds)
    return work, sigma, bounds, meta


def _log_envelope(kernel, sigma):
    """log magnitude of the integrand at t = 0 for abscissa vector sigma."""
    s = sigma.astype(complex)
    total = 0.0
    try:
        for r in kernel.upper_num:
            total += ln_gamma_complex(1.0 - r.offset - np.dot(r.scales, s)).real
        for r in kernel.lower_num:
            total += ln_gamma_complex(r.offset + np.dot(r.scales, s)).real
        for r in kernel.upper_den:
            total -= ln_gamma_complex(r.offset + np.dot(r.scales, s)).real
        for r in kernel.lower_den:
            total -= ln_gamma_complex(1.0 - r.offset - np.dot(r.scales, s)).real
    except DomainError:
        return np.inf
    total -= float(np.dot(sigma, np.log(kernel.args)))
    return total


def _optimize_abscissae(kernel, sigma, bounds):
    """Coordinate search for the abscissa vector minimizing the envelope.

    Keeps the contour well conditioned for extreme arguments; the pole gap
    is never left.
    """
    sigma = sigma.copy()
    for _ in range(2):
        for i, (lo, hi) in enumerate(bounds):
            if np.isinf(lo) and np.isinf(hi):
                cand = np.linspace(-8.0, 8.0, 17)
            elif np.isinf(hi):
                cand = lo + 1e-3 + np.geomspace(1e-2, 400.0, 25)
            elif np.isinf(lo):
                cand = hi - 1e-3 - np.geomspace(1e-2, 400.0, 25)
            else:
                span = hi - lo
                cand = lo + span * np.linspace(0.04, 0.96, 25)
            best, best_val = sigma[i], _log_envelope(kernel, sigma)
            for c in cand:
                trial = sigma.copy()
                trial[i] = c
                val = _log_envelope(kernel, trial)
                if val < best_val:
                    best, best_val = c, val
            sigma[i] = best
    return sigma


def _fix_joint_constraints(kernel, sigma, bounds):
    """Shift the abscissa vector so joint gamma rows keep their pole
    families on the correct side, staying inside per-axis gaps."""
    joints = kernel._joint_rows()
    if not joints:
        return sigma
    sigma = sigma.copy()
    for _ in range(12):
        worst = None
        for kind, r in joints:
            val = (
                1.0 - r.offset - float(np.dot(r.scales, sigma))
                if kind == "upper"
                else r.offset + float(np.dot(r.scales, sigma))
            )
            if val <= 1e-9 and (worst is None or val < worst[0]):
                worst = (val, kind, r)
        if worst is None:
            return sigma
        val, kind, r = worst
        vec = np.asarray(r.scales, dtype=float)
        if kind == "upper":
            vec = -vec
        norm2 = float(np.dot(vec, vec))
        step = (0.5 - val) / norm2
        trial = sigma + step * vec
        for i, (lo, hi) in enumerate(bounds):
            if not np.isinf(lo) and not np.isinf(hi):
                pad = 0.02 * (hi - lo)
                trial[i] = np.clip(trial[i], lo + pad, hi - pad)
            elif not np.isinf(lo):
                trial[i] = max(trial[i], lo + 0.05)
            elif not np.isinf(hi):
                trial[i] = min(trial[i], hi - 0.05)
        if np.allclose(trial, sigma):
            break
        sigma = trial
    # Final verification.
    for kind, r in joints:
        val = (
            1.0 - r.offset - float(np.dot(r.scales, sigma))
            if kind == "upper"
            else r.offset + float(np.dot(r.scales, sigma))
        )
        if val <= 0.0:
            raise PoleSeparationError(
                "joint gamma row cannot be separated from the contour"
            )
    return sigma


def _auto_height(kernel, sigma, i, tol):
    """Truncation half-height along axis i from the decay envelope."""
    c = kernel.decay_rate(i)
    if c <= 0:
        raise DomainError(
            f"contour integrand does not decay along axis {i}; "
            "Mellin-Barnes representation diverges"
        )
    target = -np.log(max(tol * 1e-3, 1e-16))
    T = max(6.0, (target + 2.0 * np.log1p(target)) / c)

    # Verify on the actual integrand (other axes held at their abscissae).
    def ratio(T_try):
        probe = sigma.astype(complex).copy()
        probe_hi = probe.copy()
        probe_hi[i] += 1j * T_try
        return _log_integrand_points(kernel, probe_hi) - _log_integrand_points(
            kernel, probe
        )

    cutoff = np.log(max(tol * 1e-3, 1e-16))
    for _ in range(8):
        if ratio(T).real <= cutoff:
            return T
        T *= 1.5
    return T


def _log_integrand_points(kernel, svec):
    total = 0.0 + 0.0j
    for r in kernel.upper_num:
        total += ln_gamma_complex(1.0 - r.offset - np.dot(r.scales, svec))
    for r in kernel.lower_num:
        total += ln_gamma_complex(r.offset + np.dot(r.scales, svec))
    for r in kernel.upper_den:
        total -= ln_gamma_complex(r.offset + np.dot(r.scales, svec))
    for r in kernel.lower_den:
        total -= ln_gamma_complex(1.0 - r.offset - np.dot(r.scales, svec))
    total -= np.dot(svec, np.log(kernel.args))
    return total


_GL_CACHE = {}


def _gl_nodes(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _axis_grid(T, panels, nodes, clearance=None):
    """Composite Gauss-Legendre nodes/weights on [-T, T].

    Panel edges follow a sinh grading so the region near t = 0 (where
    gamma factors close to a pole spike sharply) is resolved without
    wasting nodes on the exponentially damped tails.  `clearance` is the
    distance from the contour to the nearest pole; the grading deepens
    until the innermost panels resolve that scale.
    """
    x, w = _gl_nodes(nodes)
    kappa = 3.0
    if clearance is not None and clearance > 0.0:
        kappa = float(np.clip(np.log(2.0 * T / clearance), 3.0, 24.0))
    u = np.linspace(-1.0, 1.0, panels + 1)
    edges = T * np.sinh(kappa * u) / np.sinh(kappa)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return t, wt


def _axis_log_factor(kernel, i, s_axis):
    """Log of the product of the per-variable gamma rows of axis i, plus
    the argument power, evaluated at the complex nodes s_axis."""
    un, ln_ = kernel._per_var_rows(i)
    total = np.zeros_like(s_axis)
    for r in un:
        total += ln_gamma_complex(1.0 - r.offset - r.scale(i) * s_axis)
    for r in ln_:
        total += ln_gamma_complex(r.offset + r.scale(i) * s_axis)
    for r in kernel.upper_den:
        if r.scale(i) != 0.0 and all(
            r.scale(j) == 0.0 for j in range(kernel.nvars) if j != i
        ):
            total -= ln_gamma_complex(r.offset + r.scale(i) * s_axis)
    for r in kernel.lower_den:
        if r.scale(i) != 0.0 and all(
            r.scale(j) == 0.0 for j in range(kernel.nvars) if j != i
        ):
            total -= ln_gamma_complex(1.0 - r.offset - r.scale(i) * s_axis)
    total -= s_axis * np.log(kernel.args[i])
    return total


def _tensor_value(kernel, axes):
    """Weighted tensor contraction of the integrand.

    axes: list of (s_nodes, weights) per variable.  Returns the complex
    contour integral including the (2*pi)**-r measure.
    """
    nv = kernel.nvars
    logfacs = []
    for i, (s_nodes, _) in enumerate(axes):
        logfacs.append(_axis_log_factor(kernel, i, s_nodes))

    # Per-axis scaled factors keep exp() inside double range.
    shifts = []
    facs = []
    for i, ((_, w), lf) in enumerate(zip(axes, logfacs)):
        m = np.max(lf.real)
        shifts.append(m)
        facs.append(np.exp(lf - m) * w)

    joints = kernel._joint_rows()
    if not joints:
        acc = 1.0 + 0.0j
        mass = 1.0
        for f in facs:
            acc *= np.sum(f)
            mass *= np.sum(np.abs(f))
    else:
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij", sparse=True)
        logj = np.zeros(tuple(len(a[0]) for a in axes), dtype=complex)
        for kind, r in joints:
            arg = (1.0 - r.offset) if kind == "upper" else r.offset
            argc = np.asarray(arg, dtype=complex)
            for i in range(nv):
                sc = r.scale(i) if kind == "lower" else -r.scale(i)
                if sc != 0.0:
                    argc = argc + sc * grids[i]
            logj = logj + ln_gamma_complex(argc)
        mj = np.max(logj.real)
        shifts.append(mj)
        J = np.exp(logj - mj)
        absJ = np.abs(J)
        absf = [np.abs(f) for f in facs]
        if nv == 1:
            acc = np.einsum("i,i->", J, facs[0])
            mass = np.einsum("i,i->", absJ, absf[0])
        elif nv == 2:
            acc = np.einsum("ij,i,j->", J, facs[0], facs[1])
            mass = np.einsum("ij,i,j->", absJ, absf[0], absf[1])
        else:
            acc = np.einsum("ijk,i,j,k->", J, facs[0], facs[1], facs[2])
            mass = np.einsum("ijk,i,j,k->", absJ, absf[0], absf[1], absf[2])

    scale = float(np.sum(shifts)) - nv * _LOG2PI
    if scale > 700.0:
        raise ConvergenceError(
            "contour integral magnitude overflows double precision",
            value=None,
            error_estimate=np.inf,
        )
    return acc * np.exp(scale), float(mass) * np.exp(scale)


def _panel_counts(kernel, T, plan):
    counts = []
    for i in range(kernel.nvars):
        osc = abs(np.log(kernel.args[i]))
        csum = sum(abs(r.scale(i)) for r in kernel.all_rows())
        cycles = T[i] * (osc + csum * np.log(2.0 + T[i])) / (2.0 * np.pi)
        k = int(np.ceil(cycles * 8.0 / plan.nodes_per_panel)) + plan.panels
        counts.append(min(k, plan.max_axis_nodes // plan.nodes_per_panel))
    return counts


def mb_eval(kernel, plan=None):
    """Evaluate a Mellin-Barnes kernel.

    Returns (value, error_estimate, meta).  value is complex; callers that
    expect a real result check the imaginary residue themselves.
    """
    plan = plan or ContourPlan()
    work, sigma, bounds, meta = _choose_abscissae(kernel, plan)
    if plan.abscissa is not None:
        sigma = np.asarray(plan.abscissa, dtype=float)
        for i, (lo, hi) in enumerate(bounds):
            if not (lo < sigma[i] < hi):
                raise PoleSeparationError(
                    f"requested abscissa {sigma[i]} outside pole gap "
                    f"({lo}, {hi}) on axis {i}"
                )
        sigma = _fix_joint_constraints(work, sigma, bounds)

    if plan.half_height is not None:
        T = np.asarray(plan.half_height, dtype=float)
    else:
        T = np.array(
            [_auto_height(work, sigma, i, plan.tolerance) for i in range(work.nvars)]
        )

    counts = _panel_counts(work, T, plan)
    clearances = []
    for i, (lo, hi) in enumerate(bounds):
        c = np.inf
        if not np.isinf(lo):
            c = min(c, sigma[i] - lo)
        if not np.isinf(hi):
            c = min(c, hi - sigma[i])
        clearances.append(None if np.isinf(c) else float(c))
    meta.update(
        abscissa=tuple(sigma),
        half_height=tuple(T),
    )

    value_prev = None
    for escalation in range(4):
        total_nodes = 1
        for k in counts:
            total_nodes *= k * plan.nodes_per_panel
        if total_nodes > plan.max_total_nodes:
            raise CostBudgetError(
                f"tensor quadrature needs {total_nodes} nodes, over the "
                f"budget of {plan.max_total_nodes}"
            )
        axes = []
        for i in range(work.nvars):
            t, wt = _axis_grid(T[i], counts[i], plan.nodes_per_panel, clearances[i])
            axes.append((sigma[i] + 1j * t, wt))
        value, mass = _tensor_value(work, axes)
        noise_floor = 5e-16 * mass
        if value_prev is not None:
            delta = abs(value - value_prev)
            err = 1.5 * delta + noise_floor
            scale = max(abs(value), 1e-300)
            if delta <= plan.tolerance * scale or delta <= 3.0 * noise_floor:
                meta["panels"] = tuple(counts)
                meta["condition"] = mass / scale
                return value, err, meta
        value_prev = value
        counts = [int(np.ceil(k * 1.6)) for k in counts]

    err = 1.5 * abs(value - value_prev) + noise_floor
    raise ConvergenceError(
        f"contour quadrature did not reach tolerance {plan.tolerance:g} "
        f"(achieved ~{abs(value - value_prev) / max(abs(value), 1e-300):.2e} relative)",
        value=value,
        error_estimate=err,
    )
