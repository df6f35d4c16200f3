"""Fox-H functions of one, two and three variables.

The parameter bundle mirrors the usual computational convention for the
multivariate H-function: a joint kernel whose gamma arguments mix all
integration variables, plus per-variable coefficient groups of
(offset, scale) pairs.  With a single variable, unit scales and no joint
rows the function degenerates to a Meijer-G.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DomainError, EvaluationError
from .meijer import MeijerGSpec
from .mellin import ContourPlan, GammaRow, MBKernel, mb_eval


@dataclass(frozen=True)
class FoxHSpec:
    """Multivariate Fox-H parameter bundle.

    args: one positive argument per variable (1 to 3 variables).
    mn/pq: (m, n) and (p, q) pairs; element 0 describes the joint kernel,
      element i >= 1 the i-th variable.
    a/b: joint upper/lower rows, each (offset, scale_1, ..., scale_r).
    c/d: per-variable upper/lower rows, each (offset, scale) with a
      strictly positive scale.
    """

    args: tuple
    mn: tuple
    pq: tuple
    a: tuple = ()
    b: tuple = ()
    c: tuple = ()
    d: tuple = ()

    def __post_init__(self):
        args = tuple(float(z) for z in self.args)
        object.__setattr__(self, "args", args)
        nv = len(args)
        if nv not in (1, 2, 3):
            raise DomainError("Fox-H supports 1 to 3 variables")
        if any(z <= 0 for z in args):
            raise DomainError("Fox-H arguments must be positive")
        mn = tuple((int(m), int(n)) for m, n in self.mn)
        pq = tuple((int(p), int(q)) for p, q in self.pq)
        object.__setattr__(self, "mn", mn)
        object.__setattr__(self, "pq", pq)
        if len(mn) != nv + 1 or len(pq) != nv + 1:
            raise DomainError("mn/pq need one joint entry plus one per variable")
        a = tuple(tuple(float(x) for x in row) for row in self.a)
        b = tuple(tuple(float(x) for x in row) for row in self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if len(a) != pq[0][0] or len(b) != pq[0][1]:
            raise DomainError("joint row counts disagree with pq[0]")
        if mn[0][1] > pq[0][0] or mn[0][0] > pq[0][1]:
            raise DomainError("joint mn exceeds pq")
        for row in a + b:
            if len(row) != nv + 1:
                raise DomainError("joint rows carry offset plus one scale per variable")
        c = tuple(tuple((float(o), float(s)) for o, s in grp) for grp in self.c)
        d = tuple(tuple((float(o), float(s)) for o, s in grp) for grp in self.d)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        if len(c) != nv or len(d) != nv:
            raise DomainError("need one c and one d group per variable")
        for i in range(nv):
            p_i, q_i = pq[i + 1]
            m_i, n_i = mn[i + 1]
            if len(c[i]) != p_i or len(d[i]) != q_i:
                raise DomainError(f"variable {i}: row counts disagree with pq")
            if n_i > p_i or m_i > q_i:
                raise DomainError(f"variable {i}: mn exceeds pq")
            for off, sc in c[i] + d[i]:
                if sc <= 0:
                    raise DomainError("per-variable scales must be strictly positive")

    @property
    def nvars(self):
        return len(self.args)

    def is_meijer_reducible(self):
        if self.nvars != 1 or self.a or self.b:
            return False
        rows = list(self.c[0]) + list(self.d[0])
        return all(abs(sc - 1.0) < 1e-12 for _off, sc in rows)

    def to_meijer(self):
        if not self.is_meijer_reducible():
            raise DomainError("spec does not reduce to a Meijer-G")
        return MeijerGSpec(
            a_top=tuple(off for off, _ in self.c[0]),
            b_bottom=tuple(off for off, _ in self.d[0]),
            n=self.mn[1][1],
            m=self.mn[1][0],
            argument=self.args[0],
        )

    def to_kernel(self):
        nv = self.nvars
        m0, n0 = self.mn[0]

        def joint_row(row):
            return GammaRow(row[0], tuple(row[1:]))

        upper_num = [joint_row(r) for r in self.a[:n0]]
        upper_den = [joint_row(r) for r in self.a[n0:]]
        lower_num = [joint_row(r) for r in self.b[:m0]]
        lower_den = [joint_row(r) for r in self.b[m0:]]

        def var_row(i, off, sc):
            scales = [0.0] * nv
            scales[i] = sc
            return GammaRow(off, tuple(scales))

        for i in range(nv):
            m_i, n_i = self.mn[i + 1]
            for off, sc in self.c[i][:n_i]:
                upper_num.append(var_row(i, off, sc))
            for off, sc in self.c[i][n_i:]:
                upper_den.append(var_row(i, off, sc))
            for off, sc in self.d[i][:m_i]:
                lower_num.append(var_row(i, off, sc))
            for off, sc in self.d[i][m_i:]:
                lower_den.append(var_row(i, off, sc))

        return MBKernel(
            nvars=nv,
            args=self.args,
            upper_num=upper_num,
            lower_num=lower_num,
            upper_den=upper_den,
            lower_den=lower_den,
        )


def _eval(spec, plan, expect_vars):
    if spec.nvars != expect_vars:
        raise DomainError(f"expected a {expect_vars}-variable spec")
    kernel = spec.to_kernel()
    for i in range(spec.nvars):
        if kernel.decay_rate(i) <= 0:
            raise DomainError(
                f"Fox-H contour integral does not converge along variable {i}"
            )
    value, err, meta = mb_eval(kernel, plan)
    imag = abs(value.imag)
    scale = max(abs(value), 1e-300)
    if imag > max(1e-6 * scale, 30.0 * err):
        raise EvaluationError(
            f"Fox-H evaluation returned imaginary residue {imag:g} "
            f"against magnitude {scale:g}"
        )
    return value.real, err + imag, meta


def fox_h_full(spec, plan=None):
    plan = plan or ContourPlan(tolerance=1e-6)
    return _eval(spec, plan, spec.nvars)


def fox_h_univariate(spec, plan=None):
    plan = plan or ContourPlan(tolerance=1e-8)
    return _eval(spec, plan, 1)[0]


def fox_h_bivariate(spec, plan=None):
    plan = plan or ContourPlan(tolerance=1e-4, panels=10, nodes_per_panel=10)
    return _eval(spec, plan, 2)[0]


def fox_h_trivariate(spec, plan=None):
    plan = plan or ContourPlan(
        tolerance=1e-3, panels=8, nodes_per_panel=8, max_axis_nodes=1600
    )
    return _eval(spec, plan, 3)[0]
