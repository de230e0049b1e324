"""Analytic sufficient-condition classifier for entrance at infinity.

Two certified criteria are implemented:

* competition integral: for gamma1(x) = gamma2(x) = x, gamma0(0) = 0, a
  one-sided Lipschitz drift that is strictly negative beyond some level b, the
  boundary is an instantaneous entrance iff the integral of dx / |gamma0(x)|
  over [b, infinity) is finite;
* stable power: for gamma0 = gamma1 = 0, stable jump measure of index alpha,
  and gamma2(x) = const * x^r2, entrance holds when r2 > alpha.

Everything else returns the safe verdict "inconclusive": the classifier can
certify entrance but never its absence.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate

GAMMA0_NEGATIVITY_MARGIN = 1e-9


@dataclass(frozen=True)
class BoundaryReport:
    verdict: str  # "entrance" | "inconclusive"
    criterion_used: str  # "competition_integral" | "stable_power" | "none"
    integral_value: float | None
    b_used: float | None
    details: tuple

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "criterion_used": self.criterion_used,
            "integral_value": None
            if self.integral_value is None or not math.isfinite(self.integral_value)
            else self.integral_value,
            "integral_finite": None
            if self.integral_value is None
            else bool(math.isfinite(self.integral_value)),
            "b_used": self.b_used,
            "details": list(self.details),
        }


def default_classifier_grid():
    """Grid used to locate the negativity level b of the drift."""
    return np.linspace(0.0, 100.0, 101)


def competition_integral_closed_form(gamma0, b):
    """Closed-form integral of dx/|gamma0| over [b, inf), or None if no formula.

    Returns math.inf for certified divergence.
    """
    if gamma0.kind == "logistic_drift":
        c = gamma0.params[0]
        if c <= 0:
            return None
        return 2.0 / (c * b)
    if gamma0.kind == "linear":
        s = gamma0.params[0]
        if s >= 0:
            return None
        return math.inf
    if gamma0.kind == "power_law":
        coef, p = gamma0.params
        if coef >= 0:
            return None
        if p <= 1.0:
            return math.inf
        return b ** (1.0 - p) / (abs(coef) * (p - 1.0))
    return None


def competition_integral_quadrature(gamma0, b, leading_exponent, leading_coefficient, x_switch):
    """Adaptive quadrature of dx/|gamma0| on [b, x_switch] plus a transformed tail.

    The tail over [x_switch, inf) uses the substitution x = x_switch / (1 - u)
    and is certified finite by the power envelope
    |gamma0(x)| >= leading_coefficient * x**leading_exponent / 2 for
    x >= x_switch (the caller guarantees that inequality).  Requires
    leading_exponent > 1.
    """
    if leading_exponent <= 1.0:
        return math.inf
    head, _ = integrate.quad(lambda x: 1.0 / abs(float(gamma0(x))), b, x_switch, limit=200)

    def transformed(u):
        x = x_switch / (1.0 - u)
        return (x_switch / (1.0 - u) ** 2) / abs(float(gamma0(x)))

    tail, _ = integrate.quad(transformed, 0.0, 1.0, limit=200, points=[1.0])
    return head + tail


def _polynomial_leading(gamma0):
    """(degree, leading coefficient) of a polynomial rate, trailing zeros trimmed."""
    coeffs = list(gamma0.params)
    while coeffs and coeffs[-1] == 0.0:
        coeffs.pop()
    if not coeffs:
        return 0, 0.0
    return len(coeffs) - 1, coeffs[-1]


def _competition_integral(gamma0, b, details):
    """(integral value, certified flag); inf means certified divergence."""
    closed = competition_integral_closed_form(gamma0, b)
    if closed is not None:
        details.append(f"competition integral via closed form for {gamma0.kind}")
        return closed, True
    if gamma0.kind == "polynomial":
        d, a_d = _polynomial_leading(gamma0)
        if d < 2 or a_d >= 0:
            details.append(
                "polynomial drift has degree < 2 or nonnegative leading term: "
                "tail integral not certifiably finite"
            )
            return math.inf, d >= 1
        lower = [abs(c) for c in gamma0.params[:-1]]
        x_switch = max(b, 1.0, 2.0 * sum(lower) / abs(a_d))
        scan = np.linspace(b, x_switch, 2049)
        if np.any(np.asarray(gamma0(scan)) >= -GAMMA0_NEGATIVITY_MARGIN):
            details.append("drift loses strict negativity between grid points")
            return math.nan, False
        value = competition_integral_quadrature(gamma0, b, float(d), abs(a_d), x_switch)
        tail_bound = 2.0 * x_switch ** (1.0 - d) / (abs(a_d) * (d - 1.0))
        details.append(
            f"polynomial drift: quadrature to x={x_switch:g}, tail bounded by {tail_bound:.3g}"
        )
        return value, True
    details.append(f"no tail certificate for drift kind {gamma0.kind}")
    return math.nan, False


def classify(spec, report, grid=None):
    """Classify the boundary at infinity for a validated spec.

    Verdict "entrance" is returned only when every hypothesis of one of the
    two sufficient criteria was verified; otherwise "inconclusive".  b is the
    smallest grid point beyond which gamma0 stays strictly negative (margin
    1e-9); for the families covered, finiteness of the integral does not
    depend on the choice of b.
    """
    grid = default_classifier_grid() if grid is None else np.asarray(grid, dtype=float)
    details = []

    # competition-integral criterion
    if spec.gamma1.is_identity and spec.gamma2.is_identity:
        if float(spec.gamma0(0.0)) != 0.0:
            details.append("gamma0(0) != 0: competition criterion not applicable")
        elif report.one_sided_lipschitz_theta is None:
            details.append("no one-sided Lipschitz certificate: competition criterion skipped")
        elif not report.integrability_ok:
            details.append("jump measure fails (z^z^2)-integrability: non-explosion uncertified")
        else:
            g0 = np.asarray(spec.gamma0(grid), dtype=float)
            neg = g0 < -GAMMA0_NEGATIVITY_MARGIN
            b_used = None
            for i in range(grid.size):
                if grid[i] > 0 and neg[i:].all():
                    b_used = float(grid[i])
                    break
            if b_used is None:
                details.append("gamma0 not strictly negative beyond any grid point")
            else:
                value, certified = _competition_integral(spec.gamma0, b_used, details)
                if certified and math.isfinite(value):
                    details.append(f"integral of dx/|gamma0| from b={b_used:g} is finite")
                    return BoundaryReport(
                        verdict="entrance",
                        criterion_used="competition_integral",
                        integral_value=float(value),
                        b_used=b_used,
                        details=tuple(details),
                    )
                if certified and math.isinf(value):
                    details.append(
                        f"integral of dx/|gamma0| from b={b_used:g} diverges: "
                        "criterion gives no certificate"
                    )
                    return BoundaryReport(
                        verdict="inconclusive",
                        criterion_used="competition_integral",
                        integral_value=math.inf,
                        b_used=b_used,
                        details=tuple(details),
                    )
                details.append("competition integral could not be certified")
    else:
        details.append("gamma1, gamma2 are not both the identity: competition criterion skipped")

    # stable-power criterion
    if (
        spec.gamma0.is_zero
        and spec.gamma1.is_zero
        and spec.nu.kind == "stable"
        and spec.gamma2.kind == "power_law"
        and spec.gamma2.params[0] > 0
    ):
        r2 = spec.gamma2.params[1]
        alpha = spec.nu.alpha
        if r2 > alpha:
            details.append(f"stable power criterion: r2={r2:g} > alpha={alpha:g}")
            return BoundaryReport(
                verdict="entrance",
                criterion_used="stable_power",
                integral_value=None,
                b_used=None,
                details=tuple(details),
            )
        details.append(
            f"stable power criterion applies but r2={r2:g} <= alpha={alpha:g}: no certificate"
        )
        return BoundaryReport(
            verdict="inconclusive",
            criterion_used="stable_power",
            integral_value=None,
            b_used=None,
            details=tuple(details),
        )

    details.append("no sufficient criterion applicable")
    return BoundaryReport(
        verdict="inconclusive",
        criterion_used="none",
        integral_value=None,
        b_used=None,
        details=tuple(details),
    )
