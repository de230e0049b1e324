"""Process specifications: rate functions, Lévy measures, and their validation.

A :class:`ProcessSpec` is the coefficient set (gamma0, gamma1, gamma2, nu) of a
positive jump-diffusion

    dX = gamma0(X) dt + sqrt(gamma1(X)) dB
         + (jumps of size z at modulated rate gamma2(X) nu(dz), compensated),

with nu supported on (0, infinity): all jumps are upward.  Rate functions and
measures come from small closed parametric families so that the structural
hypotheses used elsewhere (one-sided Lipschitz drift, nondecreasing gamma2,
jump integrability) and the boundary-classifier integrals stay analytic where
possible.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate

from .errors import DomainError, SpecificationError

RATE_ZERO = 0
RATE_LINEAR = 1
RATE_POWER = 2
RATE_LOGISTIC = 3
RATE_POLY = 4
RATE_TABULATED = 5

_RATE_NAMES = {
    "zero": RATE_ZERO,
    "linear": RATE_LINEAR,
    "power_law": RATE_POWER,
    "logistic_drift": RATE_LOGISTIC,
    "polynomial": RATE_POLY,
    "tabulated": RATE_TABULATED,
}

LEVY_NONE = 0
LEVY_STABLE = 1
LEVY_TRUNCATED_STABLE = 2
LEVY_FINITE_ATOMS = 3

_LEVY_NAMES = {
    "none": LEVY_NONE,
    "stable": LEVY_STABLE,
    "truncated_stable": LEVY_TRUNCATED_STABLE,
    "finite_atoms": LEVY_FINITE_ATOMS,
}

_QUAD_ABS_TOL = 1e-9


@dataclass(frozen=True)
class RateFunction:
    """One coefficient function on [0, infinity), from a closed family.

    kinds: zero; linear (slope*x); power_law (coef*x**exponent, exponent >= 0);
    logistic_drift (-(c/2)*x**2); polynomial (ascending coefficients);
    tabulated (piecewise-linear through sorted (x, value) pairs).
    """

    kind: str
    params: tuple = ()
    table_x: tuple = ()
    table_y: tuple = ()

    def __post_init__(self):
        if self.kind not in _RATE_NAMES:
            raise SpecificationError(f"unknown rate function kind {self.kind!r}")
        p = self.params
        if self.kind == "linear" and len(p) != 1:
            raise SpecificationError("linear rate takes exactly one slope parameter")
        if self.kind == "power_law":
            if len(p) != 2:
                raise SpecificationError("power_law rate takes (coefficient, exponent)")
            coef, expo = p
            if not math.isfinite(coef):
                raise SpecificationError("power_law coefficient must be finite")
            if not (math.isfinite(expo) and expo >= 0):
                raise SpecificationError("power_law exponent must be finite and >= 0")
        if self.kind == "logistic_drift":
            if len(p) != 1 or not (math.isfinite(p[0])):
                raise SpecificationError("logistic_drift takes one finite parameter c")
        if self.kind == "polynomial" and len(p) == 0:
            raise SpecificationError("polynomial rate needs at least one coefficient")
        if self.kind == "tabulated":
            xs, ys = np.asarray(self.table_x, float), np.asarray(self.table_y, float)
            if xs.size < 2 or xs.size != ys.size:
                raise SpecificationError("tabulated rate needs >= 2 (x, value) pairs")
            if not np.all(np.diff(xs) > 0):
                raise SpecificationError("tabulated abscissae must be strictly increasing")
            if xs[0] != 0.0:
                raise SpecificationError("tabulated abscissae must start at 0")
            if not np.all(np.isfinite(ys)):
                raise SpecificationError("tabulated values must be finite")

    # --- constructors -----------------------------------------------------
    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def linear(cls, slope):
        return cls("linear", (float(slope),))

    @classmethod
    def power_law(cls, coefficient, exponent):
        return cls("power_law", (float(coefficient), float(exponent)))

    @classmethod
    def logistic_drift(cls, c):
        return cls("logistic_drift", (float(c),))

    @classmethod
    def polynomial(cls, coefficients):
        return cls("polynomial", tuple(float(c) for c in coefficients))

    @classmethod
    def tabulated(cls, xs, ys):
        return cls("tabulated", (), tuple(float(x) for x in xs), tuple(float(y) for y in ys))

    # --- evaluation -------------------------------------------------------
    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("rate functions are defined on x >= 0 only")
        if self.kind == "zero":
            out = np.zeros_like(x)
        elif self.kind == "linear":
            out = self.params[0] * x
        elif self.kind == "power_law":
            coef, expo = self.params
            out = coef * np.power(x, expo)
        elif self.kind == "logistic_drift":
            out = -(self.params[0] / 2.0) * x * x
        elif self.kind == "polynomial":
            out = np.polynomial.polynomial.polyval(x, np.asarray(self.params))
        else:  # tabulated
            xs = np.asarray(self.table_x)
            if np.any(x > xs[-1]):
                raise SpecificationError(
                    f"tabulated rate not evaluable beyond x={xs[-1]:g} "
                    f"(requested up to {float(np.max(x)):g})"
                )
            out = np.interp(x, xs, np.asarray(self.table_y))
        if not np.all(np.isfinite(out)):
            raise SpecificationError(f"rate function {self.kind} not finite on input")
        return float(out) if out.ndim == 0 else out

    # --- structure probes used by validation and the boundary classifier --
    @property
    def is_zero(self):
        if self.kind == "zero":
            return True
        if self.kind == "linear":
            return self.params[0] == 0.0
        if self.kind == "power_law":
            return self.params[0] == 0.0
        if self.kind == "logistic_drift":
            return self.params[0] == 0.0
        if self.kind == "polynomial":
            return all(c == 0.0 for c in self.params)
        return False

    @property
    def is_identity(self):
        """True when the function is provably x -> x."""
        if self.kind == "linear":
            return self.params[0] == 1.0
        if self.kind == "power_law":
            return self.params == (1.0, 1.0)
        if self.kind == "polynomial":
            return (
                len(self.params) >= 2
                and self.params[0] == 0.0
                and self.params[1] == 1.0
                and all(c == 0.0 for c in self.params[2:])
            )
        return False

    def pack(self):
        """Primitive representation consumed by the simulation kernels."""
        code = _RATE_NAMES[self.kind]
        params = np.asarray(self.params, dtype=np.float64)
        tx = np.asarray(self.table_x, dtype=np.float64)
        ty = np.asarray(self.table_y, dtype=np.float64)
        return code, params, tx, ty

    def to_dict(self):
        if self.kind == "zero":
            return {"kind": "zero"}
        if self.kind == "linear":
            return {"kind": "linear", "slope": self.params[0]}
        if self.kind == "power_law":
            return {"kind": "power_law", "coefficient": self.params[0], "exponent": self.params[1]}
        if self.kind == "logistic_drift":
            return {"kind": "logistic_drift", "c": self.params[0]}
        if self.kind == "polynomial":
            return {"kind": "polynomial", "coefficients": list(self.params)}
        return {"kind": "tabulated", "x": list(self.table_x), "value": list(self.table_y)}


@dataclass(frozen=True)
class LevyMeasure:
    """Jump-size measure on (0, infinity); all mass on positive sizes.

    kinds: none; stable (c_alpha * z**(-1-alpha) dz with alpha in (1,2));
    truncated_stable (same density cut at z_max); finite_atoms (point masses
    (size, rate)).  Construction enforces the integrability requirement
    integral of (z wedge z^2) nu(dz) < infinity.
    """

    kind: str
    alpha: float = 0.0
    c_alpha: float = 0.0
    z_max: float = 0.0
    atoms: tuple = ()  # ((size, rate), ...)

    def __post_init__(self):
        if self.kind not in _LEVY_NAMES:
            raise SpecificationError(f"unknown Levy measure kind {self.kind!r}")
        if self.kind in ("stable", "truncated_stable"):
            if not (1.0 < self.alpha < 2.0):
                raise SpecificationError("stable index alpha must lie in (1, 2)")
            if not (self.c_alpha > 0 and math.isfinite(self.c_alpha)):
                raise SpecificationError("stable intensity c_alpha must be positive")
        if self.kind == "truncated_stable" and not (self.z_max > 0):
            raise SpecificationError("truncation level z_max must be positive")
        if self.kind == "finite_atoms":
            if not self.atoms:
                raise SpecificationError("finite_atoms needs at least one atom")
            for z, lam in self.atoms:
                if not (z > 0):
                    raise SpecificationError("atom sizes must be strictly positive (no negative jumps)")
                if not (lam > 0):
                    raise SpecificationError("atom rates must be strictly positive")

    @classmethod
    def none(cls):
        return cls("none")

    @classmethod
    def stable(cls, alpha, c_alpha):
        return cls("stable", alpha=float(alpha), c_alpha=float(c_alpha))

    @classmethod
    def truncated_stable(cls, alpha, c_alpha, z_max):
        return cls("truncated_stable", alpha=float(alpha), c_alpha=float(c_alpha), z_max=float(z_max))

    @classmethod
    def finite_atoms(cls, atoms):
        return cls("finite_atoms", atoms=tuple((float(z), float(l)) for z, l in atoms))

    @property
    def is_none(self):
        return self.kind == "none"

    def density(self, z):
        """Lebesgue density where one exists (stable families)."""
        z = np.asarray(z, dtype=float)
        if self.kind == "stable":
            return self.c_alpha * np.power(z, -1.0 - self.alpha)
        if self.kind == "truncated_stable":
            return np.where(z <= self.z_max, self.c_alpha * np.power(z, -1.0 - self.alpha), 0.0)
        raise DomainError(f"Levy measure of kind {self.kind} has no density")

    def tail_mass(self, eps):
        """nu([eps, infinity)); finite for every eps > 0."""
        if eps <= 0:
            raise DomainError("tail mass requires eps > 0")
        if self.kind == "none":
            return 0.0
        if self.kind == "stable":
            return self.c_alpha * eps ** (-self.alpha) / self.alpha
        if self.kind == "truncated_stable":
            if eps >= self.z_max:
                return 0.0
            return self.c_alpha * (eps ** (-self.alpha) - self.z_max ** (-self.alpha)) / self.alpha
        return sum(lam for z, lam in self.atoms if z >= eps)

    def partial_moments(self, eps):
        """(m1, v) = (integral of z over z >= eps, integral of z^2 over z < eps)."""
        if eps <= 0:
            raise DomainError("partial moments require eps > 0")
        if self.kind == "none":
            return 0.0, 0.0
        if self.kind == "stable":
            a, c = self.alpha, self.c_alpha
            return c * eps ** (1.0 - a) / (a - 1.0), c * eps ** (2.0 - a) / (2.0 - a)
        if self.kind == "truncated_stable":
            a, c, zm = self.alpha, self.c_alpha, self.z_max
            if eps >= zm:
                m1 = 0.0
                v = c * zm ** (2.0 - a) / (2.0 - a)
            else:
                m1 = c * (eps ** (1.0 - a) - zm ** (1.0 - a)) / (a - 1.0)
                v = c * eps ** (2.0 - a) / (2.0 - a)
            return m1, v
        m1 = sum(lam * z for z, lam in self.atoms if z >= eps)
        v = sum(lam * z * z for z, lam in self.atoms if z < eps)
        return m1, v

    def integrability_value(self, quadrature=False):
        """integral of (z wedge z^2) nu(dz), closed form unless quadrature=True."""
        if self.kind == "none":
            return 0.0
        if self.kind == "finite_atoms":
            return sum(lam * min(z, z * z) for z, lam in self.atoms)
        a, c = self.alpha, self.c_alpha
        if not quadrature:
            if self.kind == "stable":
                return c / (2.0 - a) + c / (a - 1.0)
            zm = self.z_max
            if zm <= 1.0:
                return c * zm ** (2.0 - a) / (2.0 - a)
            return c / (2.0 - a) + c * (1.0 - zm ** (1.0 - a)) / (a - 1.0)
        hi = np.inf if self.kind == "stable" else self.z_max
        lo_part, _ = integrate.quad(
            lambda z: z * z * float(self.density(z)), 0.0, min(1.0, hi), epsabs=_QUAD_ABS_TOL
        )
        hi_part = 0.0
        if hi > 1.0:
            hi_part, _ = integrate.quad(
                lambda z: z * float(self.density(z)), 1.0, hi, epsabs=_QUAD_ABS_TOL
            )
        return lo_part + hi_part

    def tail_m1_quadrature(self, eps):
        """Quadrature cross-check of the closed-form m1 (stable families only)."""
        if eps <= 0:
            raise DomainError("requires eps > 0")
        hi = np.inf if self.kind == "stable" else self.z_max
        if self.kind not in ("stable", "truncated_stable") or eps >= hi:
            return 0.0
        val, _ = integrate.quad(
            lambda z: z * float(self.density(z)), eps, hi, epsabs=_QUAD_ABS_TOL, limit=200
        )
        return val

    def pack(self, eps):
        """Primitive jump-sampling data at small-jump cutoff eps.

        Returns (code, alpha, c_alpha, z_max, atom_sizes, atom_cum, tail, m1, v)
        where atom_sizes/atom_cum describe the normalized discrete tail law.
        """
        code = _LEVY_NAMES[self.kind]
        tail = self.tail_mass(eps) if self.kind != "none" else 0.0
        m1, v = self.partial_moments(eps) if self.kind != "none" else (0.0, 0.0)
        sizes = np.zeros(0, dtype=np.float64)
        cum = np.zeros(0, dtype=np.float64)
        if self.kind == "finite_atoms":
            tail_atoms = [(z, lam) for z, lam in self.atoms if z >= eps]
            if tail_atoms:
                sizes = np.array([z for z, _ in tail_atoms], dtype=np.float64)
                w = np.array([lam for _, lam in tail_atoms], dtype=np.float64)
                cum = np.cumsum(w) / w.sum()
        return (code, self.alpha, self.c_alpha, self.z_max, sizes, cum, tail, m1, v)

    def to_dict(self):
        if self.kind == "none":
            return {"kind": "none"}
        if self.kind == "stable":
            return {"kind": "stable", "alpha": self.alpha, "c_alpha": self.c_alpha}
        if self.kind == "truncated_stable":
            return {
                "kind": "truncated_stable",
                "alpha": self.alpha,
                "c_alpha": self.c_alpha,
                "z_max": self.z_max,
            }
        return {"kind": "finite_atoms", "atoms": [{"size": z, "rate": l} for z, l in self.atoms]}


@dataclass(frozen=True)
class ProcessSpec:
    """Full coefficient set (gamma0, gamma1, gamma2, nu) of the jump-diffusion."""

    gamma0: RateFunction
    gamma1: RateFunction
    gamma2: RateFunction
    nu: LevyMeasure

    @property
    def jumps_active(self):
        return not (self.nu.is_none or self.gamma2.is_zero)

    @property
    def is_deterministic(self):
        """No Brownian part and no jump part: the path solves an ODE."""
        return self.gamma1.is_zero and not self.jumps_active

    def to_dict(self):
        return {
            "gamma0": self.gamma0.to_dict(),
            "gamma1": self.gamma1.to_dict(),
            "gamma2": self.gamma2.to_dict(),
            "nu": self.nu.to_dict(),
        }


@dataclass(frozen=True)
class ValidationReport:
    """Certificates for the structural hypotheses checked on a finite grid."""

    integrability_ok: bool
    integrability_value: float
    one_sided_lipschitz_theta: float | None
    gamma2_monotone: bool
    warnings: tuple = field(default=())


# --- module-level operations ----------------------------------------------

def nu_tail_mass(nu, eps):
    """nu([eps, infinity)) for a LevyMeasure; guaranteed finite."""
    return nu.tail_mass(eps)


def nu_partial_moments(nu, eps):
    """(m1, v): large-jump compensator mass and small-jump variance rate."""
    return nu.partial_moments(eps)


def validate(spec, grid):
    """Check the structural hypotheses of a spec on an evaluation grid.

    Returns a ValidationReport with the jump integrability value, the smallest
    one-sided Lipschitz certificate found on the grid (max difference quotient
    of gamma0 over all grid pairs x < y; None when not finite), and whether
    gamma2 is nondecreasing along the grid.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("validation grid must be nonempty")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("validation grid must be strictly increasing")
    if grid[0] < 0:
        raise DomainError("validation grid must lie in [0, infinity)")

    warnings = []
    g0 = np.asarray(spec.gamma0(grid), dtype=float)
    g1 = np.asarray(spec.gamma1(grid), dtype=float)
    g2 = np.asarray(spec.gamma2(grid), dtype=float)
    if np.any(g1 < 0):
        raise SpecificationError("gamma1 (diffusion coefficient) negative on grid")
    if np.any(g2 < 0):
        raise SpecificationError("gamma2 (jump modulation) negative on grid")

    integ = spec.nu.integrability_value()
    integrability_ok = bool(np.isfinite(integ))
    if not integrability_ok:
        warnings.append(
            "integral of (z^z^2) nu(dz) is infinite: the comparison/non-explosion "
            "argument via a finite-mean dominating branching process fails"
        )

    theta = None
    if grid.size >= 2:
        dx = grid[None, :] - grid[:, None]
        dg = g0[None, :] - g0[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            quotients = np.where(dx > 0, dg / np.where(dx > 0, dx, 1.0), -np.inf)
        theta_val = float(np.max(quotients))
        if np.isfinite(theta_val):
            theta = theta_val
        else:
            warnings.append("one-sided Lipschitz quotient unbounded on grid")
    else:
        warnings.append("grid too small for a one-sided Lipschitz certificate")

    scale = max(1.0, float(np.max(np.abs(g2)))) if g2.size else 1.0
    gamma2_monotone = bool(np.all(np.diff(g2) >= -1e-12 * scale))
    if not gamma2_monotone:
        warnings.append("gamma2 not nondecreasing on grid: comparison property uncertified")

    if spec.gamma0.kind == "tabulated" or spec.gamma1.kind == "tabulated" or spec.gamma2.kind == "tabulated":
        warnings.append("tabulated rates certify hypotheses only on their table range")

    return ValidationReport(
        integrability_ok=integrability_ok,
        integrability_value=float(integ),
        one_sided_lipschitz_theta=theta,
        gamma2_monotone=gamma2_monotone,
        warnings=tuple(warnings),
    )


# --- JSON (de)serialization -------------------------------------------------

SPEC_SCHEMA = {
    "type": "object",
    "required": ["gamma0", "gamma1", "gamma2", "nu"],
    "additionalProperties": False,
    "properties": {
        "gamma0": {"$ref": "#/$defs/rate"},
        "gamma1": {"$ref": "#/$defs/rate"},
        "gamma2": {"$ref": "#/$defs/rate"},
        "nu": {"$ref": "#/$defs/levy"},
    },
    "$defs": {
        "rate": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {"kind": {"const": "zero"}},
                    "required": ["kind"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {"kind": {"const": "linear"}, "slope": {"type": "number"}},
                    "required": ["kind", "slope"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "power_law"},
                        "coefficient": {"type": "number"},
                        "exponent": {"type": "number", "minimum": 0},
                    },
                    "required": ["kind", "coefficient", "exponent"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {"kind": {"const": "logistic_drift"}, "c": {"type": "number"}},
                    "required": ["kind", "c"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "polynomial"},
                        "coefficients": {
                            "type": "array",
                            "items": {"type": "number"},
                            "minItems": 1,
                        },
                    },
                    "required": ["kind", "coefficients"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "tabulated"},
                        "x": {"type": "array", "items": {"type": "number"}, "minItems": 2},
                        "value": {"type": "array", "items": {"type": "number"}, "minItems": 2},
                    },
                    "required": ["kind", "x", "value"],
                    "additionalProperties": False,
                },
            ]
        },
        "levy": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {"kind": {"const": "none"}},
                    "required": ["kind"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "stable"},
                        "alpha": {"type": "number", "exclusiveMinimum": 1, "exclusiveMaximum": 2},
                        "c_alpha": {"type": "number", "exclusiveMinimum": 0},
                    },
                    "required": ["kind", "alpha", "c_alpha"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "truncated_stable"},
                        "alpha": {"type": "number", "exclusiveMinimum": 1, "exclusiveMaximum": 2},
                        "c_alpha": {"type": "number", "exclusiveMinimum": 0},
                        "z_max": {"type": "number", "exclusiveMinimum": 0},
                    },
                    "required": ["kind", "alpha", "c_alpha", "z_max"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "finite_atoms"},
                        "atoms": {
                            "type": "array",
                            "minItems": 1,
                            "items": {
                                "type": "object",
                                "properties": {
                                    "size": {"type": "number", "exclusiveMinimum": 0},
                                    "rate": {"type": "number", "exclusiveMinimum": 0},
                                },
                                "required": ["size", "rate"],
                                "additionalProperties": False,
                            },
                        },
                    },
                    "required": ["kind", "atoms"],
                    "additionalProperties": False,
                },
            ]
        },
    },
}


def _rate_from_dict(d):
    kind = d["kind"]
    if kind == "zero":
        return RateFunction.zero()
    if kind == "linear":
        return RateFunction.linear(d["slope"])
    if kind == "power_law":
        return RateFunction.power_law(d["coefficient"], d["exponent"])
    if kind == "logistic_drift":
        return RateFunction.logistic_drift(d["c"])
    if kind == "polynomial":
        return RateFunction.polynomial(d["coefficients"])
    return RateFunction.tabulated(d["x"], d["value"])


def _levy_from_dict(d):
    kind = d["kind"]
    if kind == "none":
        return LevyMeasure.none()
    if kind == "stable":
        return LevyMeasure.stable(d["alpha"], d["c_alpha"])
    if kind == "truncated_stable":
        return LevyMeasure.truncated_stable(d["alpha"], d["c_alpha"], d["z_max"])
    return LevyMeasure.finite_atoms([(a["size"], a["rate"]) for a in d["atoms"]])


def spec_from_dict(d):
    """Build a ProcessSpec from its JSON representation (schema-checked)."""
    import jsonschema

    from .errors import SchemaError

    try:
        jsonschema.validate(d, SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"process spec invalid at {path}: {exc.message}") from exc
    return ProcessSpec(
        gamma0=_rate_from_dict(d["gamma0"]),
        gamma1=_rate_from_dict(d["gamma1"]),
        gamma2=_rate_from_dict(d["gamma2"]),
        nu=_levy_from_dict(d["nu"]),
    )


# --- golden specs used across tests and example configs ---------------------

def logistic_csbp(c=1.0, alpha=1.5, c_alpha=1.0):
    """Logistic branching process: gamma0 = -(c/2) x^2, gamma1 = gamma2 = x."""
    return ProcessSpec(
        gamma0=RateFunction.logistic_drift(c),
        gamma1=RateFunction.linear(1.0),
        gamma2=RateFunction.linear(1.0),
        nu=LevyMeasure.stable(alpha, c_alpha),
    )


def logistic_drift_only(c=1.0):
    """Deterministic benchmark: pure quadratic-competition drift."""
    return ProcessSpec(
        gamma0=RateFunction.logistic_drift(c),
        gamma1=RateFunction.zero(),
        gamma2=RateFunction.zero(),
        nu=LevyMeasure.none(),
    )


def null_spec():
    """All coefficients zero: constant paths (negative control)."""
    return ProcessSpec(
        gamma0=RateFunction.zero(),
        gamma1=RateFunction.zero(),
        gamma2=RateFunction.zero(),
        nu=LevyMeasure.none(),
    )


def stable_power_spec(r2, alpha=1.5, c_alpha=1.0, coefficient=1.0):
    """Pure-jump contrast case: gamma0 = gamma1 = 0, gamma2 = x^r2."""
    return ProcessSpec(
        gamma0=RateFunction.zero(),
        gamma1=RateFunction.zero(),
        gamma2=RateFunction.power_law(coefficient, r2),
        nu=LevyMeasure.stable(alpha, c_alpha),
    )
