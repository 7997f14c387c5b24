"""Propeller thrust/torque surrogates, their inversion, and the ESC current model.

Rotation speed N is in RPM throughout: the fitted coefficient magnitudes only
produce sensible thrusts for N in the thousands, and the source performance
tables are RPM-indexed. Axial inflow V_p is in m/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .aero import Environment
from .errors import Infeasible, OutOfEscDomain, OutOfSurrogateDomain


@dataclass(frozen=True)
class PolySurrogate:
    """Bivariate polynomial f(V_p, N) = sum c * V_p**i * N**j.

    ``terms`` is a sequence of (vp_exponent, rpm_exponent, coefficient). The
    term list is normalized to ascending exponent order at construction so that
    evaluation always sums in one fixed order, independent of how the terms
    were supplied.
    """

    terms: tuple[tuple[int, int, float], ...]
    vp_domain: tuple[float, float] = (0.0, 20.0)      # m/s
    rpm_domain: tuple[float, float] = (2000.0, 10000.0)
    output_unit: str = "N"

    def __post_init__(self):
        terms = tuple(sorted((int(i), int(j), float(c)) for i, j, c in self.terms))
        if not terms:
            raise ValueError("term list must be non-empty")
        exps = [(i, j) for i, j, _ in terms]
        if len(set(exps)) != len(exps):
            raise ValueError("exponent pairs must be unique")
        if any(i < 0 or j < 0 for i, j in exps):
            raise ValueError("exponents must be non-negative")
        for name, (lo, hi) in (("vp_domain", self.vp_domain), ("rpm_domain", self.rpm_domain)):
            if not lo < hi:
                raise ValueError(f"{name} must be a non-degenerate interval")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "vp_domain", (float(self.vp_domain[0]), float(self.vp_domain[1])))
        object.__setattr__(self, "rpm_domain", (float(self.rpm_domain[0]), float(self.rpm_domain[1])))

    def check_domain(self, rpm: float, vp: float) -> None:
        if not self.vp_domain[0] <= vp <= self.vp_domain[1]:
            raise OutOfSurrogateDomain(
                f"V_p={vp} m/s outside fit range {list(self.vp_domain)}"
            )
        if not self.rpm_domain[0] <= rpm <= self.rpm_domain[1]:
            raise OutOfSurrogateDomain(
                f"N={rpm} RPM outside fit range {list(self.rpm_domain)}"
            )

    def evaluate(self, rpm: float, vp: float) -> float:
        """Raw polynomial value, no domain check."""
        return sum(c * vp**i * rpm**j for i, j, c in self.terms)

    def d_drpm(self, rpm: float, vp: float) -> float:
        """Analytic partial derivative with respect to N."""
        return sum(c * vp**i * j * rpm ** (j - 1) for i, j, c in self.terms if j > 0)


@dataclass(frozen=True)
class EscCurrentModel:
    """ESC current draw as a quadratic in propeller torque: I = a M^2 + b M + c.

    The fit is only trusted on ``torque_domain``; the region near M = 0, where
    the quadratic goes negative, lies outside the default domain on purpose.
    Monotonicity on the domain is checked at construction (the derivative of a
    quadratic is linear, so positivity at both endpoints suffices).
    """

    quad: float   # A/(N*m)^2
    lin: float    # A/(N*m)
    const: float  # A
    torque_domain: tuple[float, float] = (0.05, 0.6)  # N*m

    def __post_init__(self):
        lo, hi = self.torque_domain
        if not lo < hi:
            raise ValueError("torque_domain must be a non-degenerate interval")
        for m in (lo, hi):
            if 2.0 * self.quad * m + self.lin <= 0.0:
                raise ValueError(f"current model is not increasing at M={m} N*m")
        object.__setattr__(self, "torque_domain", (float(lo), float(hi)))


@dataclass(frozen=True)
class NondimPoint:
    """Nondimensional propeller operating point (thrust and torque coefficients)."""

    thrust_coefficient: float
    torque_coefficient: float

    def __post_init__(self):
        if not (math.isfinite(self.thrust_coefficient) and math.isfinite(self.torque_coefficient)):
            raise ValueError("coefficients must be finite")


def axial_inflow(airspeed: float, pitch: float) -> float:
    """Airspeed component through the rotor disk: V_p = V sin(theta)."""
    if airspeed < 0.0:
        raise ValueError("airspeed must be non-negative")
    return airspeed * math.sin(math.radians(pitch))


def thrust(surrogate: PolySurrogate, rpm: float, vp: float) -> float:
    """Per-rotor thrust in N at rotation speed ``rpm`` and axial inflow ``vp``."""
    surrogate.check_domain(rpm, vp)
    return surrogate.evaluate(rpm, vp)


def torque(surrogate: PolySurrogate, rpm: float, vp: float) -> float:
    """Per-rotor shaft torque in N*m at ``rpm`` and axial inflow ``vp``."""
    surrogate.check_domain(rpm, vp)
    return surrogate.evaluate(rpm, vp)


def thrust_from_coefficients(ct: float, env: Environment, rpm: float, diameter: float) -> float:
    """Dimensional thrust from a thrust coefficient: T = C_T rho N^2 D^4 / 16."""
    if diameter <= 0.0:
        raise ValueError("diameter must be positive")
    if rpm < 0.0:
        raise ValueError("rpm must be non-negative")
    return ct * env.air_density * rpm * rpm * diameter**4 / 16.0


def torque_from_coefficients(cm: float, env: Environment, rpm: float, diameter: float) -> float:
    """Dimensional torque from a torque coefficient: M = C_M rho N^2 D^5 / 32."""
    if diameter <= 0.0:
        raise ValueError("diameter must be positive")
    if rpm < 0.0:
        raise ValueError("rpm must be non-negative")
    return cm * env.air_density * rpm * rpm * diameter**5 / 32.0


def esc_current(model: EscCurrentModel, torque_nm: float) -> float:
    """ESC current in A for shaft torque ``torque_nm``; raw fitted value."""
    lo, hi = model.torque_domain
    if not lo <= torque_nm <= hi:
        raise OutOfEscDomain(f"M={torque_nm} N*m outside fit range [{lo}, {hi}]")
    return model.quad * torque_nm * torque_nm + model.lin * torque_nm + model.const


_SCAN_SEGMENTS = 64


def required_rpm(surrogate: PolySurrogate, thrust_required: float, vp: float) -> float:
    """Invert the thrust surrogate: the N with thrust(N, vp) = thrust_required.

    Only roots on the rising branch (dT/dN > 0) are physical: that is the
    branch a speed controller can hold. Roots are located by a sign-change
    scan across rpm_domain and refined by bisection; when several rising-branch
    roots exist the smallest wins. A tangency (zero slope at the root) is not
    a controllable operating point and reports Infeasible.
    """
    if thrust_required <= 0.0:
        raise Infeasible("thrust_required must be positive", stage="rpm")
    if not surrogate.vp_domain[0] <= vp <= surrogate.vp_domain[1]:
        raise OutOfSurrogateDomain(
            f"V_p={vp} m/s outside fit range {list(surrogate.vp_domain)}"
        )

    lo, hi = surrogate.rpm_domain

    def f(n: float) -> float:
        return surrogate.evaluate(n, vp) - thrust_required

    step = (hi - lo) / _SCAN_SEGMENTS
    nodes = [lo + k * step for k in range(_SCAN_SEGMENTS + 1)]
    values = [f(n) for n in nodes]

    roots = []
    for k in range(_SCAN_SEGMENTS):
        a, b = nodes[k], nodes[k + 1]
        fa, fb = values[k], values[k + 1]
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb < 0.0:
            for _ in range(100):
                mid = 0.5 * (a + b)
                fm = f(mid)
                if fa * fm <= 0.0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
                if b - a < 1e-11:
                    break
            roots.append(0.5 * (a + b))
    if values[-1] == 0.0:
        roots.append(nodes[-1])

    rising = [r for r in roots if surrogate.d_drpm(r, vp) > 0.0]
    if not rising:
        raise Infeasible(
            f"no rising-branch N in {list(surrogate.rpm_domain)} RPM gives "
            f"{thrust_required} {surrogate.output_unit}",
            stage="rpm",
        )
    return min(rising)
