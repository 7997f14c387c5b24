"""Linear lift/drag coefficient model and dynamic-pressure force evaluation.

Angles are degrees end to end: the fitted slopes are per-degree, so the
coefficient polynomials take degrees directly and only trigonometry converts
internally. Evaluation outside the fitted attack-angle range is a hard error,
never an extrapolation; the linear fits are meaningless past stall.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OutOfAeroDomain


@dataclass(frozen=True)
class Environment:
    """Ambient constants. Defaults are the standard atmosphere at sea level."""

    air_density: float = 1.225  # kg/m^3
    gravity: float = 9.81       # m/s^2

    def __post_init__(self):
        if self.air_density <= 0.0:
            raise ValueError("air_density must be positive")
        if self.gravity <= 0.0:
            raise ValueError("gravity must be positive")


@dataclass(frozen=True)
class Airframe:
    """Vehicle geometry and limits.

    ``rotor_tilt`` is the fixed arm tilt that buys yaw authority; it is carried
    as metadata and only enters the force balance when the tilt-loss flag is
    explicitly enabled (see trim module).
    """

    mass: float                 # kg
    reference_area: float       # m^2, wing reference area S
    rotor_count: int
    prop_diameter: float        # m
    rotor_tilt: float = 0.0     # deg
    stall_alpha: float = 18.0   # deg
    safety_margin: float = 8.0  # deg, subtracted from stall for the optimizer cap

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if self.reference_area < 0.0:
            raise ValueError("reference_area must be non-negative")
        if int(self.rotor_count) != self.rotor_count or self.rotor_count < 1:
            raise ValueError("rotor_count must be an integer >= 1")
        if self.prop_diameter <= 0.0:
            raise ValueError("prop_diameter must be positive")
        if not 0.0 <= self.safety_margin < self.stall_alpha:
            raise ValueError("safety_margin must satisfy 0 <= margin < stall_alpha")


@dataclass(frozen=True)
class LinearAeroModel:
    """C_L(alpha) and C_D(alpha) as linear fits over a bounded alpha range."""

    lift_slope: float       # 1/deg
    lift_intercept: float
    drag_slope: float       # 1/deg
    drag_intercept: float
    alpha_min: float = -8.0  # deg
    alpha_max: float = 18.0  # deg

    def __post_init__(self):
        if not self.alpha_min < self.alpha_max:
            raise ValueError("alpha_min must be strictly below alpha_max")
        # a linear C_D stays positive on the interval iff positive at both ends
        for a in (self.alpha_min, self.alpha_max):
            if self.drag_slope * a + self.drag_intercept <= 0.0:
                raise ValueError(f"drag coefficient is not positive at alpha={a} deg")

    def check_alpha(self, alpha: float) -> None:
        if not self.alpha_min <= alpha <= self.alpha_max:
            raise OutOfAeroDomain(
                f"alpha={alpha} deg outside fit range "
                f"[{self.alpha_min}, {self.alpha_max}] deg"
            )


def lift_coefficient(model: LinearAeroModel, alpha: float) -> float:
    """C_L at attack angle ``alpha`` (deg)."""
    model.check_alpha(alpha)
    return model.lift_slope * alpha + model.lift_intercept


def drag_coefficient(model: LinearAeroModel, alpha: float) -> float:
    """C_D at attack angle ``alpha`` (deg); positive on the whole fit range."""
    model.check_alpha(alpha)
    return model.drag_slope * alpha + model.drag_intercept


def aero_force(
    env: Environment,
    airframe: Airframe,
    model: LinearAeroModel,
    airspeed: float,
    alpha: float,
) -> tuple[float, float]:
    """Wing (lift, drag) in N: q S C_L and q S C_D with q = rho V^2 / 2."""
    if airspeed < 0.0:
        raise ValueError("airspeed must be non-negative")
    q_s = 0.5 * env.air_density * airspeed * airspeed * airframe.reference_area
    return q_s * lift_coefficient(model, alpha), q_s * drag_coefficient(model, alpha)
