"""Least-squares fitting of the aero, propeller, and ESC surrogate models.

All fits are ordinary least squares solved by an orthogonalization method
(numpy's SVD-backed lstsq) for conditioning; raw normal equations are kept
only as an independent oracle on the test side. "Fit quality" reports both
the coefficient of determination R^2 and the Pearson correlation r, since
sources are not always explicit about which one they quote.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .aero import LinearAeroModel
from .errors import DegenerateDesign, DegenerateVariance, ParseError, RankDeficient, UnknownUnit
from .propulsion import EscCurrentModel, PolySurrogate

MPH_TO_M_S = 0.44704
LBF_TO_N = 4.4482216
INLBF_TO_NM = 0.1129848

# conversion factors into the SI unit of each quantity family
_UNIT_FACTORS = {
    "m/s": 1.0,
    "mph": MPH_TO_M_S,
    "n": 1.0,
    "lbf": LBF_TO_N,
    "n*m": 1.0,
    "nm": 1.0,
    "in-lbf": INLBF_TO_NM,
    "in*lbf": INLBF_TO_NM,
    "rpm": 1.0,
    "a": 1.0,
    "deg": 1.0,
    "-": 1.0,
}


def unit_factor(unit: str) -> float:
    """Multiplier taking a value in ``unit`` to SI."""
    key = unit.strip().strip("()").lower()
    try:
        return _UNIT_FACTORS[key]
    except KeyError:
        raise UnknownUnit(f"no conversion for unit {unit!r}") from None


@dataclass(frozen=True)
class SampleTable:
    """Named, unit-tagged columns of equal length."""

    columns: tuple[str, ...]
    units: tuple[str, ...]
    data: tuple[tuple[float, ...], ...]  # row-major

    def __post_init__(self):
        if len(self.columns) != len(self.units):
            raise ValueError("every column needs a declared unit")
        for row in self.data:
            if len(row) != len(self.columns):
                raise ValueError("all rows must be full")

    def __len__(self) -> int:
        return len(self.data)

    def column(self, name: str) -> np.ndarray:
        try:
            idx = self.columns.index(name)
        except ValueError:
            raise KeyError(f"no column {name!r}") from None
        return np.array([row[idx] for row in self.data], dtype=float)


@dataclass(frozen=True)
class FitReport:
    """Fitted coefficients plus quality-of-fit numbers."""

    coefficients: tuple[float, ...]
    r_squared: float
    pearson_r: float
    max_abs_residual: float
    sample_count: int

    def __post_init__(self):
        if self.sample_count < len(self.coefficients):
            raise ValueError("need at least as many samples as coefficients")


def r_squared(predicted: Sequence[float], observed: Sequence[float]) -> float:
    """Coefficient of determination 1 - SS_res/SS_tot.

    Negative for fits worse than the constant mean. Undefined (raises) when
    the observations carry no variance.
    """
    p = np.asarray(predicted, dtype=float)
    o = np.asarray(observed, dtype=float)
    if p.shape != o.shape or p.size == 0:
        raise ValueError("predicted and observed must have equal non-zero length")
    ss_tot = float(np.sum((o - o.mean()) ** 2))
    if ss_tot == 0.0:
        raise DegenerateVariance("observed values are all equal")
    ss_res = float(np.sum((o - p) ** 2))
    return 1.0 - ss_res / ss_tot


def _pearson(predicted: np.ndarray, observed: np.ndarray) -> float:
    sp = float(np.std(predicted))
    so = float(np.std(observed))
    if sp == 0.0 or so == 0.0:
        return math.nan
    return float(np.corrcoef(predicted, observed)[0, 1])


def _least_squares(design: np.ndarray, y: np.ndarray) -> np.ndarray:
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise RankDeficient("design matrix does not have full column rank")
    # equilibrate columns: raw monomials in RPM span ~8 orders of magnitude,
    # which otherwise costs digits in the recovered coefficients
    scale = np.max(np.abs(design), axis=0)
    scale[scale == 0.0] = 1.0
    coef, *_ = np.linalg.lstsq(design / scale, y, rcond=None)
    return coef / scale


def _report(design: np.ndarray, y: np.ndarray, coef: np.ndarray) -> FitReport:
    pred = design @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum((y - pred) ** 2)) / ss_tot
    return FitReport(
        coefficients=tuple(float(c) for c in coef),
        r_squared=r2,
        pearson_r=_pearson(pred, y),
        max_abs_residual=float(np.max(np.abs(y - pred))),
        sample_count=len(y),
    )


def fit_linear_aero(samples: SampleTable) -> tuple[LinearAeroModel, tuple[FitReport, FitReport]]:
    """Fit C_L(alpha) and C_D(alpha) as straight lines; alpha range from the data.

    Expects columns alpha (deg), cl, cd. Coefficients in each report are
    (slope, intercept).
    """
    alpha = samples.column("alpha")
    if len(np.unique(alpha)) < 2:
        raise DegenerateDesign("need at least 2 distinct alpha values")
    design = np.column_stack([alpha, np.ones_like(alpha)])
    cl_coef = _least_squares(design, samples.column("cl"))
    cd_coef = _least_squares(design, samples.column("cd"))
    model = LinearAeroModel(
        lift_slope=float(cl_coef[0]),
        lift_intercept=float(cl_coef[1]),
        drag_slope=float(cd_coef[0]),
        drag_intercept=float(cd_coef[1]),
        alpha_min=float(alpha.min()),
        alpha_max=float(alpha.max()),
    )
    return model, (
        _report(design, samples.column("cl"), cl_coef),
        _report(design, samples.column("cd"), cd_coef),
    )


def fit_poly_surrogate(
    samples: SampleTable,
    basis: Iterable[tuple[int, int]],
    target: str = "thrust",
    output_unit: str = "N",
) -> tuple[PolySurrogate, FitReport]:
    """Least-squares polynomial over the declared (vp_exp, rpm_exp) basis.

    Surrogate domains are set from the sample extent; evaluation outside the
    data is an error downstream, never an extrapolation.
    """
    basis = list(basis)
    vp = samples.column("vp")
    rpm = samples.column("rpm")
    y = samples.column(target)
    if len(y) < len(basis):
        raise DegenerateDesign("need at least as many samples as basis terms")
    design = np.column_stack([vp**i * rpm**j for i, j in basis])
    coef = _least_squares(design, y)
    surrogate = PolySurrogate(
        terms=tuple((i, j, float(c)) for (i, j), c in zip(basis, coef)),
        vp_domain=(float(vp.min()), float(vp.max())),
        rpm_domain=(float(rpm.min()), float(rpm.max())),
        output_unit=output_unit,
    )
    return surrogate, _report(design, y, coef)


def fit_esc_quadratic(samples: SampleTable) -> tuple[EscCurrentModel, FitReport]:
    """Fit I = quad M^2 + lin M + const from torque/current bench samples."""
    m = samples.column("torque")
    if len(np.unique(m)) < 3:
        raise DegenerateDesign("need at least 3 distinct torque values")
    design = np.column_stack([m**2, m, np.ones_like(m)])
    coef = _least_squares(design, samples.column("current"))
    model = EscCurrentModel(
        quad=float(coef[0]),
        lin=float(coef[1]),
        const=float(coef[2]),
        torque_domain=(float(m.min()), float(m.max())),
    )
    return model, _report(design, samples.column("current"), coef)


_RPM_HEADER = re.compile(r"PROP\s+RPM\s*=\s*(\S+)", re.IGNORECASE)

DEFAULT_COLUMN_MAP = {"vp": "V", "thrust": "Thrust", "torque": "Torque"}


def parse_propeller_table(
    stream: IO[str] | Iterable[str],
    column_map: dict[str, str] | None = None,
    unit_map: dict[str, str] | None = None,
) -> SampleTable:
    """Parse a manufacturer-style performance table with per-RPM blocks.

    Layout: free-form preamble, then repeated blocks of

        PROP RPM = <n>
        <column names>
        (<unit>) (<unit>) ...
        <numeric rows>

    ``column_map`` names the source columns holding vp/thrust/torque
    (rotation speed always comes from the block headers); unmapped columns
    are ignored. Units come from the parenthesized line, overridable per
    source column through ``unit_map``. Output columns vp/rpm/thrust/torque
    are converted to SI (m/s, RPM, N, N*m).
    """
    colmap = dict(DEFAULT_COLUMN_MAP, **(column_map or {}))
    overrides = unit_map or {}

    rows: list[tuple[float, ...]] = []
    rpm = None
    names: list[str] | None = None
    units: list[str] | None = None
    indices: dict[str, int] = {}
    factors: dict[str, float] = {}

    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        header = _RPM_HEADER.search(line)
        if header:
            try:
                rpm = float(header.group(1))
            except ValueError:
                raise ParseError(line_no, f"bad RPM value {header.group(1)!r}") from None
            names = units = None
            continue
        if rpm is None:
            continue  # preamble
        tokens = line.split()
        if names is None:
            names = tokens
            continue
        if units is None and tokens[0].startswith("("):
            units = tokens
            if len(units) != len(names):
                raise ParseError(line_no, "unit line does not match column names")
            indices.clear()
            factors.clear()
            for field, source in colmap.items():
                if source not in names:
                    raise ParseError(line_no, f"column {source!r} not found in block")
                idx = names.index(source)
                indices[field] = idx
                factors[field] = unit_factor(overrides.get(source, units[idx]))
            continue
        if units is None:
            raise ParseError(line_no, "expected a parenthesized unit line")
        if len(tokens) < len(names):
            raise ParseError(line_no, f"expected {len(names)} cells, found {len(tokens)}")
        try:
            values = [float(t) for t in tokens]
        except ValueError:
            raise ParseError(line_no, f"malformed numeric cell in {line!r}") from None
        rows.append((
            values[indices["vp"]] * factors["vp"],
            rpm,
            values[indices["thrust"]] * factors["thrust"],
            values[indices["torque"]] * factors["torque"],
        ))

    return SampleTable(
        columns=("vp", "rpm", "thrust", "torque"),
        units=("m/s", "rpm", "N", "N*m"),
        data=tuple(rows),
    )
