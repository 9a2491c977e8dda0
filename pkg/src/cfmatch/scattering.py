"""Reflection coefficient of a reactive load in the complex-frequency plane.

Complex frequencies are plain Python ``complex`` values ``omega_r + 1j*omega_i``
in rad/s. With the ``exp(j*omega*t)`` convention a zero in the lower half-plane
(``omega_i < 0``) corresponds to a growing envelope ``exp(sigma*t)`` with
``sigma = -omega_i``.
"""
from __future__ import annotations

import cmath
import enum
import math
import sys
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import minimum_filter

from .errors import ChoiceInapplicable, NoZeroInWindow, PoleOfGamma, ValidationError
from .load_model import LineParams, LoadKind, LoadTopology, Regime, derive_params

_EPS = sys.float_info.epsilon

DB_CLAMP = 200.0
ORACLE_THRESHOLD = 1e-8
ORACLE_GRID = 201
ORACLE_MAXITER = 200


class ZeroChoice(str, enum.Enum):
    INTERNAL = "internal"
    EXTERNAL = "external"
    AUTO = "auto"


@dataclass(frozen=True)
class SingularitySet:
    """Zeros and poles of the reflection coefficient.

    Zeros are ordered by ascending ``|omega_i|`` (internal before external). A
    critical load lists its double zero twice; a Region2 load lists the pair
    ``+omega_r - j*sigma`` and ``-omega_r - j*sigma`` (positive one first).
    ``poles[k] == zeros[k].conjugate()``.
    """

    zeros: tuple[complex, ...]
    poles: tuple[complex, ...]
    regime: Regime


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle in the complex-frequency plane (rad/s)."""

    omega_r: tuple[float, float]
    omega_i: tuple[float, float]

    def __post_init__(self):
        for name in ("omega_r", "omega_i"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
                raise ValidationError(f"bad range {lo}..{hi}", f"window.{name}")

    def contains(self, w: complex, slack: float = 1e-9) -> bool:
        (r0, r1), (i0, i1) = self.omega_r, self.omega_i
        pad_r = slack * max(abs(r0), abs(r1), i1 - i0)
        pad_i = slack * max(abs(i0), abs(i1), r1 - r0)
        return r0 - pad_r <= w.real <= r1 + pad_r and i0 - pad_i <= w.imag <= i1 + pad_i


@dataclass(frozen=True)
class Grid:
    window: Window
    n_r: int = 201
    n_i: int = 201

    def __post_init__(self):
        if self.n_r < 2 or self.n_i < 2:
            raise ValidationError("need at least 2 points per axis", "grid")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.linspace(*self.window.omega_r, self.n_r),
                np.linspace(*self.window.omega_i, self.n_i))


@dataclass(frozen=True)
class PlaneMap:
    """Sampled ``20*log10|Gamma|`` clamped to +-200 dB.

    ``samples[k, m]`` is taken at ``omega_r[m] + 1j*omega_i[k]``.
    """

    grid: Grid
    omega_r: np.ndarray
    omega_i: np.ndarray
    samples: np.ndarray


def _lc_coefficients(load: LoadTopology, line: LineParams) -> tuple[float, float, float]:
    """(omega_res**2, tau*omega_res**2, sign) for the LC closed form."""
    L, C = load.inductance, load.capacitance
    w2 = 1.0 / (L * C)
    if load.kind is LoadKind.SERIES_LC:
        return w2, line.r0 / L, 1.0  # tau*omega_res**2 = R0*C/(L*C)
    return w2, 1.0 / (line.r0 * C), -1.0  # tau*omega_res**2 = (L/R0)/(L*C)


def gamma_parts(load: LoadTopology, line: LineParams, omega):
    """Numerator, denominator and scale of the rational closed form of Gamma.

    Works elementwise on numpy arrays. ``scale`` bounds the magnitude of the
    terms summed into the denominator and is used for pole detection.
    """
    w = np.asarray(omega, dtype=complex) if not np.isscalar(omega) else complex(omega)
    if load.kind.is_single:
        tau = derive_params(load, line).tau
        x = 1j * w * tau
        sign = 1.0 if load.kind is LoadKind.SINGLE_INDUCTOR else -1.0
        return sign * (x - 1.0), x + 1.0, abs(x) + 1.0
    w2, k, sign = _lc_coefficients(load, line)
    a = w * w - w2
    b = 1j * k * w
    return sign * (a + b), a - b, abs(w) ** 2 + w2 + k * abs(w)


def gamma(load: LoadTopology, line: LineParams, omega: complex) -> complex:
    """Reflection coefficient from the rational closed forms.

    Regular at the parallel tank anti-resonance (where the impedance itself
    diverges and Gamma = +1). Raises PoleOfGamma at a pole.
    """
    num, den, scale = gamma_parts(load, line, complex(omega))
    if abs(den) <= 4.0 * _EPS * scale:
        raise PoleOfGamma(f"reflection coefficient pole at omega={omega}")
    return num / den


def gamma_array(load: LoadTopology, line: LineParams, omega: np.ndarray) -> np.ndarray:
    """Vectorised Gamma; poles evaluate to inf/nan instead of raising."""
    num, den, _ = gamma_parts(load, line, np.asarray(omega, dtype=complex))
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / den


def analytic_singularities(load: LoadTopology, line: LineParams) -> SingularitySet:
    params = derive_params(load, line)
    if params.regime is Regime.SINGLE_ELEMENT:
        zeros = (complex(0.0, -1.0 / params.tau),)
    else:
        wr = params.omega_res
        p = params.tau_omega_product
        if params.regime is Regime.CRITICAL:
            z = complex(0.0, -p * wr / 2.0)
            zeros = (z, z)
        elif params.regime is Regime.REGION1:
            ext = wr * (p + math.sqrt(p * p - 4.0)) / 2.0
            # product of the two roots is omega_res**2; avoids cancellation
            internal = wr * wr / ext
            zeros = (complex(0.0, -internal), complex(0.0, -ext))
        else:
            real = wr * math.sqrt(4.0 - p * p) / 2.0
            sigma = p * wr / 2.0
            zeros = (complex(real, -sigma), complex(-real, -sigma))
    poles = tuple(z.conjugate() for z in zeros)
    return SingularitySet(zeros, poles, params.regime)


def select_excitable_zero(sset: SingularitySet, choice: ZeroChoice | str = ZeroChoice.AUTO) -> complex:
    """Pick the zero a physical drive should engage.

    Region2 always yields the zero with positive real frequency. Region1 picks
    the internal (closest to the real axis) or external zero; AUTO means
    internal. Single-zero sets reject an explicit internal/external request.
    """
    if not sset.zeros:
        raise ValidationError("empty singularity set", "zeros")
    choice = ZeroChoice(choice)
    if sset.regime is Regime.REGION2:
        return max(sset.zeros, key=lambda z: z.real)
    if sset.regime is Regime.REGION1:
        ordered = sorted(sset.zeros, key=lambda z: abs(z.imag))
        return ordered[-1] if choice is ZeroChoice.EXTERNAL else ordered[0]
    if choice is not ZeroChoice.AUTO:
        raise ChoiceInapplicable(f"{choice.value} zero requested for a {sset.regime.value} load")
    return sset.zeros[0]


def muller(f, x0: complex, x1: complex, x2: complex, maxiter: int = ORACLE_MAXITER,
           xtol: float = 1e-15) -> tuple[complex, float]:
    """Muller iteration on a complex function.

    Returns the best point visited and ``|f|`` there. Stops early on an exact
    zero, a step below ``xtol`` relative, or a non-finite evaluation.
    """
    f0, f1, f2 = f(x0), f(x1), f(x2)
    best, best_val = min(((x0, abs(f0)), (x1, abs(f1)), (x2, abs(f2))), key=lambda p: p[1])
    for _ in range(maxiter):
        if f2 == 0:
            return x2, 0.0
        h1, h2 = x1 - x0, x2 - x1
        if h1 == 0 or h2 == 0 or h1 + h2 == 0:
            break
        d1, d2 = (f1 - f0) / h1, (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = cmath.sqrt(b * b - 4.0 * a * f2)
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        if den == 0:
            break
        dx = -2.0 * f2 / den
        x3 = x2 + dx
        f3 = f(x3)
        if not cmath.isfinite(f3):
            break
        if abs(f3) < best_val:
            best, best_val = x3, abs(f3)
        x0, x1, x2 = x1, x2, x3
        f0, f1, f2 = f1, f2, f3
        if abs(dx) <= xtol * max(abs(x3), 1.0):
            break
    return best, best_val


def _grid_seeds(values: np.ndarray, limit: int) -> list[tuple[int, int]]:
    finite = np.where(np.isfinite(values), values, np.inf)
    is_min = (finite == minimum_filter(finite, size=3, mode="nearest")) & np.isfinite(finite)
    idx = np.argwhere(is_min)
    order = np.argsort(finite[is_min], kind="stable")
    return [tuple(idx[k]) for k in order[:limit]]


def numeric_zero_oracle(load: LoadTopology, line: LineParams, window: Window,
                        n_r: int = ORACLE_GRID, n_i: int = ORACLE_GRID,
                        threshold: float = ORACLE_THRESHOLD, max_seeds: int = 32) -> list[complex]:
    """Locate zeros of Gamma inside ``window`` without the root formulas.

    Coarse ``|Gamma|`` scan, then Muller refinement from every discrete local
    minimum. Distinct roots inside the window with ``|Gamma| < threshold`` are
    returned sorted by ascending ``|omega_i|`` then descending ``omega_r``.
    """
    grid = Grid(window, n_r, n_i)
    wr, wi = grid.axes()
    plane = wr[None, :] + 1j * wi[:, None]
    mags = np.abs(gamma_array(load, line, plane))
    step = complex((wr[1] - wr[0]), 0.0), complex(0.0, (wi[1] - wi[0]))
    scale = max(abs(window.omega_r[0]), abs(window.omega_r[1]),
                abs(window.omega_i[0]), abs(window.omega_i[1]))

    def f(w):
        return complex(gamma_array(load, line, np.asarray(w)))

    found: list[complex] = []
    for k, m in _grid_seeds(mags, max_seeds):
        x2 = complex(plane[k, m])
        root, val = muller(f, x2 + step[0], x2 + step[1], x2)
        if val >= threshold or not window.contains(root):
            continue
        if any(abs(root - r) <= 1e-6 * max(abs(r), 1e-12 * scale) for r in found):
            continue
        found.append(root)
    if not found:
        raise NoZeroInWindow(f"no zero of Gamma below {threshold:g} in {window}")
    return sorted(found, key=lambda z: (abs(z.imag), -z.real))


def plane_map(load: LoadTopology, line: LineParams, grid: Grid) -> PlaneMap:
    wr, wi = grid.axes()
    g = gamma_array(load, line, wr[None, :] + 1j * wi[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        db = 20.0 * np.log10(np.abs(g))
    # nan only arises at 0/0, i.e. a coincident zero/pole: treat as a pole
    db = np.clip(np.nan_to_num(db, nan=DB_CLAMP, posinf=DB_CLAMP, neginf=-DB_CLAMP),
                 -DB_CLAMP, DB_CLAMP)
    return PlaneMap(grid, wr, wi, db)
