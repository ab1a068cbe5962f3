"""Spherical-harmonic coefficient table of the geopotential.

The embedded default table carries the EGM2008-derived coefficients up to
degree 6 / order 5 that the resonant term catalogs need.  Values are stored
exactly as published (C, S, J in units of 1e-6, phase angles in degrees) and
rescaled on access, which keeps the dataset auditable against its source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

#: Default coefficient table. Columns: n  m  C_nm  S_nm  J_nm  lambda_nm_deg
#: (C, S, J in units of 1e-6).
DEFAULT_COEFFICIENT_TABLE = """\
# n  m      C_nm        S_nm        J_nm        lambda_nm_deg
  2  0  -1082.6261    0.0         1082.6261     0.0
  3  0      2.53241   0.0           -2.53241    0.0
  3  3      0.100583  0.197222       0.22139   80.9928
  4  0      1.6199    0.0           -1.619331   0.0
  4  3      0.059215 -0.012009       0.060421  56.1784
  4  4     -0.003983  0.006525       0.007644 -14.6491
  5  4     -0.0023    0.000388       0.00233198 -2.39321
  5  5      0.00043  -0.00165        0.001703  20.9272
  6  4     -0.0003256 -0.0017845     0.001814  19.9146
  6  5     -0.00022  -0.00043        0.000483703 12.7055
"""

SCALE = 1.0e-6


@dataclass(frozen=True)
class HarmonicEntry:
    """One (n, m) coefficient set, stored as published."""

    n: int
    m: int
    C_raw: float
    S_raw: float
    J_raw: float
    lambda_deg: float

    @property
    def C(self) -> float:
        return self.C_raw * SCALE

    @property
    def S(self) -> float:
        return self.S_raw * SCALE

    @property
    def J(self) -> float:
        return self.J_raw * SCALE

    @property
    def lam(self) -> float:
        """Phase angle lambda_nm [rad]."""
        return math.radians(self.lambda_deg)


class HarmonicCoefficients:
    """Lookup table of geopotential coefficients keyed by (n, m)."""

    def __init__(self, entries: dict[tuple[int, int], HarmonicEntry]):
        self._entries = dict(entries)
        self.validate()

    @classmethod
    def from_text(cls, text: str) -> "HarmonicCoefficients":
        entries = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.replace(",", " ").split()
            if len(parts) != 6:
                raise DomainError(
                    f"coefficient table line {lineno}: expected 6 columns, got {len(parts)}"
                )
            n, m = int(parts[0]), int(parts[1])
            entry = HarmonicEntry(
                n, m, float(parts[2]), float(parts[3]), float(parts[4]), float(parts[5])
            )
            entries[(n, m)] = entry
        return cls(entries)

    @classmethod
    def default(cls) -> "HarmonicCoefficients":
        return cls.from_text(DEFAULT_COEFFICIENT_TABLE)

    @classmethod
    def from_file(cls, path) -> "HarmonicCoefficients":
        with open(path, "r", encoding="ascii") as fh:
            return cls.from_text(fh.read())

    def validate(self, rtol: float = 2e-2) -> None:
        """Check the J/lambda parameterization against the C, S columns.

        For m > 0 entries the relations J = sqrt(C^2 + S^2),
        C = -J cos(m lambda), S = -J sin(m lambda) must hold to `rtol`
        relative to J.  The published C and S columns carry as few as two
        significant figures, so this is a guard against swapped or mistyped
        rows, not a precision statement; the dynamics consume only J and
        lambda.
        """
        for (n, m), ent in self._entries.items():
            if m == 0:
                if ent.S_raw != 0.0 or ent.lambda_deg != 0.0:
                    raise DomainError(f"zonal entry ({n},{m}) must have S = lambda = 0")
                continue
            norm = math.hypot(ent.C_raw, ent.S_raw)
            if abs(norm - ent.J_raw) > rtol * abs(ent.J_raw):
                raise DomainError(
                    f"entry ({n},{m}): J inconsistent with sqrt(C^2+S^2) "
                    f"({ent.J_raw} vs {norm})"
                )
            mlam = m * math.radians(ent.lambda_deg)
            c_pred = -ent.J_raw * math.cos(mlam)
            s_pred = -ent.J_raw * math.sin(mlam)
            tol = rtol * abs(ent.J_raw)
            if abs(c_pred - ent.C_raw) > tol or abs(s_pred - ent.S_raw) > tol:
                raise DomainError(
                    f"entry ({n},{m}): (C, S) inconsistent with J, lambda: "
                    f"predicted ({c_pred}, {s_pred}), stored ({ent.C_raw}, {ent.S_raw})"
                )

    def __getitem__(self, key: tuple[int, int]) -> HarmonicEntry:
        return self._entries[key]

    def __contains__(self, key) -> bool:
        return key in self._entries

    def keys(self):
        return sorted(self._entries.keys())

    def J(self, n: int, m: int) -> float:
        """Rescaled J_nm (dimensionless). Negative for the odd zonals as published."""
        return self._entries[(n, m)].J

    def lam(self, n: int, m: int) -> float:
        """Phase angle lambda_nm [rad]."""
        return self._entries[(n, m)].lam

    def zeroed(self) -> "HarmonicCoefficients":
        """Copy with all coefficients set to zero (Kepler-only tests)."""
        entries = {
            key: HarmonicEntry(ent.n, ent.m, 0.0, 0.0, 0.0, ent.lambda_deg)
            for key, ent in self._entries.items()
        }
        return HarmonicCoefficients(entries)

    def only(self, *keys: tuple[int, int]) -> "HarmonicCoefficients":
        """Copy keeping the given (n, m) entries, zeroing every other one."""
        wanted = set(keys)
        entries = {}
        for key, ent in self._entries.items():
            if key in wanted:
                entries[key] = ent
            else:
                entries[key] = HarmonicEntry(ent.n, ent.m, 0.0, 0.0, 0.0, ent.lambda_deg)
        return HarmonicCoefficients(entries)


DEFAULT_COEFFICIENTS = HarmonicCoefficients.default()
