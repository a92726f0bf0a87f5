"""Exact algebra of physical dimensions and multiplicative unit conversion.

Dimensions are exponent vectors over the base labels L (length), M (mass),
T (time) and K (temperature), stored as exact rationals so that
dimensionlessness is a strict equality test rather than a tolerance check.
Units carry a positive factor converting values to SI base units; only
multiplicative conversions are supported (no affine offsets).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from .errors import SchemaError

BASE_DIMENSIONS = ("L", "M", "T", "K")

RationalLike = int | str | Fraction


def _as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"exponent must be an exact rational, got {type(value).__name__}")


class DimVector:
    """Exponent vector over base dimensions with exact rational entries.

    Zero exponents are dropped, so two vectors are equal iff they denote the
    same physical dimension. Instances are immutable and hashable.
    """

    __slots__ = ("_exp",)

    def __init__(self, exponents: Mapping[str, RationalLike] | None = None, **named: RationalLike):
        merged: dict[str, Fraction] = {}
        for source in (exponents or {}), named:
            for label, value in source.items():
                frac = _as_fraction(value)
                if frac != 0:
                    merged[label] = merged.get(label, Fraction(0)) + frac
        object.__setattr__(self, "_exp", {k: v for k, v in sorted(merged.items()) if v != 0})

    def __setattr__(self, name, value):
        raise AttributeError("DimVector is immutable")

    @property
    def exponents(self) -> dict[str, Fraction]:
        return dict(self._exp)

    def exponent(self, label: str) -> Fraction:
        return self._exp.get(label, Fraction(0))

    def labels(self) -> tuple[str, ...]:
        return tuple(self._exp)

    def is_dimensionless(self) -> bool:
        return not self._exp

    def __mul__(self, other: "DimVector") -> "DimVector":
        if not isinstance(other, DimVector):
            return NotImplemented
        merged = dict(self._exp)
        for label, value in other._exp.items():
            merged[label] = merged.get(label, Fraction(0)) + value
        return DimVector(merged)

    def __truediv__(self, other: "DimVector") -> "DimVector":
        if not isinstance(other, DimVector):
            return NotImplemented
        return self * other ** -1

    def __pow__(self, power: RationalLike) -> "DimVector":
        r = _as_fraction(power)
        return DimVector({label: value * r for label, value in self._exp.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DimVector):
            return NotImplemented
        return self._exp == other._exp

    def __hash__(self) -> int:
        return hash(tuple(self._exp.items()))

    def __iter__(self) -> Iterator[tuple[str, Fraction]]:
        return iter(self._exp.items())

    def __repr__(self) -> str:
        return f"DimVector({self._exp!r})"

    def __str__(self) -> str:
        if not self._exp:
            return "dimensionless"
        parts = []
        order = [d for d in BASE_DIMENSIONS if d in self._exp]
        order += [d for d in self._exp if d not in BASE_DIMENSIONS]
        for label in order:
            value = self._exp[label]
            parts.append(label if value == 1 else f"{label}^{value}")
        return "·".join(parts)

    def to_json(self) -> dict[str, str]:
        """All base labels emitted, including zeros, as 'p/q' strings."""
        labels = list(BASE_DIMENSIONS) + [d for d in self._exp if d not in BASE_DIMENSIONS]
        return {label: str(self.exponent(label)) for label in labels}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> "DimVector":
        return cls({label: Fraction(value) for label, value in data.items()})


DIMENSIONLESS = DimVector()
LENGTH = DimVector(L=1)
MASS = DimVector(M=1)
TIME = DimVector(T=1)
TEMPERATURE = DimVector(K=1)
CONCENTRATION = MASS / LENGTH ** 3


def dim_mul(a: DimVector, b: DimVector) -> DimVector:
    """Dimension of a product: component-wise sum of exponents."""
    return a * b


def dim_pow(a: DimVector, r: RationalLike) -> DimVector:
    """Dimension of a power: every exponent scaled by the exact rational r."""
    return a ** r


def is_dimensionless(a: DimVector) -> bool:
    """True iff every exponent is exactly zero."""
    return a.is_dimensionless()


@dataclass(frozen=True)
class UnitDef:
    """A named unit: its dimension vector and the multiplier to SI base units."""

    symbol: str
    dims: DimVector
    to_base_factor: float

    def __post_init__(self):
        if not self.to_base_factor > 0:
            raise SchemaError(
                f"unit {self.symbol!r}: to_base_factor must be positive, "
                f"got {self.to_base_factor}"
            )


def _canon(symbol: str) -> str:
    # µ (U+00B5) and μ (U+03BC) both appear in the wild; fold to 'u'.
    return symbol.replace("µ", "u").replace("μ", "u").lower()


class UnitRegistry:
    """Lookup table from unit symbols to :class:`UnitDef`.

    Symbols are matched case-insensitively with micro signs folded, so
    "µm", "μm" and "um" resolve to the same unit.
    """

    def __init__(self):
        self._units: dict[str, UnitDef] = {}

    def register(self, unit: UnitDef) -> None:
        key = _canon(unit.symbol)
        existing = self._units.get(key)
        if existing is not None and (
            existing.dims != unit.dims or existing.to_base_factor != unit.to_base_factor
        ):
            raise SchemaError(
                f"unit symbol {unit.symbol!r} already registered with different definition"
            )
        self._units[key] = unit

    def get(self, symbol: str) -> UnitDef:
        try:
            return self._units[_canon(symbol)]
        except KeyError:
            raise SchemaError(f"unknown unit symbol {symbol!r}") from None

    def __contains__(self, symbol: str) -> bool:
        return _canon(symbol) in self._units

    def copy(self) -> "UnitRegistry":
        reg = UnitRegistry()
        reg._units.update(self._units)
        return reg


def builtin_registry() -> UnitRegistry:
    """Registry covering the biofilter schema symbols plus SI base units."""
    reg = UnitRegistry()
    for unit in (
        UnitDef("-", DIMENSIONLESS, 1.0),
        UnitDef("1", DIMENSIONLESS, 1.0),
        UnitDef("m", LENGTH, 1.0),
        UnitDef("mm", LENGTH, 1e-3),
        UnitDef("µm", LENGTH, 1e-6),
        UnitDef("kg", MASS, 1.0),
        UnitDef("s", TIME, 1.0),
        UnitDef("Sec", TIME, 1.0),
        UnitDef("days", TIME, 86400.0),
        UnitDef("k", TEMPERATURE, 1.0),
        UnitDef("mg/L", CONCENTRATION, 1e-3),  # 1 mg/L = 1e-3 kg/m³
    ):
        reg.register(unit)
    return reg


def to_base_value(x: float, unit: UnitDef) -> float:
    """Convert a value in `unit` to SI base units."""
    return x * unit.to_base_factor
