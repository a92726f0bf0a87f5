"""Derivation and evaluation of dimensionless variable groups.

Given a unit-annotated schema, pick a base subset of independent variables
whose dimension vectors span every base dimension, then express each
remaining variable as that variable divided by a product of powers of the
base subset. The powers come from an exact rational linear solve, so every
derived group is certifiably dimensionless (strict equality, no tolerance).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .dataio import Dataset, DatasetSchema, VariableSpec, make_dataset
from .dimensions import DIMENSIONLESS, DimVector, UnitDef
from .errors import DegenerateDimensionsError, SchemaError, ZeroBaseValueError
from .numerics import RationalMatrix, rank_exact, solve_exact

DIMENSIONLESS_UNIT = UnitDef("-", DIMENSIONLESS, 1.0)

TARGET_LABEL = "Y_π"


@dataclass(frozen=True)
class PiGroup:
    """One dimensionless group: numerator / product(base_var ** exponent)."""

    numerator: str
    base_exponents: tuple[tuple[str, Fraction], ...]
    label: str

    def exponent_map(self) -> dict[str, Fraction]:
        return dict(self.base_exponents)

    def dims(self, schema: DatasetSchema) -> DimVector:
        total = schema.column(self.numerator).dims
        for name, exp in self.base_exponents:
            total = total * schema.column(name).dims ** -exp
        return total

    def is_dimensionless(self, schema: DatasetSchema) -> bool:
        return self.dims(schema).is_dimensionless()

    def formula(self) -> str:
        """Human-readable ratio, e.g. "Pv/C_fit" or "X·A^1/2/B"."""

        def fmt(name: str, exp: Fraction) -> str:
            return name if exp == 1 else f"{name}^{exp}"

        num = [self.numerator]
        den = []
        for name, exp in self.base_exponents:
            if exp > 0:
                den.append(fmt(name, exp))
            elif exp < 0:
                num.append(fmt(name, -exp))
        text = "·".join(num)
        if den:
            den_text = "·".join(den)
            if len(den) > 1:
                den_text = f"({den_text})"
            text = f"{text}/{den_text}"
        return text

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "numerator": self.numerator,
            "exponents": {name: str(exp) for name, exp in self.base_exponents},
            "formula": self.formula(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PiGroup":
        return cls(
            numerator=doc["numerator"],
            base_exponents=tuple(
                (name, Fraction(exp)) for name, exp in doc["exponents"].items()
            ),
            label=doc["label"],
        )


@dataclass(frozen=True)
class PiBasis:
    """Base subset plus one group per non-base variable and the target group."""

    base_subset: tuple[str, ...]
    groups: tuple[PiGroup, ...]
    target_group: PiGroup

    def all_groups(self) -> tuple[PiGroup, ...]:
        return self.groups + (self.target_group,)

    def to_json(self) -> dict:
        return {
            "base_subset": list(self.base_subset),
            "groups": [g.to_json() for g in self.groups],
            "target": self.target_group.to_json(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PiBasis":
        return cls(
            base_subset=tuple(doc["base_subset"]),
            groups=tuple(PiGroup.from_json(g) for g in doc["groups"]),
            target_group=PiGroup.from_json(doc["target"]),
        )


def save_basis(basis: PiBasis, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(basis.to_json(), fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def load_basis(path: str | Path) -> PiBasis:
    with open(path, encoding="utf-8") as fh:
        return PiBasis.from_json(json.load(fh))


def _dimension_matrix(schema: DatasetSchema, names, dim_labels) -> RationalMatrix:
    rows = [
        [schema.column(name).dims.exponent(label) for name in names]
        for label in dim_labels
    ]
    return RationalMatrix.from_rows(rows)


def select_base_subset(schema: DatasetSchema, preferred=None) -> tuple[str, ...]:
    """Pick independent variables whose dimensions span the schema.

    A valid `preferred` list is returned unchanged; otherwise candidates are
    tried in deterministic order (schema column order, lexicographic
    combinations) and the first spanning subset wins.
    """
    dim_labels = schema.base_dimensions_present()
    m = len(dim_labels)
    candidates = schema.independent_names

    if preferred is not None:
        preferred = tuple(preferred)
        unknown = [n for n in preferred if n not in candidates]
        if unknown:
            raise SchemaError(f"preferred base contains non-independent columns: {unknown}")
        if len(preferred) != m:
            raise DegenerateDimensionsError(
                f"base subset must have {m} variables (one per base dimension "
                f"{list(dim_labels)}), got {len(preferred)}"
            )
        matrix = _dimension_matrix(schema, preferred, dim_labels)
        rank = rank_exact(matrix)
        if rank != m:
            covered = sorted(
                {
                    label
                    for name in preferred
                    for label in schema.column(name).dims.labels()
                }
            )
            raise DegenerateDimensionsError(
                f"preferred base {list(preferred)} spans rank {rank} of {m} "
                f"dimensions {list(dim_labels)}; dimensions appearing in the "
                f"subset: {covered}"
            )
        return preferred

    if len(candidates) < m:
        raise DegenerateDimensionsError(
            f"schema has {len(candidates)} independent variables but "
            f"{m} base dimensions {list(dim_labels)}"
        )
    for combo in itertools.combinations(candidates, m):
        if rank_exact(_dimension_matrix(schema, combo, dim_labels)) == m:
            return combo
    raise DegenerateDimensionsError(
        f"no subset of independent variables spans the {m} base dimensions "
        f"{list(dim_labels)}"
    )


def derive_pi_basis(schema: DatasetSchema, base_subset) -> PiBasis:
    """Solve the exponent system for every non-base variable.

    For variable v, the exponents e solve  B·e = dims(v)  where B's columns
    are the base-subset dimension vectors; the group is then
    v / prod(base**e), and dimensionlessness is asserted exactly.
    """
    base_subset = select_base_subset(schema, preferred=tuple(base_subset))
    dim_labels = schema.base_dimensions_present()
    B = _dimension_matrix(schema, base_subset, dim_labels)

    def solve_group(name: str, label: str) -> PiGroup:
        target_dims = schema.column(name).dims
        rhs = [target_dims.exponent(dim) for dim in dim_labels]
        exponents = solve_exact(B, rhs)
        group = PiGroup(
            numerator=name,
            base_exponents=tuple(zip(base_subset, exponents)),
            label=label,
        )
        if not group.is_dimensionless(schema):
            raise DegenerateDimensionsError(
                f"internal error: group {label} for {name!r} is not dimensionless"
            )
        return group

    groups = []
    index = 1
    for name in schema.independent_names:
        if name in base_subset:
            continue
        groups.append(solve_group(name, f"Uπ{index}"))
        index += 1
    target = solve_group(schema.dependent, TARGET_LABEL)
    return PiBasis(base_subset=tuple(base_subset), groups=tuple(groups), target_group=target)


def _power_product(n_rows: int, pairs, where: str) -> np.ndarray:
    """prod over (column, exponent) pairs of column**exponent, elementwise."""
    result = np.ones(n_rows)
    for col, exp in pairs:
        if exp.denominator == 1:
            result = result * np.power(col, int(exp))
        else:
            if np.any(col < 0):
                raise SchemaError(
                    f"{where}: fractional exponent {exp} applied to negative values"
                )
            result = result * np.power(col, float(exp))
    return result


def _base_unit_column(data: Dataset, name: str) -> np.ndarray:
    spec = data.schema.column(name)
    return data.column(name) * spec.unit.to_base_factor


def _base_power_pairs(data: Dataset, group: PiGroup) -> list:
    pairs = []
    for name, exp in group.base_exponents:
        if exp == 0:
            continue
        col = _base_unit_column(data, name)
        zero_rows = np.flatnonzero(col == 0.0)
        if zero_rows.size:
            raise ZeroBaseValueError(int(zero_rows[0]), name)
        pairs.append((col, exp))
    return pairs


def _group_values(data: Dataset, group: PiGroup) -> np.ndarray:
    numer = _base_unit_column(data, group.numerator)
    denom = _power_product(data.n_rows, _base_power_pairs(data, group), f"group {group.label}")
    return numer / denom


def evaluate_groups(data: Dataset, groups) -> np.ndarray:
    """Evaluate groups on base-unit values; one column per group."""
    return np.column_stack([_group_values(data, g) for g in groups])


def nondimensionalize(data: Dataset, basis: PiBasis) -> Dataset:
    """Replace raw columns with the dimensionless group columns.

    Values are converted to SI base units before ratios are formed, so the
    result is invariant under unit rescaling of the input. Rows where a
    base-subset variable is zero are a hard error, never silently dropped.
    """
    all_groups = basis.all_groups()
    values = evaluate_groups(data, all_groups)
    columns = tuple(
        VariableSpec(
            name=g.label,
            unit=DIMENSIONLESS_UNIT,
            role="dependent" if g.label == basis.target_group.label else "independent",
        )
        for g in all_groups
    )
    schema = DatasetSchema(columns=columns, dependent=basis.target_group.label)
    return make_dataset(schema, values, data.provenance)


def dimensionalize_target(y_pi: np.ndarray, rows: Dataset, basis: PiBasis) -> np.ndarray:
    """Invert the target group: recover the dependent variable from Y_π.

    `rows` supplies the base-subset columns (and the dependent column's unit)
    of the same observations; the result is expressed in the dependent
    variable's declared unit.
    """
    y_pi = np.asarray(y_pi, dtype=float)
    group = basis.target_group
    factor = _power_product(
        rows.n_rows, _base_power_pairs(rows, group), f"group {group.label}"
    )
    dep_unit = rows.schema.column(group.numerator).unit
    return y_pi * factor / dep_unit.to_base_factor
