"""Unit-annotated dataset schemas, CSV ingestion, splits, and synthesis.

A schema assigns every column a unit (hence a dimension vector), a role and
an optional physical range. Datasets are immutable: a float matrix in schema
column order plus one provenance tag per row. CSV files carry the schema
column names in the header and may include an extra ``provenance`` column so
block tags survive a round trip.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .dimensions import DimVector, UnitDef, UnitRegistry, builtin_registry
from .errors import ConstantColumnError, IngestError, SchemaError

ROLES = ("independent", "dependent", "constant")

PROVENANCE_COLUMN = "provenance"


@dataclass(frozen=True)
class VariableSpec:
    """One dataset column: name, unit, role, optional [lo, hi] range."""

    name: str
    unit: UnitDef
    role: str
    declared_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise SchemaError(f"column {self.name!r}: unknown role {self.role!r}")
        if self.declared_range is not None:
            lo, hi = self.declared_range
            if not lo <= hi:
                raise SchemaError(
                    f"column {self.name!r}: range lower bound {lo} exceeds upper {hi}"
                )

    @property
    def dims(self) -> DimVector:
        return self.unit.dims


@dataclass(frozen=True)
class DatasetSchema:
    """Ordered column specs plus the single dependent variable name."""

    columns: tuple[VariableSpec, ...]
    dependent: str
    preferred_base: tuple[str, ...] | None = None

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate column names in schema")
        dependents = [c.name for c in self.columns if c.role == "dependent"]
        if dependents != [self.dependent]:
            raise SchemaError(
                f"schema must have exactly one dependent column named "
                f"{self.dependent!r}, found {dependents}"
            )
        if self.preferred_base is not None:
            unknown = [n for n in self.preferred_base if n not in names]
            if unknown:
                raise SchemaError(f"preferred base names not in schema: {unknown}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def independent_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns if c.role != "dependent")

    def column(self, name: str) -> VariableSpec:
        for c in self.columns:
            if c.name == name:
                return c
        raise SchemaError(f"no column named {name!r} in schema")

    def index(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise SchemaError(f"no column named {name!r} in schema")

    def base_dimensions_present(self) -> tuple[str, ...]:
        present: list[str] = []
        for c in self.columns:
            for label in c.dims.labels():
                if label not in present:
                    present.append(label)
        return tuple(sorted(present))

    def to_json(self) -> dict:
        doc: dict = {
            "dependent": self.dependent,
            "columns": [
                {
                    "name": c.name,
                    "unit": c.unit.symbol,
                    "to_base_factor": c.unit.to_base_factor,
                    "role": c.role,
                    "range": list(c.declared_range) if c.declared_range else None,
                    "dims": c.unit.dims.to_json(),
                }
                for c in self.columns
            ],
        }
        if self.preferred_base is not None:
            doc["base_subset"] = list(self.preferred_base)
        return doc

    @classmethod
    def from_json(cls, doc: dict, registry: UnitRegistry | None = None) -> "DatasetSchema":
        registry = registry or builtin_registry()
        columns = []
        for col in doc["columns"]:
            symbol = col["unit"]
            if "dims" in col and "to_base_factor" in col:
                unit = UnitDef(symbol, DimVector.from_json(col["dims"]), col["to_base_factor"])
                if symbol in registry and registry.get(symbol) != unit:
                    raise SchemaError(
                        f"column {col['name']!r}: unit {symbol!r} conflicts with registry"
                    )
            else:
                unit = registry.get(symbol)
            rng = col.get("range")
            columns.append(
                VariableSpec(
                    name=col["name"],
                    unit=unit,
                    role=col["role"],
                    declared_range=tuple(rng) if rng else None,
                )
            )
        base = doc.get("base_subset")
        return cls(
            columns=tuple(columns),
            dependent=doc["dependent"],
            preferred_base=tuple(base) if base else None,
        )


def load_schema(path: str | Path, registry: UnitRegistry | None = None) -> DatasetSchema:
    with open(path, encoding="utf-8") as fh:
        return DatasetSchema.from_json(json.load(fh), registry)


def save_schema(schema: DatasetSchema, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(schema.to_json(), fh, indent=2, ensure_ascii=False)
        fh.write("\n")


_BUILTIN_SCHEMAS = {
    "training": "biofilter_training_schema.json",
    "testing": "biofilter_testing_schema.json",
}


def builtin_schema(name: str = "training") -> DatasetSchema:
    """Bundled biofilter variable schemas ("training" or "testing")."""
    try:
        filename = _BUILTIN_SCHEMAS[name]
    except KeyError:
        raise SchemaError(
            f"no builtin schema {name!r}; choose from {sorted(_BUILTIN_SCHEMAS)}"
        ) from None
    text = resources.files("pireduce.data").joinpath(filename).read_text("utf-8")
    return DatasetSchema.from_json(json.loads(text))


@dataclass(frozen=True)
class Dataset:
    """Immutable float matrix in schema column order with row provenance."""

    schema: DatasetSchema
    values: np.ndarray
    provenance: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(self.schema.columns):
            raise IngestError(
                f"values must be (rows, {len(self.schema.columns)}), got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise IngestError("dataset contains non-finite values")
        if len(self.provenance) != values.shape[0]:
            raise IngestError("provenance length does not match row count")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.schema.index(name)]

    def matrix(self, names) -> np.ndarray:
        idx = [self.schema.index(n) for n in names]
        return self.values[:, idx]

    def independents(self) -> np.ndarray:
        return self.matrix(self.schema.independent_names)

    def dependent_values(self) -> np.ndarray:
        return self.column(self.schema.dependent)

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        return Dataset(
            schema=self.schema,
            values=self.values[indices].copy(),
            provenance=tuple(self.provenance[i] for i in indices),
        )

    def with_column(self, name: str, values: np.ndarray) -> "Dataset":
        new = self.values.copy()
        new[:, self.schema.index(name)] = values
        return Dataset(self.schema, new, self.provenance)


def make_dataset(schema: DatasetSchema, values, provenance: str | tuple[str, ...] = "") -> Dataset:
    values = np.asarray(values, dtype=float)
    if isinstance(provenance, str):
        provenance = (provenance,) * values.shape[0]
    return Dataset(schema, values, tuple(provenance))


def load_csv(path: str | Path, schema: DatasetSchema) -> Dataset:
    """Read a dataset, accepting schema columns in any order.

    Rows with missing or unparseable cells are rejected with the offending
    row and column named; an optional ``provenance`` column carries block
    tags.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        prov_idx = header.index(PROVENANCE_COLUMN) if PROVENANCE_COLUMN in header else None
        data_cols = [h for h in header if h != PROVENANCE_COLUMN]
        missing = set(schema.names) - set(data_cols)
        extra = set(data_cols) - set(schema.names)
        if missing or extra:
            raise IngestError(
                f"{path}: header does not match schema"
                + (f"; missing {sorted(missing)}" if missing else "")
                + (f"; unexpected {sorted(extra)}" if extra else "")
            )
        col_idx = {name: header.index(name) for name in schema.names}

        rows: list[list[float]] = []
        provenance: list[str] = []
        for row_num, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise IngestError(
                    f"{path}: row {row_num} has {len(row)} cells, expected {len(header)}"
                )
            parsed = []
            for name in schema.names:
                cell = row[col_idx[name]].strip()
                try:
                    value = float(cell)
                except ValueError:
                    raise IngestError(
                        f"{path}: row {row_num}, column {name!r}: "
                        f"cannot parse {cell!r}"
                    ) from None
                if not np.isfinite(value):
                    raise IngestError(
                        f"{path}: row {row_num}, column {name!r}: non-finite value {cell!r}"
                    )
                parsed.append(value)
            rows.append(parsed)
            provenance.append(row[prov_idx].strip() if prov_idx is not None else "")

    values = np.array(rows, dtype=float).reshape(len(rows), len(schema.names))
    return Dataset(schema, values, tuple(provenance))


def save_csv(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset; floats use repr so a round trip is value-exact."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.schema.names) + [PROVENANCE_COLUMN])
        for row, tag in zip(dataset.values, dataset.provenance):
            writer.writerow([repr(float(v)) for v in row] + [tag])


@dataclass(frozen=True)
class Standardizer:
    """Column-wise z-score transform using statistics frozen at fit time."""

    columns: tuple[str, ...] | None
    means: np.ndarray
    stds: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.means) / self.stds

    def to_json(self) -> dict:
        return {
            "columns": list(self.columns) if self.columns else None,
            "means": [float(v) for v in self.means],
            "stds": [float(v) for v in self.stds],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Standardizer":
        cols = doc.get("columns")
        return cls(
            columns=tuple(cols) if cols else None,
            means=np.array(doc["means"], dtype=float),
            stds=np.array(doc["stds"], dtype=float),
        )


def fit_standardizer(
    train: Dataset,
    columns=None,
    on_constant: str = "raise",
) -> Standardizer:
    """Fit per-column mean/std (sample std, n-1 denominator) on training data.

    Zero-variance columns raise :class:`ConstantColumnError` by default;
    ``on_constant="zero"`` instead maps them to exactly zero (divisor 1),
    which is how the experiment pipeline feeds constant raw columns to the
    purely data-driven reducers.
    """
    if columns is None:
        columns = train.schema.independent_names
    columns = tuple(columns)
    X = train.matrix(columns)
    return _fit_standardizer_matrix(X, columns, on_constant)


def fit_array_standardizer(X: np.ndarray, on_constant: str = "raise") -> Standardizer:
    """Standardizer over a bare feature matrix (no schema)."""
    return _fit_standardizer_matrix(np.asarray(X, dtype=float), None, on_constant)


def _fit_standardizer_matrix(X, columns, on_constant) -> Standardizer:
    if on_constant not in ("raise", "zero"):
        raise ValueError(f"on_constant must be 'raise' or 'zero', got {on_constant!r}")
    means = X.mean(axis=0)
    stds = X.std(axis=0, ddof=1)
    zero = stds == 0.0
    if np.any(zero):
        if on_constant == "raise":
            which = (
                [columns[i] for i in np.flatnonzero(zero)]
                if columns
                else list(np.flatnonzero(zero))
            )
            raise ConstantColumnError(
                f"zero-variance column(s) selected for standardization: {which}"
            )
        stds = np.where(zero, 1.0, stds)
    return Standardizer(columns=columns, means=means, stds=stds)


def apply_standardizer(s: Standardizer, data: Dataset) -> Dataset:
    """Transform the fit columns of `data` using the frozen statistics."""
    if s.columns is None:
        raise ValueError("standardizer was fit on a bare matrix, not schema columns")
    values = data.values.copy()
    for j, name in enumerate(s.columns):
        idx = data.schema.index(name)
        values[:, idx] = (values[:, idx] - s.means[j]) / s.stds[j]
    return Dataset(data.schema, values, data.provenance)


def holdout_split(
    data: Dataset,
    fraction: float,
    seed: int,
    stratify_block: str | None = None,
) -> tuple[Dataset, Dataset]:
    """Deterministic train/test partition.

    With `stratify_block`, every test row is drawn from that provenance
    block (the remaining block rows stay in training).
    """
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    n = data.n_rows
    n_test = int(round(fraction * n))
    if n_test == 0 or n_test == n:
        raise ValueError(f"fraction {fraction} leaves an empty split for {n} rows")
    rng = np.random.default_rng(seed)
    if stratify_block is not None:
        pool = np.flatnonzero(np.array([p == stratify_block for p in data.provenance]))
        if len(pool) < n_test:
            raise ValueError(
                f"provenance block {stratify_block!r} has {len(pool)} rows, "
                f"need {n_test} for the test split"
            )
        test_idx = np.sort(rng.choice(pool, size=n_test, replace=False))
    else:
        test_idx = np.sort(rng.choice(n, size=n_test, replace=False))
    mask = np.ones(n, dtype=bool)
    mask[test_idx] = False
    train_idx = np.flatnonzero(mask)
    return data.subset(train_idx), data.subset(test_idx)


def kfold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    """k disjoint validation index sets covering 0..n-1, sizes within 1."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if n < k:
        raise ValueError(f"cannot split {n} rows into {k} folds")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(fold) for fold in np.array_split(perm, k)]


def scale_schema_ranges(schema: DatasetSchema, factor: float) -> DatasetSchema:
    """Widen every varying independent range [lo, hi] to [lo/factor, hi*factor].

    Constant columns keep their value. Used to sample evaluation data from
    beyond the training envelope.
    """
    if factor <= 0:
        raise ValueError("factor must be positive")
    columns = []
    for col in schema.columns:
        rng = col.declared_range
        if col.role == "dependent" or rng is None or rng[0] == rng[1]:
            columns.append(col)
        else:
            columns.append(
                VariableSpec(
                    name=col.name,
                    unit=col.unit,
                    role=col.role,
                    declared_range=(rng[0] / factor, rng[1] * factor),
                )
            )
    return DatasetSchema(
        columns=tuple(columns),
        dependent=schema.dependent,
        preferred_base=schema.preferred_base,
    )


def default_synth_law(basis):
    """A plausible generating law for the bundled biofilter schema.

    Exponents mirror the power-law fit reported for the original corpus;
    the intercept is calibrated so the dimensionless target sits near 0.6
    at the schema's range midpoints.
    """
    from .models import MonomialModel

    exponents = {"Uπ1": -0.06, "Uπ2": -0.30, "Uπ3": 0.53, "Uπ4": -0.09}
    labels = tuple(g.label for g in basis.groups)
    return MonomialModel(
        intercept_log=float(np.log(0.0227)),
        exponents=tuple(exponents.get(label, 0.0) for label in labels),
        feature_names=labels,
        ridge_lambda=0.0,
    )


def synth_generate(
    schema: DatasetSchema,
    n: int,
    law,
    noise_sigma: float,
    seed: int,
    base_subset=None,
    provenance: str = "synthetic",
) -> Dataset:
    """Sample a dataset whose dependent column follows a known power law.

    Independent columns are drawn log-uniformly inside their declared ranges
    (a power law is linear in log space, so log-uniform sampling spreads
    leverage evenly). The dependent value is the law evaluated on the true
    dimensionless groups, times exp(eps) with eps ~ Normal(0, noise_sigma²),
    then converted back into the dependent column's declared unit.
    """
    from . import pi_engine  # deferred: pi_engine imports this module
    from .models import predict_monomial

    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)

    values = np.zeros((n, len(schema.columns)))
    for j, col in enumerate(schema.columns):
        if col.role == "dependent":
            continue
        if col.declared_range is None:
            raise SchemaError(
                f"column {col.name!r} has no declared range; cannot sample"
            )
        lo, hi = col.declared_range
        if lo <= 0:
            raise SchemaError(
                f"column {col.name!r}: log-uniform sampling needs positive range, "
                f"got [{lo}, {hi}]"
            )
        if col.role == "constant" or lo == hi:
            values[:, j] = lo
        else:
            values[:, j] = np.exp(rng.uniform(np.log(lo), np.log(hi), size=n))

    data = make_dataset(schema, values, provenance)
    if base_subset is None:
        base_subset = schema.preferred_base or pi_engine.select_base_subset(schema)
    basis = pi_engine.derive_pi_basis(schema, base_subset)

    group_labels = tuple(g.label for g in basis.groups)
    if tuple(law.feature_names) != group_labels:
        raise SchemaError(
            f"law features {law.feature_names} do not match basis groups {group_labels}"
        )
    U = pi_engine.evaluate_groups(data, basis.groups)
    y_pi = predict_monomial(law, U) * np.exp(noise_sigma * rng.standard_normal(n))
    dependent = pi_engine.dimensionalize_target(y_pi, data, basis)
    return data.with_column(schema.dependent, dependent)
