"""Replicated two-level full factorial design over six binary factors.

Configurations are the 64 vertices of the factor hypercube, indexed so that
factor A is the least significant bit and F the most significant
(row = 32F + 16E + 8D + 4C + 2B + A), with labels like ``A1B0C1D0E0F0``.
Effects use {-1, +1} contrast coding: the estimate for a term (any
non-empty subset of factors) is the mean response where the term's contrast
is +1 minus the mean where it is -1, so a negative effect means the high
level reduces the response.  With n replicates each main effect averages
over n * 32 runs at either level.

Two aggregate responses summarize the nine tracking errors: the encoder
average (mean of the three 56-scale metrics) and the decoder average (mean
of the six 112/224-scale metrics).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

__all__ = [
    "FACTORS",
    "FactorConfig",
    "EffectEstimate",
    "ResponseTable",
    "MissingCellsError",
    "enumerate_configs",
    "contrast_sign",
    "all_terms",
    "effect_estimate",
    "aggregate_responses",
    "rank_effects",
    "ENCODER_METRICS",
    "DECODER_METRICS",
]

FACTORS = "ABCDEF"
N_CONFIGS = 1 << len(FACTORS)

ENCODER_METRICS = ("B56", "H56", "P56")
DECODER_METRICS = ("B112", "B224", "H112", "H224", "P112", "P224")


class MissingCellsError(ValueError):
    """Raised when the design grid has absent (config, replicate) cells."""

    def __init__(self, metric: str, missing: list[tuple[str, int]]):
        self.metric = metric
        self.missing = missing
        preview = ", ".join(f"({c}, r{r})" for c, r in missing[:8])
        if len(missing) > 8:
            preview += f", ... {len(missing) - 8} more"
        super().__init__(f"metric {metric!r} missing {len(missing)} cells: {preview}")


@dataclass(frozen=True)
class FactorConfig:
    """One vertex of the 2^6 design."""

    levels: tuple[bool, bool, bool, bool, bool, bool]

    @property
    def index(self) -> int:
        return sum(int(b) << i for i, b in enumerate(self.levels))

    @property
    def label(self) -> str:
        return "".join(f"{f}{int(b)}" for f, b in zip(FACTORS, self.levels))

    @classmethod
    def from_index(cls, index: int) -> "FactorConfig":
        if not 0 <= index < N_CONFIGS:
            raise ValueError(f"config index {index} out of range")
        return cls(tuple(bool((index >> i) & 1) for i in range(len(FACTORS))))

    @classmethod
    def from_label(cls, label: str) -> "FactorConfig":
        label = label.strip()
        ok = (
            len(label) == 12
            and all(label[2 * i] == FACTORS[i] for i in range(6))
            and all(label[2 * i + 1] in "01" for i in range(6))
        )
        if not ok:
            raise ValueError(f"bad config label {label!r}")
        return cls(tuple(label[2 * i + 1] == "1" for i in range(6)))

    def __getitem__(self, factor: str) -> bool:
        return self.levels[FACTORS.index(factor)]


@dataclass(frozen=True)
class EffectEstimate:
    term: str
    metric: str
    value: float


def enumerate_configs() -> list[FactorConfig]:
    """All 64 configurations in stable row-index order."""
    return [FactorConfig.from_index(i) for i in range(N_CONFIGS)]


def contrast_sign(config: FactorConfig, term: str) -> int:
    """Product of per-factor contrasts (+1 high, -1 low) over the term."""
    if not term:
        raise ValueError("term must name at least one factor")
    sign = 1
    for f in term:
        sign *= 1 if config[f] else -1
    return sign


def all_terms() -> list[str]:
    """The 63 non-empty factor subsets, as sorted letter strings."""
    terms = []
    for k in range(1, len(FACTORS) + 1):
        terms.extend("".join(c) for c in combinations(FACTORS, k))
    return terms


class ResponseTable:
    """(config, replicate) -> {metric: value} storage for the design."""

    def __init__(self):
        self._cells: dict[tuple[str, int], dict[str, float]] = {}

    def add(self, config: FactorConfig | str, replicate: int, metric: str, value: float) -> None:
        label = config if isinstance(config, str) else config.label
        FactorConfig.from_label(label)  # validate early
        self._cells.setdefault((label, replicate), {})[metric] = float(value)

    @classmethod
    def from_rows(cls, rows) -> "ResponseTable":
        table = cls()
        for config, replicate, metric, value in rows:
            table.add(config, replicate, metric, value)
        return table

    @property
    def replicates(self) -> list[int]:
        return sorted({r for _, r in self._cells})

    def metrics(self) -> list[str]:
        names: set[str] = set()
        for cell in self._cells.values():
            names.update(cell)
        return sorted(names)

    def value(self, label: str, replicate: int, metric: str) -> float:
        return self._cells[(label, replicate)][metric]

    def missing_cells(self, metric: str) -> list[tuple[str, int]]:
        missing = []
        for config in enumerate_configs():
            for rep in self.replicates:
                cell = self._cells.get((config.label, rep))
                if cell is None or metric not in cell:
                    missing.append((config.label, rep))
        return missing

    def responses(self, metric: str) -> np.ndarray:
        """(64, n_replicates) response matrix in row-index order."""
        missing = self.missing_cells(metric)
        if missing:
            raise MissingCellsError(metric, missing)
        reps = self.replicates
        out = np.empty((N_CONFIGS, len(reps)))
        for config in enumerate_configs():
            for j, rep in enumerate(reps):
                out[config.index, j] = self._cells[(config.label, rep)][metric]
        return out

    def add_aggregates(self) -> None:
        """Derive enc_avg / dec_avg for every cell that has all nine metrics."""
        for cell in self._cells.values():
            if all(m in cell for m in ENCODER_METRICS + DECODER_METRICS):
                enc, dec = aggregate_responses(cell)
                cell["enc_avg"] = enc
                cell["dec_avg"] = dec


def effect_estimate(table: ResponseTable, term: str, metric: str) -> EffectEstimate:
    """Contrast-coded effect: mean at the high level minus at the low level."""
    y = table.responses(metric)
    signs = np.array([contrast_sign(c, term) for c in enumerate_configs()])
    high = y[signs == 1].mean()
    low = y[signs == -1].mean()
    return EffectEstimate(term=term, metric=metric, value=float(high - low))


def aggregate_responses(metrics: dict[str, float]) -> tuple[float, float]:
    """Encoder and decoder aggregate responses from one run's nine metrics."""
    missing = [m for m in ENCODER_METRICS + DECODER_METRICS if m not in metrics]
    if missing:
        raise MissingCellsError("aggregate", [(m, -1) for m in missing])
    enc = float(np.mean([metrics[m] for m in ENCODER_METRICS]))
    dec = float(np.mean([metrics[m] for m in DECODER_METRICS]))
    return enc, dec


def rank_effects(effects: dict[str, dict[str, float]], group: tuple[str, ...]) -> list[tuple[str, float]]:
    """Rank terms by |mean effect| over a metric group, descending.

    ``effects`` maps term -> metric -> effect value.  Ties break by term
    in lexicographic order.  Returns (term, group-average effect) pairs.
    """
    rows = []
    for term, per_metric in effects.items():
        avg = float(np.mean([per_metric[m] for m in group]))
        rows.append((term, avg))
    rows.sort(key=lambda tv: (-abs(tv[1]), tv[0]))
    return rows


def compute_all_effects(table: ResponseTable, metrics: list[str]) -> dict[str, dict[str, float]]:
    """Effect values for all 63 terms on each requested metric."""
    out: dict[str, dict[str, float]] = {}
    for term in all_terms():
        out[term] = {m: effect_estimate(table, term, m).value for m in metrics}
    return out
