"""Quantum-defect series models and Rydberg level energies (atomic units)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from ..errors import ConfigError, SeriesDomainError


@dataclass(frozen=True)
class DefectModel:
    """One Rydberg series with Rydberg-Ritz defect coefficients.

    delta(n) = delta0 + delta2/(n - delta0)^2 + delta4/(n - delta0)^4
    """

    label: str
    l: int
    s: int
    j: int
    delta0: float
    delta2: float
    delta4: float
    n_min: int
    source: str = ""

    def defect(self, n: int) -> float:
        x = n - self.delta0
        return self.delta0 + self.delta2 / x**2 + self.delta4 / x**4


@dataclass(frozen=True)
class RydbergLevel:
    """A single (n, l, s, j) level with its effective quantum number."""

    n: int
    l: int
    s: int
    j: int
    n_star: float
    energy: float
    series_label: str = ""


def level(series: DefectModel, n: int) -> RydbergLevel:
    """Level of a series at principal quantum number n; E = -1/(2 n*^2)."""
    if n < series.n_min:
        raise SeriesDomainError(
            f"n = {n} below the floor n_min = {series.n_min} of series "
            f"{series.label!r}")
    n_star = n - series.defect(n)
    if n_star <= 0:
        raise SeriesDomainError(
            f"effective quantum number {n_star} not positive for "
            f"{series.label!r} n = {n}")
    return RydbergLevel(n=n, l=series.l, s=series.s, j=series.j,
                        n_star=n_star, energy=-0.5 / n_star**2,
                        series_label=series.label)


class SeriesTable:
    """Lookup of defect models by label, loaded from a data file."""

    def __init__(self, models):
        self._models = {m.label: m for m in models}

    def __getitem__(self, label: str) -> DefectModel:
        try:
            return self._models[label]
        except KeyError:
            raise ConfigError(
                f"unknown series {label!r}; available: "
                f"{sorted(self._models)}") from None

    def __contains__(self, label: str) -> bool:
        return label in self._models

    def labels(self):
        return sorted(self._models)

    def models(self):
        return list(self._models.values())

    def level(self, label: str, n: int) -> RydbergLevel:
        return level(self[label], n)


_REQUIRED_KEYS = {"label", "l", "s", "j", "delta0", "delta2", "delta4",
                  "n_min", "source"}


def load_series_table(path=None) -> SeriesTable:
    """Load a defect data file; defaults to the bundled Sr-88 triplet set."""
    if path is None:
        text = (resources.files("rydgate.atomic") / "data/sr88_defects.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"defect data file is not valid JSON: {exc}") from exc
    if "series" not in doc or not isinstance(doc["series"], list):
        raise ConfigError("defect data file must contain a 'series' list")
    models = []
    for entry in doc["series"]:
        missing = _REQUIRED_KEYS - set(entry)
        if missing:
            raise ConfigError(
                f"series entry {entry.get('label', '?')!r} missing keys "
                f"{sorted(missing)}")
        models.append(DefectModel(
            label=str(entry["label"]), l=int(entry["l"]), s=int(entry["s"]),
            j=int(entry["j"]), delta0=float(entry["delta0"]),
            delta2=float(entry["delta2"]), delta4=float(entry["delta4"]),
            n_min=int(entry["n_min"]), source=str(entry["source"])))
    return SeriesTable(models)


def hydrogen_series(l: int, label=None) -> DefectModel:
    """Zero-defect series; reproduces hydrogen when used with s=1/2 machinery.

    The spin/J assignments are placeholders for radial-only work (the radial
    equation depends on l and n* alone).
    """
    return DefectModel(label=label or f"H_l{l}", l=l, s=1, j=max(l, 1),
                       delta0=0.0, delta2=0.0, delta4=0.0, n_min=l + 1,
                       source="hydrogenic")
