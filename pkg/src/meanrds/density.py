"""Upper, lower, and Banach densities of subsets of the group.

A subset is described by an indicator profile (values 0 or 1). The four
densities are finite window proxies:

* upper / lower: max / min of the ratios |E n F_n| / |F_n| over the tail of
  the window schedule;
* banach upper: min over the schedule of the max over ball translates of the
  window ratio;
* banach lower: max over the schedule of the min over ball translates.

The ordering chain banach-lower <= lower <= upper <= banach-upper is a fact
about the limits. Finite proxies can break it for sets with remainder
effects (a period-3 set against power-of-two windows overshoots on small
tails), so the bundled chain fixtures are dyadic-periodic, where every proxy
is exact. See docs/formats.md for the caveat.

Separation sets {g : separation(g) >= eps} of a pair plug in through
:func:`separation_set`, sharing the pair's profile arrays.
"""

from __future__ import annotations

import math

import numpy as np

from . import _windows
from .groups import FolnerFamily
from .pseudometrics import (
    EstimatorConfig,
    PseudometricEstimate,
    SyntheticSource,
    ValueSource,
    _translated_window_means,
    _window_means_untranslated,
)

DensityEstimate = PseudometricEstimate

UPPER_NOTE = "tail max of window ratios; truncation bias unknown"
LOWER_NOTE = "tail min of window ratios; truncation bias unknown"
BANACH_UPPER_NOTE = "min over windows of max over translates (m_max={m}, radius={r})"
BANACH_LOWER_NOTE = "max over windows of min over translates (m_max={m}, radius={r})"


def _mod_mask(period: int, residues: tuple[int, ...]):
    table = np.zeros(period, dtype=np.float64)
    for r in residues:
        table[r % period] = 1.0
    return lambda t: table[t % period]


def subset_indicator(spec: str) -> SyntheticSource:
    """Named subsets of Z as 0/1 profiles.

    ``all``, ``empty``, ``evens``, ``odds``, ``squares``, ``dyadic-blocks``,
    and ``mod:<period>:<r1,r2,...>``.
    """
    from .pseudometrics import synthetic_source

    if spec in ("evens", "odds", "squares", "dyadic-blocks"):
        return synthetic_source(spec)
    if spec == "all":
        return SyntheticSource(lambda t: np.ones(t.shape, dtype=np.float64), spec)
    if spec == "empty":
        return SyntheticSource(lambda t: np.zeros(t.shape, dtype=np.float64), spec)
    if spec.startswith("mod:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected mod:<period>:<residues>, got {spec!r}")
        period = int(parts[1])
        if period < 1:
            raise ValueError("period must be positive")
        residues = tuple(int(r) for r in parts[2].split(",") if r != "")
        return SyntheticSource(_mod_mask(period, residues), spec)
    raise ValueError(f"unknown subset {spec!r}")


class SeparationSet(ValueSource):
    """Indicator of {g : separation(g) >= eps}; +inf separations count."""

    def __init__(self, source: ValueSource, eps: float):
        if eps <= 0:
            raise ValueError("eps must be positive")
        self.source = source
        self.eps = eps
        self.group = source.group
        self.label = f"[{source.label} >= {eps:g}]"

    def value(self, g) -> float:
        return 1.0 if self.source.value(g) >= self.eps else 0.0

    def range_values(self, lo: int, hi: int):
        vals = self.source.range_values(lo, hi)
        if vals is None:
            return None
        return (vals >= self.eps).astype(np.float64)


def upper_density(ind: ValueSource, cfg: EstimatorConfig) -> DensityEstimate:
    folner = FolnerFamily(ind.group, cfg.element_budget)
    schedule = _windows.window_schedule(folner, cfg.n_max)
    means = _window_means_untranslated(ind, schedule, cfg)
    tail = _windows.tail_indices(schedule, cfg.tail_fraction)
    best = max(tail, key=lambda i: means[i])
    return DensityEstimate(
        kind="upper-density",
        value=float(means[best]),
        window_index=schedule[best],
        translate=None,
        schedule=schedule,
        tail_start=schedule[tail[0]],
        truncation_note=UPPER_NOTE,
        source_label=ind.label,
    )


def lower_density(ind: ValueSource, cfg: EstimatorConfig) -> DensityEstimate:
    folner = FolnerFamily(ind.group, cfg.element_budget)
    schedule = _windows.window_schedule(folner, cfg.n_max)
    means = _window_means_untranslated(ind, schedule, cfg)
    tail = _windows.tail_indices(schedule, cfg.tail_fraction)
    best = min(tail, key=lambda i: means[i])
    return DensityEstimate(
        kind="lower-density",
        value=float(means[best]),
        window_index=schedule[best],
        translate=None,
        schedule=schedule,
        tail_start=schedule[tail[0]],
        truncation_note=LOWER_NOTE,
        source_label=ind.label,
    )


def banach_upper_density(ind: ValueSource, cfg: EstimatorConfig) -> DensityEstimate:
    folner = FolnerFamily(ind.group, cfg.element_budget)
    schedule = _windows.window_schedule(folner, cfg.m_max)
    best_value = math.inf
    best_m = schedule[0]
    best_g = None
    for n, means, ball in _translated_window_means(ind, schedule, cfg):
        k = int(np.argmax(means))
        if float(means[k]) < best_value:
            best_value = float(means[k])
            best_m = n
            best_g = ball[k]
    return DensityEstimate(
        kind="banach-upper-density",
        value=best_value,
        window_index=best_m,
        translate=best_g,
        schedule=schedule,
        tail_start=None,
        truncation_note=BANACH_UPPER_NOTE.format(m=cfg.m_max, r=cfg.search_radius),
        source_label=ind.label,
    )


def banach_lower_density(ind: ValueSource, cfg: EstimatorConfig) -> DensityEstimate:
    folner = FolnerFamily(ind.group, cfg.element_budget)
    schedule = _windows.window_schedule(folner, cfg.m_max)
    best_value = -math.inf
    best_m = schedule[0]
    best_g = None
    for n, means, ball in _translated_window_means(ind, schedule, cfg):
        k = int(np.argmin(means))
        if float(means[k]) > best_value:
            best_value = float(means[k])
            best_m = n
            best_g = ball[k]
    return DensityEstimate(
        kind="banach-lower-density",
        value=best_value,
        window_index=best_m,
        translate=best_g,
        schedule=schedule,
        tail_start=None,
        truncation_note=BANACH_LOWER_NOTE.format(m=cfg.m_max, r=cfg.search_radius),
        source_label=ind.label,
    )


def density_summary(ind: ValueSource, cfg: EstimatorConfig) -> dict[str, DensityEstimate]:
    return {
        "banach-lower-density": banach_lower_density(ind, cfg),
        "lower-density": lower_density(ind, cfg),
        "upper-density": upper_density(ind, cfg),
        "banach-upper-density": banach_upper_density(ind, cfg),
    }


def separation_set(source: ValueSource, eps: float) -> SeparationSet:
    return SeparationSet(source, eps)
