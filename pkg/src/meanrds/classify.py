"""Mean-equicontinuity versus mean-sensitivity classification.

Three seeded probes feed one report:

* ``wme_test``: for each eps, descend a delta grid until every sampled pair
  within delta keeps its Banach mean separation below eps; the found deltas
  form a modulus table.
* ``mean_l_stable_test``: same descent, but the criterion is that the Banach
  upper density of the separation set {g : separation(g) >= eps} stays below
  eps. The two tests agree in the limit; their per-eps agreement and the
  pointwise chain eps * density <= banach are reported as crosschecks.
* ``sensitivity_test``: for every sampled base point and every eps in a
  decreasing sequence, search a shrinking ball for a witness whose fiber
  Weyl separation exceeds delta0. A point is robust when every eps yields a
  witness; the probe passes when all sampled points are robust.

The verdict is "wme-evidence" or "sensitive-evidence" only when exactly one
side holds; anything else is "inconclusive" with an escalation suggestion.
Regions of eps-equicontinuity points and their finite-depth intersections
are provided for the openness diagnostics.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .density import banach_upper_density, separation_set
from .pseudometrics import (
    EstimatorConfig,
    banach_mean,
    fiber_weyl,
    pair_source,
    sup_fiber_weyl,
)
from .rds import DTILDE_CONVENTION, RandomDynamicalSystem, torus_distance


@dataclass(frozen=True)
class ClassifierConfig:
    eps_list: tuple[float, ...] = (0.2, 0.1, 0.05)
    delta_grid: tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    pair_budget: int = 200
    point_budget: int = 4
    candidate_budget: int = 6
    delta0: float = 0.05
    eps_sequence: tuple[float, ...] = (0.1, 0.01, 1e-3, 1e-4, 1e-5, 1e-6)
    grid_resolution: int = 16

    def __post_init__(self):
        for name in ("eps_list", "delta_grid", "eps_sequence"):
            vals = getattr(self, name)
            if not vals or any(v <= 0 for v in vals):
                raise ValueError(f"{name} must be nonempty and positive")
        if any(b >= a for a, b in zip(self.delta_grid, self.delta_grid[1:])):
            raise ValueError("delta_grid must be strictly decreasing")
        if any(b >= a for a, b in zip(self.eps_sequence, self.eps_sequence[1:])):
            raise ValueError("eps_sequence must be strictly decreasing")
        if self.delta0 <= 0:
            raise ValueError("delta0 must be positive")
        for name in ("pair_budget", "point_budget", "candidate_budget", "grid_resolution"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ModulusRow:
    eps: float
    delta: float | None
    pairs_tested: int
    worst_value: float
    passed: bool


@dataclass(frozen=True)
class WmeResult:
    rows: tuple[ModulusRow, ...]
    passed: bool


@dataclass(frozen=True)
class StabilityRow:
    eps: float
    delta: float | None
    pairs_tested: int
    worst_density: float
    passed: bool


@dataclass(frozen=True)
class StabilityResult:
    rows: tuple[StabilityRow, ...]
    passed: bool
    chain_ok: bool
    chain_detail: str


@dataclass(frozen=True)
class WitnessRecord:
    eps: float
    witness: tuple[float, ...] | None
    value: float | None
    candidates_tried: int


@dataclass(frozen=True)
class SensitivityPoint:
    omega_label: str
    point: tuple[float, ...]
    records: tuple[WitnessRecord, ...]
    robust: bool


@dataclass(frozen=True)
class SensitivityResult:
    delta0: float
    eps_sequence: tuple[float, ...]
    points: tuple[SensitivityPoint, ...]
    passed: bool


@dataclass(frozen=True)
class RegionResult:
    omega_label: str
    eps: float
    resolution: int
    delta_grid: tuple[float, ...]
    members: tuple[tuple[tuple[float, ...], float], ...]
    non_members: tuple[tuple[float, ...], ...]

    @property
    def member_points(self) -> frozenset:
        return frozenset(pt for pt, _ in self.members)


def _sample_support_index(base, rng) -> int:
    support = base.support
    w = np.asarray([base.weights[i] for i in support], dtype=np.float64)
    w = w / w.sum()
    return support[int(rng.choice(len(support), p=w))]


def _sample_pair(system, delta, rng):
    idx = _sample_support_index(system.base, rng)
    fs = system.fibers[idx]
    x = fs.sample(rng)
    y = fs.sample_near(x, delta, rng)
    return idx, x, y


def _scan_until_failure(items, evaluate, fails, workers: int):
    """Evaluate items in order, stopping at the first failing result.

    Returns the evaluated results up to and including the failure. The
    result list does not depend on the worker count.
    """
    if workers <= 1:
        out = []
        for it in items:
            r = evaluate(it)
            out.append(r)
            if fails(r):
                break
        return out
    out = []
    chunk = max(8, workers * 4)
    with ThreadPoolExecutor(max_workers=workers) as ex:
        for start in range(0, len(items), chunk):
            for r in ex.map(evaluate, items[start:start + chunk]):
                out.append(r)
                if fails(out[-1]):
                    return out
    return out


def wme_test(
    system: RandomDynamicalSystem,
    cfg: EstimatorConfig,
    ccfg: ClassifierConfig,
    rng,
    workers: int = 1,
) -> WmeResult:
    """Modulus search: largest grid delta keeping all pair separations < eps."""
    rows = []
    for eps in ccfg.eps_list:
        found = None
        tested = 0
        worst = 0.0
        for delta in ccfg.delta_grid:
            pairs = [_sample_pair(system, delta, rng) for _ in range(ccfg.pair_budget)]
            vals = _scan_until_failure(
                pairs,
                lambda p: banach_mean(pair_source(system, p[1], p[2], "sup"), cfg).value,
                lambda v: v >= eps,
                workers,
            )
            tested = len(vals)
            worst = max(vals)
            if worst < eps:
                found = delta
                break
        rows.append(ModulusRow(eps, found, tested, worst, found is not None))
    return WmeResult(tuple(rows), all(r.passed for r in rows))


def mean_l_stable_test(
    system: RandomDynamicalSystem,
    cfg: EstimatorConfig,
    ccfg: ClassifierConfig,
    rng,
    workers: int = 1,
) -> StabilityResult:
    """Like the modulus search, with the separation-set density as criterion.

    Also verifies the pointwise chain eps * density <= banach + tolerance on
    every evaluated pair."""
    rows = []
    chain_ok = True
    chain_detail = ""

    def evaluate(pair, eps):
        _, x, y = pair
        src = pair_source(system, x, y, "sup")
        bd = banach_upper_density(separation_set(src, eps), cfg).value
        ban = banach_mean(src, cfg).value
        return bd, ban

    for eps in ccfg.eps_list:
        found = None
        tested = 0
        worst = 0.0
        for delta in ccfg.delta_grid:
            pairs = [_sample_pair(system, delta, rng) for _ in range(ccfg.pair_budget)]
            results = _scan_until_failure(
                pairs,
                lambda p: evaluate(p, eps),
                lambda r: r[0] >= eps,
                workers,
            )
            tested = len(results)
            worst = max(r[0] for r in results)
            for bd, ban in results:
                if eps * bd > ban + cfg.tolerance and chain_ok:
                    chain_ok = False
                    chain_detail = (
                        f"eps={eps:g}: eps*density {eps * bd:.6g} exceeds "
                        f"banach {ban:.6g}"
                    )
            if worst < eps:
                found = delta
                break
        rows.append(StabilityRow(eps, found, tested, worst, found is not None))
    return StabilityResult(
        tuple(rows), all(r.passed for r in rows), chain_ok, chain_detail
    )


def sensitivity_test(
    system: RandomDynamicalSystem,
    cfg: EstimatorConfig,
    ccfg: ClassifierConfig,
    rng,
) -> SensitivityResult:
    """Search shrinking balls for separation witnesses above delta0."""
    points = []
    for idx in system.base.support:
        fs = system.fibers[idx]
        for _ in range(ccfg.point_budget):
            points.append((idx, fs.sample(rng)))
    results = []
    for idx, x in points:
        fs = system.fibers[idx]
        records = []
        robust = True
        for eps in ccfg.eps_sequence:
            found_y = None
            found_v = None
            tried = 0
            for _ in range(ccfg.candidate_budget):
                tried += 1
                y = fs.sample_near(x, eps, rng)
                v = sup_fiber_weyl(system, x, y, cfg).value
                if v > ccfg.delta0:
                    found_y, found_v = y, v
                    break
            records.append(WitnessRecord(eps, found_y, found_v, tried))
            if found_y is None:
                robust = False
        results.append(
            SensitivityPoint(system.base.labels[idx], x, tuple(records), robust)
        )
    return SensitivityResult(
        ccfg.delta0,
        ccfg.eps_sequence,
        tuple(results),
        all(p.robust for p in results),
    )


def equicontinuity_region(
    system: RandomDynamicalSystem,
    omega,
    eps: float,
    cfg: EstimatorConfig,
    ccfg: ClassifierConfig,
    rng,
    resolution: int | None = None,
) -> RegionResult:
    """Grid points of the fiber domain with a certified modulus delta:
    sampled partners within delta keep the fiber Weyl separation below eps."""
    idx = system.base.index_of(omega)
    fs = system.fibers[idx]
    res = resolution if resolution is not None else ccfg.grid_resolution
    if res < 8:
        raise ValueError("grid resolution below 8 is too coarse to certify anything")
    members = []
    non_members = []
    for x in fs.grid(res):
        found = None
        for delta in ccfg.delta_grid:
            ok = True
            for _ in range(ccfg.candidate_budget):
                y = fs.sample_near(x, delta, rng)
                if fiber_weyl(system, x, y, idx, cfg).value >= eps:
                    ok = False
                    break
            if ok:
                found = delta
                break
        if found is None:
            non_members.append(x)
        else:
            members.append((x, found))
    return RegionResult(
        system.base.labels[idx], eps, res, ccfg.delta_grid,
        tuple(members), tuple(non_members),
    )


def openness_violations(region: RegionResult) -> list[tuple]:
    """Members whose delta/2-neighborhood on the grid leaves the region.

    Openness of the region predicts zero violations; each entry is
    (member point, offending neighbor)."""
    member_set = region.member_points
    all_points = [pt for pt, _ in region.members] + list(region.non_members)
    bad = []
    for pt, delta in region.members:
        for other in all_points:
            if other == pt:
                continue
            if torus_distance(pt, other) < delta / 2 and other not in member_set:
                bad.append((pt, other))
    return bad


def equicontinuous_point_set(
    system: RandomDynamicalSystem,
    max_depth: int,
    cfg: EstimatorConfig,
    ccfg: ClassifierConfig,
    rng,
    resolution: int | None = None,
) -> frozenset:
    """Finite-depth proxy of the equicontinuity points: grid points lying,
    for every m <= max_depth, in some support fiber's 1/m-region."""
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    result: frozenset | None = None
    for m in range(1, max_depth + 1):
        level = frozenset()
        for idx in system.base.support:
            region = equicontinuity_region(
                system, idx, 1.0 / m, cfg, ccfg, rng, resolution
            )
            level = level | region.member_points
        result = level if result is None else (result & level)
    return result if result is not None else frozenset()


# ---------------------------------------------------------------------------
# the dichotomy report

@dataclass(frozen=True)
class ClassificationReport:
    system: str
    verdict: str
    wme: WmeResult
    stability: StabilityResult
    sensitivity: SensitivityResult
    crosschecks: dict
    estimator: dict
    classifier: dict
    seed: int
    conventions: tuple[str, ...]
    suggestion: str | None

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "verdict": self.verdict,
            "seed": self.seed,
            "estimator": self.estimator,
            "classifier": self.classifier,
            "conventions": list(self.conventions),
            "suggestion": self.suggestion,
            "crosschecks": dict(self.crosschecks),
            "modulus_table": [dataclasses.asdict(r) for r in self.wme.rows],
            "wme_passed": self.wme.passed,
            "stability_table": [dataclasses.asdict(r) for r in self.stability.rows],
            "stability_passed": self.stability.passed,
            "chain_ok": self.stability.chain_ok,
            "chain_detail": self.stability.chain_detail,
            "sensitivity": {
                "delta0": self.sensitivity.delta0,
                "eps_sequence": list(self.sensitivity.eps_sequence),
                "passed": self.sensitivity.passed,
                "points": [
                    {
                        "omega": p.omega_label,
                        "point": list(p.point),
                        "robust": p.robust,
                        "records": [
                            {
                                "eps": r.eps,
                                "witness": list(r.witness) if r.witness else None,
                                "value": r.value,
                                "candidates_tried": r.candidates_tried,
                            }
                            for r in p.records
                        ],
                    }
                    for p in self.sensitivity.points
                ],
            },
        }

    def to_text(self) -> str:
        lines = [f"classification of {self.system}", f"verdict: {self.verdict}"]
        lines.append(
            "modulus table (all sampled pairs within delta keep banach separation < eps):"
        )
        for r in self.wme.rows:
            if r.delta is not None:
                lines.append(
                    f"  eps={r.eps:g}: delta={r.delta:g} "
                    f"({r.pairs_tested} pairs, worst {r.worst_value:.6g})"
                )
            else:
                lines.append(
                    f"  eps={r.eps:g}: no delta on the grid works "
                    f"(worst {r.worst_value:.6g})"
                )
        lines.append("separation-set density table (banach upper density < eps):")
        for r in self.stability.rows:
            if r.delta is not None:
                lines.append(
                    f"  eps={r.eps:g}: delta={r.delta:g} "
                    f"({r.pairs_tested} pairs, worst density {r.worst_density:.6g})"
                )
            else:
                lines.append(
                    f"  eps={r.eps:g}: no delta on the grid works "
                    f"(worst density {r.worst_density:.6g})"
                )
        robust = sum(1 for p in self.sensitivity.points if p.robust)
        lines.append(
            f"sensitivity (delta0={self.sensitivity.delta0:g}): "
            f"{robust}/{len(self.sensitivity.points)} sampled points have witnesses "
            f"at every eps down to {self.sensitivity.eps_sequence[-1]:g}"
        )
        for key, val in sorted(self.crosschecks.items()):
            lines.append(f"crosscheck {key}: {'ok' if val else 'FAILED'}")
        if self.suggestion:
            lines.append(f"suggestion: {self.suggestion}")
        return "\n".join(lines)


def dichotomy_report(
    system: RandomDynamicalSystem,
    cfg: EstimatorConfig | None = None,
    ccfg: ClassifierConfig | None = None,
    seed: int = 0,
    workers: int = 1,
) -> ClassificationReport:
    """Run all three probes and assemble the verdict."""
    cfg = cfg or EstimatorConfig()
    ccfg = ccfg or ClassifierConfig()
    rng = np.random.default_rng(seed)
    wme = wme_test(system, cfg, ccfg, rng, workers)
    stability = mean_l_stable_test(system, cfg, ccfg, rng, workers)
    sensitivity = sensitivity_test(system, cfg, ccfg, rng)

    if wme.passed and not sensitivity.passed:
        verdict = "wme-evidence"
    elif sensitivity.passed and not wme.passed:
        verdict = "sensitive-evidence"
    else:
        verdict = "inconclusive"

    crosschecks = {
        "wme_meanL_agree": all(
            w.passed == s.passed for w, s in zip(wme.rows, stability.rows)
        ),
        "quantitative_chain": stability.chain_ok,
        "verdicts_exclusive": not (wme.passed and sensitivity.passed),
        "dichotomy_consistent": wme.passed != sensitivity.passed,
    }
    suggestion = None
    if verdict == "inconclusive":
        suggestion = (
            "escalate the truncation: double n_max, m_max, and search_radius, "
            "and raise pair_budget; rerun with the same seed"
        )
    return ClassificationReport(
        system=system.name,
        verdict=verdict,
        wme=wme,
        stability=stability,
        sensitivity=sensitivity,
        crosschecks=crosschecks,
        estimator=cfg.to_dict(),
        classifier=ccfg.to_dict(),
        seed=seed,
        conventions=(DTILDE_CONVENTION,),
        suggestion=suggestion,
    )
