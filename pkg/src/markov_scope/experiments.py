"""Experiment drivers: turn an :class:`ExperimentConfig` into a result table."""
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Sequence

import numpy as np

from .channels import ChannelSpec, Constant, NoiseAngles
from .divisibility import (
    EIGEN_COLUMNS,
    TimeGrid,
    Verdict,
    check_cp_divisibility,
    check_semigroup,
    semigroup_defects,
)
from .fidelity import fidelity_scan_p_alpha, fidelity_vs_time

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NON_MARKOVIAN = 2

FIDELITY_COLUMNS = ("p_or_t", "alpha", "f_ideal_vs_noisy", "f_identity_vs_noisy")
DIVISIBILITY_COLUMNS = ("t", "s") + EIGEN_COLUMNS
SEMIGROUP_COLUMNS = ("t", "s", "defect")
CAMPAIGN_COLUMNS = (
    "rate_index", "draw_index", "gamma_x", "gamma_y", "gamma_z", "alpha", "beta", "omega",
    "verdict", "min_eigenvalue", "argmin_t", "argmin_s", "semigroup_defect",
)


@dataclass
class ResultTable:
    experiment: str
    seed: int
    columns: Sequence[str]
    rows: List[Sequence]
    summary: Dict = field(default_factory=dict)
    exit_code: int = EXIT_OK


@dataclass(frozen=True)
class CampaignSummary:
    n_rate_choices: int
    n_noise_draws: int
    n_time_pairs: int
    n_markovian: int
    n_non_markovian: int
    n_not_invertible: int
    worst_min_eigenvalue: float
    seed: int
    n_semigroup_broken: int = 0
    n_degenerate: int = 0


def _divisibility(config):
    grid = config.resolved_grid()
    report = check_cp_divisibility(config.channel, grid, config.tolerance)
    summary = {
        "verdict": report.verdict.value,
        "min_eigenvalue": report.min_eigenvalue,
        "argmin_t": report.argmin[0],
        "argmin_s": report.argmin[1],
        "tolerance": report.tolerance_used,
        "t_max": grid.t_max,
        "points": grid.points,
        "not_invertible_at": list(report.not_invertible_at),
    }
    code = EXIT_NON_MARKOVIAN if report.verdict is Verdict.NON_MARKOVIAN else EXIT_OK
    rows = [tuple(r) for r in report.eigenvalue_trace]
    return ResultTable(config.experiment, config.seed, DIVISIBILITY_COLUMNS, rows, summary, code)


def _semigroup(config):
    grid = config.resolved_grid()
    res = check_semigroup(config.channel, grid, config.tolerance)
    summary = {
        "is_semigroup": res.is_semigroup,
        "max_defect": res.max_defect,
        "argmax_t": res.argmax[0],
        "argmax_s": res.argmax[1],
        "tolerance": config.tolerance,
    }
    rows = [tuple(r) for r in semigroup_defects(config.channel, grid)]
    return ResultTable(config.experiment, config.seed, SEMIGROUP_COLUMNS, rows, summary)


def _fidelity_table(config, scan_rows):
    rows = [(r.p_or_t, r.alpha, r.f_ideal_vs_noisy, r.f_identity_vs_noisy) for r in scan_rows]
    f = np.array([r[2] for r in rows])
    g = np.array([r[3] for r in rows])
    summary = {
        "min_f_ideal_vs_noisy": float(f.min()),
        "min_f_identity_vs_noisy": float(g.min()),
        "rows": len(rows),
    }
    return ResultTable(config.experiment, config.seed, FIDELITY_COLUMNS, rows, summary)


def _fidelity_p_alpha(config):
    opt = config.fidelity
    return _fidelity_table(config, fidelity_scan_p_alpha(opt.p_points, opt.alpha_points, opt.axis))


def _fidelity_vs_time(config):
    opt = config.fidelity
    scan = fidelity_vs_time(opt.gamma, opt.alphas, opt.t_points, opt.t_max, opt.axis)
    return _fidelity_table(config, scan)


def _draw_specs(config):
    """Yield ``(rate_index, draw_index, spec)``; deterministic in ``config.seed``.

    Each rate choice gets its own child stream, so changing ``n_draws`` never
    changes the rates drawn.
    """
    opt = config.campaign
    lo, hi = opt.rate_range
    children = np.random.SeedSequence(config.seed).spawn(opt.n_rates)
    for ri, child in enumerate(children):
        rng = np.random.default_rng(child)
        # uniform on (lo, hi]
        gammas = hi - (hi - lo) * rng.random(1 if opt.mode == "single" else 3)
        for di in range(opt.n_draws):
            if opt.mode == "single":
                angle = 2 * math.pi * rng.random()
                spec = ChannelSpec.single(opt.axis, Constant(float(gammas[0])), angle)
            else:
                angles = NoiseAngles(*(2 * math.pi * rng.random(3)))
                spec = ChannelSpec(tuple(Constant(float(g)) for g in gammas), angles)
            yield ri, di, spec


def run_campaign(config, n_rates=None, n_draws=None):
    """Sample rates and noise angles and run the divisibility check on each draw.

    Returns ``(CampaignSummary, rows)``.
    """
    opt = config.campaign
    opt = replace(
        opt,
        n_rates=opt.n_rates if n_rates is None else n_rates,
        n_draws=opt.n_draws if n_draws is None else n_draws,
    )
    if opt.n_rates < 1 or opt.n_draws < 1:
        raise ValueError("n_rates and n_draws must be >= 1")
    config = replace(config, campaign=opt)
    counts = {v: 0 for v in Verdict}
    worst = math.inf
    broken = 0
    degenerate = 0
    n_pairs = 0
    rows = []
    for ri, di, spec in _draw_specs(config):
        if opt.mode == "multi" and not all(r.active for r in spec.rates):
            degenerate += 1
        grid = config.grid if config.grid is not None else TimeGrid.default_for(spec)
        n_pairs = max(n_pairs, grid.n_pairs)
        report = check_cp_divisibility(spec, grid, config.tolerance)
        counts[report.verdict] += 1
        worst = min(worst, report.min_eigenvalue)
        defect = float("nan")
        if opt.check_semigroup:
            sg = check_semigroup(spec, grid, config.tolerance)
            defect = sg.max_defect
            broken += not sg.is_semigroup
        rows.append((ri, di, *(r.gamma for r in spec.rates), *spec.noise.as_tuple(),
                     report.verdict.value, report.min_eigenvalue, *report.argmin, defect))
    summary = CampaignSummary(
        n_rate_choices=opt.n_rates,
        n_noise_draws=opt.n_draws,
        n_time_pairs=n_pairs,
        n_markovian=counts[Verdict.MARKOVIAN],
        n_non_markovian=counts[Verdict.NON_MARKOVIAN],
        n_not_invertible=counts[Verdict.NOT_INVERTIBLE],
        worst_min_eigenvalue=float(worst),
        seed=config.seed,
        n_semigroup_broken=broken,
        n_degenerate=degenerate,
    )
    return summary, rows


def _campaign(config):
    summary, rows = run_campaign(config)
    code = EXIT_NON_MARKOVIAN if summary.n_non_markovian else EXIT_OK
    return ResultTable(config.experiment, config.seed, CAMPAIGN_COLUMNS, rows, asdict(summary), code)


_DISPATCH = {
    "divisibility-scan": _divisibility,
    "semigroup-check": _semigroup,
    "fidelity-p-alpha": _fidelity_p_alpha,
    "fidelity-vs-time": _fidelity_vs_time,
    "robustness-campaign": _campaign,
}


def run_experiment(config):
    """Run the configured experiment and return its :class:`ResultTable`."""
    return _DISPATCH[config.experiment](config)
