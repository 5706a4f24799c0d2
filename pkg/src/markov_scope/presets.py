"""Named configurations carrying the parameters of each published figure."""
import math

from .channels import ChannelSpec, Constant, ExpDecay, NoiseAngles, SinSq, Tanh
from .config import ExperimentConfig, FidelityOptions
from .divisibility import TimeGrid

PERTURBED = math.pi / 2 + 0.1
FIG4_ANGLES = NoiseAngles(math.pi / 2 + 0.1, math.pi / 2 + 0.1, math.pi + 0.1)
FIG3_ALPHAS = tuple(k * math.pi / 12 for k in range(7))


def _single_scan(rate, t_max=10.0):
    return ExperimentConfig(
        "divisibility-scan",
        ChannelSpec.single("x", rate, PERTURBED),
        TimeGrid(t_max, 100),
    )


def _multi_scan(rates):
    spec = ChannelSpec(tuple(Constant(g) for g in rates), FIG4_ANGLES)
    return ExperimentConfig("divisibility-scan", spec, TimeGrid(5.0, 100))


def _fig3(gamma):
    return ExperimentConfig(
        "fidelity-vs-time",
        fidelity=FidelityOptions(gamma=gamma, alphas=FIG3_ALPHAS, t_points=500, t_max=5.0),
    )


PRESETS = {
    "fig1a": lambda: _single_scan(Constant(1.0)),
    "fig1b": lambda: _single_scan(Constant(2.0)),
    "fig1c": lambda: _single_scan(Constant(3.0)),
    "fig2": lambda: ExperimentConfig(
        "fidelity-p-alpha", fidelity=FidelityOptions(p_points=101, alpha_points=241)
    ),
    # panels d-f plot the identity-channel column of the same scans
    "fig3a": lambda: _fig3(1.0),
    "fig3b": lambda: _fig3(2.0),
    "fig3c": lambda: _fig3(3.0),
    "fig3d": lambda: _fig3(1.0),
    "fig3e": lambda: _fig3(2.0),
    "fig3f": lambda: _fig3(3.0),
    "fig4a": lambda: _multi_scan((1.0, 0.5, 1.5)),
    "fig4b": lambda: _multi_scan((1.0, 0.0, 1.5)),
    "fig5a": lambda: _single_scan(SinSq(math.pi / 2)),
    "fig5b": lambda: _single_scan(ExpDecay(1.0)),
    "fig5c": lambda: _single_scan(Tanh(1.0)),
}


def get_preset(name):
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
