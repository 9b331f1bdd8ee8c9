"""Pulse-level simulator for robust microwave-driven iSWAP gates on
exchange-coupled spin qubits."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    DriveSettings,
    ErrorRealization,
    ExchangeVoltageModel,
    SystemParams,
)
from .schemes import (  # noqa: E402
    PulseSequence,
    SchemeSpec,
    compile_scheme,
    dcg_error_amplitude,
    ideal_target,
    inject_errors,
)
from .dynamics import (  # noqa: E402
    DecoherenceParams,
    IntegratorConfig,
    NoiseAveragingConfig,
    lindblad_propagate,
    propagate_full,
    propagate_rwa,
    sample_noise,
)
from .metrics import average_gate_fidelity, infidelity, state_fidelity  # noqa: E402
from .experiments import EXPERIMENTS, ResultGrid, SweepSpec, make_sweep_spec, run_sweep  # noqa: E402

__all__ = [
    "__version__",
    "DriveSettings",
    "ErrorRealization",
    "ExchangeVoltageModel",
    "SystemParams",
    "PulseSequence",
    "SchemeSpec",
    "compile_scheme",
    "dcg_error_amplitude",
    "ideal_target",
    "inject_errors",
    "DecoherenceParams",
    "IntegratorConfig",
    "NoiseAveragingConfig",
    "lindblad_propagate",
    "propagate_full",
    "propagate_rwa",
    "sample_noise",
    "average_gate_fidelity",
    "infidelity",
    "state_fidelity",
    "EXPERIMENTS",
    "ResultGrid",
    "SweepSpec",
    "make_sweep_spec",
    "run_sweep",
]
