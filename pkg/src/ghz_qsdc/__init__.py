"""Simulation of simultaneous multi-party quantum secure direct communication over GHZ states."""

from .adversary import (
    Channel,
    ChannelRefused,
    Disturbance,
    DisturbanceConfig,
    EveReport,
    InterceptResend,
    InterceptResendConfig,
    disturbance,
    eve_information,
    intercept_resend,
    null_channel,
)
from .encoding import DecodeError, decode_others, encode_bit, encode_dibit
from .harness import ExperimentSpec, StatsRecord, detection_curve, load_spec, run_experiment
from .protocol import MessagePlan, SessionConfig, SessionResult, run_session
from .quantum import (
    GhzIndex,
    IndexDelta,
    MeasBasis,
    PauliOp,
    QuantumRegistry,
    QubitLabel,
    StateVector,
    apply_pauli,
    ghz_measure,
    ghz_state,
    inner_product,
    measure_joint,
    measure_single,
    outcome_is_consistent,
    display_label,
    pauli_delta,
)

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "ChannelRefused",
    "DecodeError",
    "Disturbance",
    "DisturbanceConfig",
    "EveReport",
    "ExperimentSpec",
    "GhzIndex",
    "IndexDelta",
    "InterceptResend",
    "InterceptResendConfig",
    "MeasBasis",
    "MessagePlan",
    "PauliOp",
    "QuantumRegistry",
    "QubitLabel",
    "SessionConfig",
    "SessionResult",
    "StateVector",
    "StatsRecord",
    "apply_pauli",
    "decode_others",
    "detection_curve",
    "disturbance",
    "encode_bit",
    "encode_dibit",
    "eve_information",
    "ghz_measure",
    "ghz_state",
    "inner_product",
    "intercept_resend",
    "load_spec",
    "measure_joint",
    "measure_single",
    "null_channel",
    "outcome_is_consistent",
    "display_label",
    "pauli_delta",
    "run_experiment",
    "run_session",
]
