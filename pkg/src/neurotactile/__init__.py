"""Deterministic simulator of an event-driven neuromorphic tactile pipeline.

Stages: piezoresistive sensor array -> spike coding -> synaptic-transistor
accumulation -> multi-threshold quantization -> serial wire units -> windowed
peak analysis -> Morse and symbol recognition.
"""

from .analyzer import (
    Segment,
    SegmentClass,
    SegmentTracker,
    WindowReport,
    classify_segment,
    count_peaks,
    segment_stream,
    window_reduce,
)
from .calibrate import calibrate, evaluate, probe_counts
from .encoder import (
    EncoderConfig,
    Pulse,
    PulseTrain,
    encode_trace,
    frequency_hz,
    period_ms,
    scale_amplitude,
    voltage_for_frequency,
)
from .errors import (
    CalibrationError,
    ConfigurationError,
    ContractError,
    DomainError,
    FormatError,
    FramingError,
    IntegrityError,
    RangeError,
    RoutingError,
    SimulationError,
)
from .morse import DEFAULT_MORSE_TABLE, decode_morse
from .mlp import MlpModel, TrainConfig, forward, init_model, load_model, save_model, train
from .pipeline import (
    AnalyzerConfig,
    ConstantVoltage,
    CsvTrace,
    EfficiencyReport,
    FrameTrace,
    MorseTimings,
    PipelineEngine,
    PressEvent,
    PressProgram,
    RunReport,
    ScenarioConfig,
    build_morse_program,
    build_ramp_trace,
    run_scenario,
)
from .quantizer import CodeFrame, ThresholdBank, code_from_bits, comparator_bits, quantize
from .sensor import (
    DividerConfig,
    PressureFrame,
    SensitivityCurve,
    SensorConfig,
    SensorGeometry,
    current_ratio,
    current_ratio_from_voltage,
    divider_voltage,
    read_pressure_csv,
    resistance,
    sensitivity_analytic,
    voltage_trace,
)
from .symbols import (
    CLASS_MASKS,
    CLASS_NAMES,
    SymbolDataset,
    SymbolSample,
    featurize,
    gen_symbol_dataset,
    split_dataset,
)
from .synapse import (
    SynapseParams,
    SynapseState,
    drain_current,
    peak_metrics,
    simulate,
    step,
    uniform_train,
)
from .wire import CodecConfig, WireUnit, from_wire, pack, to_wire, unpack, window_size

__version__ = "0.1.0"
