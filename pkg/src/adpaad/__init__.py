"""Classical and simulated-quantum PAAD anomaly detection for time series."""
from .classical_adpaad import ClassicalResult, UndefinedScoresError, run_classical
from .kernels import BACKEND
from .qadpaad import AnomalyReport, PipelineConfig, QuantumADPAAD, run_pipeline
from .timeseries import SeriesError, TimeSeries, load_series

__all__ = [
    "BACKEND", "AnomalyReport", "ClassicalResult", "PipelineConfig", "QuantumADPAAD",
    "SeriesError", "TimeSeries", "UndefinedScoresError", "load_series", "run_classical",
    "run_pipeline",
]
__version__ = "0.1.0"
