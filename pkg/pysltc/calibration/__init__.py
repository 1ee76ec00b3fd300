from .simulator import Simulator, SimulationRun
from .calibrator import CalibrationConfig, CalibrationState, Calibrator, run_calibration
from .artifacts import ArtifactWriter
from .report import render_report
