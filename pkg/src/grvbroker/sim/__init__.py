from .clock import SimClock
from .config import ScenarioConfig, WorkloadSpec, load_config, parse_config
from .dataset import ingest_dataset, qws_attributes
from .models import ProviderModel, provider_sample
from .scenario import RunReport, run_scenario, schedule_measurements, summarize_directory

__all__ = [
    "ProviderModel",
    "RunReport",
    "ScenarioConfig",
    "SimClock",
    "WorkloadSpec",
    "ingest_dataset",
    "load_config",
    "parse_config",
    "provider_sample",
    "qws_attributes",
    "run_scenario",
    "schedule_measurements",
    "summarize_directory",
]
