"""Seeded simulator of UAV-assisted wildfire-sensor data collection with
AoI-minimizing schedulers: an LLM in-context-learning controller, a PPO
baseline and greedy heuristics, over an air-to-ground LoS channel model."""

from .config import ConfigError, WorldConfig, validate_config
from .env import HorizonError, World, init_world, observe, run_episode, step
from .states import Action, Observation, RunSummary, SensorState, StepRecord, UavState

__all__ = [
    "ConfigError", "WorldConfig", "validate_config", "HorizonError", "World",
    "init_world", "observe", "run_episode", "step", "Action", "Observation",
    "RunSummary", "SensorState", "StepRecord", "UavState",
]

__version__ = "0.1.0"
