# src/apps/experiments/experiment.py
"""
Resolved experiment: the validated config plus the domain objects built from it.

Config files are JSON documents laid over settings.SIMULATION; command-line
overrides are laid over the file. ExperimentConfigSerializer validates the
result and builds an Experiment.
"""

import copy
import json
import logging
from dataclasses import dataclass

from django.conf import settings

from apps.biphoton.heralding import HeraldWindow
from apps.detection.povm import DetectorConfig
from apps.inference.betting import calibrate_visibility
from apps.optics.patterns import PatternModel, SlitGeometry
from apps.qubits.exceptions import SimulationError

logger = logging.getLogger(__name__)


class MissingSeed(SimulationError):
    default_detail = "A seed is required: pass --seed or set monte_carlo.seed."
    default_code = "missing_seed"


def default_config():
    return copy.deepcopy(settings.SIMULATION)


def merge_config(base, overrides):
    """Recursive dict update; keys unknown to `base` are carried over for the validator to reject."""
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_config(merged[key], value)
        else:
            merged[key] = value
    return merged


def read_config_file(stream):
    """Parses a config document; a geometry that names only a focal length drops the default crossing point."""
    document = json.load(stream)
    geometry = document.get("geometry") if isinstance(document, dict) else None
    if isinstance(geometry, dict) and geometry.get("focal_length") is not None and "crossing_point" not in geometry:
        geometry["crossing_point"] = None
    return document


def dump_config(config, stream):
    json.dump(config, stream, sort_keys=True, indent=2)
    stream.write("\n")


@dataclass(frozen=True)
class Experiment:
    config: dict
    geometry: SlitGeometry
    model: PatternModel
    detector: DetectorConfig
    herald: HeraldWindow

    @property
    def seed(self):
        seed = self.config["monte_carlo"]["seed"]
        if seed is None:
            raise MissingSeed()
        return seed

    @property
    def monte_carlo(self):
        return self.config["monte_carlo"]

    @property
    def calibration(self):
        return self.config["calibration"]

    def calibration_detector(self):
        """The configured detector resized to the slit the calibration data were taken with."""
        return self.detector.with_width(self.calibration["detector_width"])

    def calibrated_visibility(self):
        return calibrate_visibility(self.model, self.calibration_detector(), self.calibration["target_success"])

    def calibrated_model(self):
        return self.model.with_visibility(self.calibrated_visibility())
