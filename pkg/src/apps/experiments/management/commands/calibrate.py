# src/apps/experiments/management/commands/calibrate.py

from apps.experiments.base import ExperimentCommand
from apps.experiments.serializers import CalibrationReportSerializer
from apps.fitting.fits import attenuation_from_areas
from apps.montecarlo.simulation import calibrate_to_table
from apps.optics.patterns import crossing_point


class Command(ExperimentCommand):
    help = (
        "Derives the focal length, the fringe visibility, the coincidence-run visibility "
        "and herald rate, and the modulator attenuation from the quoted measurements (JSON)."
    )

    def run(self, experiment, options):
        calibration = experiment.calibration
        table_visibility, herald_rate = calibrate_to_table(
            calibration["counts_constant"],
            calibration["counts_balanced"],
            experiment.monte_carlo["duration"],
            experiment.calibration_detector(),
            experiment.model,
        )
        ratio, (population_0, population_1) = attenuation_from_areas(calibration["area_neg"], calibration["area_pos"])
        report = {
            "focal_length": experiment.geometry.focal_length,
            # The crossing does not move with V, so it is located on the ideal pattern.
            "crossing_point": crossing_point(experiment.model.with_visibility(1.0)),
            "visibility": experiment.calibrated_visibility(),
            "target_success": calibration["target_success"],
            "table_visibility": table_visibility,
            "herald_rate": herald_rate,
            "attenuation": {
                "area_neg": calibration["area_neg"],
                "area_pos": calibration["area_pos"],
                "amplitude_ratio": ratio,
                "population_0": population_0,
                "population_1": population_1,
            },
        }
        self.write_json(CalibrationReportSerializer(report).data, options["out"])
