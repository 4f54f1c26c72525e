# src/apps/experiments/management/commands/table.py

from apps.experiments.base import ExperimentCommand
from apps.experiments.serializers import CoincidenceTableSerializer
from apps.montecarlo.simulation import RunConfig, calibrate_to_table, simulate_table
from apps.qubits.states import ALL_ORACLES


class Command(ExperimentCommand):
    help = "Simulates the coincidence counts of all four oracles (JSON)."
    needs_seed = True

    def add_experiment_arguments(self, parser):
        parser.add_argument(
            "--no-calibrate",
            action="store_true",
            help="Use the configured visibility and herald rate instead of fitting them to the quoted counts.",
        )

    def run(self, experiment, options):
        monte_carlo = experiment.monte_carlo
        if options["no_calibrate"]:
            model, herald_rate = experiment.model, monte_carlo["herald_rate"]
        else:
            calibration = experiment.calibration
            visibility, herald_rate = calibrate_to_table(
                calibration["counts_constant"],
                calibration["counts_balanced"],
                monte_carlo["duration"],
                experiment.calibration_detector(),
                experiment.model,
            )
            model = experiment.model.with_visibility(visibility)

        cfg = RunConfig(ALL_ORACLES[0], model, experiment.detector, herald_rate, monte_carlo["duration"], experiment.seed)
        table = {
            "seed": cfg.seed,
            "visibility": model.visibility,
            "herald_rate": herald_rate,
            "duration": cfg.duration,
            "calibrated": not options["no_calibrate"],
            "rows": simulate_table(cfg),
        }
        self.write_json(CoincidenceTableSerializer(table).data, options["out"])
