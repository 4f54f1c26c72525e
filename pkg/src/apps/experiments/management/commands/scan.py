# src/apps/experiments/management/commands/scan.py

from pathlib import Path

from apps.detection.povm import detection_probabilities
from apps.detection.serializers import ProbabilityTableSerializer
from apps.experiments.base import ExperimentCommand
from apps.inference.betting import evaluate_bet, scan_detector_width
from apps.inference.serializers import BetOutcomeSerializer, ScanSummarySerializer, write_scan_curve


class Command(ExperimentCommand):
    help = (
        "Scans P(S) against detector width. Writes the curve to --out (CSV) and the "
        "optimum, with its p_ij table and posteriors, next to it as <stem>.summary.json; "
        "without --out only the summary is printed."
    )

    def add_experiment_arguments(self, parser):
        parser.add_argument(
            "--calibrate",
            action="store_true",
            help="Fit the visibility to calibration.target_success before scanning.",
        )

    def run(self, experiment, options):
        model = experiment.calibrated_model() if options["calibrate"] else experiment.model
        scan = experiment.config["scan"]
        result = scan_detector_width(
            model,
            experiment.detector.efficiency,
            scan["w_min"],
            scan["w_max"],
            scan["step"],
            center=experiment.detector.center,
        )
        # Landing probabilities are tabulated at eta = 1; the bet applies the efficiency.
        optimum = experiment.detector.with_width(result.optimal_width).with_efficiency(1.0)
        table = detection_probabilities(model, optimum)
        summary = {
            **ScanSummarySerializer(result).data,
            "probabilities": ProbabilityTableSerializer(table).data,
            "bet": BetOutcomeSerializer(evaluate_bet(table, experiment.detector.efficiency)).data,
        }
        if options["out"] is None:
            self.write_json(summary)
            return
        out = Path(options["out"])
        with self.open_output(out) as stream:
            write_scan_curve(result, stream)
        self.write_json(summary, out.with_suffix(".summary.json"))
