# src/apps/experiments/management/commands/herald.py

from apps.biphoton.heralding import herald_report
from apps.biphoton.serializers import HeraldReportSerializer
from apps.experiments.base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Reports the signal state prepared by the herald window and checks oracle commutation (JSON)."

    def add_experiment_arguments(self, parser):
        parser.add_argument("--herald-x", type=float, help="Window centre in metres.")
        parser.add_argument("--herald-width", type=float, help="Window width in metres; 0 is a point detector.")

    def config_overrides(self, options):
        window = {}
        if options["herald_x"] is not None:
            window["center"] = options["herald_x"]
        if options["herald_width"] is not None:
            window["width"] = options["herald_width"]
        return {"herald": window} if window else {}

    def run(self, experiment, options):
        report = herald_report(experiment.herald, experiment.geometry)
        self.write_json(HeraldReportSerializer(report).data, options["out"])
