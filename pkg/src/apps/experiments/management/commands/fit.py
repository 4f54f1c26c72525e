# src/apps/experiments/management/commands/fit.py

from apps.experiments.base import ExperimentCommand
from apps.fitting.fits import fit_pattern_pair
from apps.fitting.serializers import FitResultSerializer
from apps.optics.samples import read_samples


class Command(ExperimentCommand):
    help = "Fits a reference and a shifted Fourier-plane pattern and reports their relative phase (JSON)."

    def add_experiment_arguments(self, parser):
        parser.add_argument("reference", help="CSV with header x_m,intensity_per_m.")
        parser.add_argument("shifted", help="CSV with header x_m,intensity_per_m.")

    def read(self, path):
        with open(path, newline="", encoding="utf-8") as stream:
            return read_samples(stream)

    def run(self, experiment, options):
        result = fit_pattern_pair(self.read(options["reference"]), self.read(options["shifted"]), experiment.geometry)
        self.write_json(FitResultSerializer(result).data, options["out"])
