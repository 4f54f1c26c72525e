# src/apps/experiments/management/commands/pattern.py

from apps.biphoton.heralding import conditional_signal_state
from apps.experiments.base import ExperimentCommand
from apps.optics.patterns import sample_pattern
from apps.optics.samples import write_samples
from apps.qubits.states import OracleFunction, deutsch_output


class Command(ExperimentCommand):
    help = "Samples the Fourier- or image-plane pattern of an oracle output or a heralded signal (CSV)."

    def add_experiment_arguments(self, parser):
        parser.add_argument("--plane", choices=("fourier", "image"), default="fourier")
        selector = parser.add_mutually_exclusive_group(required=True)
        selector.add_argument("--oracle", help="Oracle label ij, meaning f(0)=i and f(1)=j.")
        selector.add_argument("--herald-x", type=float, help="Idler detection position in metres.")
        # Negative values need the --x-min=-1e-3 form.
        parser.add_argument("--x-min", type=float)
        parser.add_argument("--x-max", type=float)
        parser.add_argument("--step", type=float)

    def config_overrides(self, options):
        grid = {key: options[key] for key in ("x_min", "x_max", "step") if options[key] is not None}
        return {"pattern": grid} if grid else {}

    def run(self, experiment, options):
        if options["oracle"] is not None:
            state = deutsch_output(OracleFunction.from_label(options["oracle"]))
        else:
            state = conditional_signal_state(options["herald_x"], experiment.geometry)
        grid = experiment.config["pattern"]
        samples = sample_pattern(
            state,
            experiment.model,
            grid["x_min"],
            grid["x_max"],
            grid["step"],
            plane=options["plane"],
            magnification=experiment.config["geometry"]["magnification"],
        )
        with self.open_output(options["out"]) as stream:
            write_samples(samples, stream)
