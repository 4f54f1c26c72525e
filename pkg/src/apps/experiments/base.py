# src/apps/experiments/base.py

import json
import logging
import sys
from contextlib import contextmanager

from django.core.management.base import BaseCommand
from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from apps.qubits.exceptions import SimulationError

from .experiment import MissingSeed, default_config, dump_config, merge_config, read_config_file
from .serializers import ExperimentConfigSerializer

# --- Exit Codes ---
CONFIG_ERROR = 2
DOMAIN_ERROR = 3
IO_ERROR = 4


class ExperimentCommand(BaseCommand):
    """
    Shared plumbing for the simulator commands.

    Resolves the config (defaults, then --config, then command options, then
    --seed), validates it, hands the resulting Experiment to run(), and turns
    failures into one JSON object on stderr plus a nonzero exit status.
    """
    requires_system_checks = []
    # Commands that draw random numbers refuse to run without an explicit seed.
    needs_seed = False

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = lambda message: self.fail("invalid_arguments", message, CONFIG_ERROR)
        return parser

    def add_arguments(self, parser):
        parser.add_argument("--config", help="JSON experiment config laid over the built-in defaults.")
        parser.add_argument("--seed", type=int, help="Unsigned 64-bit seed for every random draw.")
        parser.add_argument("--out", help="Output file; standard output when omitted.")
        parser.add_argument("--dump-config", help="Write the effective config as JSON (sorted keys) to this path.")
        self.add_experiment_arguments(parser)

    def add_experiment_arguments(self, parser):
        pass

    def config_overrides(self, options):
        """Config fragment set by command-specific options."""
        return {}

    def run(self, experiment, options):
        raise NotImplementedError("Subclasses of ExperimentCommand must implement run().")

    def handle(self, *args, **options):
        app_logger = logging.getLogger("apps")
        previous_level = app_logger.level
        if options["verbosity"] >= 2:
            app_logger.setLevel(logging.DEBUG)
        try:
            experiment = self.load_experiment(options)
            self.run(experiment, options)
        except serializers.ValidationError as exc:
            self.fail("invalid_config", exc.detail, CONFIG_ERROR)
        except SimulationError as exc:
            self.exit_with(exc.as_dict(), DOMAIN_ERROR)
        except OSError as exc:
            self.fail("io_error", str(exc), IO_ERROR)
        finally:
            app_logger.setLevel(previous_level)

    # --- Config ---
    def load_experiment(self, options):
        config = default_config()
        if options["config"]:
            with open(options["config"], encoding="utf-8") as stream:
                try:
                    document = read_config_file(stream)
                except json.JSONDecodeError as exc:
                    raise serializers.ValidationError({"config": [f"Not valid JSON: {exc}"]})
            if not isinstance(document, dict):
                raise serializers.ValidationError({"config": ["Expected a JSON object."]})
            config = merge_config(config, document)
        config = merge_config(config, self.config_overrides(options))
        if options["seed"] is not None:
            config = merge_config(config, {"monte_carlo": {"seed": options["seed"]}})

        serializer = ExperimentConfigSerializer(data=config)
        serializer.is_valid(raise_exception=True)
        experiment = serializer.save()
        if options["dump_config"]:
            with open(options["dump_config"], "w", encoding="utf-8") as stream:
                dump_config(serializer.validated_data, stream)
        if self.needs_seed and experiment.monte_carlo["seed"] is None:
            raise MissingSeed()
        return experiment

    # --- Output ---
    @contextmanager
    def open_output(self, path):
        if path is None:
            yield self.stdout
            return
        with open(path, "w", newline="", encoding="utf-8") as stream:
            yield stream

    def write_json(self, data, path=None):
        text = JSONRenderer().render(data, renderer_context={"indent": 2}).decode("utf-8")
        with self.open_output(path) as stream:
            stream.write(text + "\n")

    def fail(self, code, detail, returncode):
        self.exit_with({"error": code, "detail": detail}, returncode)

    def exit_with(self, payload, returncode):
        self.stderr.write(json.dumps(payload, sort_keys=True), style_func=lambda text: text)
        sys.exit(returncode)
