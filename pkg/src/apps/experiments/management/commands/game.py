# src/apps/experiments/management/commands/game.py

from apps.experiments.base import ExperimentCommand
from apps.inference.betting import DecisionRule
from apps.montecarlo.serializers import GameResultSerializer
from apps.montecarlo.simulation import play_single_shot_game


class Command(ExperimentCommand):
    help = "Plays the single-query betting game and compares the frequency with P(S) (JSON)."
    needs_seed = True

    def add_experiment_arguments(self, parser):
        parser.add_argument("--trials", type=int)
        parser.add_argument(
            "--rule",
            choices=[rule.value for rule in DecisionRule],
            default=DecisionRule.DETECT_CONSTANT.value,
            help="Hypothesis bet on after a click.",
        )
        parser.add_argument(
            "--calibrate",
            action="store_true",
            help="Fit the visibility to calibration.target_success first.",
        )

    def config_overrides(self, options):
        if options["trials"] is None:
            return {}
        return {"monte_carlo": {"trials": options["trials"]}}

    def run(self, experiment, options):
        model = experiment.calibrated_model() if options["calibrate"] else experiment.model
        monte_carlo = experiment.monte_carlo
        rule = DecisionRule(options["rule"])
        result = play_single_shot_game(
            monte_carlo["trials"],
            model,
            experiment.detector,
            experiment.detector.efficiency,
            experiment.seed,
            rule=rule,
            block_size=monte_carlo["block_size"],
            workers=monte_carlo["workers"],
        )
        payload = dict(GameResultSerializer(result).data)
        payload.update(rule=rule.value, visibility=model.visibility)
        self.write_json(payload, options["out"])
