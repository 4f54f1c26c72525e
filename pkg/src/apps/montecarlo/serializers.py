# src/apps/montecarlo/serializers.py

from rest_framework import serializers


class CountResultSerializer(serializers.Serializer):
    """One coincidence row: {f, coincidences, expected, std_error, seed}."""
    f = serializers.CharField(source="oracle", read_only=True)
    coincidences = serializers.IntegerField(read_only=True)
    expected = serializers.FloatField(read_only=True)
    std_error = serializers.FloatField(read_only=True)
    seed = serializers.IntegerField(read_only=True)


class GameResultSerializer(serializers.Serializer):
    trials = serializers.IntegerField(read_only=True)
    successes = serializers.IntegerField(read_only=True)
    frequency = serializers.FloatField(read_only=True)
    std_error = serializers.FloatField(read_only=True)
    analytic = serializers.FloatField(read_only=True)
    seed = serializers.IntegerField(read_only=True)
