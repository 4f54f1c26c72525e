# src/apps/inference/serializers.py

import csv

from rest_framework import serializers

SCAN_HEADER = ("width_m", "p_success")


class BetOutcomeSerializer(serializers.Serializer):
    p_success = serializers.FloatField(read_only=True)
    posterior_constant_given_detection = serializers.FloatField(read_only=True)
    posterior_balanced_given_no_detection = serializers.FloatField(read_only=True)
    decision_rule = serializers.CharField(source="decision_rule.value", read_only=True)


class ScanSummarySerializer(serializers.Serializer):
    """JSON summary written next to the scan CSV."""
    optimal_width_m = serializers.FloatField(source="optimal_width", read_only=True)
    optimal_p = serializers.FloatField(read_only=True)
    visibility = serializers.FloatField(read_only=True)
    eta = serializers.FloatField(read_only=True)
    points = serializers.SerializerMethodField()

    def get_points(self, obj):
        return len(obj.widths)


def write_scan_curve(result, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SCAN_HEADER)
    for width, p in zip(result.widths, result.p_success_curve):
        writer.writerow((repr(width), repr(p)))
