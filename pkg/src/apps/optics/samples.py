# src/apps/optics/samples.py
"""CSV round trip for sampled patterns (header `x_m,intensity_per_m`)."""

import csv

from apps.qubits.exceptions import SimulationError

from .patterns import IntensitySample

PATTERN_HEADER = ("x_m", "intensity_per_m")


class SampleFileError(SimulationError):
    default_detail = "Pattern file could not be parsed."
    default_code = "parse_failed"


def write_samples(samples, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(PATTERN_HEADER)
    for sample in samples:
        writer.writerow((repr(sample.x), repr(sample.value)))


def read_samples(stream):
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != PATTERN_HEADER:
        raise SampleFileError(f"Expected header {','.join(PATTERN_HEADER)}, got {header!r}.")
    samples = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            x, value = (float(cell) for cell in row)
            samples.append(IntensitySample(x, value))
        except ValueError as exc:
            raise SampleFileError(f"Line {line_no}: {exc}") from exc
    return samples
