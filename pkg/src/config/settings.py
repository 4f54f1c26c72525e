# src/config/settings.py

import os
from pathlib import Path
from dotenv import load_dotenv

# --- Base Directories ---
BASE_DIR = Path(__file__).resolve().parent.parent
PROJECT_ROOT = BASE_DIR.parent

# --- Environment Variables ---
load_dotenv(os.path.join(PROJECT_ROOT, ".env"))


def _env_float(name, default):
    """Reads a float override from the environment, falling back to the default."""
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


def _env_int(name, default):
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


# --- Security Settings ---
# No HTTP surface is served; Django still requires a key to boot.
SECRET_KEY = os.getenv("SECRET_KEY", "django-insecure-simulator-key-not-used-for-signing")
DEBUG = os.getenv("DEBUG", "False").lower() in ("true", "1", "t")
ALLOWED_HOSTS = []


# --- Application Definition ---
INSTALLED_APPS = [
    # Third-Party Apps
    "rest_framework",
    # Project's Apps
    "apps.qubits.apps.QubitsConfig",
    "apps.optics.apps.OpticsConfig",
    "apps.biphoton.apps.BiphotonConfig",
    "apps.detection.apps.DetectionConfig",
    "apps.inference.apps.InferenceConfig",
    "apps.montecarlo.apps.MonteCarloConfig",
    "apps.fitting.apps.FittingConfig",
    "apps.experiments.apps.ExperimentsConfig",
]

# --- Database ---
# The simulator keeps no state between runs; every artifact is a CSV/JSON file.
DATABASES = {}

# --- Internationalization ---
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

# --- Django REST Framework Settings ---
# Serializers are used for config validation and JSON output only.
REST_FRAMEWORK = {
    "COERCE_DECIMAL_TO_STRING": False,
    "UNAUTHENTICATED_USER": None,
    # Whole-plane detectors have infinite width.
    "STRICT_JSON": False,
}

# --- Simulation Defaults ---
# SI units throughout. The defaults reproduce the double-slit setup:
# 2a = 100 um slits, 2d = 250 um separation, 650 nm photons, a 100 um
# detector slit at the pattern centre and 1000 s acquisitions.
SIMULATION = {
    "geometry": {
        "slit_width": _env_float("SIM_SLIT_WIDTH", 100e-6),
        "slit_separation": _env_float("SIM_SLIT_SEPARATION", 250e-6),
        "wavelength": _env_float("SIM_WAVELENGTH", 650e-9),
        # Position where the |+> and |-> patterns cross; fixes the focal length.
        "crossing_point": _env_float("SIM_CROSSING_POINT", 0.11e-3),
        "focal_length": None,
        "magnification": _env_float("SIM_MAGNIFICATION", 1.0),
    },
    "visibility": _env_float("SIM_VISIBILITY", 1.0),
    "detector": {
        "center": _env_float("SIM_DETECTOR_CENTER", 0.0),
        "width": _env_float("SIM_DETECTOR_WIDTH", 100e-6),
        "efficiency": _env_float("SIM_DETECTOR_EFFICIENCY", 1.0),
    },
    "herald": {
        "center": _env_float("SIM_HERALD_CENTER", 0.0),
        "width": _env_float("SIM_HERALD_WIDTH", 0.0),
    },
    "monte_carlo": {
        "herald_rate": _env_float("SIM_HERALD_RATE", 31.25),
        "duration": _env_float("SIM_DURATION", 1000.0),
        "seed": None,
        "trials": _env_int("SIM_TRIALS", 1_000_000),
        "block_size": _env_int("SIM_BLOCK_SIZE", 65_536),
        "workers": _env_int("SIM_WORKERS", 1),
    },
    "scan": {
        "w_min": _env_float("SIM_SCAN_MIN", 5e-6),
        "w_max": _env_float("SIM_SCAN_MAX", 1000e-6),
        "step": _env_float("SIM_SCAN_STEP", 5e-6),
    },
    "pattern": {
        "x_min": _env_float("SIM_PATTERN_MIN", -1e-3),
        "x_max": _env_float("SIM_PATTERN_MAX", 1e-3),
        "step": _env_float("SIM_PATTERN_STEP", 40e-6),
    },
    "calibration": {
        # Detector slit the quoted success probability and counts were measured with.
        "detector_width": _env_float("SIM_CALIBRATION_WIDTH", 100e-6),
        # Success probability quoted for the 100 um detector.
        "target_success": _env_float("SIM_TARGET_SUCCESS", 0.55),
        # Coincidences for f = 00 and f = 01 in the 1000 s runs.
        "counts_constant": _env_int("SIM_COUNTS_CONSTANT", 5218),
        "counts_balanced": _env_int("SIM_COUNTS_BALANCED", 450),
        # Image-plane peak areas, arbitrary units.
        "area_neg": _env_float("SIM_AREA_NEG", 77.0),
        "area_pos": _env_float("SIM_AREA_POS", 72.0),
    },
}

QUADRATURE = {
    "rel_tol": _env_float("SIM_QUAD_REL_TOL", 1e-9),
    "max_intervals": _env_int("SIM_QUAD_MAX_INTERVALS", 1_000_000),
}

# --- Logging ---
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {name} {process:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {name} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": os.getenv("SIM_LOG_FORMAT", "simple"),
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": os.getenv("DJANGO_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
        "apps": {
            "handlers": ["console"],
            "level": os.getenv("SIM_LOG_LEVEL", "WARNING"),
            "propagate": False,
        },
    },
}
