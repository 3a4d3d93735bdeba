"""
Django settings for metalift project.

The project hosts the representation, intertwiner and Shannon-lift apps plus
the verification harness. There is no HTTP surface; everything runs through
management commands and Celery tasks.
"""

from pathlib import Path
from dotenv import load_dotenv
import os

# Load environment variables from the .env file (if present)
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'django-insecure-metalift-local-only')

DEBUG = os.getenv('DJANGO_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',

    'rest_framework',
    'functions',
    'groups',
    'intertwiners',
    'shannon',
    'verification',
]


# Database

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Run-time knobs
METALIFT_WORKERS = int(os.getenv('METALIFT_WORKERS', '1'))
METALIFT_SEED = int(os.getenv('METALIFT_SEED', '20240601'))
METALIFT_OUTPUT_DIR = Path(os.getenv('METALIFT_OUTPUT_DIR', BASE_DIR / 'reports'))
METALIFT_RECORD_RUNS = os.getenv('METALIFT_RECORD_RUNS', '0') == '1'

METALIFT = {
    "EXACT_TOL": 1e-12,
    "QUADRATURE_TOL": 1e-8,
    "PANEL_BUDGET": 2 ** 16,
    "NODES_PER_PERIOD": 8,
    "FD_STEP": 1e-6,
    "ALPHA_GRID": {
        "I": [-1.0, -0.5, -0.1],
        "III": [0.0, 0.7, 2.0],
        "IV": [0.0, 0.7, 2.0],
    },
    "SCHEMA_VERSION": 1,
}


#Logging
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,

    "formatters": {
        "verbose": {
            "format": "[{asctime}] {levelname} {name} — {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },

    "handlers": {
        "verification_file": {
            "level": "INFO",
            "class": "logging.FileHandler",
            "filename": os.path.join(BASE_DIR, "verification.log"),
            "formatter": "verbose",
        },
        "quadrature_file": {
            "level": "WARNING",
            "class": "logging.FileHandler",
            "filename": os.path.join(BASE_DIR, "quadrature.log"),
            "formatter": "verbose",
        },
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },

    "loggers": {
        "verification": {
            "handlers": ["verification_file", "console"],
            "level": os.getenv("METALIFT_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
        "quadrature": {
            "handlers": ["quadrature_file", "console"],
            "level": "WARNING",
            "propagate": False,
        },
        "metalift.cli": {
            "handlers": ["verification_file", "console"],
            "level": os.getenv("METALIFT_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
    },
}

# Celery Settings
CELERY_BROKER_URL = os.getenv("CELERY_BROKER_URL", "redis://127.0.0.1:6379/0")
CELERY_RESULT_BACKEND = os.getenv("CELERY_RESULT_BACKEND", "redis://127.0.0.1:6379/0")
CELERY_ACCEPT_CONTENT = ["json"]
CELERY_TASK_SERIALIZER = "json"
CELERY_RESULT_SERIALIZER = "json"
CELERY_TIMEZONE = "UTC"
CELERY_TASK_TRACK_STARTED = True
CELERY_TASK_ALWAYS_EAGER = os.getenv("CELERY_TASK_ALWAYS_EAGER", "1") == "1"
CELERY_TASK_EAGER_PROPAGATES = False
CELERY_TASK_TIME_LIMIT = 30 * 60  # 30 minutes
