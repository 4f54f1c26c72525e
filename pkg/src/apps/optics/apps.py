# src/apps/optics/apps.py

from django.apps import AppConfig

class OpticsConfig(AppConfig):
    name = 'apps.optics'
    verbose_name = "Double-slit optics"
