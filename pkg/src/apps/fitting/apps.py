# src/apps/fitting/apps.py

from django.apps import AppConfig

class FittingConfig(AppConfig):
    name = 'apps.fitting'
    verbose_name = "Pattern fitting"
