# src/apps/montecarlo/apps.py

from django.apps import AppConfig

class MonteCarloConfig(AppConfig):
    name = 'apps.montecarlo'
    verbose_name = "Monte Carlo counting"
