# src/apps/biphoton/apps.py

from django.apps import AppConfig

class BiphotonConfig(AppConfig):
    name = 'apps.biphoton'
    verbose_name = "Biphoton heralding"
