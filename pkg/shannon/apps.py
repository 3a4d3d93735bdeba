from django.apps import AppConfig


class ShannonConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'shannon'
