from django.apps import AppConfig


class IntertwinersConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'intertwiners'
