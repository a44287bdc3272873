from hypothesis import HealthCheck, settings

settings.register_profile(
    "blowfish",
    deadline=None,
    suppress_health_check=[
        HealthCheck.too_slow,
        HealthCheck.filter_too_much,
        HealthCheck.data_too_large,
    ],
)
settings.load_profile("blowfish")
