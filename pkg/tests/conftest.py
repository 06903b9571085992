from hypothesis import settings

# every run must replay identically: no random exploration in CI
settings.register_profile("ci", deadline=None, derandomize=True)
settings.load_profile("ci")
