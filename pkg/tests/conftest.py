import hypothesis

# The suite must be reproducible run to run; hypothesis examples are derived
# from the test body rather than a fresh entropy source.
hypothesis.settings.register_profile(
    "ci", derandomize=True, max_examples=60, deadline=None)
hypothesis.settings.load_profile("ci")
