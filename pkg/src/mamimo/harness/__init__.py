from .experiments import EXPERIMENTS, validate  # noqa: F401
