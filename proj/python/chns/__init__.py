"""Python bindings of the CHNS discontinuous Galerkin solver."""

from ._core import (
    ConfigError,
    NewtonDivergence,
    Potential,
    RunConfig,
    SingularSystemError,
    load_config,
    probe_constants,
    run,
    simulate,
    verify_mms,
)


def config(path=None, **overrides):
    """Builds a RunConfig from an optional file plus `section__key=value` overrides.

    >>> cfg = config(mesh__n=8, scheme__tau=0.01)
    """
    cfg = load_config(str(path)) if path is not None else RunConfig()
    for name, value in overrides.items():
        cfg.set(name.replace("__", "."), str(value))
    return cfg


__all__ = [
    "ConfigError",
    "NewtonDivergence",
    "Potential",
    "RunConfig",
    "SingularSystemError",
    "config",
    "load_config",
    "probe_constants",
    "run",
    "simulate",
    "verify_mms",
]
