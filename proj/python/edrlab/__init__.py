from ._core import (
    EdrlabError,
    GridSpec,
    MeterFunction,
    Process,
    Tolerances,
    from_json,
    load,
    model,
    run_cli,
)

__all__ = [
    "EdrlabError",
    "GridSpec",
    "MeterFunction",
    "Process",
    "Tolerances",
    "from_json",
    "load",
    "model",
    "run_cli",
]
