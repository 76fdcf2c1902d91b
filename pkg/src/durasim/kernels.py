"""Kernel backend selection and arm-table packing.

The Monte Carlo hot path (uniforms -> patient times -> d-th order statistic)
exists twice: a Cython extension compiled at install time and a vectorized
numpy fallback. The compiled backend is preferred when the import succeeds;
both satisfy the layout contract documented in _kernels_py, so the choice
only affects speed. Set DURASIM_KERNELS=numpy (or =cython) to pin one;
``benchmarks/bench_kernels.py`` compares them.
"""

import importlib
import os

import numpy as np

from .distributions import ExponentialModel, WeibullModel
from .errors import ConfigurationError

_forced = os.environ.get("DURASIM_KERNELS", "").strip().lower()
if _forced == "numpy":
    from . import _kernels_py as _impl
    BACKEND = "numpy"
elif _forced == "cython":
    from . import _kernels_c as _impl  # ImportError here means no built extension
    BACKEND = "cython"
else:
    try:
        from . import _kernels_c as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl
        BACKEND = "numpy"

mixture_draws = _impl.mixture_draws
dth_event_times = _impl.dth_event_times

_EXP, _WEIBULL = 0, 1


def available_backends() -> list[str]:
    names = []
    for name, module in (("cython", "durasim._kernels_c"), ("numpy", "durasim._kernels_py")):
        try:
            importlib.import_module(module)
        except ImportError:
            continue
        names.append(name)
    return names


def load_backend(name: str):
    """Import a specific backend module ("cython" or "numpy")."""
    if name == "cython":
        return importlib.import_module("durasim._kernels_c")
    if name == "numpy":
        return importlib.import_module("durasim._kernels_py")
    raise ConfigurationError(f"unknown kernel backend {name!r}")


def _pack_survival(model) -> tuple[int, float, float]:
    if isinstance(model, ExponentialModel):
        return _EXP, model.rate, 0.0
    if isinstance(model, WeibullModel):
        return _WEIBULL, model.shape, model.scale
    raise ConfigurationError(f"unsupported survival model {type(model).__name__}")


def arm_tables(arms) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pack arms into (cum_weights, families, params) kernel tables."""
    cells = len(arms)
    cum_weights = np.cumsum([arm.weight for arm in arms])
    families = np.empty((cells, 2), dtype=np.int32)
    params = np.empty((cells, 6), dtype=np.float64)
    for i, arm in enumerate(arms):
        params[i, 0] = arm.enrollment.period_a
        params[i, 1] = arm.enrollment.beta
        families[i, 0], params[i, 2], params[i, 3] = _pack_survival(arm.event)
        families[i, 1], params[i, 4], params[i, 5] = _pack_survival(arm.dropout_or_none)
    return cum_weights, families, params
