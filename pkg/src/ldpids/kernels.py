"""Kernel backend selection.

The compiled extension is used when it imports; set ``LDPIDS_PURE_PYTHON=1`` to
force the numpy fallback. Both backends consume the same pre-drawn uniforms, so
results do not depend on which one is active.
"""
import os

from . import _fallback

BACKEND = "python"
if not os.environ.get("LDPIDS_PURE_PYTHON"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

grr_perturb_values = _impl.grr_perturb_values
grr_perturb_counts = _impl.grr_perturb_counts
window_scan = _impl.window_scan

__all__ = ["BACKEND", "grr_perturb_values", "grr_perturb_counts", "window_scan"]
