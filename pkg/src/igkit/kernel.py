"""Select the expansion kernel at import: compiled when available, else pure.

Set IGKIT_PURE=1 to force the pure-Python kernel (used by the benchmark and
by tests that compare both implementations).
"""

import os

if os.environ.get("IGKIT_PURE"):
    from . import _expand_py as _impl
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _expand_py as _impl  # type: ignore[no-redef]

IMPLEMENTATION: str = _impl.IMPLEMENTATION
expand = _impl.expand
