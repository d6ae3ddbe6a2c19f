"""Kernel backend selection: compiled extension if available, else pure Python.

Set FQLAB_PURE=1 to force the fallback (used by the benchmark and tests).
"""

from __future__ import annotations

import os

if os.environ.get("FQLAB_PURE"):
    from fqlab import _kernels_py as kernels
else:
    try:
        from fqlab import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from fqlab import _kernels_py as kernels

BACKEND = kernels.backend_name()
gf_build_tables = kernels.gf_build_tables
charpolys_of_products = kernels.charpolys_of_products
charpoly_code = kernels.charpoly_code
