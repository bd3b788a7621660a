"""Kernel backend selection.

Imports the compiled extension when it was built, otherwise the numpy
fallback.  Setting the environment variable ``RADIALMP_PURE=1`` forces the
fallback (useful for benchmarking the two side by side).
"""

import os

if os.environ.get("RADIALMP_PURE"):
    from . import _numpy as impl
else:
    try:
        from . import _core as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _numpy as impl

BACKEND = impl.BACKEND

tridiag_solve = impl.tridiag_solve
tridiag_mv = impl.tridiag_mv
cell_energy = impl.cell_energy
cell_inner = impl.cell_inner
wsum2 = impl.wsum2
winner = impl.winner
wabspow = impl.wabspow
wpospow = impl.wpospow
minpow_f = impl.minpow_f
minpow_F = impl.minpow_F
minpow_fu = impl.minpow_fu
