"""Hot-kernel backend selection.

The compiled extension (built from ``_native.pyx``) is used when importable;
otherwise the numpy implementation takes over. Both produce bit-identical
output. Set ``ECGDET_PURE=1`` to force the numpy backend.
"""

import os

from . import _pure

if os.environ.get("ECGDET_PURE") == "1":
    _impl = _pure
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

BACKEND: str = _impl.BACKEND
unpack_fmt212 = _impl.unpack_fmt212
pack_fmt212 = _impl.pack_fmt212
draw_polyline = _impl.draw_polyline
rotate_nearest = _impl.rotate_nearest

__all__ = ["BACKEND", "unpack_fmt212", "pack_fmt212", "draw_polyline", "rotate_nearest"]
