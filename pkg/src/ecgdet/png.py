"""Minimal PNG reader/writer for 8-bit grayscale and RGB(A) images.

The writer always emits unfiltered scanlines at a fixed zlib level, so the
same pixels produce the same bytes on every run. The reader understands all
five standard scanline filters, enough to load files written elsewhere.
"""

import struct
import zlib

import numpy as np

from .errors import ParseError

_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_CHANNELS_BY_COLOR_TYPE = {0: 1, 2: 3, 6: 4}


def _chunk(tag: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(tag + payload) & 0xFFFFFFFF
    return struct.pack(">I", len(payload)) + tag + payload + struct.pack(">I", crc)


def encode(image: np.ndarray, compress_level: int = 6) -> bytes:
    """Encode a (H, W) or (H, W, 3|4) uint8 array as PNG bytes."""
    if image.dtype != np.uint8:
        raise ValueError("PNG encoder expects uint8 pixels")
    if image.ndim == 2:
        color_type = 0
        rows = image
    elif image.ndim == 3 and image.shape[2] in (3, 4):
        color_type = 2 if image.shape[2] == 3 else 6
        rows = image
    else:
        raise ValueError(f"unsupported image shape {image.shape}")
    h, w = image.shape[:2]
    ihdr = struct.pack(">IIBBBBB", w, h, 8, color_type, 0, 0, 0)
    raw = bytearray()
    for r in range(h):
        raw.append(0)
        raw.extend(np.ascontiguousarray(rows[r]).tobytes())
    idat = zlib.compress(bytes(raw), compress_level)
    return _SIGNATURE + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa = abs(p - a)
    pb = abs(p - b)
    pc = abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c


def _unfilter(data: bytes, h: int, w: int, nch: int) -> np.ndarray:
    stride = w * nch
    out = np.zeros((h, stride), dtype=np.uint8)
    pos = 0
    prev = np.zeros(stride, dtype=np.uint8)
    for r in range(h):
        ftype = data[pos]
        pos += 1
        line = np.frombuffer(data[pos : pos + stride], dtype=np.uint8).astype(np.int32)
        pos += stride
        if ftype == 0:
            cur = line
        elif ftype == 1:  # Sub
            cur = line.copy()
            for i in range(nch, stride):
                cur[i] = (cur[i] + cur[i - nch]) & 0xFF
        elif ftype == 2:  # Up
            cur = (line + prev) & 0xFF
        elif ftype == 3:  # Average
            cur = line.copy()
            for i in range(stride):
                left = cur[i - nch] if i >= nch else 0
                cur[i] = (cur[i] + ((left + int(prev[i])) >> 1)) & 0xFF
        elif ftype == 4:  # Paeth
            cur = line.copy()
            for i in range(stride):
                left = int(cur[i - nch]) if i >= nch else 0
                upleft = int(prev[i - nch]) if i >= nch else 0
                cur[i] = (cur[i] + _paeth(left, int(prev[i]), upleft)) & 0xFF
        else:
            raise ParseError(f"unknown PNG filter type {ftype}")
        out[r] = cur.astype(np.uint8)
        prev = out[r].astype(np.uint8)
    return out


def decode(data: bytes) -> np.ndarray:
    """Decode PNG bytes into a (H, W) or (H, W, C) uint8 array."""
    if data[:8] != _SIGNATURE:
        raise ParseError("not a PNG file (bad signature)")
    pos = 8
    ihdr = None
    idat = bytearray()
    while pos + 8 <= len(data):
        length, tag = struct.unpack(">I4s", data[pos : pos + 8])
        payload = data[pos + 8 : pos + 8 + length]
        pos += 12 + length
        if tag == b"IHDR":
            ihdr = struct.unpack(">IIBBBBB", payload)
        elif tag == b"IDAT":
            idat.extend(payload)
        elif tag == b"IEND":
            break
    if ihdr is None:
        raise ParseError("PNG missing IHDR chunk")
    w, h, depth, color_type, _, _, interlace = ihdr
    if depth != 8:
        raise ParseError(f"unsupported PNG bit depth {depth}")
    if interlace != 0:
        raise ParseError("interlaced PNG not supported")
    nch = _CHANNELS_BY_COLOR_TYPE.get(color_type)
    if nch is None:
        raise ParseError(f"unsupported PNG color type {color_type}")
    raw = zlib.decompress(bytes(idat))
    expected = h * (w * nch + 1)
    if len(raw) != expected:
        raise ParseError(f"PNG pixel data length {len(raw)} != expected {expected}")
    flat = _unfilter(raw, h, w, nch)
    if nch == 1:
        return flat.reshape(h, w)
    return flat.reshape(h, w, nch)
