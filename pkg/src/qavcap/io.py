"""JSON and CSV formats for channels, kernels, schemes and reports.

Matrices are nested lists.  Complex arrays store every entry as a ``[re, im]``
pair; real arrays store plain numbers.  Floats are written with 17
significant digits so a save/load cycle is bit-exact, and object keys are
sorted so identical reports produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import is_dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .core import JammerChannel, QuantumChannel, as_density_matrix, unitary_channel
from .errors import DimensionError, InvariantError, ParseError
from .finite_n import (
    CodingScheme,
    computational_scheme,
    superdense_scheme,
    xbasis_scheme,
)
from .models import (
    PAULI_X,
    AvcKernel,
    adder_avc,
    cx_jammer,
    dephasing,
    depolarizing,
    erasure,
    identity_channel,
    noiseless_avc,
)

# ----------------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------------


def to_plain(obj: Any) -> Any:
    """Convert reports, arrays and numpy scalars to JSON-ready Python values."""
    if hasattr(obj, "to_dict"):
        return to_plain(obj.to_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_plain(dict(obj.__dict__))
    if isinstance(obj, QuantumChannel | JammerChannel | AvcKernel):
        return to_plain(channel_to_dict(obj))
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, list | tuple):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return np.stack([obj.real, obj.imag], axis=-1).tolist()
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex | np.complexfloating):
        return [float(obj.real), float(obj.imag)]
    return obj


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == 0 and math.copysign(1.0, x) < 0:
        # "-0" would parse back as the integer 0 and lose the sign
        return "-0.0"
    return format(x, ".17g")


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, list | dict) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[" + ",".join(pad + _encode(v, indent, level + 1) for v in obj) + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (pad + json.dumps(k) + ": " + _encode(obj[k], indent, level + 1) for k in sorted(obj))
        return "{" + ",".join(items) + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    return _encode(to_plain(obj), indent, 0) + "\n"


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    rows = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            rows.extend(_flatten(obj[k], f"{prefix}.{k}" if prefix else str(k)))
    elif obj is None or isinstance(obj, bool | int | float | str):
        rows.append((prefix, obj))
    return rows


def to_csv(obj: Any) -> str:
    """One ``metric,value`` row per scalar; nested keys are dot-joined, arrays skipped."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", "value"])
    for key, value in _flatten(to_plain(obj)):
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = _float(value)
        elif value is None:
            value = ""
        writer.writerow([key, value])
    return buf.getvalue()


def emit_report(report: Any, fmt: str = "json", path: str | Path | None = None) -> str:
    """Render ``report`` and write it to ``path`` (or return it for stdout)."""
    if fmt == "json":
        text = dumps(report)
    elif fmt == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# ----------------------------------------------------------------------------
# parsing
# ----------------------------------------------------------------------------


def load_json(path: str | Path) -> Any:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def parse_array(data: Any, ndim: int, name: str) -> np.ndarray:
    """Array of rank ``ndim``; one extra trailing axis of length 2 means ``[re, im]``."""
    try:
        a = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{name}: not a rectangular numeric array") from None
    if a.ndim == ndim + 1 and a.shape[-1] == 2:
        # assign parts directly: re + 1j*im would turn -0.0 into 0.0
        z = np.empty(a.shape[:-1], dtype=complex)
        z.real, z.imag = a[..., 0], a[..., 1]
        return z
    if a.ndim == ndim:
        return a
    raise DimensionError(f"{name}: expected a rank-{ndim} array, got shape {a.shape}", axis=name)


def _require(d: dict, key: str, where: str) -> Any:
    if not isinstance(d, dict):
        raise ParseError(f"{where}: expected a JSON object")
    if key not in d:
        raise ParseError(f"{where}: missing key {key!r}")
    return d[key]


def channel_from_dict(d: dict, where: str = "channel") -> QuantumChannel | JammerChannel | AvcKernel:
    """Build a channel, jammer channel or classical kernel, enforcing every invariant."""
    if isinstance(d, dict) and "W" in d:
        W = parse_array(d["W"], 3, f"{where}.W").real
        for axis, key in enumerate(("Y", "X", "S")):
            if key in d and int(d[key]) != W.shape[axis]:
                raise DimensionError(f"{where}: declared {key}={d[key]} but W has {W.shape[axis]}", axis=key)
        return AvcKernel(W)
    kraus = parse_array(_require(d, "kraus", where), 3, f"{where}.kraus")
    T = QuantumChannel(kraus)
    for key, actual in (("d_in", T.d_in), ("d_out", T.d_out)):
        if key in d and int(d[key]) != actual:
            raise DimensionError(f"{where}: declared {key}={d[key]} but Kraus operators give {actual}", axis=key)
    if "d_A" in d or "d_S" in d:
        return JammerChannel(T, int(_require(d, "d_A", where)), int(_require(d, "d_S", where)))
    return T


def channel_to_dict(obj) -> dict:
    if isinstance(obj, AvcKernel):
        return {"X": obj.X, "S": obj.S, "Y": obj.Y, "W": obj.W}
    if isinstance(obj, JammerChannel):
        out = channel_to_dict(obj.map)
        out.update(d_A=obj.d_A, d_S=obj.d_S)
        return out
    return {"d_in": obj.d_in, "d_out": obj.d_out, "kraus": np.asarray(obj.kraus, dtype=complex)}


def _phi_vector(data: Any, where: str) -> np.ndarray:
    """Pure state from a column, a row, a flat real vector or a rank-one density matrix."""
    try:
        a = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: not a rectangular numeric array") from None
    if a.ndim == 1:
        return a
    a = parse_array(data, 2, where)
    if 1 in a.shape:
        return a.reshape(-1)
    if a.shape[0] == a.shape[1]:
        w, v = np.linalg.eigh(as_density_matrix(a))
        if abs(w[-1] - 1) > 1e-12:
            raise InvariantError(f"{where}: entanglement state is not pure (top eigenvalue {w[-1]:.15g})", "pure", 1 - w[-1])
        return v[:, -1]
    raise DimensionError(f"{where}: cannot read a pure state from shape {a.shape}", axis="phi")


def scheme_from_dict(d: dict, where: str = "scheme") -> CodingScheme:
    enc = channel_from_dict(_require(d, "encoder", where), f"{where}.encoder")
    dec = channel_from_dict(_require(d, "decoder", where), f"{where}.decoder")
    if not isinstance(enc, QuantumChannel) or not isinstance(dec, QuantumChannel):
        raise ParseError(f"{where}: encoder and decoder must be plain channels")
    k = int(_require(d, "k", where))
    phi = _phi_vector(_require(d, "phi", where), f"{where}.phi") if k > 1 or "phi" in d else np.ones(1)
    return CodingScheme(int(_require(d, "n", where)), int(_require(d, "m", where)), k, phi, enc, dec)


def scheme_to_dict(s: CodingScheme) -> dict:
    return {
        "n": s.n,
        "m": s.m,
        "k": s.k,
        "phi": s.phi.reshape(-1, 1).astype(complex),
        "encoder": channel_to_dict(s.encoder),
        "decoder": channel_to_dict(s.decoder),
    }


def save_json(obj: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def save_channel(obj, path: str | Path) -> None:
    save_json(channel_to_dict(obj), path)


def save_scheme(s: CodingScheme, path: str | Path) -> None:
    save_json(scheme_to_dict(s), path)


# ----------------------------------------------------------------------------
# named instances
# ----------------------------------------------------------------------------


def _number(text: str, name: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{name}: {text!r} is not a number") from None


def builtin_channel(name: str):
    """Named channels: ``identity2``, ``depol:<p>``, ``erasure:<p>``, ``dephase:<p>``,
    ``pauli-x``, ``cx-jammer`` and the kernels ``adder`` and ``noiseless``."""
    head, _, arg = name.partition(":")
    if name in ("identity2", "identity"):
        return identity_channel(2)
    if head == "identity" and arg:
        return identity_channel(int(_number(arg, name)))
    if head in ("depol", "depolarizing") and arg:
        return depolarizing(_number(arg, name))
    if head == "erasure" and arg:
        return erasure(_number(arg, name))
    if head in ("dephase", "dephasing") and arg:
        return dephasing(_number(arg, name))
    if name in ("pauli-x", "xflip"):
        return unitary_channel(PAULI_X)
    if name in ("cx-jammer", "cx_jammer"):
        return cx_jammer()
    if name == "adder":
        return adder_avc()
    if name == "noiseless":
        return noiseless_avc()
    return None


def builtin_scheme(name: str) -> CodingScheme | None:
    """Named schemes ``comp:<n>``, ``xbasis:<n>`` and ``superdense:<n>``."""
    head, _, arg = name.partition(":")
    makers = {"comp": computational_scheme, "xbasis": xbasis_scheme, "superdense": superdense_scheme}
    if head in makers and arg:
        return makers[head](int(_number(arg, name)))
    return None


def load_channel(spec: str | Path):
    """A channel, jammer channel or kernel from a file path or a built-in name."""
    path = Path(spec)
    if path.exists():
        return channel_from_dict(load_json(path), str(path))
    obj = builtin_channel(str(spec))
    if obj is None:
        raise ParseError(f"{spec}: no such file or built-in channel")
    return obj


def load_scheme(spec: str | Path) -> CodingScheme:
    path = Path(spec)
    if path.exists():
        return scheme_from_dict(load_json(path), str(path))
    obj = builtin_scheme(str(spec))
    if obj is None:
        raise ParseError(f"{spec}: no such file or built-in scheme")
    return obj


def load_state(spec: str | Path) -> tuple[np.ndarray, dict]:
    """Density matrix from ``{"rho": matrix, ...}`` or a bare matrix; extra keys are returned."""
    data = load_json(spec)
    meta = {}
    if isinstance(data, dict):
        meta = {k: v for k, v in data.items() if k != "rho"}
        data = _require(data, "rho", str(spec))
    return as_density_matrix(parse_array(data, 2, f"{spec}.rho")), meta
