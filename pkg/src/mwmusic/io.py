"""Text file formats: scene files, matrix files and image files.

Scene files are INI-style with unit-suffixed keys::

    [medium]
    eps_r = 20
    sigma_s_per_m = 0.2

    [array]
    n = 16
    radius_m = 0.09
    start_angle_deg = 270
    direction = -1

    [roi]
    xmin_m = -0.1
    ...

    [anomaly.small]
    eps_r = 55
    ...

    [run]
    freq_hz = 1.2e9

Matrix files start with ``N=<n> diag=<known|unknown|zeroed>`` followed by
``m,n,re,im`` lines (1-based indices, 17 significant digits). Image files
start with ``nx,ny,xmin,xmax,ymin,ymax`` followed by ``x,y,value`` rows, y
outer and x inner.
"""

from __future__ import annotations

import configparser
import math
import os
import re
import tempfile
from importlib import resources
from pathlib import Path

import numpy as np

from .forward import DIAGONAL_STATES, ScatteringMatrix
from .music import ImageMap
from .scene import MU0, AntennaArray, Anomaly, Medium, Roi, Scene

__all__ = [
    "SceneParseError",
    "MatrixFormatError",
    "ImageFormatError",
    "resolve_scene_path",
    "parse_scene",
    "write_matrix",
    "read_matrix",
    "write_image",
    "read_image",
    "write_pgm",
    "atomic_write",
]


class SceneParseError(ValueError):
    def __init__(self, path, message, line=None, key=None):
        self.path, self.line, self.key = str(path), line, key
        where = self.path if line is None else f"{self.path}:{line}"
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(f"{where}: {message}")


class MatrixFormatError(ValueError):
    pass


class ImageFormatError(ValueError):
    pass


def atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- scenes

_SCHEMA = {
    "medium": ({"eps_r", "sigma_s_per_m"}, {"mu_h_per_m"}),
    "array": ({"n", "radius_m"}, {"start_angle_rad", "start_angle_deg", "direction"}),
    "roi": (set(), {"xmin_m", "xmax_m", "ymin_m", "ymax_m", "circular"}),
    "anomaly": ({"eps_r", "sigma_s_per_m", "center_x_m", "center_y_m", "radius_m"}, {"label"}),
    "run": ({"freq_hz"}, set()),
}
_UNIT_SUFFIX = re.compile(r"^(.*?)_(m|cm|mm|hz|khz|mhz|ghz|rad|deg|s_per_m|h_per_m)$")


def resolve_scene_path(name) -> Path:
    """A filesystem path, or the name of a scene bundled with the package."""
    p = Path(name)
    if p.exists():
        return p
    bundled = resources.files("mwmusic") / "scenes" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    return p


def _line_index(text: str):
    """(section, key) -> 1-based line number."""
    lines = {}
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            lines[(section, None)] = no
        elif "=" in line and section is not None:
            lines.setdefault((section, line.split("=", 1)[0].strip().lower()), no)
    return lines


def parse_scene(path) -> Scene:
    """Parse and validate a scene file; errors name the file, line and key."""
    path = resolve_scene_path(path)
    text = path.read_text(encoding="utf-8")
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise SceneParseError(path, str(exc).splitlines()[0], getattr(exc, "lineno", None)) from None
    where = _line_index(text)

    def fail(section, key, message):
        raise SceneParseError(path, message, where.get((section, key), where.get((section, None))),
                              f"[{section}] {key}" if key else f"[{section}]")

    def check_keys(section, kind):
        required, optional = _SCHEMA[kind]
        keys = set(cp[section])
        for key in sorted(keys - required - optional):
            stem = _UNIT_SUFFIX.match(key)
            known = sorted(k for k in required | optional if stem and _UNIT_SUFFIX.match(k)
                           and _UNIT_SUFFIX.match(k).group(1) == stem.group(1))
            if known:
                fail(section, key, f"unit mismatch, expected {' or '.join(known)}")
            fail(section, key, "unknown key")
        for key in sorted(required - keys):
            fail(section, None, f"missing required key {key!r}")

    def num(section, key, default=None, cast=float):
        if key not in cp[section]:
            return default
        raw = cp[section][key]
        try:
            value = cast(raw)
        except ValueError:
            fail(section, key, f"not a number: {raw!r}")
        if cast is float and not math.isfinite(value):
            fail(section, key, f"not finite: {raw!r}")
        return value

    def positive(section, key, value, allow_zero=False):
        if value < 0 or (value == 0 and not allow_zero):
            fail(section, key, f"must be {'>= 0' if allow_zero else '> 0'}, got {value}")
        return value

    for section in cp.sections():
        kind = section.split(".", 1)[0]
        if kind not in _SCHEMA or (kind == "anomaly") != ("." in section):
            fail(section, None, "unknown section")
    for section in ("medium", "array", "run"):
        if section not in cp:
            raise SceneParseError(path, f"missing section [{section}]")
    for section in cp.sections():
        check_keys(section, section.split(".", 1)[0])

    medium = Medium(
        positive("medium", "eps_r", num("medium", "eps_r")),
        positive("medium", "sigma_s_per_m", num("medium", "sigma_s_per_m"), allow_zero=True),
        positive("medium", "mu_h_per_m", num("medium", "mu_h_per_m", MU0)),
    )

    if "start_angle_rad" in cp["array"] and "start_angle_deg" in cp["array"]:
        fail("array", "start_angle_deg", "give start_angle_rad or start_angle_deg, not both")
    start = num("array", "start_angle_rad", None)
    if start is None:
        start = math.radians(num("array", "start_angle_deg", 0.0))
    n = num("array", "n", cast=int)
    if n < 3:
        fail("array", "n", f"must be >= 3, got {n}")
    direction = num("array", "direction", 1, cast=int)
    if direction not in (1, -1):
        fail("array", "direction", f"must be 1 or -1, got {direction}")
    array = AntennaArray(n, positive("array", "radius_m", num("array", "radius_m")), start, direction)

    if "roi" in cp:
        sec = cp["roi"]
        circular = False
        if "circular" in sec:
            try:
                circular = sec.getboolean("circular")
            except ValueError:
                fail("roi", "circular", f"not a boolean: {sec['circular']!r}")
        bounds = [num("roi", k, d) for k, d in
                  (("xmin_m", -0.1), ("xmax_m", 0.1), ("ymin_m", -0.1), ("ymax_m", 0.1))]
        try:
            roi = Roi(*bounds, circular=circular)
        except ValueError as exc:
            fail("roi", None, str(exc))
    else:
        roi = Roi()

    anomalies = []
    for section in cp.sections():
        if not section.startswith("anomaly."):
            continue
        center = (num(section, "center_x_m"), num(section, "center_y_m"))
        if not roi.contains(center):
            fail(section, "center_x_m", f"anomaly center {center} lies outside the ROI")
        anomalies.append(Anomaly(
            positive(section, "eps_r", num(section, "eps_r")),
            positive(section, "sigma_s_per_m", num(section, "sigma_s_per_m"), allow_zero=True),
            center,
            positive(section, "radius_m", num(section, "radius_m")),
            cp[section].get("label"),
        ))

    freq = positive("run", "freq_hz", num("run", "freq_hz"))
    return Scene(medium, array, tuple(anomalies), freq, roi)


# --------------------------------------------------------------- matrices

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_matrix(matrix: ScatteringMatrix, path) -> None:
    n = matrix.n
    out = [f"N={n} diag={matrix.diagonal_state}"]
    for m in range(n):
        for col in range(n):
            if m == col and matrix.diagonal_state == "unknown":
                continue
            z = matrix.entries[m, col]
            out.append(f"{m + 1},{col + 1},{_fmt(z.real)},{_fmt(z.imag)}")
    atomic_write(path, "\n".join(out) + "\n")


_HEADER = re.compile(r"^N=(\d+)\s+diag=(\w+)$")


def read_matrix(path) -> ScatteringMatrix:
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines:
        raise MatrixFormatError(f"{path}: empty file")
    head = _HEADER.match(lines[0].strip())
    if head is None:
        raise MatrixFormatError(f"{path}:1: bad header {lines[0]!r}")
    n, diag = int(head.group(1)), head.group(2)
    if diag not in DIAGONAL_STATES:
        raise MatrixFormatError(f"{path}:1: unknown diag flag {diag!r}")
    if n < 3:
        raise MatrixFormatError(f"{path}:1: dimension must be >= 3")
    body = [ln for ln in lines[1:] if ln.strip()]
    expected = n * n - (n if diag == "unknown" else 0)
    if len(body) != expected:
        raise MatrixFormatError(f"{path}: expected {expected} entries for N={n} diag={diag}, got {len(body)}")
    a = np.zeros((n, n), dtype=complex)
    seen = np.zeros((n, n), dtype=bool)
    for no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise MatrixFormatError(f"{path}:{no}: expected m,n,re,im")
        try:
            m, col = int(parts[0]) - 1, int(parts[1]) - 1
            re_, im_ = float(parts[2]), float(parts[3])
        except ValueError:
            raise MatrixFormatError(f"{path}:{no}: malformed entry {line!r}") from None
        if not (0 <= m < n and 0 <= col < n):
            raise MatrixFormatError(f"{path}:{no}: index out of range")
        if seen[m, col]:
            raise MatrixFormatError(f"{path}:{no}: duplicate entry ({m + 1},{col + 1})")
        if m == col and diag == "unknown":
            raise MatrixFormatError(f"{path}:{no}: diagonal entry present but diag=unknown")
        if m == col and diag == "zeroed" and (re_ != 0 or im_ != 0):
            raise MatrixFormatError(f"{path}:{no}: nonzero diagonal entry but diag=zeroed")
        seen[m, col] = True
        a[m, col] = complex(re_, im_)
    return ScatteringMatrix(a, diag)


# ----------------------------------------------------------------- images

def write_image(image: ImageMap, path) -> None:
    xmin, xmax, ymin, ymax = image.extent
    out = [f"{image.nx},{image.ny},{_fmt(xmin)},{_fmt(xmax)},{_fmt(ymin)},{_fmt(ymax)}"]
    for iy, y in enumerate(image.ys):
        ys = _fmt(y)
        for ix, x in enumerate(image.xs):
            out.append(f"{_fmt(x)},{ys},{_fmt(image.values[iy, ix])}")
    atomic_write(path, "\n".join(out) + "\n")


def read_image(path) -> ImageMap:
    lines = [ln for ln in Path(path).read_text(encoding="ascii").splitlines() if ln.strip()]
    if not lines:
        raise ImageFormatError(f"{path}: empty file")
    try:
        head = lines[0].split(",")
        nx, ny = int(head[0]), int(head[1])
        xmin, xmax, ymin, ymax = (float(v) for v in head[2:6])
    except (ValueError, IndexError):
        raise ImageFormatError(f"{path}:1: bad header {lines[0]!r}") from None
    if len(lines) - 1 != nx * ny:
        raise ImageFormatError(f"{path}: expected {nx * ny} rows, got {len(lines) - 1}")
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    except ValueError:
        raise ImageFormatError(f"{path}: malformed row") from None
    if data.shape[1] != 3:
        raise ImageFormatError(f"{path}: rows must be x,y,value")
    values = data[:, 2].reshape(ny, nx)
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise ImageFormatError(f"{path}: values must be finite and >= 0")
    xs = data[:nx, 0].copy()
    ys = data[::nx, 1].copy()
    if not (np.isclose(xs[0], xmin) and np.isclose(xs[-1], xmax)
            and np.isclose(ys[0], ymin) and np.isclose(ys[-1], ymax)):
        raise ImageFormatError(f"{path}: header extent does not match the grid rows")
    return ImageMap(xs, ys, values, {})


def write_pgm(image: ImageMap, path) -> None:
    """Plain-text 16-bit grayscale raster, max-normalized, top row = largest y."""
    peak = float(image.values.max())
    scaled = np.zeros_like(image.values) if peak <= 0 else image.values / peak
    pix = np.rint(scaled * 65535).astype(int)[::-1]
    rows = [" ".join(str(v) for v in row) for row in pix]
    atomic_write(path, f"P2\n{image.nx} {image.ny}\n65535\n" + "\n".join(rows) + "\n")
