"""Rasterization of root-set membership over rectangles of the unit disc.

Pixel centers are classified independently (verdict codes 0 In, 1
PresumedIn, 2 Unknown, 3 Out), so a raster is a pure function of its spec
and the coefficient set: any row partition, worker count, or backend yields
identical bytes.  Images are written as binary PGM (maxval 255, grey levels
0/64/128/255 for In/PresumedIn/Unknown/Out) with a JSON sidecar carrying
the spec, the set, and a digest.
"""

from concurrent.futures import ThreadPoolExecutor
from collections import deque
from dataclasses import dataclass, replace
import hashlib
import json
import math
import time

import numpy as np

from . import kernels
from .coeffset import CoefficientSet, TOL_SET, is_symmetric, total_gap
from .decide import SearchConfig, start_indices
from .errors import PreconditionViolated, SpecMismatch
from .geometry import spike_bands

GREY_LEVELS = np.array([0, 64, 128, 255], dtype=np.uint8)
DEPTH_BOOST = 4


@dataclass(frozen=True)
class Shortcuts:
    outer_cutoff: bool = True
    certified_annulus: bool = True

    def to_json_dict(self):
        return {"outer_cutoff": self.outer_cutoff,
                "certified_annulus": self.certified_annulus}


@dataclass(frozen=True)
class RasterSpec:
    x_range: tuple = (0.0, 1.0)
    y_range: tuple = (0.0, 1.0)
    width: int = 256
    height: int = 256
    cfg: SearchConfig = SearchConfig()
    shortcuts: Shortcuts = Shortcuts()

    def __post_init__(self):
        x0, x1 = self.x_range
        y0, y1 = self.y_range
        if not (-1.0 <= x0 < x1 <= 1.0 and -1.0 <= y0 < y1 <= 1.0):
            raise PreconditionViolated(
                "ranges must be increasing and within [-1, 1]")
        if self.width < 1 or self.height < 1:
            raise PreconditionViolated("raster needs positive dimensions")

    def pixel_xs(self):
        x0, x1 = self.x_range
        step = (x1 - x0) / self.width
        return x0 + (np.arange(self.width) + 0.5) * step

    def pixel_ys(self):
        """Row-center ordinates, top row (y_max) first."""
        y0, y1 = self.y_range
        step = (y1 - y0) / self.height
        return y1 - (np.arange(self.height) + 0.5) * step

    def pixel_index(self, x, y):
        """(row, col) of the pixel containing the point, or None."""
        x0, x1 = self.x_range
        y0, y1 = self.y_range
        if not (x0 <= x < x1 and y0 < y <= y1):
            return None
        col = int((x - x0) / (x1 - x0) * self.width)
        row = int((y1 - y) / (y1 - y0) * self.height)
        return min(row, self.height - 1), min(col, self.width - 1)

    def to_json_dict(self):
        return {"x_range": list(self.x_range), "y_range": list(self.y_range),
                "width": self.width, "height": self.height,
                "cfg": self.cfg.to_json_dict(),
                "shortcuts": self.shortcuts.to_json_dict()}


def set_digest(s, spec):
    payload = json.dumps(
        {"elements": [repr(float(e)) for e in s.elements],
         "exact_integer": s.exact_integer, "spec": spec.to_json_dict()},
        sort_keys=True)
    return hashlib.sha256(payload.encode("ascii")).hexdigest()


@dataclass
class Raster:
    spec: RasterSpec
    codes: np.ndarray          # (height, width) uint8, top row first
    digest: str
    coefficient_set: CoefficientSet | None = None
    meta: dict | None = None

    @property
    def in_like(self):
        return self.codes <= kernels.CODE_PRESUMED_IN

    def counts(self):
        names = ["In", "PresumedIn", "Unknown", "Out"]
        return {names[c]: int((self.codes == c).sum()) for c in range(4)}

    def code_at(self, x, y):
        idx = self.spec.pixel_index(x, y)
        if idx is None:
            return None
        return int(self.codes[idx])


def render(s, spec, workers=1):
    """Render the membership raster; workers only partitions rows."""
    if not s.is_normalized:
        raise PreconditionViolated("render expects a normalized set")
    if workers < 1:
        raise PreconditionViolated("workers must be >= 1")
    cfg = spec.cfg
    elems = s.as_float_array()
    starts = start_indices(s, cfg.first_coeff)
    m_abs = float(s.max_abs)
    ratio = float(s.max_ratio)
    outer_mod = 1.0 / (ratio + 1.0)
    use_annulus = (spec.shortcuts.certified_annulus and len(s) > 1
                   and is_symmetric(s) and total_gap(s) <= 1 + TOL_SET)
    annulus_mod = 1.0 / math.sqrt(m_abs) if use_annulus else 2.0
    deep_mod = 1.2 / (math.sqrt(m_abs) + 1.0)

    xs = spec.pixel_xs()
    ys = spec.pixel_ys()
    codes = np.empty((spec.height, spec.width), dtype=np.uint8)

    t0 = time.perf_counter()
    n_chunks = min(workers, spec.height)
    bounds = np.linspace(0, spec.height, n_chunks + 1).astype(np.int64)

    def run(lo, hi):
        kernels.render_rows(xs, ys[lo:hi], elems, starts, m_abs,
                            cfg.max_depth, DEPTH_BOOST, cfg.slack,
                            cfg.node_budget, spec.shortcuts.outer_cutoff,
                            outer_mod, use_annulus, annulus_mod, deep_mod,
                            codes[lo:hi])

    if n_chunks == 1:
        run(0, spec.height)
    else:
        with ThreadPoolExecutor(max_workers=n_chunks) as pool:
            futs = [pool.submit(run, bounds[i], bounds[i + 1])
                    for i in range(n_chunks)]
            for f in futs:
                f.result()
    wall = time.perf_counter() - t0

    raster = Raster(spec=spec, codes=codes, digest=set_digest(s, spec),
                    coefficient_set=s,
                    meta={"workers": workers, "wall_time": wall})
    raster.meta["counts"] = raster.counts()
    return raster


# ---------------------------------------------------------------------------
# PGM + sidecar IO

def write_pgm(raster, path):
    """Binary PGM plus a JSON sidecar at path + '.json'."""
    h, w = raster.codes.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(GREY_LEVELS[raster.codes].tobytes())
    side = {"spec": raster.spec.to_json_dict(), "digest": raster.digest,
            "meta": raster.meta}
    if raster.coefficient_set is not None:
        side["set"] = {"elements": list(raster.coefficient_set.elements),
                       "exact_integer": raster.coefficient_set.exact_integer}
    with open(path + ".json", "w", encoding="ascii") as fh:
        json.dump(side, fh, sort_keys=True, indent=1)
        fh.write("\n")


def read_pgm(path):
    """Rebuild a Raster written by write_pgm (needs the sidecar)."""
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5" or len(parts) < 4:
        raise SpecMismatch("not a binary PGM written by this package")
    w, h = (int(v) for v in parts[1].split())
    if parts[2] != b"255":
        raise SpecMismatch("unexpected PGM maxval")
    pixels = np.frombuffer(parts[3][:w * h], dtype=np.uint8).reshape(h, w)
    codes = np.empty((h, w), dtype=np.uint8)
    lut = {int(g): c for c, g in enumerate(GREY_LEVELS)}
    vals = np.unique(pixels)
    for v in vals:
        if int(v) not in lut:
            raise SpecMismatch(f"unexpected grey level {int(v)}")
        codes[pixels == v] = lut[int(v)]
    with open(path + ".json", "r", encoding="ascii") as fh:
        side = json.load(fh)
    sd = side["spec"]
    spec = RasterSpec(x_range=tuple(sd["x_range"]),
                      y_range=tuple(sd["y_range"]),
                      width=sd["width"], height=sd["height"],
                      cfg=SearchConfig(**sd["cfg"]),
                      shortcuts=Shortcuts(**sd["shortcuts"]))
    cset = None
    if "set" in side:
        cset = CoefficientSet.from_values(side["set"]["elements"])
    return Raster(spec=spec, codes=codes, digest=side["digest"],
                  coefficient_set=cset, meta=side.get("meta"))


# ---------------------------------------------------------------------------
# raster algebra

def diff(a, b):
    """Pixels In-like in a but not in b; everything else Out."""
    if a.spec != b.spec:
        raise SpecMismatch("rasters have different specs")
    codes = np.where(a.in_like & ~b.in_like, kernels.CODE_IN,
                     kernels.CODE_OUT).astype(np.uint8)
    digest = hashlib.sha256(
        json.dumps({"diff_of": [a.digest, b.digest]}).encode()).hexdigest()
    return Raster(spec=a.spec, codes=codes, digest=digest,
                  coefficient_set=None, meta={"diff_of": [a.digest, b.digest]})


@dataclass
class ComponentLabeling:
    labels: np.ndarray         # (h, w) int32, -1 outside
    n_components: int
    sizes: tuple


def components(raster):
    """4-connected components of the In-like mask."""
    mask = raster.in_like
    h, w = mask.shape
    labels = np.full((h, w), -1, dtype=np.int32)
    sizes = []
    for i in range(h):
        for j in range(w):
            if not mask[i, j] or labels[i, j] >= 0:
                continue
            lab = len(sizes)
            count = 0
            queue = deque([(i, j)])
            labels[i, j] = lab
            while queue:
                a, b = queue.popleft()
                count += 1
                if a > 0 and mask[a - 1, b] and labels[a - 1, b] < 0:
                    labels[a - 1, b] = lab
                    queue.append((a - 1, b))
                if a + 1 < h and mask[a + 1, b] and labels[a + 1, b] < 0:
                    labels[a + 1, b] = lab
                    queue.append((a + 1, b))
                if b > 0 and mask[a, b - 1] and labels[a, b - 1] < 0:
                    labels[a, b - 1] = lab
                    queue.append((a, b - 1))
                if b + 1 < w and mask[a, b + 1] and labels[a, b + 1] < 0:
                    labels[a, b + 1] = lab
                    queue.append((a, b + 1))
            sizes.append(count)
    return ComponentLabeling(labels=labels, n_components=len(sizes),
                             sizes=tuple(sizes))


# ---------------------------------------------------------------------------
# spike counting

# windows around each spike tip used by the presence test (calibrated on
# span-10 renders; see count_spikes)
TIP_RADIUS = 0.007


def spike_tips(max_coeff):
    """Deepest point of each spike: k = 0 at i/sqrt(M+1), k = 1 at the
    upper root of 1 - 2z + (M+1)z^2, k >= 2 at the upper root of
    1 - (k+1)z + (M+k)z^2."""
    m_abs = int(max_coeff)
    tips = []
    for band in spike_bands(m_abs):
        k = band.k
        if k == 0:
            tips.append((k, complex(0.0, 1.0 / math.sqrt(m_abs + 1.0))))
        else:
            c = m_abs + max(k, 1)
            re = (k + 1) / (2.0 * c)
            im = math.sqrt(4.0 * c - (k + 1) ** 2) / (2.0 * c)
            tips.append((k, complex(re, im)))
    return tips


def count_spikes(raster, max_coeff, tip_radius=TIP_RADIUS):
    """Number of spikes visible in the deep annulus of the raster.

    A spike counts as present when some In-like pixel lies within
    tip_radius of its tip point.  The raster must cover the tip
    neighbourhoods (the whole deep annulus quarter does) with pixel
    pitch at most tip_radius / 2.  The default radius separates a live
    tip (In-like pixels within a few pixel pitches) from a dead one
    (nearest surviving structure over 0.010 away for max_coeff 10) with
    about a factor-two margin on either side; for much larger max_coeff
    the tips crowd and the radius should be reduced accordingly.
    """
    return sum(1 for k, present in
               spike_presence(raster, max_coeff, tip_radius) if present)


def spike_presence(raster, max_coeff, tip_radius=TIP_RADIUS):
    """Per-spike presence flags behind count_spikes."""
    mask = raster.in_like
    xs = raster.spec.pixel_xs()
    ys = raster.spec.pixel_ys()
    xg = xs[None, :]
    yg = ys[:, None]
    out = []
    for k, tip in spike_tips(max_coeff):
        d2 = (xg - tip.real) ** 2 + (yg - tip.imag) ** 2
        near = d2 <= tip_radius * tip_radius
        out.append((k, bool((mask & near).any())))
    return out
