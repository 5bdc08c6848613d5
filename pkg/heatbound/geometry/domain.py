import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np
from shapely.geometry import Polygon

from ..errors import ConfigurationError
from .core import BoundarySample, ShapeKind
from .segment import ArcSegment, LineSegment, inward_normals, signed_curvature

logger = logging.getLogger(__name__)

Segment = Union[LineSegment, ArcSegment]

MIN_BOUNDARY_SAMPLES = 16

_SHAPE_PARAMETERS: Dict[ShapeKind, Tuple[str, ...]] = {
    ShapeKind.INTERVAL: ("a", "b"),
    ShapeKind.SQUARE: ("side",),
    ShapeKind.DISC: ("radius",),
    ShapeKind.ANNULUS: ("r_in", "r_out"),
    ShapeKind.L_SHAPE: ("arm", "thickness"),
    ShapeKind.HORSESHOE: ("r_in", "r_out", "opening_angle"),
}

_SHAPE_DEFAULTS: Dict[ShapeKind, Dict[str, float]] = {
    ShapeKind.INTERVAL: {"a": 0.0, "b": math.pi},
    ShapeKind.SQUARE: {"side": 2.0},
    ShapeKind.DISC: {"radius": 1.0},
    ShapeKind.ANNULUS: {"r_in": 1.0, "r_out": 2.0},
    ShapeKind.L_SHAPE: {"arm": 2.0, "thickness": 1.0},
    ShapeKind.HORSESHOE: {"r_in": 1.0, "r_out": 2.0, "opening_angle": math.pi / 6},
}


def _as_points(points, dimension: int) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if dimension == 1:
        return arr.reshape(-1, 1)
    return np.atleast_2d(arr).reshape(-1, 2)


@dataclass(frozen=True)
class Domain:
    kind: ShapeKind
    params: Tuple[Tuple[str, float], ...]
    dimension: int
    segments: Tuple[Segment, ...] = ()
    loops: Tuple[Tuple[int, ...], ...] = ()

    # -- catalog -----------------------------------------------------------

    @classmethod
    def interval(cls, a: float = 0.0, b: float = math.pi) -> "Domain":
        if not b > a:
            raise ConfigurationError("interval requires a < b.")
        return cls(ShapeKind.INTERVAL, (("a", float(a)), ("b", float(b))), 1)

    @classmethod
    def square(cls, side: float = 2.0) -> "Domain":
        if side <= 0:
            raise ConfigurationError("square side must be positive.")
        h = side / 2.0
        corners = [(-h, -h), (h, -h), (h, h), (-h, h)]
        return cls._polygon(ShapeKind.SQUARE, (("side", float(side)),), corners)

    @classmethod
    def disc(cls, radius: float = 1.0) -> "Domain":
        if radius <= 0:
            raise ConfigurationError("disc radius must be positive.")
        segments = (ArcSegment((0.0, 0.0), float(radius), 0.0, 2.0 * math.pi),)
        return cls(ShapeKind.DISC, (("radius", float(radius)),), 2, segments, ((0,),))

    @classmethod
    def annulus(cls, r_in: float = 1.0, r_out: float = 2.0) -> "Domain":
        if not 0 < r_in < r_out:
            raise ConfigurationError("annulus requires 0 < r_in < r_out.")
        segments = (
            ArcSegment((0.0, 0.0), float(r_out), 0.0, 2.0 * math.pi),
            ArcSegment((0.0, 0.0), float(r_in), 0.0, -2.0 * math.pi),
        )
        params = (("r_in", float(r_in)), ("r_out", float(r_out)))
        return cls(ShapeKind.ANNULUS, params, 2, segments, ((0,), (1,)))

    @classmethod
    def l_shape(cls, arm: float = 2.0, thickness: float = 1.0) -> "Domain":
        if arm <= 0 or thickness <= 0:
            raise ConfigurationError("l_shape arm and thickness must be positive.")
        a, t = float(arm), float(thickness)
        # reflex corner at the origin; the quadrant x < 0, y < 0 is cut away
        corners = [(-a, 0.0), (0.0, 0.0), (0.0, -a), (t, -a), (t, t), (-a, t)]
        params = (("arm", a), ("thickness", t))
        return cls._polygon(ShapeKind.L_SHAPE, params, corners)

    @classmethod
    def horseshoe(
        cls, r_in: float = 1.0, r_out: float = 2.0, opening_angle: float = math.pi / 6
    ) -> "Domain":
        if not 0 < r_in < r_out:
            raise ConfigurationError("horseshoe requires 0 < r_in < r_out.")
        if not opening_angle > 0:
            raise ConfigurationError("horseshoe opening_angle must be positive.")
        params = (
            ("r_in", float(r_in)),
            ("r_out", float(r_out)),
            ("opening_angle", float(opening_angle)),
        )
        r_mid, cap, theta_c = _horseshoe_layout(r_in, r_out, opening_angle)
        if theta_c >= math.pi:
            raise ConfigurationError("horseshoe opening_angle leaves no body.")
        lower = (r_mid * math.cos(theta_c), -r_mid * math.sin(theta_c))
        upper = (r_mid * math.cos(theta_c), r_mid * math.sin(theta_c))
        segments = (
            ArcSegment((0.0, 0.0), float(r_out), theta_c, 2.0 * math.pi - 2.0 * theta_c),
            ArcSegment(lower, cap, -theta_c, math.pi),
            ArcSegment((0.0, 0.0), float(r_in), -theta_c, -(2.0 * math.pi - 2.0 * theta_c)),
            ArcSegment(upper, cap, theta_c + math.pi, math.pi),
        )
        return cls(ShapeKind.HORSESHOE, params, 2, segments, ((0, 1, 2, 3),))

    @classmethod
    def _polygon(
        cls,
        kind: ShapeKind,
        params: Tuple[Tuple[str, float], ...],
        corners: Sequence[Tuple[float, float]],
    ) -> "Domain":
        segments = tuple(
            LineSegment(corners[i], corners[(i + 1) % len(corners)])
            for i in range(len(corners))
        )
        return cls(kind, params, 2, segments, (tuple(range(len(segments))),))

    @classmethod
    def from_dict(cls, payload: Mapping[str, object]) -> "Domain":
        if not isinstance(payload, Mapping) or "shape" not in payload:
            raise ConfigurationError("Domain spec must be an object with a 'shape'.")
        kind = ShapeKind.from_name(str(payload["shape"]))

        raw = payload.get("params") or {}
        if not isinstance(raw, Mapping):
            raise ConfigurationError("Domain 'params' must be an object.")
        expected = _SHAPE_PARAMETERS[kind]
        unknown = set(raw) - set(expected)
        if unknown:
            raise ConfigurationError(
                f"Unknown parameters for {kind.value}: {', '.join(sorted(unknown))}."
            )
        values = dict(_SHAPE_DEFAULTS[kind])
        for name, value in raw.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigurationError(f"Domain parameter '{name}' must be a number.")
            values[name] = float(value)

        builder = getattr(cls, kind.value)
        return builder(**values)

    def to_dict(self) -> Dict[str, object]:
        return {"shape": self.kind.value, "params": dict(self.params)}

    # -- properties --------------------------------------------------------

    def param(self, name: str) -> float:
        return dict(self.params)[name]

    @property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        p = dict(self.params)
        if self.kind is ShapeKind.INTERVAL:
            return np.array([p["a"]]), np.array([p["b"]])
        if self.kind is ShapeKind.SQUARE:
            h = p["side"] / 2.0
            return np.array([-h, -h]), np.array([h, h])
        if self.kind is ShapeKind.DISC:
            r = p["radius"]
            return np.array([-r, -r]), np.array([r, r])
        if self.kind is ShapeKind.L_SHAPE:
            return np.array([-p["arm"], -p["arm"]]), np.array([p["thickness"]] * 2)
        r = p["r_out"]
        return np.array([-r, -r]), np.array([r, r])

    @property
    def diameter(self) -> float:
        p = dict(self.params)
        if self.kind is ShapeKind.INTERVAL:
            return p["b"] - p["a"]
        if self.kind is ShapeKind.SQUARE:
            return p["side"] * math.sqrt(2.0)
        if self.kind is ShapeKind.DISC:
            return 2.0 * p["radius"]
        if self.kind is ShapeKind.L_SHAPE:
            span = p["arm"] + p["thickness"]
            return math.hypot(span, span)
        return 2.0 * p["r_out"]

    def polygon(self) -> Polygon:
        if not self.kind.polygonal:
            raise ConfigurationError(f"{self.kind.value} is not a polygonal domain.")
        return Polygon([segment.start for segment in self.segments])

    def segment_neighbors(self, index: int) -> Tuple[int, int]:
        for loop in self.loops:
            if index in loop:
                pos = loop.index(index)
                return loop[pos - 1], loop[(pos + 1) % len(loop)]
        raise IndexError(index)

    def segment_closed(self, index: int) -> bool:
        return len(self._loop_of(index)) == 1

    def _loop_of(self, index: int) -> Tuple[int, ...]:
        for loop in self.loops:
            if index in loop:
                return loop
        raise IndexError(index)

    def junction_kinks(self) -> List[float]:
        """Turning angle of the tangent at every segment junction."""
        kinks: List[float] = []
        for loop in self.loops:
            if len(loop) == 1:
                continue
            for pos, index in enumerate(loop):
                following = loop[(pos + 1) % len(loop)]
                t_out = self.segments[index].d1(1.0)[0]
                t_in = self.segments[following].d1(0.0)[0]
                cross = t_out[0] * t_in[1] - t_out[1] * t_in[0]
                dot = float(np.dot(t_out, t_in))
                kinks.append(abs(math.atan2(cross, dot)))
        return kinks

    # -- membership --------------------------------------------------------

    def contains(self, points, margin: float = 0.0) -> np.ndarray:
        """Strict membership of points at distance more than ``margin`` from the
        boundary. A negative margin tests a thickened closure."""
        pts = _as_points(points, self.dimension)
        p = dict(self.params)
        if self.kind is ShapeKind.INTERVAL:
            x = pts[:, 0]
            return (x > p["a"] + margin) & (x < p["b"] - margin)

        x, y = pts[:, 0], pts[:, 1]
        if self.kind is ShapeKind.SQUARE:
            h = p["side"] / 2.0 - margin
            return (np.abs(x) < h) & (np.abs(y) < h)
        if self.kind is ShapeKind.DISC:
            return np.hypot(x, y) < p["radius"] - margin
        if self.kind is ShapeKind.ANNULUS:
            rho = np.hypot(x, y)
            return (rho > p["r_in"] + margin) & (rho < p["r_out"] - margin)
        if self.kind is ShapeKind.L_SHAPE:
            a, t, m = p["arm"], p["thickness"], margin
            horizontal = (x > -a + m) & (x < t - m) & (y > m) & (y < t - m)
            vertical = (x > m) & (x < t - m) & (y > -a + m) & (y < t - m)
            return horizontal | vertical

        r_mid, cap, theta_c = _horseshoe_layout(p["r_in"], p["r_out"], p["opening_angle"])
        rho = np.hypot(x, y)
        theta = np.abs(np.arctan2(y, x))
        body = (rho > p["r_in"] + margin) & (rho < p["r_out"] - margin) & (theta > theta_c)
        cx, cy = r_mid * math.cos(theta_c), r_mid * math.sin(theta_c)
        upper = np.hypot(x - cx, y - cy) < cap - margin
        lower = np.hypot(x - cx, y + cy) < cap - margin
        return body | upper | lower

    def segment_inside(self, start, end, step: float, margin: float = -1e-9) -> bool:
        """True when the straight segment start→end stays in the closure, tested
        every ``step``."""
        start = np.asarray(start, dtype=float).reshape(-1)
        end = np.asarray(end, dtype=float).reshape(-1)
        count = max(2, int(math.ceil(np.linalg.norm(end - start) / step)) + 1)
        s = np.linspace(0.0, 1.0, count)[:, None]
        return bool(np.all(self.contains(start + s * (end - start), margin=margin)))


def _horseshoe_layout(r_in: float, r_out: float, opening_angle: float) -> Tuple[float, float, float]:
    # caps are tangent to the rays at +-opening/2, so the wedge |theta| < opening/2 stays empty
    r_mid = 0.5 * (r_in + r_out)
    cap = 0.5 * (r_out - r_in)
    theta_c = 0.5 * opening_angle + math.asin(cap / r_mid)
    return r_mid, cap, theta_c


def horseshoe_layout(domain: Domain) -> Tuple[float, float, float]:
    if domain.kind is not ShapeKind.HORSESHOE:
        raise ConfigurationError("horseshoe_layout requires a horseshoe domain.")
    p = dict(domain.params)
    return _horseshoe_layout(p["r_in"], p["r_out"], p["opening_angle"])


def horseshoe_tips(domain: Domain, inset: float) -> Tuple[np.ndarray, np.ndarray]:
    """Points on the two cap axes, ``inset`` inside the cap extremities."""
    r_mid, cap, theta_c = horseshoe_layout(domain)
    upper_center = r_mid * np.array([math.cos(theta_c), math.sin(theta_c)])
    lower_center = r_mid * np.array([math.cos(theta_c), -math.sin(theta_c)])
    toward_gap_upper = np.array([math.sin(theta_c), -math.cos(theta_c)])
    toward_gap_lower = np.array([math.sin(theta_c), math.cos(theta_c)])
    reach_out = cap - inset
    return upper_center + reach_out * toward_gap_upper, lower_center + reach_out * toward_gap_lower


def inside(domain: Domain, p) -> bool:
    pts = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(pts)):
        raise ConfigurationError("inside() requires a finite point.")
    return bool(domain.contains(pts)[0])


@dataclass(frozen=True)
class BoundarySampling:
    points: np.ndarray
    normals: np.ndarray
    segments: np.ndarray
    params: np.ndarray
    curvature: np.ndarray

    def __len__(self) -> int:
        return len(self.points)

    def samples(self) -> List[BoundarySample]:
        return [
            BoundarySample(
                point=self.points[i],
                normal=self.normals[i],
                arc_param=(int(self.segments[i]), float(self.params[i])),
                curvature=float(self.curvature[i]),
            )
            for i in range(len(self.points))
        ]


def sample_boundary_arrays(domain: Domain, count: int) -> BoundarySampling:
    if domain.dimension == 1:
        a, b = domain.param("a"), domain.param("b")
        return BoundarySampling(
            points=np.array([[a], [b]]),
            normals=np.array([[1.0], [-1.0]]),
            segments=np.array([0, 1]),
            params=np.zeros(2),
            curvature=np.zeros(2),
        )

    if count < MIN_BOUNDARY_SAMPLES:
        raise ConfigurationError(
            f"boundary_sample requires count >= {MIN_BOUNDARY_SAMPLES}."
        )

    lengths = np.array([segment.length for segment in domain.segments])
    offsets = np.concatenate(([0.0], np.cumsum(lengths)))
    arc = np.arange(count) * (offsets[-1] / count)
    owner = np.clip(np.searchsorted(offsets, arc, side="right") - 1, 0, len(lengths) - 1)
    local = np.clip((arc - offsets[owner]) / lengths[owner], 0.0, 1.0)

    points = np.empty((count, 2))
    normals = np.empty((count, 2))
    curvature = np.empty(count)
    for index, segment in enumerate(domain.segments):
        mask = owner == index
        if not np.any(mask):
            continue
        s = local[mask]
        d1 = segment.d1(s)
        points[mask] = segment.point(s)
        normals[mask] = inward_normals(d1)
        curvature[mask] = signed_curvature(d1, segment.d2(s))

    return BoundarySampling(points, normals, owner, local, curvature)


def boundary_sample(domain: Domain, count: int) -> List[BoundarySample]:
    return sample_boundary_arrays(domain, count).samples()


def catalog() -> List[Tuple[str, Dict[str, float]]]:
    return [(kind.value, dict(_SHAPE_DEFAULTS[kind])) for kind in ShapeKind]
