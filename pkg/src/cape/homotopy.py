"""Homotopy signatures for polyline paths among rectangular obstacles.

Each obstacle gets a vertical ray cast upward (toward -y, since +y points
down) from its center. Traversing a polyline, a left-to-right crossing of
ray m appends +m (+1-based index) and a right-to-left crossing appends -m.
The reduced word (no adjacent inverse pair) identifies the homotopy class
of the path among the obstacles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

from .errors import DegenerateRay
from .geometry import ObstacleMap, Point

_EPS = 1e-7
_MAX_PERTURB = 64


@dataclass(frozen=True)
class HomotopySignature:
    """Reduced word of signed 1-based obstacle indices."""

    word: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))

    def reversed(self) -> "HomotopySignature":
        return HomotopySignature(tuple(-t for t in reversed(self.word)))

    def to_json(self) -> list[int]:
        return list(self.word)

    @classmethod
    def from_json(cls, word) -> "HomotopySignature":
        return cls(tuple(int(t) for t in word))


def reduce_word(tokens: Sequence[int]) -> Tuple[int, ...]:
    stack: list[int] = []
    for t in tokens:
        if stack and stack[-1] == -t:
            stack.pop()
        else:
            stack.append(t)
    return tuple(stack)


def ray_anchors(obstacle_map: ObstacleMap) -> list[Point]:
    """Ray anchor (center) per obstacle, with x perturbed so no two rays share x.

    Raises DegenerateRay if the perturbation cannot separate them.
    """
    anchors: list[Point] = []
    used: set[float] = set()
    for obs in obstacle_map.obstacles:
        cx, cy = obs.rect.center
        x = cx
        attempts = 0
        while x in used:
            attempts += 1
            if attempts > _MAX_PERTURB:
                raise DegenerateRay(f"cannot separate ray x for obstacle {obs.name!r}")
            x = cx + attempts * _EPS * max(1.0, abs(cx))
        used.add(x)
        anchors.append((x, cy))
    return anchors


def segment_crossings(anchors: Sequence[Point], a: Point, b: Point) -> list[int]:
    """Signed crossing tokens of segment a->b against the rays, in segment order.

    Point-on-ray cases use a half-open convention (x <= ray_x counts as the
    left side), so touching a ray without crossing contributes a cancelling
    pair and never changes the word.
    """
    crossings: list[tuple[float, int]] = []
    for m, (rx, ry) in enumerate(anchors, start=1):
        left_a = a[0] <= rx
        left_b = b[0] <= rx
        if left_a == left_b:
            continue
        t = (rx - a[0]) / (b[0] - a[0])
        y_cross = a[1] + t * (b[1] - a[1])
        if y_cross < ry:  # above the center, i.e. on the upward ray
            crossings.append((t, m if left_a else -m))
    crossings.sort()
    return [sign for _, sign in crossings]


def h_signature(obstacle_map: ObstacleMap, polyline: Sequence[Point]) -> HomotopySignature:
    """Reduced crossing word of the polyline against all obstacle rays."""
    anchors = ray_anchors(obstacle_map)
    tokens: list[int] = []
    pts = list(polyline)
    for a, b in zip(pts, pts[1:]):
        tokens.extend(segment_crossings(anchors, a, b))
    return HomotopySignature(reduce_word(tokens))
