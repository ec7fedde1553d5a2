"""Deterministic raster rendering of scenes.

Obstacles are brown, unreachable regions grey, candidate paths get indexed
colors, predicted paths are dashed cyan, and agents are filled circles.
No text is drawn (fonts vary across hosts and would break byte-for-byte
reproducibility); labels travel in the JSON payloads instead.
"""

from __future__ import annotations

import io
import math
from typing import Dict, Optional, Sequence, Tuple

from PIL import Image, ImageDraw

from .geometry import AgentBody, ObstacleMap, Pose, TimedPath
from .planner import CandidateSet

BACKGROUND = (255, 255, 255)
OBSTACLE = (139, 94, 60)
UNREACHABLE = (160, 160, 160)
CANDIDATE_COLORS = ((220, 60, 60), (60, 140, 60), (60, 60, 220), (200, 160, 40))
PREDICTED = (0, 180, 200)
AGENT_COLORS = ((230, 120, 30), (30, 170, 200), (150, 60, 200), (90, 90, 90))
DASH = 8.0


def _dashed_line(draw: ImageDraw.ImageDraw, a, b, color, width=2):
    length = math.dist(a, b)
    if length <= 1e-9:
        return
    n = max(1, int(length / DASH))
    for i in range(0, n, 2):
        t0, t1 = i / n, min((i + 1) / n, 1.0)
        p = (a[0] + t0 * (b[0] - a[0]), a[1] + t0 * (b[1] - a[1]))
        q = (a[0] + t1 * (b[0] - a[0]), a[1] + t1 * (b[1] - a[1]))
        draw.line([p, q], fill=color, width=width)


def render_scene(
    obstacle_map: ObstacleMap,
    candidates: Optional[CandidateSet] = None,
    predicted_others: Optional[Dict[str, TimedPath]] = None,
    agent_poses: Optional[Dict[str, Pose]] = None,
    bodies: Optional[Dict[str, AgentBody]] = None,
    scale: float = 1.0,
) -> bytes:
    """PNG bytes of the scene; identical inputs yield identical bytes."""
    size = (max(1, round(obstacle_map.width * scale)),
            max(1, round(obstacle_map.height * scale)))
    img = Image.new("RGB", size, BACKGROUND)
    draw = ImageDraw.Draw(img)

    def pt(p) -> Tuple[float, float]:
        return (p[0] * scale, p[1] * scale)

    for r in obstacle_map.unreachable:
        draw.rectangle([pt((r.x, r.y)), pt((r.x + r.w, r.y + r.h))], fill=UNREACHABLE)
    for o in obstacle_map.obstacles:
        r = o.rect
        draw.rectangle([pt((r.x, r.y)), pt((r.x + r.w, r.y + r.h))], fill=OBSTACLE)

    if candidates is not None:
        for i, cand in enumerate(candidates.candidates):
            color = CANDIDATE_COLORS[i % len(CANDIDATE_COLORS)]
            pts = [pt(p) for p in cand.path.points()]
            if len(pts) > 1:
                draw.line(pts, fill=color, width=2)
    for path in (predicted_others or {}).values():
        pts = [pt(p) for p in path.points()]
        for a, b in zip(pts, pts[1:]):
            _dashed_line(draw, a, b, PREDICTED)

    for i, (agent_id, pose) in enumerate(sorted((agent_poses or {}).items())):
        color = AGENT_COLORS[i % len(AGENT_COLORS)]
        radius = (bodies or {}).get(agent_id, AgentBody()).radius * scale
        radius = max(radius, 2.0)
        c = pt(pose.point)
        draw.ellipse([c[0] - radius, c[1] - radius, c[0] + radius, c[1] + radius], fill=color)
        h = pose.heading_vector()
        draw.line([c, (c[0] + 2 * radius * h[0], c[1] + 2 * radius * h[1])], fill=color, width=2)

    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()
