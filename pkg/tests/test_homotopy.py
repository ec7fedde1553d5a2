import itertools

import pytest

from cape.errors import DegenerateRay
from cape.geometry import Obstacle, ObstacleMap, Rect
from cape.homotopy import HomotopySignature, h_signature, reduce_word

from .grid_oracle import GridWorld, deformable, enumerate_distinct_paths

EMPTY = ObstacleMap(100, 100)
ONE = ObstacleMap(100, 100, obstacles=(Obstacle("box", Rect(40, 40, 20, 20)),))


def test_empty_map_any_path_empty_word():
    sig = h_signature(EMPTY, [(10, 10), (60, 30), (90, 90)])
    assert sig.word == ()


def test_one_obstacle_left_right_dichotomy():
    above = h_signature(ONE, [(10, 50), (50, 10), (90, 50)])
    below = h_signature(ONE, [(10, 50), (50, 90), (90, 50)])
    assert above.word != below.word
    assert above.word == (1,)
    assert below.word == ()


def test_reduce_word_cancels_adjacent_inverses():
    assert reduce_word([1, -1]) == ()
    assert reduce_word([1, 2, -2, -1]) == ()
    assert reduce_word([1, 2, -1]) == (1, 2, -1)
    assert reduce_word([2, 1, -1, -2, 3]) == (3,)


def test_midpoint_insertion_preserves_signature():
    pts = [(10.0, 50.0), (50.0, 10.0), (90.0, 50.0)]
    sig = h_signature(ONE, pts)
    refined = []
    for a, b in zip(pts, pts[1:]):
        refined.append(a)
        refined.append(((a[0] + b[0]) / 2, (a[1] + b[1]) / 2))
    refined.append(pts[-1])
    assert h_signature(ONE, refined) == sig


def test_reversal_inverts_and_reverses_word():
    m = ObstacleMap(100, 100, obstacles=(
        Obstacle("a", Rect(20, 40, 10, 20)), Obstacle("b", Rect(60, 40, 10, 20)),
    ))
    pts = [(5, 50), (25, 20), (45, 80), (65, 20), (95, 50)]
    fwd = h_signature(m, pts)
    rev = h_signature(m, list(reversed(pts)))
    assert rev == fwd.reversed()
    assert fwd.word != ()


def test_touching_ray_without_crossing_is_no_op():
    # Path touches the ray x-coordinate and returns to the same side.
    cx = 40 + 10  # obstacle center x of ONE
    pts = [(10, 20), (cx, 20), (10, 10), (10, 5)]
    assert h_signature(ONE, pts).word == ()


def test_aligned_obstacle_centers_are_perturbed():
    m = ObstacleMap(100, 100, obstacles=(
        Obstacle("a", Rect(45, 10, 10, 10)), Obstacle("b", Rect(45, 60, 10, 10)),
    ))
    # Path crossing both rays; perturbation must keep both crossings observable.
    sig = h_signature(m, [(10, 5), (90, 5)])
    assert sorted(abs(t) for t in sig.word) == [1, 2]


GRID_CASES = [
    # (width, height, blocks, start, goal)
    (9, 9, [(4, 4, 1, 1)], (0, 4), (8, 4)),
    (10, 8, [(3, 3, 2, 2)], (0, 0), (9, 7)),
    (10, 10, [(2, 4, 2, 2), (6, 4, 2, 2)], (0, 5), (9, 5)),
    (11, 9, [(3, 2, 1, 3), (7, 5, 1, 3)], (0, 4), (10, 4)),
    (9, 11, [(4, 2, 1, 2), (4, 7, 1, 2)], (0, 5), (8, 5)),
    (12, 8, [(3, 3, 2, 1), (8, 4, 2, 1)], (0, 3), (11, 3)),
    (10, 10, [(4, 1, 2, 3), (4, 6, 2, 3)], (0, 5), (9, 5)),
    (10, 10, [(2, 2, 2, 2), (6, 6, 2, 2)], (0, 9), (9, 0)),
    (11, 11, [(2, 5, 2, 1), (5, 2, 1, 2), (7, 7, 2, 2)], (0, 0), (10, 10)),
    (9, 9, [(2, 2, 1, 1), (4, 4, 1, 1), (6, 6, 1, 1)], (0, 8), (8, 0)),
    (10, 9, [(4, 0, 1, 4), (4, 5, 1, 4)], (0, 4), (9, 4)),
    (12, 10, [(5, 2, 2, 2), (5, 6, 2, 2)], (0, 5), (11, 4)),
    (8, 12, [(3, 4, 2, 1), (3, 8, 2, 1)], (4, 0), (4, 11)),
    (10, 10, [(1, 1, 3, 3)], (0, 9), (9, 0)),
    (10, 10, [(6, 6, 3, 3)], (0, 9), (9, 0)),
    (11, 8, [(3, 3, 1, 1), (7, 3, 1, 1)], (0, 3), (10, 3)),
    (9, 10, [(4, 3, 1, 4)], (0, 5), (8, 5)),
    (12, 9, [(2, 4, 2, 1), (6, 4, 2, 1), (9, 1, 1, 2)], (0, 4), (11, 4)),
    (10, 11, [(4, 4, 2, 3)], (0, 0), (9, 10)),
    (11, 10, [(5, 1, 1, 3), (5, 6, 1, 3)], (0, 5), (10, 5)),
]


@pytest.mark.parametrize("case", GRID_CASES, ids=[f"grid{i}" for i in range(len(GRID_CASES))])
def test_signature_equality_matches_grid_deformability(case):
    width, height, blocks, start, goal = case
    world = GridWorld(width, height, blocks)
    omap = world.to_obstacle_map()
    paths = enumerate_distinct_paths(world, start, goal, seed=hash(tuple(map(tuple, blocks))) & 0xFFFF, count=5)
    assert len(paths) >= 2, "case produced too few paths to compare"
    sigs = [h_signature(omap, GridWorld.cells_to_polyline(p)) for p in paths]
    for (i, p), (j, q) in itertools.combinations(enumerate(paths), 2):
        same_class = deformable(world, p, q)
        assert (sigs[i] == sigs[j]) == same_class, (
            f"signature/oracle disagreement on paths {i},{j}: "
            f"{sigs[i].word} vs {sigs[j].word}, deformable={same_class}"
        )
