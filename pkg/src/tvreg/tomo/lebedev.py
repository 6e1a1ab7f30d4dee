"""Lebedev quadrature points used as projection directions.

Rules are generated from octahedral orbit generators. Every rule is symmetric
under x -> -x, and a parallel-beam projection along d coincides with the one
along -d, so a rule with 2n points yields n projection directions.
"""

import itertools
import math

import numpy as np

# Orbit generators: (kind, parameter, weight)
#   "a1"  (1, 0, 0)                       6 points
#   "a2"  (0, 1/sqrt2, 1/sqrt2)          12 points
#   "a3"  (1/sqrt3, 1/sqrt3, 1/sqrt3)     8 points
#   "aab" (a, a, sqrt(1 - 2a^2))         24 points
#   "ab0" (a, sqrt(1 - a^2), 0)          24 points
LEBEDEV_RULES: dict[int, list[tuple[str, float, float]]] = {
    26: [
        ("a1", 0.0, 0.4761904761904762e-1),
        ("a2", 0.0, 0.3809523809523810e-1),
        ("a3", 0.0, 0.3214285714285714e-1),
    ],
    74: [
        ("a1", 0.0, 0.5130671797338464e-3),
        ("a2", 0.0, 0.1660406956574204e-1),
        ("a3", 0.0, -0.2958603896103896e-1),
        ("aab", 0.4803844614152614e0, 0.2657620708215946e-1),
        ("ab0", 0.3207726489807764e0, 0.1652217099371571e-1),
    ],
}

SUPPORTED_PROJECTIONS = tuple(sorted(n // 2 for n in LEBEDEV_RULES))


def _generator(kind: str, a: float) -> tuple[float, float, float]:
    if kind == "a1":
        return (1.0, 0.0, 0.0)
    if kind == "a2":
        s = math.sqrt(0.5)
        return (0.0, s, s)
    if kind == "a3":
        s = math.sqrt(1.0 / 3.0)
        return (s, s, s)
    if kind == "aab":
        return (a, a, math.sqrt(1.0 - 2.0 * a * a))
    if kind == "ab0":
        return (a, math.sqrt(1.0 - a * a), 0.0)
    raise ValueError(f"unknown orbit kind {kind!r}")


def _orbit(kind: str, a: float) -> np.ndarray:
    """All distinct points obtained by permuting and sign-flipping the generator."""
    base = _generator(kind, a)
    points: dict[tuple[float, ...], None] = {}
    for perm in itertools.permutations(base):
        for signs in itertools.product((1.0, -1.0), repeat=3):
            point = tuple(s * c + 0.0 for s, c in zip(signs, perm))
            points.setdefault(point, None)
    # Descending lexicographic order keeps the enumeration independent of set iteration
    return np.array(sorted(points, reverse=True), dtype=np.float64)


def lebedev_rule(n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Points and weights of an embedded Lebedev rule.

    Args:
        n_points: Rule size (26 or 74)

    Returns:
        (points of shape (n_points, 3), weights of shape (n_points,))
    """
    if n_points not in LEBEDEV_RULES:
        raise ValueError(f"unsupported Lebedev rule {n_points}; available: {sorted(LEBEDEV_RULES)}")
    points = []
    weights = []
    for kind, a, w in LEBEDEV_RULES[n_points]:
        orbit = _orbit(kind, a)
        points.append(orbit)
        weights.append(np.full(len(orbit), w))
    return np.vstack(points), np.concatenate(weights)


def _is_canonical(v: np.ndarray) -> bool:
    """First nonzero coordinate positive (picks one point of each antipodal pair)."""
    for c in v:
        if c != 0.0:
            return bool(c > 0.0)
    return False


def lebedev_directions(n_proj: int) -> np.ndarray:
    """
    Antipodally unique projection directions.

    Args:
        n_proj: Number of directions; one of 13 (26-point rule) or 37 (74-point rule)

    Returns:
        Array of shape (n_proj, 3) of unit vectors, one per antipodal pair
    """
    if n_proj not in SUPPORTED_PROJECTIONS:
        raise ValueError(
            f"unsupported number of projections {n_proj}; supported: {list(SUPPORTED_PROJECTIONS)}"
        )
    points, _ = lebedev_rule(2 * n_proj)
    directions = np.array([p for p in points if _is_canonical(p)])
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return directions
