"""Shared curve builders for the test suite."""

import numpy as np

from shapeopt import DiscreteCurve


def circle(n=100, radius=1.0, center=(0.0, 0.0)):
    theta = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    nodes = np.column_stack([center[0] + radius * np.cos(theta),
                             center[1] + radius * np.sin(theta)])
    return DiscreteCurve(nodes, params=theta)


def figure_eight(n=16):
    """Self-intersecting node polygon (never a valid DiscreteCurve)."""
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False) + 0.1
    return np.column_stack([np.sin(2.0 * t), np.sin(t)])
