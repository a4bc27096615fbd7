import math

import numpy as np

HALF_LOG_3 = 0.5 * math.log(3.0)


def random_interior(rng, count, dimension=2, max_radius=0.9):
    v = rng.normal(size=(count, dimension))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * (max_radius * rng.random(count) ** (1.0 / dimension))[:, None]


def random_circle(rng, count):
    angles = rng.uniform(0.0, 2.0 * np.pi, size=count)
    return np.column_stack([np.cos(angles), np.sin(angles)])


def boost(length, axis=1):
    m = np.eye(3)
    m[0, 0] = m[axis, axis] = math.cosh(length)
    m[0, axis] = m[axis, 0] = math.sinh(length)
    return m


def rotation(angle):
    m = np.eye(3)
    m[1, 1] = m[2, 2] = math.cos(angle)
    m[1, 2] = -math.sin(angle)
    m[2, 1] = math.sin(angle)
    return m
