"""Shared sampling and oracle helpers for the test-suite."""

import random


def random_vertex(tree, rng, max_len):
    path = ()
    for _ in range(rng.randint(0, max_len)):
        path += (rng.choice(tree.children(path)),)
    return path


def random_word(rank, rng, max_len, min_len=0):
    letters = []
    target = rng.randint(min_len, max_len)
    while len(letters) < target:
        x = rng.choice([1, -1]) * rng.randint(1, rank)
        if letters and letters[-1] == -x:
            continue
        letters.append(x)
    return tuple(letters)


def stack_reduce(edges):
    out = []
    for e in edges:
        if out and out[-1] == e ^ 1:
            out.pop()
        else:
            out.append(e)
    return out


def naive_distance(v1, v2):
    """Length of the reduction of reverse(v1) . v2, by a stack."""
    back = [e ^ 1 for e in reversed(v1)]
    return len(stack_reduce(back + list(v2)))


def extend_ray(tree, prefix, length, rng=None):
    rng = rng or random.Random(0)
    ray = tuple(prefix)
    while len(ray) < length:
        ray += (rng.choice(tree.children(ray)),)
    return ray
